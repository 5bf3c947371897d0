use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcorr_core::bounds::BoundKind;
use qcorr_core::harness::{
    self, verify::EXACT_SLACK, verify::ROOF_SLACK, Axis, FigureJob, MeasureName, PointParams, QChoice, Suite,
    SweepSpec, Variant,
};
use qcorr_core::measures::RoofConfig;
use qcorr_core::states::AnyState;
use qcorr_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Entanglement measures and monogamy/polygamy bound checks")]
struct Cli {
    /// Seed for Haar sampling and roof-optimizer restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Restarts per convex-roof optimization.
    #[arg(long, global = true, default_value_t = 32)]
    roof_restarts: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateArgs {
    /// JSON state file.
    #[arg(long)]
    state: Option<PathBuf>,
    /// `schmidt:l0,l1,l2,l3,l4,phi` or `wclass:c1,c2,c3`.
    #[arg(long)]
    builder: Option<String>,
}

impl StateArgs {
    fn load(&self) -> Result<AnyState> {
        match (&self.state, &self.builder) {
            (Some(path), _) => harness::load_state(path),
            (_, Some(spec)) => Ok(AnyState::Pure(harness::parse_builder(spec)?)),
            _ => unreachable!("clap enforces one state source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Monogamy,
    Polygamy,
}

impl From<Kind> for BoundKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Monogamy => BoundKind::Monogamy,
            Kind::Polygamy => BoundKind::Polygamy,
        }
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Comma-separated: thm1 or thm4, ref16, ref28, ref29.
    #[arg(long)]
    variants: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// `low` (data lower edge), `top` (1 + 1/t) or a number.
    #[arg(long, default_value = "low")]
    q: QChoice,
    /// ref29 parameter; defaults to t.
    #[arg(long)]
    a: Option<f64>,
    /// ref16/ref28 parameter; defaults to t.
    #[arg(long)]
    k: Option<f64>,
    /// ref28 parameter.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

impl BoundArgs {
    fn kind(&self) -> BoundKind {
        self.kind.into()
    }

    fn variants(&self) -> Result<Vec<Variant>> {
        match (&self.variants, self.kind()) {
            (Some(v), _) => Variant::parse_list(v),
            (None, BoundKind::Monogamy) => Ok(vec![Variant::Thm1, Variant::Ref29]),
            (None, BoundKind::Polygamy) => Ok(vec![Variant::Thm4, Variant::Ref29]),
        }
    }

    fn point(&self) -> PointParams {
        let (power, base) = match self.kind() {
            BoundKind::Monogamy => (self.alpha, self.gamma),
            BoundKind::Polygamy => (self.beta, self.delta),
        };
        PointParams {
            power,
            base,
            t: self.t,
            q: self.q,
            a: self.a,
            k: self.k,
            p: self.p,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one correlation measure across a split such as A|BC.
    Measure {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        measure: MeasureName,
        #[arg(long, default_value = "A|BC")]
        split: String,
    },
    /// Evaluate bound variants on a three-qubit pure state.
    Bound {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        params: BoundArgs,
    },
    /// Write the CSV data behind one of the comparison figures (1-6).
    Figure {
        id: u8,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
    },
    /// Run a randomized audit suite.
    Verify {
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Evaluate bounds over a one- or two-axis parameter grid.
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        params: BoundArgs,
        /// `name=start:stop:steps`, name one of alpha, gamma, beta, delta, t, q.
        #[arg(long = "axis", required = true)]
        axes: Vec<Axis>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = RoofConfig {
        restarts: cli.roof_restarts,
        seed: cli.seed,
        ..RoofConfig::default()
    };
    match cli.command {
        Command::Measure { state, measure, split } => {
            let rec = harness::measure(&state.load()?, measure, &split, &cfg)?;
            emit(&cli.out, &(serde_json::to_string_pretty(&rec)? + "\n"))?;
            Ok(true)
        }
        Command::Bound { state, params } => {
            let rec = harness::bound(&state.load()?, params.kind(), &params.variants()?, &params.point(), &cfg)?;
            emit(&cli.out, &(serde_json::to_string_pretty(&rec)? + "\n"))?;
            let slack = match rec.kind {
                BoundKind::Monogamy => EXACT_SLACK,
                BoundKind::Polygamy => ROOF_SLACK,
            };
            Ok(rec.violations(slack).is_empty())
        }
        Command::Figure { id, resolution } => {
            let job = FigureJob { id, resolution }.validated()?;
            emit(&cli.out, &harness::figure_csv(&job, &cfg)?)?;
            Ok(true)
        }
        Command::Verify { suite, trials } => {
            let trials = trials.unwrap_or(suite.default_trials());
            let report = harness::verify(suite, trials, cli.seed, &cfg)?;
            emit(&cli.out, &report.to_text())?;
            Ok(report.passed())
        }
        Command::Sweep { state, params, axes } => {
            let spec = SweepSpec {
                kind: params.kind(),
                axes,
                fixed: params.point(),
                variants: params.variants()?,
            };
            emit(&cli.out, &harness::sweep_csv(&spec, &state.load()?, &cfg)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
