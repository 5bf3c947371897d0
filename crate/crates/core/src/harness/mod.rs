//! Batch front end: state input, measure evaluation, bound reports, sweeps,
//! figure data and randomized audits. Everything here returns strings or
//! serializable records; the binary only routes them to files and exit codes.

pub mod figure;
pub mod measure;
pub mod sweep;
pub mod verify;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{
    prior_monogamy_bound, prior_polygamy_bound, q_lower_edge, q_upper_edge, thm1_lower_bound,
    thm4_upper_bound, BoundKind, BoundReport, MonogamyParams, PolygamyParams, PriorBound,
};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_pure, concurrence_wootters, crenoa, negativity_pure, Bipartition, RoofConfig, RoofResult,
};
use crate::states::{
    generalized_schmidt_state, parse_state_json, reduce_pair_pure, w_class_state, AnyState, PureState,
    SchmidtParams,
};

pub use figure::{figure_csv, FigureJob};
pub use measure::{measure, MeasureName, MeasureRecord};
pub use sweep::{sweep_csv, Axis, SweepSpec};
pub use verify::{verify, Suite, VerifyReport};

/// Shortest decimal that round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {v:?}")))
        })
        .collect()
}

/// `schmidt:λ0,λ1,λ2,λ3,λ4,φ` or `wclass:c1,c2,c3`.
pub fn parse_builder(spec: &str) -> Result<PureState> {
    let (name, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("builder {spec:?} has no ':'")))?;
    let vals = parse_floats(args)?;
    match (name, vals.as_slice()) {
        ("schmidt", &[l0, l1, l2, l3, l4, phi]) => {
            generalized_schmidt_state(&SchmidtParams::new([l0, l1, l2, l3, l4], phi)?)
        }
        ("wclass", &[c1, c2, c3]) => w_class_state(c1, c2, c3),
        ("schmidt", _) => Err(Error::Parse("schmidt takes 6 values: l0,l1,l2,l3,l4,phi".into())),
        ("wclass", _) => Err(Error::Parse("wclass takes 3 values: c1,c2,c3".into())),
        _ => Err(Error::Parse(format!("unknown builder {name:?}"))),
    }
}

pub fn load_state(path: &Path) -> Result<AnyState> {
    parse_state_json(&std::fs::read_to_string(path)?)
}

/// A split like `A|BC`: letters name subsystems (A = 0). Parties missing
/// from both sides are traced out first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    /// Subsystems kept, ascending.
    pub keep: Vec<usize>,
    /// Left side as positions within `keep`.
    pub block: Vec<usize>,
}

impl SplitSpec {
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let (left, right) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("split {s:?} needs a '|'")))?;
        let index = |c: char| -> Result<usize> {
            let i = (c as u32).wrapping_sub('A' as u32) as usize;
            if !c.is_ascii_uppercase() || i >= n {
                return Err(Error::Parse(format!("party {c:?} not in A..{}", (b'A' + n as u8 - 1) as char)));
            }
            Ok(i)
        };
        let left: Vec<usize> = left.chars().map(index).collect::<Result<_>>()?;
        let right: Vec<usize> = right.chars().map(index).collect::<Result<_>>()?;
        if left.is_empty() || right.is_empty() {
            return Err(Error::Parse(format!("split {s:?} has an empty side")));
        }
        let mut keep: Vec<usize> = left.iter().chain(&right).copied().collect();
        keep.sort_unstable();
        if keep.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("split {s:?} repeats a party")));
        }
        let mut block: Vec<usize> = left
            .iter()
            .map(|l| keep.iter().position(|k| k == l).unwrap())
            .collect();
        block.sort_unstable();
        Ok(Self { keep, block })
    }

    pub fn bipartition(&self) -> Bipartition {
        Bipartition::new(self.block.clone())
    }
}

/// Optimizer diagnostics attached to roof-based values.
#[derive(Debug, Clone, Serialize)]
pub struct RoofDiagnostics {
    pub direction: &'static str,
    /// Which side of the true roof the reported value lies on.
    pub bound_side: &'static str,
    pub restarts_used: usize,
    pub converged: bool,
    pub ensemble_size: usize,
    pub eigen_ensemble_value: f64,
}

impl From<&RoofResult> for RoofDiagnostics {
    fn from(r: &RoofResult) -> Self {
        Self {
            direction: match r.direction {
                crate::measures::RoofDirection::Min => "min",
                crate::measures::RoofDirection::Max => "max",
            },
            bound_side: r.bound_side(),
            restarts_used: r.restarts_used,
            converged: r.converged,
            ensemble_size: r.ensemble.members.len(),
            eigen_ensemble_value: r.eigen_ensemble_value,
        }
    }
}

/// Q_{A|BC}, Q_AB and Q_AC for a three-qubit pure state.
///
/// Monogamy uses the concurrence (Wootters for the pairs). Polygamy uses the
/// squared negativity of assistance, whose pair values come from the max-roof
/// optimizer and are therefore lower estimates.
#[derive(Debug, Clone, Serialize)]
pub struct TripartiteData {
    pub kind: BoundKind,
    pub measure: &'static str,
    pub whole: f64,
    pub ab: f64,
    pub ac: f64,
    pub roof: Vec<RoofDiagnostics>,
}

pub fn tripartite_data(state: &AnyState, kind: BoundKind, cfg: &RoofConfig) -> Result<TripartiteData> {
    let psi = match state {
        AnyState::Pure(p) if p.n_qubits() == Some(3) => p,
        _ => {
            return Err(Error::Unsupported(
                "bounds are evaluated on three-qubit pure states".into(),
            ))
        }
    };
    let a_bc = Bipartition::new(vec![0]);
    let (ab_rho, ac_rho) = (reduce_pair_pure(psi, 1)?, reduce_pair_pure(psi, 2)?);
    match kind {
        BoundKind::Monogamy => Ok(TripartiteData {
            kind,
            measure: "concurrence",
            whole: concurrence_pure(psi, &a_bc)?,
            ab: concurrence_wootters(&ab_rho)?,
            ac: concurrence_wootters(&ac_rho)?,
            roof: Vec::new(),
        }),
        BoundKind::Polygamy => {
            let rab = crenoa(&ab_rho, cfg)?;
            let rac = crenoa(&ac_rho, cfg)?;
            Ok(TripartiteData {
                kind,
                measure: "screnoa",
                whole: negativity_pure(psi, &a_bc)?.powi(2),
                ab: rab.value.powi(2),
                ac: rac.value.powi(2),
                roof: vec![(&rab).into(), (&rac).into()],
            })
        }
    }
}

/// How q is chosen at each evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QChoice {
    /// 1 + Q_AB^γ / Q_AC^γ from the data.
    Low,
    /// 1 + 1/t.
    Top,
    Value(f64),
}

impl FromStr for QChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(QChoice::Low),
            "top" => Ok(QChoice::Top),
            _ => s
                .parse()
                .map(QChoice::Value)
                .map_err(|_| Error::Parse(format!("q must be low, top or a number, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Thm1,
    Thm4,
    Ref16,
    Ref28,
    Ref29,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Thm1 => "thm1",
            Variant::Thm4 => "thm4",
            Variant::Ref16 => "ref16",
            Variant::Ref28 => "ref28",
            Variant::Ref29 => "ref29",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Variant>> {
        s.split(',').map(|v| v.trim().parse()).collect()
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1" => Ok(Variant::Thm1),
            "thm4" => Ok(Variant::Thm4),
            "ref16" => Ok(Variant::Ref16),
            "ref28" => Ok(Variant::Ref28),
            "ref29" => Ok(Variant::Ref29),
            _ => Err(Error::Parse(format!("unknown bound variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters at one evaluation point. `power`/`base` are α/γ for monogamy
/// and β/δ for polygamy; a and k default to t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointParams {
    pub power: f64,
    pub base: f64,
    pub t: f64,
    pub q: QChoice,
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub p: f64,
}

impl PointParams {
    pub fn resolve_q(&self, ab: f64, ac: f64) -> f64 {
        match self.q {
            QChoice::Low => q_lower_edge(ab, ac, self.base),
            QChoice::Top => q_upper_edge(self.t),
            QChoice::Value(q) => q,
        }
    }
}

pub fn check_variants(kind: BoundKind, variants: &[Variant]) -> Result<()> {
    for v in variants {
        match (kind, v) {
            (BoundKind::Monogamy, Variant::Thm4) | (BoundKind::Polygamy, Variant::Thm1) => {
                return Err(Error::Unsupported(format!("variant {v} does not apply to {kind} bounds")))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Bound value of one variant; precondition failures come back as
/// `Error::Precondition`.
pub fn evaluate_variant(kind: BoundKind, variant: Variant, ab: f64, ac: f64, pp: &PointParams) -> Result<f64> {
    let prior = |v: PriorBound| match kind {
        BoundKind::Monogamy => prior_monogamy_bound(v, ab, ac, pp.power, pp.base),
        BoundKind::Polygamy => prior_polygamy_bound(v, ab, ac, pp.power, pp.base),
    };
    match variant {
        Variant::Thm1 => {
            let p = MonogamyParams {
                alpha: pp.power,
                gamma: pp.base,
                t: pp.t,
                q: pp.resolve_q(ab, ac),
            };
            thm1_lower_bound(ab, ac, &p)
        }
        Variant::Thm4 => {
            let p = PolygamyParams {
                beta: pp.power,
                delta: pp.base,
                t: pp.t,
                q: pp.resolve_q(ab, ac),
            };
            thm4_upper_bound(ab, ac, &p)
        }
        Variant::Ref16 => prior(PriorBound::Ref16 { k: pp.k.unwrap_or(pp.t) }),
        Variant::Ref28 => prior(PriorBound::Ref28 {
            k: pp.k.unwrap_or(pp.t),
            p: pp.p,
        }),
        Variant::Ref29 => prior(PriorBound::Ref29 { a: pp.a.unwrap_or(pp.t) }),
    }
}

/// BoundReport for the data at one parameter point; the LHS is Q_{A|BC}^power.
pub fn bound_report(data: &TripartiteData, variants: &[Variant], pp: &PointParams) -> Result<BoundReport> {
    check_variants(data.kind, variants)?;
    let lhs = crate::bounds::pow0(data.whole, pp.power);
    let mut report = BoundReport::new(data.kind, lhs);
    for &v in variants {
        report.record(v.name(), evaluate_variant(data.kind, v, data.ab, data.ac, pp))?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub kind: BoundKind,
    pub measure: &'static str,
    pub seed: u64,
    pub whole: f64,
    pub ab: f64,
    pub ac: f64,
    pub params: PointParams,
    pub q: f64,
    pub q_window: [f64; 2],
    pub report: BoundReport,
    pub roof: Vec<RoofDiagnostics>,
}

impl BoundRecord {
    /// Variants whose bound fails beyond `slack`.
    pub fn violations(&self, slack: f64) -> Vec<&str> {
        self.report.violations(slack)
    }
}

pub fn bound(
    state: &AnyState,
    kind: BoundKind,
    variants: &[Variant],
    pp: &PointParams,
    cfg: &RoofConfig,
) -> Result<BoundRecord> {
    check_variants(kind, variants)?;
    let data = tripartite_data(state, kind, cfg)?;
    let report = bound_report(&data, variants, pp)?;
    Ok(BoundRecord {
        kind,
        measure: data.measure,
        seed: cfg.seed,
        whole: data.whole,
        ab: data.ab,
        ac: data.ac,
        params: *pp,
        q: pp.resolve_q(data.ab, data.ac),
        q_window: [q_lower_edge(data.ab, data.ac, pp.base), q_upper_edge(pp.t)],
        report,
        roof: data.roof,
    })
}
