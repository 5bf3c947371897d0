//! Randomized audits. Each trial draws from its own ChaCha stream of the
//! suite seed, so a violation is reproducible from (seed, trial) alone; the
//! dumped reproducer also carries the full state and parameters.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    chain_monogamy_bound, lemma1_slack, q_lower_edge, q_upper_edge, thm1_lower_bound, validate_params,
    ChainParams, Lemma1Branch, MonogamyParams,
};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_pure, concurrence_roof, concurrence_wootters, crenoa, negativity_pure, Bipartition, RoofConfig,
};
use crate::states::{haar_random_pure_with, reduce_pair_pure, PureState};

/// Violations kept verbatim in a report; the rest are only counted.
pub const MAX_DUMPED: usize = 100;

/// Slack on the exact monogamy checks.
pub const EXACT_SLACK: f64 = 1e-9;
/// Slack on checks whose values come from the roof optimizer.
pub const ROOF_SLACK: f64 = 2e-3;
/// Agreement required between the min roof and the Wootters formula.
pub const ORACLE_TOL: f64 = 1e-3;
pub const LEMMA_SLACK: f64 = 1e-12;

/// α grid of the monogamy audits.
pub fn alpha_grid() -> Vec<f64> {
    (0..=8).map(|i| i as f64 * 0.25).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Monogamy,
    Polygamy,
    RoofOracle,
    Chain,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Monogamy => "monogamy",
            Suite::Polygamy => "polygamy",
            Suite::RoofOracle => "roof-oracle",
            Suite::Chain => "chain",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Lemma1 => 100_000,
            Suite::Monogamy => 500,
            Suite::Polygamy => 100,
            Suite::RoofOracle => 50,
            Suite::Chain => 200,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma1" => Suite::Lemma1,
            "monogamy" => Suite::Monogamy,
            "polygamy" => Suite::Polygamy,
            "roof-oracle" => Suite::RoofOracle,
            "chain" => Suite::Chain,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    /// Individual inequality evaluations performed.
    pub checked: usize,
    pub violation_count: usize,
    /// Violation counts per kind of check, for suites that mix several.
    pub violations_by_check: BTreeMap<String, usize>,
    /// Most negative slack seen (0 when nothing failed).
    pub worst_slack: f64,
    pub violations: Vec<Value>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# suite={} seed={} trials={}", self.suite, self.seed, self.trials).unwrap();
        writeln!(out, "checked={}", self.checked).unwrap();
        writeln!(out, "violations={}", self.violation_count).unwrap();
        for (check, n) in &self.violations_by_check {
            writeln!(out, "violations.{check}={n}").unwrap();
        }
        writeln!(out, "worst_slack={}", self.worst_slack).unwrap();
        writeln!(out, "result={}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        for v in &self.violations {
            writeln!(out, "violation {v}").unwrap();
        }
        if self.violations.len() < self.violation_count {
            writeln!(
                out,
                "# {} further violations not dumped",
                self.violation_count - self.violations.len()
            )
            .unwrap();
        }
        out
    }
}

/// Per-trial outcome before merging.
#[derive(Default)]
struct Tally {
    checked: usize,
    violations: Vec<(f64, Value)>,
}

impl Tally {
    fn check(&mut self, slack: f64, tolerance: f64, reproducer: impl FnOnce() -> Value) {
        self.checked += 1;
        if slack < -tolerance || slack.is_nan() {
            let mut v = reproducer();
            v["slack"] = json!(slack);
            self.violations.push((slack, v));
        }
    }
}

fn merge(suite: Suite, seed: u64, trials: usize, tallies: Vec<Tally>) -> VerifyReport {
    let mut report = VerifyReport {
        suite,
        seed,
        trials,
        checked: 0,
        violation_count: 0,
        violations_by_check: BTreeMap::new(),
        worst_slack: 0.0,
        violations: Vec::new(),
    };
    for t in tallies {
        report.checked += t.checked;
        for (slack, v) in t.violations {
            report.violation_count += 1;
            if let Some(check) = v["check"].as_str() {
                *report.violations_by_check.entry(check.to_string()).or_default() += 1;
            }
            report.worst_slack = report.worst_slack.min(slack);
            if report.violations.len() < MAX_DUMPED {
                report.violations.push(v);
            }
        }
    }
    report
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn state_json(psi: &PureState) -> Value {
    psi.to_json().map(|j| json!(j)).unwrap_or(Value::Null)
}

pub fn verify(suite: Suite, trials: usize, seed: u64, roof: &RoofConfig) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("a suite needs at least one trial".into()));
    }
    let tallies = match suite {
        Suite::Lemma1 => vec![lemma1_suite(trials, seed)?],
        Suite::Monogamy => run_trials(trials, seed, monogamy_trial)?,
        Suite::Polygamy => run_trials(trials, seed, |i, rng| polygamy_trial(i, rng, roof))?,
        Suite::RoofOracle => run_trials(trials, seed, |i, rng| roof_oracle_trial(i, rng, roof))?,
        Suite::Chain => run_trials(trials, seed, |i, rng| chain_trial(i, rng, roof))?,
    };
    Ok(merge(suite, seed, trials, tallies))
}

fn run_trials<F>(trials: usize, seed: u64, f: F) -> Result<Vec<Tally>>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Tally> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i)))
        .collect()
}

/// Both branches, `trials` tuples each, drawn uniformly over the stated
/// hypothesis region.
fn lemma1_suite(trials: usize, seed: u64) -> Result<Tally> {
    let mut rng = trial_rng(seed, 0);
    let mut tally = Tally::default();
    for branch in [Lemma1Branch::M, Lemma1Branch::N] {
        for trial in 0..trials {
            let t = rng.random_range(1.0..=50.0);
            let x = rng.random_range(t..=50.0);
            let q = rng.random_range((1.0 + 1.0 / x)..=(1.0 + 1.0 / t));
            let exponent = match branch {
                Lemma1Branch::M => rng.random_range(0.0..=1.0),
                Lemma1Branch::N => rng.random_range(1.0..=10.0),
            };
            let slack = lemma1_slack(x, t, q, exponent, branch)?;
            tally.check(slack, LEMMA_SLACK, || {
                json!({"branch": format!("{branch:?}"), "trial": trial, "x": x, "t": t, "q": q, "exponent": exponent})
            });
        }
    }
    Ok(tally)
}

/// The (t, q) points audited for a pair (small, large): t ∈ {1, √x, x} with
/// x = large^γ/small^γ, and q at the lower edge, the midpoint and the top.
pub fn tq_grid(small: f64, large: f64, gamma: f64) -> Vec<(f64, f64)> {
    let x = if small == 0.0 {
        1.0
    } else {
        (large / small).powf(gamma)
    };
    let mut pts = Vec::new();
    for t in [1.0, x.max(1.0).sqrt(), x.max(1.0)] {
        let lo = q_lower_edge(small, large, gamma);
        let hi = q_upper_edge(t);
        for q in [lo, 0.5 * (lo + hi), hi] {
            pts.push((t, q));
        }
    }
    pts
}

fn monogamy_trial(trial: usize, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let psi = haar_random_pure_with(3, rng)?;
    let whole = concurrence_pure(&psi, &Bipartition::new(vec![0]))?;
    let ab = concurrence_wootters(&reduce_pair_pure(&psi, 1)?)?;
    let ac = concurrence_wootters(&reduce_pair_pure(&psi, 2)?)?;
    let mut tally = Tally::default();
    let repro = |extra: Value| {
        let mut v = json!({"trial": trial, "state": state_json(&psi), "c_a_bc": whole, "c_ab": ab, "c_ac": ac});
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    };
    tally.check(whole * whole - ab * ab - ac * ac, EXACT_SLACK, || repro(json!({"check": "ckw"})));

    let gamma = 2.0;
    for (label, small, large) in [("BC", ab, ac), ("CB", ac, ab)] {
        for (t, q) in tq_grid(small, large, gamma) {
            for alpha in alpha_grid() {
                let p = MonogamyParams { alpha, gamma, t, q };
                if !validate_params(small, large, &p).ok() {
                    continue;
                }
                let rhs = thm1_lower_bound(small, large, &p)?;
                let lhs = crate::bounds::pow0(whole, alpha);
                tally.check(lhs - rhs, EXACT_SLACK, || {
                    repro(json!({"check": "thm1", "labeling": label, "alpha": alpha, "gamma": gamma,
                                 "t": t, "q": q, "lhs": lhs, "rhs": rhs}))
                });
            }
        }
    }
    Ok(tally)
}

fn sub_config(rng: &mut ChaCha8Rng, roof: &RoofConfig) -> RoofConfig {
    RoofConfig {
        seed: rng.random(),
        ..*roof
    }
}

fn polygamy_trial(trial: usize, rng: &mut ChaCha8Rng, roof: &RoofConfig) -> Result<Tally> {
    let psi = haar_random_pure_with(3, rng)?;
    let cfg = sub_config(rng, roof);
    let whole = negativity_pure(&psi, &Bipartition::new(vec![0]))?.powi(2);
    // max-roof values are lower estimates of the true pair values
    let ab = crenoa(&reduce_pair_pure(&psi, 1)?, &cfg)?.value.powi(2);
    let ac = crenoa(&reduce_pair_pure(&psi, 2)?, &cfg)?.value.powi(2);
    let mut tally = Tally::default();
    for delta in [0.2, 0.5, 1.0] {
        let lhs = whole.powf(delta);
        let rhs = ab.powf(delta) + ac.powf(delta);
        tally.check(rhs - lhs, ROOF_SLACK, || {
            json!({"trial": trial, "state": state_json(&psi), "roof_seed": cfg.seed, "delta": delta,
                   "screnoa_a_bc": whole, "screnoa_ab": ab, "screnoa_ac": ac, "lhs": lhs, "rhs": rhs})
        });
    }
    Ok(tally)
}

fn roof_oracle_trial(trial: usize, rng: &mut ChaCha8Rng, roof: &RoofConfig) -> Result<Tally> {
    // two-qubit marginals of three-qubit pure states have rank 2
    let psi = haar_random_pure_with(3, rng)?;
    let cfg = sub_config(rng, roof);
    let rho = reduce_pair_pure(&psi, 1)?;
    let exact = concurrence_wootters(&rho)?;
    let res = concurrence_roof(&rho, &Bipartition::new(vec![0]), &cfg)?;
    let mut tally = Tally::default();
    tally.check(-(res.value - exact).abs(), ORACLE_TOL, || {
        json!({"trial": trial, "state": state_json(&psi), "roof_seed": cfg.seed, "roof": res.value,
               "wootters": exact, "converged": res.converged})
    });
    Ok(tally)
}

/// Chained monogamy on four-qubit pure states in both chain shapes, with
/// per-step t and q drawn uniformly from each step's admissible window.
fn chain_trial(trial: usize, rng: &mut ChaCha8Rng, roof: &RoofConfig) -> Result<Tally> {
    let psi = haar_random_pure_with(4, rng)?;
    let cfg = sub_config(rng, roof);
    let whole = concurrence_pure(&psi, &Bipartition::new(vec![0]))?;
    let pairs: Vec<f64> = (1..4)
        .map(|i| concurrence_wootters(&reduce_pair_pure(&psi, i)?))
        .collect::<Result<_>>()?;
    // C_{A|B2B3} of a rank-2 mixed marginal; the min roof is an upper estimate
    let r1 = concurrence_roof(&psi.reduced(&[0, 2, 3])?, &Bipartition::new(vec![0]), &cfg)?.value;
    let residuals = [r1, pairs[2]];
    let gamma = 2.0;
    let mut tally = Tally::default();
    for split in [None, Some(1)] {
        let m = split.unwrap_or(2);
        let mut t = Vec::new();
        let mut q = Vec::new();
        let mut admissible = true;
        for r in 0..2 {
            let (small, large) = if r < m {
                (pairs[r], residuals[r])
            } else {
                (residuals[r], pairs[r])
            };
            if small == 0.0 || large < small {
                admissible = false;
                break;
            }
            let x = (large / small).powf(gamma);
            let tr = rng.random_range(1.0..=x);
            let lo = 1.0 + 1.0 / x;
            let hi = 1.0 + 1.0 / tr;
            t.push(tr);
            q.push(if hi > lo { rng.random_range(lo..=hi) } else { hi });
        }
        if !admissible {
            continue;
        }
        let cp = ChainParams { t, q, split };
        for alpha in alpha_grid() {
            let rhs = match chain_monogamy_bound(&pairs, &residuals, &cp, alpha, gamma) {
                Ok(v) => v,
                Err(Error::ChainStep { .. }) => continue,
                Err(e) => return Err(e),
            };
            let lhs = crate::bounds::pow0(whole, alpha);
            tally.check(lhs - rhs, EXACT_SLACK, || {
                json!({"trial": trial, "state": state_json(&psi), "roof_seed": cfg.seed, "split": split,
                       "alpha": alpha, "gamma": gamma, "t": cp.t, "q": cp.q, "pairs": pairs,
                       "residuals": residuals, "lhs": lhs, "rhs": rhs})
            });
        }
    }
    Ok(tally)
}
