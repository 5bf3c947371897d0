//! Monogamy and polygamy bounds on powers of a bipartite correlation measure.
//!
//! Throughout, `Q_AB` and `Q_AC` are the two pairwise values of a measure Q,
//! `gamma` (or `delta`) is the exponent at which Q is known to be monogamous
//! (polygamous), and `alpha` (or `beta`) is the power being bounded.

mod chain;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use chain::{chain_monogamy_bound, chain_polygamy_bound, ChainParams};

/// Relative grace band used by every admissibility comparison.
pub const GRACE: f64 = 1e-12;

/// 0^0 = 1 and 0^y = 0 for y > 0.
pub(crate) fn pow0(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Monogamy,
    Polygamy,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Monogamy => "monogamy",
            BoundKind::Polygamy => "polygamy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyParams {
    pub alpha: f64,
    pub gamma: f64,
    pub t: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolygamyParams {
    pub beta: f64,
    pub delta: f64,
    pub t: f64,
    pub q: f64,
}

/// Common view of the two parameter sets.
pub trait BoundParams {
    fn kind(&self) -> BoundKind;
    /// The power being bounded (α or β).
    fn power(&self) -> f64;
    /// The exponent the measure is known to satisfy (γ or δ).
    fn base(&self) -> f64;
    fn t(&self) -> f64;
    fn q(&self) -> f64;

    fn ratio(&self) -> f64 {
        self.power() / self.base()
    }
}

impl BoundParams for MonogamyParams {
    fn kind(&self) -> BoundKind {
        BoundKind::Monogamy
    }
    fn power(&self) -> f64 {
        self.alpha
    }
    fn base(&self) -> f64 {
        self.gamma
    }
    fn t(&self) -> f64 {
        self.t
    }
    fn q(&self) -> f64 {
        self.q
    }
}

impl BoundParams for PolygamyParams {
    fn kind(&self) -> BoundKind {
        BoundKind::Polygamy
    }
    fn power(&self) -> f64 {
        self.beta
    }
    fn base(&self) -> f64 {
        self.delta
    }
    fn t(&self) -> f64 {
        self.t
    }
    fn q(&self) -> f64 {
        self.q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub checks: Vec<Check>,
}

impl AdmissibilityReport {
    pub fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            ok,
            detail,
        });
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn into_result(self) -> Result<()> {
        if self.ok() {
            Ok(())
        } else {
            Err(Error::Precondition(self))
        }
    }
}

fn check_inputs(report: &mut AdmissibilityReport, qab: f64, qac: f64) {
    let ok = qab.is_finite() && qac.is_finite() && qab >= 0.0 && qac >= 0.0;
    report.push("inputs", ok, format!("Q_AB={qab}, Q_AC={qac} must be finite and nonnegative"));
}

fn check_exponents(report: &mut AdmissibilityReport, kind: BoundKind, power: f64, base: f64) {
    match kind {
        BoundKind::Monogamy => {
            report.push("gamma", base >= 2.0, format!("gamma={base} must be >= 2"));
            report.push(
                "alpha",
                (0.0..=base).contains(&power),
                format!("alpha={power} must lie in [0, gamma]"),
            );
        }
        BoundKind::Polygamy => {
            report.push("delta", base > 0.0 && base <= 1.0, format!("delta={base} must lie in (0, 1]"));
            report.push("beta", power >= base, format!("beta={power} must be >= delta"));
        }
    }
}

/// Lower edge 1 + Q_AB^γ / Q_AC^γ of the q window; infinite when Q_AC = 0 < Q_AB.
pub fn q_lower_edge(qab: f64, qac: f64, base: f64) -> f64 {
    let (a, c) = (pow0(qab, base), pow0(qac, base));
    if a == 0.0 {
        1.0
    } else if c == 0.0 {
        f64::INFINITY
    } else {
        1.0 + a / c
    }
}

/// Upper edge 1 + 1/t of the q window.
pub fn q_upper_edge(t: f64) -> f64 {
    1.0 + 1.0 / t
}

/// Checks every hypothesis of the single-step bounds separately.
///
/// With Q_AB = Q_AC = 0 the data-dependent checks pass vacuously.
pub fn validate_params<P: BoundParams>(qab: f64, qac: f64, p: &P) -> AdmissibilityReport {
    let mut report = AdmissibilityReport::default();
    check_inputs(&mut report, qab, qac);
    check_exponents(&mut report, p.kind(), p.power(), p.base());
    let (base, t, q) = (p.base(), p.t(), p.q());
    report.push("t", t >= 1.0, format!("t={t} must be >= 1"));
    let vacuous = qab == 0.0 && qac == 0.0;
    let (a, c) = (pow0(qab, base), pow0(qac, base));
    report.push(
        "dominance",
        vacuous || c >= t * a * (1.0 - GRACE),
        format!("Q_AC^{base}={c} must be >= t*Q_AB^{base}={}", t * a),
    );
    report.push("q_min", q > 1.0, format!("q={q} must be > 1"));
    let lower = q_lower_edge(qab, qac, base);
    report.push(
        "q_lower_edge",
        vacuous || q >= lower * (1.0 - GRACE),
        format!("q={q} must be >= 1 + Q_AB^{base}/Q_AC^{base} = {lower}"),
    );
    let upper = q_upper_edge(t);
    report.push(
        "q_upper_edge",
        q <= upper * (1.0 + GRACE),
        format!("q={q} must be <= 1 + 1/t = {upper}"),
    );
    report
}

/// Shared form ((1+t)^e − q^{e−1}t^e)·Q_AB^p + q^{e−1}·Q_AC^p.
fn tq_form(qab: f64, qac: f64, power: f64, e: f64, t: f64, q: f64) -> f64 {
    let w = q.powf(e - 1.0);
    let l = (1.0 + t).powf(e) - w * t.powf(e);
    l * pow0(qab, power) + w * pow0(qac, power)
}

/// Lower bound on Q_{A|BC}^α from the pairwise values.
pub fn thm1_lower_bound(qab: f64, qac: f64, p: &MonogamyParams) -> Result<f64> {
    validate_params(qab, qac, p).into_result()?;
    if qab == 0.0 && qac == 0.0 {
        return Ok(0.0);
    }
    Ok(tq_form(qab, qac, p.alpha, p.ratio(), p.t, p.q))
}

/// Upper bound on Q_{A|BC}^β for a polygamous measure.
pub fn thm4_upper_bound(qab: f64, qac: f64, p: &PolygamyParams) -> Result<f64> {
    validate_params(qab, qac, p).into_result()?;
    if qab == 0.0 && qac == 0.0 {
        return Ok(0.0);
    }
    Ok(tq_form(qab, qac, p.beta, p.ratio(), p.t, p.q))
}

/// Earlier bound families that the (t, q) bounds refine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum PriorBound {
    Ref16 { k: f64 },
    Ref28 { k: f64, p: f64 },
    Ref29 { a: f64 },
}

impl PriorBound {
    pub fn name(&self) -> &'static str {
        match self {
            PriorBound::Ref16 { .. } => "ref16",
            PriorBound::Ref28 { .. } => "ref28",
            PriorBound::Ref29 { .. } => "ref29",
        }
    }

    fn validate(&self, kind: BoundKind, qab: f64, qac: f64, power: f64, base: f64) -> AdmissibilityReport {
        let mut report = AdmissibilityReport::default();
        check_inputs(&mut report, qab, qac);
        check_exponents(&mut report, kind, power, base);
        let (k, label) = match *self {
            PriorBound::Ref16 { k } | PriorBound::Ref28 { k, .. } => (k, "k"),
            PriorBound::Ref29 { a } => (a, "a"),
        };
        report.push(label, k >= 1.0, format!("{label}={k} must be >= 1"));
        let vacuous = qab == 0.0 && qac == 0.0;
        let (a, c) = (pow0(qab, base), pow0(qac, base));
        report.push(
            "dominance",
            vacuous || c >= k * a * (1.0 - GRACE),
            format!("Q_AC^{base}={c} must be >= {label}*Q_AB^{base}={}", k * a),
        );
        if let PriorBound::Ref28 { p, .. } = *self {
            match kind {
                BoundKind::Monogamy => {
                    report.push("p", (0.5..=1.0).contains(&p), format!("p={p} must lie in [1/2, 1]"));
                    report.push(
                        "alpha_half",
                        power <= base / 2.0,
                        format!("alpha={power} must be <= gamma/2"),
                    );
                }
                BoundKind::Polygamy => {
                    report.push("p", (0.0..=1.0).contains(&p), format!("p={p} must lie in [0, 1]"));
                }
            }
        }
        report
    }

    fn evaluate(&self, qab: f64, qac: f64, power: f64, e: f64) -> f64 {
        let (b, c) = (pow0(qab, power), pow0(qac, power));
        match *self {
            PriorBound::Ref16 { k } => b + ((1.0 + k).powf(e) - 1.0) / k.powf(e) * c,
            PriorBound::Ref28 { k, p } => {
                let pe = pow0(p, e);
                pe * b + ((1.0 + k).powf(e) - pe) / k.powf(e) * c
            }
            PriorBound::Ref29 { a } => (1.0 + a).powf(e - 1.0) * b + (1.0 + 1.0 / a).powf(e - 1.0) * c,
        }
    }
}

pub fn prior_monogamy_bound(variant: PriorBound, qab: f64, qac: f64, alpha: f64, gamma: f64) -> Result<f64> {
    variant
        .validate(BoundKind::Monogamy, qab, qac, alpha, gamma)
        .into_result()?;
    if qab == 0.0 && qac == 0.0 {
        return Ok(0.0);
    }
    Ok(variant.evaluate(qab, qac, alpha, alpha / gamma))
}

pub fn prior_polygamy_bound(variant: PriorBound, qab: f64, qac: f64, beta: f64, delta: f64) -> Result<f64> {
    variant
        .validate(BoundKind::Polygamy, qab, qac, beta, delta)
        .into_result()?;
    if qab == 0.0 && qac == 0.0 {
        return Ok(0.0);
    }
    Ok(variant.evaluate(qab, qac, beta, beta / delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma1Branch {
    /// 0 ≤ m ≤ 1: f(x) ≥ f(t).
    M,
    /// n ≥ 1: f(x) ≤ f(t).
    N,
}

/// f(x, m) = (1+x)^m − q^{m−1}·x^m.
pub fn lemma1_f(x: f64, m: f64, q: f64) -> Result<f64> {
    if !(x > 0.0 && q > 1.0 && m >= 0.0) || !x.is_finite() || !m.is_finite() || !q.is_finite() {
        return Err(Error::OutOfRange(format!(
            "lemma f needs x > 0, q > 1, m >= 0 (got x={x}, m={m}, q={q})"
        )));
    }
    Ok((1.0 + x).powf(m) - q.powf(m - 1.0) * x.powf(m))
}

/// Signed slack of the lemma inequality at (x, t): f(x) − f(t) for branch M
/// and f(t) − f(x) for branch N, so a holding inequality is nonnegative.
pub fn lemma1_slack(x: f64, t: f64, q: f64, exponent: f64, branch: Lemma1Branch) -> Result<f64> {
    let mut report = AdmissibilityReport::default();
    report.push("t", t >= 1.0, format!("t={t} must be >= 1"));
    report.push("x", x >= t, format!("x={x} must be >= t={t}"));
    let lower = 1.0 + 1.0 / x;
    let upper = q_upper_edge(t);
    report.push(
        "q_window",
        q >= lower * (1.0 - GRACE) && q <= upper * (1.0 + GRACE),
        format!("q={q} must lie in [{lower}, {upper}]"),
    );
    let in_range = match branch {
        Lemma1Branch::M => (0.0..=1.0).contains(&exponent),
        Lemma1Branch::N => exponent >= 1.0,
    };
    report.push("exponent", in_range, format!("exponent {exponent} outside the {branch:?} branch"));
    report.into_result()?;
    let (fx, ft) = (lemma1_f(x, exponent, q)?, lemma1_f(t, exponent, q)?);
    Ok(match branch {
        Lemma1Branch::M => fx - ft,
        Lemma1Branch::N => ft - fx,
    })
}

/// Whether the lemma inequality holds at these points, to within 1e-12.
///
/// A violated hypothesis is an error, not a `false`.
pub fn lemma1_check(x: f64, t: f64, q: f64, exponent: f64, branch: Lemma1Branch) -> Result<bool> {
    Ok(lemma1_slack(x, t, q, exponent, branch)? >= -1e-12)
}

/// Per-variant evaluation of one bound instance against a measured LHS.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lhs: f64,
    pub variant_rhs: BTreeMap<String, f64>,
    pub preconditions_ok: BTreeMap<String, bool>,
    /// lhs − rhs for monogamy, rhs − lhs for polygamy; nonnegative when the
    /// bound holds.
    pub gaps: BTreeMap<String, f64>,
    pub failed_checks: BTreeMap<String, Vec<String>>,
}

impl BoundReport {
    pub fn new(kind: BoundKind, lhs: f64) -> Self {
        Self {
            kind,
            lhs,
            variant_rhs: BTreeMap::new(),
            preconditions_ok: BTreeMap::new(),
            gaps: BTreeMap::new(),
            failed_checks: BTreeMap::new(),
        }
    }

    /// Records one variant; precondition failures are kept as report entries,
    /// anything else is propagated.
    pub fn record(&mut self, name: &str, rhs: Result<f64>) -> Result<()> {
        match rhs {
            Ok(v) => {
                let gap = match self.kind {
                    BoundKind::Monogamy => self.lhs - v,
                    BoundKind::Polygamy => v - self.lhs,
                };
                self.variant_rhs.insert(name.to_string(), v);
                self.gaps.insert(name.to_string(), gap);
                self.preconditions_ok.insert(name.to_string(), true);
            }
            Err(Error::Precondition(report)) => {
                self.preconditions_ok.insert(name.to_string(), false);
                self.failed_checks.insert(name.to_string(), report.failures());
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }

    /// Variants whose bound is violated beyond `slack`.
    pub fn violations(&self, slack: f64) -> Vec<&str> {
        self.gaps
            .iter()
            .filter(|(_, g)| **g < -slack)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}
