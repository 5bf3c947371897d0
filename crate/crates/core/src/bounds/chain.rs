//! Multipartite bounds built by applying the single-step bound down a chain
//! A|B₁B₂…B_{N−1} → A|B₂…B_{N−1} → … .
//!
//! `pairs[r]` is Q_{AB_{r+1}} (N−1 values) and `residuals[r]` is
//! Q_{A|B_{r+2}…B_{N−1}} (N−2 values, the last one equal to the final pair).

use serde::Serialize;

use super::{pow0, BoundKind, GRACE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainParams {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    /// Number of leading steps in which the pair is the smaller term. `None`
    /// means every step is of that type.
    pub split: Option<usize>,
}

impl ChainParams {
    pub fn uniform(steps: usize, t: f64, q: f64) -> Self {
        Self {
            t: vec![t; steps],
            q: vec![q; steps],
            split: None,
        }
    }
}

fn step_error(step: usize, reason: String) -> Error {
    Error::ChainStep { step, reason }
}

fn check_exponents(kind: BoundKind, power: f64, base: f64) -> Result<()> {
    let ok = match kind {
        BoundKind::Monogamy => base >= 2.0 && (0.0..=base).contains(&power),
        BoundKind::Polygamy => base > 0.0 && base <= 1.0 && power >= base,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "exponents power={power}, base={base} outside the {kind} range"
        )))
    }
}

/// Hypotheses of one step, `small` being the term that must be dominated.
fn check_step(step: usize, small: f64, large: f64, t: f64, q: f64, base: f64) -> Result<()> {
    if !(small.is_finite() && large.is_finite() && small >= 0.0 && large >= 0.0) {
        return Err(step_error(step, format!("values {small}, {large} must be finite and nonnegative")));
    }
    if t < 1.0 {
        return Err(step_error(step, format!("t={t} must be >= 1")));
    }
    let upper = 1.0 + 1.0 / t;
    if !(q > 1.0 && q <= upper * (1.0 + GRACE)) {
        return Err(step_error(step, format!("q={q} must lie in (1, {upper}]")));
    }
    if small == 0.0 && large == 0.0 {
        return Ok(());
    }
    let (s, l) = (pow0(small, base), pow0(large, base));
    if l < t * s * (1.0 - GRACE) {
        return Err(step_error(step, format!("dominance fails: {l} < t*{s}")));
    }
    if s > 0.0 {
        let lower = 1.0 + s / l;
        if q < lower * (1.0 - GRACE) {
            return Err(step_error(step, format!("q={q} below the lower edge {lower}")));
        }
    }
    Ok(())
}

fn chain_bound(
    kind: BoundKind,
    pairs: &[f64],
    residuals: &[f64],
    cp: &ChainParams,
    power: f64,
    base: f64,
) -> Result<f64> {
    check_exponents(kind, power, base)?;
    let n_pairs = pairs.len();
    if n_pairs < 2 {
        return Err(Error::DimensionMismatch("a chain needs at least two pairs".into()));
    }
    let steps = n_pairs - 1;
    if residuals.len() != steps || cp.t.len() != steps || cp.q.len() != steps {
        return Err(Error::DimensionMismatch(format!(
            "chain with {n_pairs} pairs needs {steps} residuals, t and q values"
        )));
    }
    let m = match cp.split {
        None => steps,
        Some(m) => {
            if n_pairs + 1 < 4 || m < 1 || m + 1 > steps {
                return Err(Error::InvalidSplit(format!(
                    "split {m} needs 1 <= m <= N-3 with N >= 4 (N = {})",
                    n_pairs + 1
                )));
            }
            m
        }
    };
    for r in 0..steps {
        let (small, large) = if r < m {
            (pairs[r], residuals[r])
        } else {
            (residuals[r], pairs[r])
        };
        check_step(r + 1, small, large, cp.t[r], cp.q[r], base)?;
    }

    let e = power / base;
    let w: Vec<f64> = cp.q.iter().map(|q| q.powf(e - 1.0)).collect();
    let l: Vec<f64> = cp
        .t
        .iter()
        .zip(&w)
        .map(|(t, w)| (1.0 + t).powf(e) - w * t.powf(e))
        .collect();
    let qp: Vec<f64> = pairs.iter().map(|&x| pow0(x, power)).collect();

    // leading steps: Σ P_{i−1}·l_i·Q_i with P_k = (q_1⋯q_k)^{e−1}
    let mut prefix = 1.0;
    let mut total = 0.0;
    for i in 0..m {
        total += prefix * l[i] * qp[i];
        prefix *= w[i];
    }
    if m == steps {
        return Ok(total + prefix * qp[steps]);
    }
    // trailing steps, where the pair dominates the residual
    let mut tail = 0.0;
    let mut lprod = 1.0;
    for j in m..steps {
        tail += lprod * w[j] * qp[j];
        lprod *= l[j];
    }
    tail += lprod * qp[steps];
    Ok(total + prefix * tail)
}

/// Lower bound on Q_{A|B₁…B_{N−1}}^α.
pub fn chain_monogamy_bound(
    pairs: &[f64],
    residuals: &[f64],
    cp: &ChainParams,
    alpha: f64,
    gamma: f64,
) -> Result<f64> {
    chain_bound(BoundKind::Monogamy, pairs, residuals, cp, alpha, gamma)
}

/// Upper bound on Q_{A|B₁…B_{N−1}}^β for a polygamous measure.
pub fn chain_polygamy_bound(
    pairs: &[f64],
    residuals: &[f64],
    cp: &ChainParams,
    beta: f64,
    delta: f64,
) -> Result<f64> {
    chain_bound(BoundKind::Polygamy, pairs, residuals, cp, beta, delta)
}
