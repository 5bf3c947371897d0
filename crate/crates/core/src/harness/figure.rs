//! CSV data behind the six comparison figures. Figures 1–3 compare the
//! concurrence bounds on the generalized Schmidt example; 4–6 compare the
//! SCRENoA bounds on the W-class example.

use std::fmt::Write as _;

use serde::Serialize;

use super::{bound_report, fmt_f64, tripartite_data, PointParams, QChoice, TripartiteData, Variant};
use crate::bounds::BoundKind;
use crate::error::{Error, Result};
use crate::measures::RoofConfig;
use crate::states::{generalized_schmidt_state, w_class_state, AnyState, SchmidtParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FigureJob {
    pub id: u8,
    /// Points per axis.
    pub resolution: usize,
}

impl FigureJob {
    pub fn new(id: u8) -> Result<Self> {
        Self {
            id,
            resolution: 101,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(1..=6).contains(&self.id) {
            return Err(Error::OutOfRange(format!("figure id {} not in 1..=6", self.id)));
        }
        if self.resolution < 2 {
            return Err(Error::OutOfRange("figure resolution must be at least 2".into()));
        }
        Ok(self)
    }

    pub fn kind(&self) -> BoundKind {
        if self.id <= 3 {
            BoundKind::Monogamy
        } else {
            BoundKind::Polygamy
        }
    }
}

pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                stop
            } else {
                start + (stop - start) * i as f64 / last
            }
        })
        .collect()
}

/// Example state of the figure family, with the t each figure uses.
pub fn example_data(kind: BoundKind, cfg: &RoofConfig) -> Result<(TripartiteData, f64)> {
    match kind {
        BoundKind::Monogamy => {
            let s6 = 6f64.sqrt();
            let psi = generalized_schmidt_state(&SchmidtParams::new([0.5, s6 / 6.0, s6 / 6.0, 0.5, s6 / 6.0], 0.0)?)?;
            Ok((tripartite_data(&AnyState::Pure(psi), kind, cfg)?, s6 / 2.0))
        }
        BoundKind::Polygamy => {
            let psi = w_class_state(0.5, 0.5, 0.5f64.sqrt())?;
            Ok((tripartite_data(&AnyState::Pure(psi), kind, cfg)?, 2f64.powf(0.6)))
        }
    }
}

/// One CSV row: both bounds at (power, base) with q at the data lower edge
/// and a = t.
fn row(out: &mut String, data: &TripartiteData, t: f64, power: f64, base: f64) -> Result<()> {
    let (thm, reference) = match data.kind {
        BoundKind::Monogamy => (Variant::Thm1, Variant::Ref29),
        BoundKind::Polygamy => (Variant::Thm4, Variant::Ref29),
    };
    let pp = PointParams {
        power,
        base,
        t,
        q: QChoice::Low,
        a: None,
        k: None,
        p: 1.0,
    };
    let report = bound_report(data, &[thm, reference], &pp)?;
    let rhs = |v: Variant| report.variant_rhs.get(v.name()).copied();
    let (r_thm, r_ref) = (rhs(thm), rhs(reference));
    let admissible = r_thm.is_some() && r_ref.is_some();
    let cell = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let gap = match (r_thm, r_ref) {
        (Some(a), Some(b)) => Some(match data.kind {
            BoundKind::Monogamy => a - b,
            BoundKind::Polygamy => b - a,
        }),
        _ => None,
    };
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        fmt_f64(power),
        fmt_f64(base),
        fmt_f64(report.lhs),
        cell(r_thm),
        cell(r_ref),
        cell(gap),
        admissible
    )
    .unwrap();
    Ok(())
}

pub fn figure_csv(job: &FigureJob, cfg: &RoofConfig) -> Result<String> {
    let job = job.validated()?;
    let n = job.resolution;
    let (data, t) = example_data(job.kind(), cfg)?;
    let mut out = String::new();
    match job.id {
        1 | 3 => {
            writeln!(out, "# seed={} grid=alpha=0:2:{n},gamma=2:20:{n}", cfg.seed).unwrap();
            out.push_str("alpha,gamma,lhs,rhs_thm1,rhs_ref29,gap,admissible\n");
            for alpha in linspace(0.0, 2.0, n) {
                for gamma in linspace(2.0, 20.0, n) {
                    row(&mut out, &data, t, alpha, gamma)?;
                }
            }
        }
        2 => {
            writeln!(out, "# seed={} grid=alpha=0:2:{n},gamma=20", cfg.seed).unwrap();
            out.push_str("alpha,gamma,lhs,rhs_thm1,rhs_ref29,gap,admissible\n");
            for alpha in linspace(0.0, 2.0, n) {
                row(&mut out, &data, t, alpha, 20.0)?;
            }
        }
        4 | 6 => {
            writeln!(out, "# seed={} grid=delta=0.6:1:{n},beta=delta:3:{n}", cfg.seed).unwrap();
            out.push_str("beta,delta,lhs,rhs_thm4,rhs_ref29,gap,admissible\n");
            for delta in linspace(0.6, 1.0, n) {
                for beta in linspace(delta, 3.0, n) {
                    row(&mut out, &data, t, beta, delta)?;
                }
            }
        }
        _ => {
            writeln!(out, "# seed={} grid=delta=0.8,beta=0.8:3:{n}", cfg.seed).unwrap();
            out.push_str("beta,delta,lhs,rhs_thm4,rhs_ref29,gap,admissible\n");
            for beta in linspace(0.8, 3.0, n) {
                row(&mut out, &data, t, beta, 0.8)?;
            }
        }
    }
    Ok(out)
}
