use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::figure::linspace;
use super::{bound_report, check_variants, fmt_f64, tripartite_data, PointParams, QChoice, Variant};
use crate::bounds::BoundKind;
use crate::error::{Error, Result};
use crate::measures::RoofConfig;
use crate::states::AnyState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl FromStr for Axis {
    type Err = Error;

    /// `name=start:stop:steps`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("axis {s:?} is not name=start:stop:steps"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(bad());
        };
        let axis = Axis {
            name: name.trim().to_string(),
            start: start.parse().map_err(|_| bad())?,
            stop: stop.parse().map_err(|_| bad())?,
            steps: steps.parse().map_err(|_| bad())?,
        };
        if axis.steps < 2 {
            return Err(Error::Parse(format!("axis {} needs at least 2 steps", axis.name)));
        }
        Ok(axis)
    }
}

impl Axis {
    fn grid(&self) -> String {
        format!("{}={}:{}:{}", self.name, self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub kind: BoundKind,
    pub axes: Vec<Axis>,
    /// Values at every point before the axes are applied.
    pub fixed: PointParams,
    pub variants: Vec<Variant>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Parse("a sweep takes one or two axes".into()));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::Parse("sweep axes must differ".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::Parse("a sweep needs at least one variant".into()));
        }
        check_variants(self.kind, &self.variants)?;
        let allowed: &[&str] = match self.kind {
            BoundKind::Monogamy => &["alpha", "gamma", "t", "q"],
            BoundKind::Polygamy => &["beta", "delta", "t", "q"],
        };
        for a in &self.axes {
            if !allowed.contains(&a.name.as_str()) {
                return Err(Error::Parse(format!(
                    "axis {} not one of {} for {} sweeps",
                    a.name,
                    allowed.join(", "),
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

fn apply(pp: &mut PointParams, name: &str, value: f64) {
    match name {
        "alpha" | "beta" => pp.power = value,
        "gamma" | "delta" => pp.base = value,
        "t" => pp.t = value,
        "q" => pp.q = QChoice::Value(value),
        _ => unreachable!("axis names are validated"),
    }
}

/// One row per grid point, first axis outermost.
pub fn sweep_csv(spec: &SweepSpec, state: &AnyState, cfg: &RoofConfig) -> Result<String> {
    spec.validate()?;
    let data = tripartite_data(state, spec.kind, cfg)?;
    let mut out = String::new();
    let grid: Vec<String> = spec.axes.iter().map(Axis::grid).collect();
    writeln!(out, "# seed={} grid={}", cfg.seed, grid.join(",")).unwrap();
    let mut cols: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    cols.push("lhs".into());
    cols.extend(spec.variants.iter().map(|v| format!("rhs_{v}")));
    cols.extend(spec.variants.iter().map(|v| format!("admissible_{v}")));
    writeln!(out, "{}", cols.join(",")).unwrap();

    let outer = &spec.axes[0];
    let inner = spec.axes.get(1);
    for x in linspace(outer.start, outer.stop, outer.steps) {
        let ys = match inner {
            Some(a) => linspace(a.start, a.stop, a.steps).into_iter().map(Some).collect(),
            None => vec![None],
        };
        for y in ys {
            let mut pp = spec.fixed;
            apply(&mut pp, &outer.name, x);
            let mut cells = vec![fmt_f64(x)];
            if let (Some(a), Some(y)) = (inner, y) {
                apply(&mut pp, &a.name, y);
                cells.push(fmt_f64(y));
            }
            let report = bound_report(&data, &spec.variants, &pp)?;
            cells.push(fmt_f64(report.lhs));
            for v in &spec.variants {
                cells.push(report.variant_rhs.get(v.name()).map(|x| fmt_f64(*x)).unwrap_or_default());
            }
            for v in &spec.variants {
                cells.push(report.preconditions_ok[v.name()].to_string());
            }
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
    }
    Ok(out)
}
