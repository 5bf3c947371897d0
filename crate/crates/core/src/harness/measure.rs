use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{RoofDiagnostics, SplitSpec};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_pure, concurrence_wootters, convex_roof, negativity_mixed, negativity_pure, PureFunctional,
    RoofConfig, RoofDirection,
};
use crate::states::AnyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureName {
    Concurrence,
    Negativity,
    Cren,
    Crenoa,
    Scren,
    Screnoa,
}

impl MeasureName {
    pub fn name(self) -> &'static str {
        match self {
            MeasureName::Concurrence => "concurrence",
            MeasureName::Negativity => "negativity",
            MeasureName::Cren => "cren",
            MeasureName::Crenoa => "crenoa",
            MeasureName::Scren => "scren",
            MeasureName::Screnoa => "screnoa",
        }
    }
}

impl FromStr for MeasureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "concurrence" => MeasureName::Concurrence,
            "negativity" => MeasureName::Negativity,
            "cren" => MeasureName::Cren,
            "crenoa" => MeasureName::Crenoa,
            "scren" => MeasureName::Scren,
            "screnoa" => MeasureName::Screnoa,
            _ => return Err(Error::Parse(format!("unknown measure {s:?}"))),
        })
    }
}

impl fmt::Display for MeasureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureRecord {
    pub measure: MeasureName,
    pub split: String,
    pub value: f64,
    pub seed: u64,
    /// How the value was obtained: `pure`, `wootters`, `partial-transpose`
    /// or `roof`.
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roof: Option<RoofDiagnostics>,
}

pub fn measure(state: &AnyState, name: MeasureName, split: &str, cfg: &RoofConfig) -> Result<MeasureRecord> {
    let spec = SplitSpec::parse(split, state.signature().len())?;
    let bip = spec.bipartition();
    let whole = spec.keep.len() == state.signature().len();
    let record = |value, method, roof| MeasureRecord {
        measure: name,
        split: split.to_string(),
        value,
        seed: cfg.seed,
        method,
        roof,
    };

    // pure states on the full system never need an optimizer
    if let (true, AnyState::Pure(psi)) = (whole, state) {
        let value = match name {
            MeasureName::Concurrence => concurrence_pure(psi, &bip)?,
            MeasureName::Negativity | MeasureName::Cren | MeasureName::Crenoa => negativity_pure(psi, &bip)?,
            MeasureName::Scren | MeasureName::Screnoa => negativity_pure(psi, &bip)?.powi(2),
        };
        return Ok(record(value, "pure", None));
    }

    let rho = state.reduced(&spec.keep)?;
    let two_qubits = rho.signature().is_qubits() && rho.signature().len() == 2;
    let (functional, direction, squared) = match name {
        MeasureName::Negativity => return Ok(record(negativity_mixed(&rho, &bip)?, "partial-transpose", None)),
        MeasureName::Concurrence if two_qubits => {
            return Ok(record(concurrence_wootters(&rho)?, "wootters", None));
        }
        MeasureName::Concurrence => (PureFunctional::Concurrence, RoofDirection::Min, false),
        MeasureName::Cren => (PureFunctional::Negativity, RoofDirection::Min, false),
        MeasureName::Scren => (PureFunctional::Negativity, RoofDirection::Min, true),
        MeasureName::Crenoa => (PureFunctional::Negativity, RoofDirection::Max, false),
        MeasureName::Screnoa => (PureFunctional::Negativity, RoofDirection::Max, true),
    };
    let res = convex_roof(&rho, functional, &bip, direction, cfg)?;
    let value = if squared { res.value.powi(2) } else { res.value };
    Ok(record(value, "roof", Some((&res).into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{w_class_state, PureState};

    #[test]
    fn bell_negativity_and_marginal_routes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = AnyState::Pure(PureState::from_real_qubits(&[h, 0.0, 0.0, h]).unwrap());
        let cfg = RoofConfig::default();
        let r = measure(&bell, MeasureName::Negativity, "A|B", &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.method, "pure");

        let w = AnyState::Pure(w_class_state(0.5, 0.5, 2f64.sqrt() / 2.0).unwrap());
        let r = measure(&w, MeasureName::Concurrence, "A|B", &cfg).unwrap();
        assert_eq!(r.method, "wootters");
        assert!((r.value - 0.5).abs() < 1e-10);
        assert!(measure(&w, MeasureName::Cren, "A|D", &cfg).is_err());
    }
}
