//! State families and generic qubit-register states.
//!
//! Amplitude ordering is big-endian: qubit 0 (subsystem A) is the most
//! significant bit of the basis index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, DensityMatrix, SystemSignature, C64, ZERO};

pub const NORM_TOL: f64 = 1e-10;
pub const MAX_HAAR_QUBITS: usize = 10;

/// Normalized amplitude vector over a composite register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
    sig: SystemSignature,
}

impl PureState {
    pub fn new(sig: SystemSignature, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != sig.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for signature {sig}",
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amps, sig })
    }

    pub fn from_qubits(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidSignature("zero qubits".into()));
        }
        Self::new(SystemSignature::qubits(n_qubits)?, amps)
    }

    pub fn from_real_qubits(amps: &[f64]) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes is not a qubit register",
                amps.len()
            )));
        }
        Self::from_qubits(n, amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(sig: SystemSignature, mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm * norm));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Self::new(sig, amps)
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn signature(&self) -> &SystemSignature {
        &self.sig
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.sig.is_qubits().then(|| self.sig.len())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Amplitudes reshaped as a (block × rest) row-major matrix.
    pub(crate) fn block_matrix(&self, block: &[usize]) -> Result<(usize, usize, Vec<C64>)> {
        let block = self.sig.check_indices(block)?;
        let rest = self.sig.complement(&block);
        let a_off = self.sig.offsets(&block);
        let b_off = self.sig.offsets(&rest);
        let mut m = Vec::with_capacity(a_off.len() * b_off.len());
        for &oa in &a_off {
            for &ob in &b_off {
                m.push(self.amps[oa + ob]);
            }
        }
        Ok((a_off.len(), b_off.len(), m))
    }

    /// Reduced density matrix of `block`, computed without forming |ψ⟩⟨ψ|.
    pub fn reduced_matrix(&self, block: &[usize]) -> Result<ComplexMatrix> {
        let (da, db, m) = self.block_matrix(block)?;
        let mut out = ComplexMatrix::zeros(da, da);
        for i in 0..da {
            for j in i..da {
                let v: C64 = (0..db).map(|k| m[i * db + k] * m[j * db + k].conj()).sum();
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        Ok(out)
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = self.sig.check_indices(keep)?;
        let mat = self.reduced_matrix(&keep)?;
        Ok(DensityMatrix::from_parts_unchecked(mat, self.sig.restrict(&keep)?))
    }

    /// Reorders the tensor factors: new subsystem `k` is old subsystem `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.sig.len();
        if perm.len() != n || self.sig.check_indices(perm)?.len() != n {
            return Err(Error::InvalidSplit(format!("{perm:?} is not a permutation")));
        }
        let new_sig = self.sig.restrict(perm)?;
        let new_strides = new_sig.strides();
        let old_strides = self.sig.strides();
        let mut amps = vec![ZERO; self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let old_idx: usize = perm
                .iter()
                .enumerate()
                .map(|(k, &old)| ((new_idx / new_strides[k]) % new_sig.dims()[k]) * old_strides[old])
                .sum();
            *slot = self.amps[old_idx];
        }
        Ok(Self { amps, sig: new_sig })
    }

    pub fn to_json(&self) -> Result<PureStateJson> {
        let n_qubits = self
            .n_qubits()
            .ok_or_else(|| Error::Unsupported("JSON pure states are qubit registers".into()))?;
        Ok(PureStateJson {
            n_qubits,
            amps: self.amps.iter().map(|z| [z.re, z.im]).collect(),
        })
    }
}

/// Parameters of the five-term generalized Schmidt form of three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtParams {
    pub lambdas: [f64; 5],
    pub phi: f64,
}

impl SchmidtParams {
    pub fn new(lambdas: [f64; 5], phi: f64) -> Result<Self> {
        if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::OutOfRange(format!(
                "Schmidt coefficients must be non-negative, got {lambdas:?}"
            )));
        }
        let s: f64 = lambdas.iter().map(|l| l * l).sum();
        if (s - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(s));
        }
        if !(0.0..std::f64::consts::TAU).contains(&phi) {
            return Err(Error::OutOfRange(format!("phase {phi} outside [0, 2π)")));
        }
        Ok(Self { lambdas, phi })
    }
}

/// λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|1⟩_A|1⟩_B|0⟩_C + λ₃|1⟩_A|0⟩_B|1⟩_C + λ₄|111⟩.
///
/// λ₂ couples A with B and λ₃ couples A with C, so that C_AB = 2λ₀λ₂ and
/// C_AC = 2λ₀λ₃.
pub fn generalized_schmidt_state(p: &SchmidtParams) -> Result<PureState> {
    let p = SchmidtParams::new(p.lambdas, p.phi)?;
    let [l0, l1, l2, l3, l4] = p.lambdas;
    let mut amps = vec![ZERO; 8];
    amps[0b000] = C64::new(l0, 0.0);
    amps[0b100] = C64::from_polar(l1, p.phi);
    amps[0b110] = C64::new(l2, 0.0);
    amps[0b101] = C64::new(l3, 0.0);
    amps[0b111] = C64::new(l4, 0.0);
    PureState::from_qubits(3, amps)
}

/// c₁|100⟩ + c₂|010⟩ + c₃|001⟩.
pub fn w_class_state(c1: f64, c2: f64, c3: f64) -> Result<PureState> {
    let mut amps = vec![ZERO; 8];
    amps[0b100] = C64::new(c1, 0.0);
    amps[0b010] = C64::new(c2, 0.0);
    amps[0b001] = C64::new(c3, 0.0);
    PureState::from_qubits(3, amps)
}

/// Haar-random pure state from i.i.d. complex Gaussians.
pub fn haar_random_pure(n_qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_pure_with(n_qubits, &mut rng)
}

pub fn haar_random_pure_with<R: rand::Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    if !(1..=MAX_HAAR_QUBITS).contains(&n_qubits) {
        return Err(Error::OutOfRange(format!(
            "Haar sampling supports 1..={MAX_HAAR_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let sig = SystemSignature::qubits(n_qubits)?;
    let amps = (0..sig.total_dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    PureState::normalized(sig, amps)
}

pub fn to_density(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_pure(psi)
}

/// Two-subsystem marginal ρ_{A Bᵢ} (subsystem 0 with subsystem `i`).
pub fn reduce_pair(rho: &DensityMatrix, i: usize) -> Result<DensityMatrix> {
    let n = rho.signature().len();
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, count: n });
    }
    partial_trace(rho, &[0, i])
}

/// Pure-state shortcut for [`reduce_pair`].
pub fn reduce_pair_pure(psi: &PureState, i: usize) -> Result<DensityMatrix> {
    let n = psi.signature().len();
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, count: n });
    }
    psi.reduced(&[0, i])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureStateJson {
    pub n_qubits: usize,
    pub amps: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixJson {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Pure(PureStateJson),
    Mixed(DensityMatrixJson),
}

/// A pure or mixed input state.
#[derive(Debug, Clone)]
pub enum AnyState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl AnyState {
    pub fn signature(&self) -> &SystemSignature {
        match self {
            AnyState::Pure(p) => p.signature(),
            AnyState::Mixed(m) => m.signature(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            AnyState::Pure(p) => DensityMatrix::from_pure(p),
            AnyState::Mixed(m) => m.clone(),
        }
    }

    /// Marginal on `keep`; pure inputs avoid building the full projector.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            AnyState::Pure(p) => p.reduced(keep),
            AnyState::Mixed(m) => partial_trace(m, keep),
        }
    }

    pub fn to_json(&self) -> Result<StateJson> {
        Ok(match self {
            AnyState::Pure(p) => StateJson::Pure(p.to_json()?),
            AnyState::Mixed(m) => StateJson::Mixed(density_to_json(m)),
        })
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> DensityMatrixJson {
    let m = rho.matrix();
    DensityMatrixJson {
        dims: rho.signature().dims().to_vec(),
        matrix: (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    }
}

impl TryFrom<StateJson> for AnyState {
    type Error = Error;

    fn try_from(value: StateJson) -> Result<Self> {
        match value {
            StateJson::Pure(p) => {
                let amps = p.amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
                Ok(AnyState::Pure(PureState::from_qubits(p.n_qubits, amps)?))
            }
            StateJson::Mixed(m) => {
                let sig = SystemSignature::new(m.dims)?;
                let n = m.matrix.len();
                if m.matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch("density matrix rows differ in length".into()));
                }
                let data = m
                    .matrix
                    .iter()
                    .flatten()
                    .map(|&[re, im]| C64::new(re, im))
                    .collect();
                let mat = ComplexMatrix::from_vec(n, n, data)?;
                Ok(AnyState::Mixed(DensityMatrix::new(mat, sig)?))
            }
        }
    }
}

pub fn parse_state_json(text: &str) -> Result<AnyState> {
    let parsed: StateJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state JSON: {e}")))?;
    AnyState::try_from(parsed)
}
