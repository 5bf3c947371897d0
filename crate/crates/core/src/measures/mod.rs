//! Bipartite correlation measures: concurrence, negativity and their convex
//! roofs.

mod roof;

pub use roof::{convex_roof, Ensemble, PureFunctional, RoofConfig, RoofDirection, RoofResult};

use nalgebra::SVD;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    partial_transpose_matrix, schmidt_coefficients, sqrt_psd_with_floor, trace_norm, ComplexMatrix,
    DensityMatrix, SystemSignature, C64, RANK_TOL,
};
use crate::states::PureState;

/// One side of a bipartition, given as subsystem indices; the other side is
/// the complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    block: Vec<usize>,
}

impl Bipartition {
    pub fn new(block: Vec<usize>) -> Self {
        Self { block }
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    /// Sorted block, checked to be a proper non-empty subset of `sig`.
    pub fn resolve(&self, sig: &SystemSignature) -> Result<Vec<usize>> {
        let block = sig.check_indices(&self.block)?;
        if block.is_empty() || block.len() == sig.len() {
            return Err(Error::InvalidSplit(format!(
                "block {:?} does not split {} subsystems",
                self.block,
                sig.len()
            )));
        }
        Ok(block)
    }
}

/// √(2[1 − tr ρ_A²]) for the reduced state of the split's block.
pub fn concurrence_pure(psi: &PureState, split: &Bipartition) -> Result<f64> {
    let block = split.resolve(psi.signature())?;
    let rho_a = psi.reduced_matrix(&block)?;
    let purity: f64 = rho_a.data().iter().map(|z| z.norm_sqr()).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// 2Σ_{i<j}√(λᵢλⱼ) = (Σ√λᵢ)² − 1 over the Schmidt coefficients.
pub fn negativity_pure(psi: &PureState, split: &Bipartition) -> Result<f64> {
    let block = split.resolve(psi.signature())?;
    let lambdas = schmidt_coefficients(psi, &block)?;
    let s: f64 = lambdas.iter().map(|l| l.sqrt()).sum();
    Ok((s * s - 1.0).max(0.0))
}

/// ‖ρ^{T_A}‖_tr − 1, with the transpose taken over every subsystem of the
/// split's block.
pub fn negativity_mixed(rho: &DensityMatrix, split: &Bipartition) -> Result<f64> {
    let block = split.resolve(rho.signature())?;
    let mut m = rho.matrix().clone();
    for &s in &block {
        m = partial_transpose_matrix(&m, rho.signature(), s)?;
    }
    Ok((trace_norm(&m)? - 1.0).max(0.0))
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.signature().dims() != [2, 2] {
        return Err(Error::Unsupported(format!(
            "two-qubit measure applied to a {} state",
            rho.signature()
        )));
    }
    Ok(())
}

/// σ_y ⊗ σ_y
fn spin_flip() -> ComplexMatrix {
    let mut y = ComplexMatrix::zeros(4, 4);
    y[(0, 3)] = C64::new(-1.0, 0.0);
    y[(1, 2)] = C64::new(1.0, 0.0);
    y[(2, 1)] = C64::new(1.0, 0.0);
    y[(3, 0)] = C64::new(-1.0, 0.0);
    y
}

/// Wootters concurrence max{μ₁ − μ₂ − μ₃ − μ₄, 0}.
///
/// The μᵢ are the eigenvalues of √(√ρ ρ̃ √ρ). Writing √ρ ρ̃ √ρ = AA† with
/// A = √ρ (σ_y⊗σ_y) √ρ*, they are the singular values of A, which an SVD
/// resolves to absolute precision near zero (taking square roots of tiny
/// eigenvalues would not).
pub fn concurrence_wootters(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let mu = wootters_mu(rho)?;
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Descending μᵢ of the Wootters construction.
pub(crate) fn wootters_mu(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let sqrt_rho = sqrt_psd_with_floor(rho.matrix(), RANK_TOL)?;
    let a = sqrt_rho.matmul(&spin_flip())?.matmul(&sqrt_rho.conj())?;
    let svd = SVD::new(a.to_nalgebra(), false, false);
    let mut mu: Vec<f64> = svd.singular_values.iter().copied().collect();
    mu.sort_by(|x, y| y.total_cmp(x));
    Ok(mu)
}

/// Convex-roof extended negativity (min over decompositions).
pub fn cren(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofResult> {
    require_two_qubits(rho)?;
    convex_roof(
        rho,
        PureFunctional::Negativity,
        &Bipartition::new(vec![0]),
        RoofDirection::Min,
        cfg,
    )
}

/// Convex-roof extended negativity of assistance (max over decompositions).
pub fn crenoa(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofResult> {
    require_two_qubits(rho)?;
    convex_roof(
        rho,
        PureFunctional::Negativity,
        &Bipartition::new(vec![0]),
        RoofDirection::Max,
        cfg,
    )
}

/// Square of [`cren`].
pub fn scren(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<f64> {
    Ok(cren(rho, cfg)?.value.powi(2))
}

/// Square of [`crenoa`].
pub fn screnoa(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<f64> {
    Ok(crenoa(rho, cfg)?.value.powi(2))
}

/// Convex-roof concurrence of an arbitrary bipartite state (min roof of
/// [`concurrence_pure`]).
pub fn concurrence_roof(rho: &DensityMatrix, split: &Bipartition, cfg: &RoofConfig) -> Result<RoofResult> {
    convex_roof(rho, PureFunctional::Concurrence, split, RoofDirection::Min, cfg)
}
