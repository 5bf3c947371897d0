//! Numerical convex roofs over pure-state decompositions.
//!
//! Every decomposition of ρ into m pure states is Ψ = U·W, where the columns
//! of W are the √λₖ-weighted eigenvectors of ρ and U is an m×r isometry.
//! Rows of Ψ are the subnormalized members |ψ̃ᵢ⟩ = √pᵢ|ψᵢ⟩. Left
//! multiplication by a unitary keeps U an isometry, so the search walks the
//! decomposition manifold through Givens rotations on pairs of rows and
//! never has to re-impose the reconstruction constraint.
//!
//! A min-roof run only ever reports the value of an explicit decomposition,
//! so it is an upper bound on the true roof; a max-roof run is a lower bound.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::Bipartition;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, DensityMatrix, C64, RANK_TOL, ZERO};
use crate::states::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoofDirection {
    Min,
    Max,
}

impl RoofDirection {
    fn improves(self, candidate: f64, current: f64) -> bool {
        // improvements smaller than this are rounding noise
        const EPS: f64 = 1e-15;
        match self {
            RoofDirection::Min => candidate < current - EPS,
            RoofDirection::Max => candidate > current + EPS,
        }
    }

    /// Which side of the true roof an optimizer estimate lies on.
    pub fn bound_side(self) -> &'static str {
        match self {
            RoofDirection::Min => "upper",
            RoofDirection::Max => "lower",
        }
    }
}

/// Pure-state functional evaluated on the normalized members of a
/// decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PureFunctional {
    Concurrence,
    Negativity,
}

impl PureFunctional {
    pub fn evaluate(self, psi: &PureState, split: &Bipartition) -> Result<f64> {
        match self {
            PureFunctional::Concurrence => super::concurrence_pure(psi, split),
            PureFunctional::Negativity => super::negativity_pure(psi, split),
        }
    }

    /// p·f(v/√p) for a subnormalized vector laid out as a (da × db) block
    /// matrix, with p = ‖v‖².
    fn weighted(self, v: &[C64], da: usize, db: usize) -> f64 {
        if da == 2 || db == 2 {
            // both functionals reduce to 2√det of the qubit-side marginal
            let det = qubit_side_det(v, da, db);
            return 2.0 * det.max(0.0).sqrt();
        }
        let (small, rho) = reduced_gram(v, da, db);
        let p: f64 = (0..small).map(|i| rho[(i, i)].re).sum();
        match self {
            PureFunctional::Concurrence => {
                let tr_sq: f64 = rho.data().iter().map(|z| z.norm_sqr()).sum();
                (2.0 * (p * p - tr_sq)).max(0.0).sqrt()
            }
            PureFunctional::Negativity => {
                let Ok(vals) = hermitian_eigenvalues(&rho) else {
                    return f64::NAN;
                };
                let s: f64 = vals.iter().map(|l| l.max(0.0).sqrt()).sum();
                (s * s - p).max(0.0)
            }
        }
    }
}

/// det of the unnormalized 2×2 marginal on whichever side is a qubit.
fn qubit_side_det(v: &[C64], da: usize, db: usize) -> f64 {
    let (mut a, mut d, mut b) = (0.0, 0.0, ZERO);
    if da == 2 {
        let (r0, r1) = v.split_at(db);
        for (x, y) in r0.iter().zip(r1) {
            a += x.norm_sqr();
            d += y.norm_sqr();
            b += x * y.conj();
        }
    } else {
        for row in v.chunks(db) {
            a += row[0].norm_sqr();
            d += row[1].norm_sqr();
            b += row[0] * row[1].conj();
        }
    }
    a * d - b.norm_sqr()
}

/// Unnormalized marginal on the smaller side of the split.
fn reduced_gram(v: &[C64], da: usize, db: usize) -> (usize, ComplexMatrix) {
    if da <= db {
        let mut rho = ComplexMatrix::zeros(da, da);
        for i in 0..da {
            for j in i..da {
                let z: C64 = (0..db).map(|k| v[i * db + k] * v[j * db + k].conj()).sum();
                rho[(i, j)] = z;
                rho[(j, i)] = z.conj();
            }
        }
        (da, rho)
    } else {
        let mut rho = ComplexMatrix::zeros(db, db);
        for i in 0..db {
            for j in i..db {
                let z: C64 = (0..da).map(|k| v[k * db + i] * v[k * db + j].conj()).sum();
                rho[(i, j)] = z;
                rho[(j, i)] = z.conj();
            }
        }
        (db, rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoofConfig {
    /// Members per decomposition; `None` means rank².
    pub max_ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Sweep budget per restart.
    pub max_iters: usize,
    /// The Givens step at which a restart counts as converged.
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            max_ensemble_size: None,
            restarts: 32,
            max_iters: 500,
            step_tolerance: 1e-9,
            seed: 0,
        }
    }
}

impl RoofConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleMember {
    pub probability: f64,
    #[serde(skip)]
    pub state: PureState,
}

/// Pure-state decomposition {pᵢ, |ψᵢ⟩}.
#[derive(Debug, Clone, Serialize)]
pub struct Ensemble {
    pub members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn density(&self) -> Result<ComplexMatrix> {
        let first = self
            .members
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty ensemble".into()))?;
        let d = first.state.amps().len();
        let mut m = ComplexMatrix::zeros(d, d);
        for member in &self.members {
            m.add_assign_scaled(&ComplexMatrix::outer(member.state.amps()), member.probability);
        }
        Ok(m)
    }

    pub fn total_probability(&self) -> f64 {
        self.members.iter().map(|m| m.probability).sum()
    }

    pub fn average(&self, f: PureFunctional, split: &Bipartition) -> Result<f64> {
        self.members
            .iter()
            .map(|m| Ok(m.probability * f.evaluate(&m.state, split)?))
            .sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub restarts_used: usize,
    pub converged: bool,
    pub direction: RoofDirection,
    /// Value of the eigendecomposition ensemble, the common starting point.
    pub eigen_ensemble_value: f64,
}

impl RoofResult {
    pub fn bound_side(&self) -> &'static str {
        self.direction.bound_side()
    }
}

/// Decomposition problem in block-major layout.
struct Problem {
    functional: PureFunctional,
    direction: RoofDirection,
    da: usize,
    db: usize,
    /// √λₖ-weighted eigenvectors, block-major.
    weighted: Vec<Vec<C64>>,
    members: usize,
}

struct RestartOutcome {
    value: f64,
    rows: Vec<Vec<C64>>,
    converged: bool,
}

impl Problem {
    fn objective(&self, row: &[C64]) -> f64 {
        self.functional.weighted(row, self.da, self.db)
    }

    fn rows_from_isometry(&self, u: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let dim = self.da * self.db;
        u.iter()
            .map(|coeffs| {
                let mut row = vec![ZERO; dim];
                for (c, w) in coeffs.iter().zip(&self.weighted) {
                    if *c == ZERO {
                        continue;
                    }
                    for (r, x) in row.iter_mut().zip(w) {
                        *r += c * x;
                    }
                }
                row
            })
            .collect()
    }

    fn eigen_start(&self) -> Vec<Vec<C64>> {
        let r = self.weighted.len();
        let u: Vec<Vec<C64>> = (0..self.members)
            .map(|i| {
                (0..r)
                    .map(|k| if i == k { C64::new(1.0, 0.0) } else { ZERO })
                    .collect()
            })
            .collect();
        self.rows_from_isometry(&u)
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
        let u = random_isometry(self.members, self.weighted.len(), rng);
        self.rows_from_isometry(&u)
    }

    fn search(&self, mut rows: Vec<Vec<C64>>, cfg: &RoofConfig) -> RestartOutcome {
        let m = rows.len();
        let mut vals: Vec<f64> = rows.iter().map(|r| self.objective(r)).collect();
        let phases: Vec<C64> = (0..8).map(|k| C64::from_polar(1.0, k as f64 * FRAC_PI_4)).collect();
        let mut step = FRAC_PI_4;
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            if step < cfg.step_tolerance {
                converged = true;
                break;
            }
            let mut improved = false;
            for i in 0..m {
                for j in (i + 1)..m {
                    improved |= self.improve_pair(&mut rows, &mut vals, i, j, step, &phases);
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if step < cfg.step_tolerance {
            converged = true;
        }
        RestartOutcome {
            value: vals.iter().sum(),
            rows,
            converged,
        }
    }

    /// Best Givens rotation of rows i, j at angle `step` over a fan of
    /// phases; on success the angle is doubled while it keeps improving.
    fn improve_pair(
        &self,
        rows: &mut [Vec<C64>],
        vals: &mut [f64],
        i: usize,
        j: usize,
        step: f64,
        phases: &[C64],
    ) -> bool {
        let current = vals[i] + vals[j];
        let mut best: Option<(f64, C64, Vec<C64>, Vec<C64>, f64, f64)> = None;
        for &phase in phases {
            let (ni, nj) = rotate(&rows[i], &rows[j], step, phase);
            let (vi, vj) = (self.objective(&ni), self.objective(&nj));
            let cand = vi + vj;
            let beats = match &best {
                Some(b) => self.direction.improves(cand, b.0),
                None => self.direction.improves(cand, current),
            };
            if beats {
                best = Some((cand, phase, ni, nj, vi, vj));
            }
        }
        let Some((mut score, phase, mut ni, mut nj, mut vi, mut vj)) = best else {
            return false;
        };
        let mut angle = step;
        while angle < PI {
            angle *= 2.0;
            let (ti, tj) = rotate(&rows[i], &rows[j], angle, phase);
            let (ui, uj) = (self.objective(&ti), self.objective(&tj));
            if !self.direction.improves(ui + uj, score) {
                break;
            }
            (score, ni, nj, vi, vj) = (ui + uj, ti, tj, ui, uj);
        }
        rows[i] = ni;
        rows[j] = nj;
        vals[i] = vi;
        vals[j] = vj;
        true
    }
}

fn rotate(a: &[C64], b: &[C64], theta: f64, phase: C64) -> (Vec<C64>, Vec<C64>) {
    let (s, c) = theta.sin_cos();
    let ps = phase * s;
    let pcs = phase.conj() * s;
    let na = a.iter().zip(b).map(|(x, y)| x * c - ps * y).collect();
    let nb = a.iter().zip(b).map(|(x, y)| pcs * x + y * c).collect();
    (na, nb)
}

/// m×r matrix with orthonormal columns, as rows; Gaussian entries
/// orthonormalized by modified Gram–Schmidt.
fn random_isometry(m: usize, r: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut v: Vec<C64> = (0..m)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for c in &cols {
            let overlap: C64 = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= overlap * ci;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for z in &mut v {
            *z /= norm;
        }
        cols.push(v);
    }
    (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// Optimizes the ensemble average of `functional` over decompositions of ρ.
///
/// Restart 0 starts at the eigendecomposition; the rest start at random
/// isometries drawn from per-restart ChaCha streams of `cfg.seed`. Restarts
/// run in parallel and are reduced by value, ties going to the lowest
/// restart index.
pub fn convex_roof(
    rho: &DensityMatrix,
    functional: PureFunctional,
    split: &Bipartition,
    direction: RoofDirection,
    cfg: &RoofConfig,
) -> Result<RoofResult> {
    if cfg.restarts == 0 {
        return Err(Error::OutOfRange("roof optimizer needs at least one restart".into()));
    }
    let sig = rho.signature();
    let block = split.resolve(sig)?;
    let rest = sig.complement(&block);
    let a_off = sig.offsets(&block);
    let b_off = sig.offsets(&rest);
    let (da, db) = (a_off.len(), b_off.len());
    // block-major position → original flat index
    let layout: Vec<usize> = a_off
        .iter()
        .flat_map(|&oa| b_off.iter().map(move |&ob| oa + ob))
        .collect();

    let (vals, vecs) = rho.eigh()?;
    let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > RANK_TOL).collect();
    let rank = kept.len();
    if rank == 0 {
        return Err(Error::DimensionMismatch("density matrix has no support".into()));
    }
    let budget = cfg.max_ensemble_size.unwrap_or(rank * rank).max(1);
    if rank > budget {
        return Err(Error::RankExceedsBudget { rank, budget });
    }
    let kept_mass: f64 = kept.iter().map(|&k| vals[k]).sum();
    let weighted: Vec<Vec<C64>> = kept
        .iter()
        .map(|&k| {
            let w = (vals[k] / kept_mass).sqrt();
            layout.iter().map(|&idx| vecs[(idx, k)] * w).collect()
        })
        .collect();

    let problem = Problem {
        functional,
        direction,
        da,
        db,
        weighted,
        members: budget,
    };

    let eigen_rows = problem.eigen_start();
    let eigen_value: f64 = eigen_rows.iter().map(|r| problem.objective(r)).sum();

    let outcomes: Vec<RestartOutcome> = if rank == 1 {
        vec![RestartOutcome {
            value: eigen_value,
            rows: eigen_rows,
            converged: true,
        }]
    } else {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|s| {
                let start = if s == 0 {
                    problem.eigen_start()
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(s as u64);
                    problem.random_start(&mut rng)
                };
                problem.search(start, cfg)
            })
            .collect()
    };

    let mut best = 0;
    for (k, o) in outcomes.iter().enumerate().skip(1) {
        if direction.improves(o.value, outcomes[best].value) {
            best = k;
        }
    }
    let winner = &outcomes[best];
    match direction {
        RoofDirection::Min => assert!(winner.value <= eigen_value + 1e-12),
        RoofDirection::Max => assert!(winner.value >= eigen_value - 1e-12),
    }

    let mut members = Vec::with_capacity(winner.rows.len());
    for row in &winner.rows {
        let p: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        if p < 1e-14 {
            continue;
        }
        let mut amps = vec![ZERO; row.len()];
        for (pos, &idx) in layout.iter().enumerate() {
            amps[idx] = row[pos];
        }
        members.push(EnsembleMember {
            probability: p,
            state: PureState::normalized(sig.clone(), amps)?,
        });
    }

    Ok(RoofResult {
        value: winner.value,
        ensemble: Ensemble { members },
        restarts_used: outcomes.len(),
        converged: winner.converged,
        direction,
        eigen_ensemble_value: eigen_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SystemSignature;
    use crate::measures::{concurrence_wootters, negativity_pure};
    use crate::states::{haar_random_pure, reduce_pair_pure, to_density, w_class_state};

    fn a_split() -> Bipartition {
        Bipartition::new(vec![0])
    }

    #[test]
    fn pure_input_gives_single_member() {
        let psi = haar_random_pure(2, 3).unwrap();
        let rho = to_density(&psi);
        let res = convex_roof(
            &rho,
            PureFunctional::Concurrence,
            &a_split(),
            RoofDirection::Min,
            &RoofConfig::default(),
        )
        .unwrap();
        let c = crate::measures::concurrence_pure(&psi, &a_split()).unwrap();
        assert!((res.value - c).abs() < 1e-12);
        assert_eq!(res.ensemble.members.len(), 1);
        assert!(res.converged);
    }

    #[test]
    fn maximally_mixed_has_zero_min_roof() {
        let rho = DensityMatrix::maximally_mixed(SystemSignature::qubits(2).unwrap());
        let cfg = RoofConfig {
            restarts: 8,
            ..RoofConfig::default()
        };
        let res = convex_roof(&rho, PureFunctional::Concurrence, &a_split(), RoofDirection::Min, &cfg)
            .unwrap();
        assert!(res.value < 1e-6, "{}", res.value);
    }

    #[test]
    fn ensemble_reconstructs_state() {
        let psi = haar_random_pure(3, 11).unwrap();
        let rho = reduce_pair_pure(&psi, 2).unwrap();
        let cfg = RoofConfig {
            restarts: 4,
            ..RoofConfig::default()
        };
        for dir in [RoofDirection::Min, RoofDirection::Max] {
            let res = convex_roof(&rho, PureFunctional::Negativity, &a_split(), dir, &cfg).unwrap();
            assert!((res.ensemble.total_probability() - 1.0).abs() < 1e-8);
            let back = res.ensemble.density().unwrap();
            assert!(back.sub(rho.matrix()).unwrap().frobenius_norm() < 1e-8);
            let avg = res.ensemble.average(PureFunctional::Negativity, &a_split()).unwrap();
            assert!((avg - res.value).abs() < 1e-8);
            match dir {
                RoofDirection::Min => assert!(res.value <= res.eigen_ensemble_value + 1e-12),
                RoofDirection::Max => assert!(res.value >= res.eigen_ensemble_value - 1e-12),
            }
        }
    }

    #[test]
    fn rank_budget_is_enforced() {
        let rho = DensityMatrix::maximally_mixed(SystemSignature::qubits(2).unwrap());
        let cfg = RoofConfig {
            max_ensemble_size: Some(3),
            ..RoofConfig::default()
        };
        let err = convex_roof(&rho, PureFunctional::Concurrence, &a_split(), RoofDirection::Min, &cfg);
        assert!(matches!(err, Err(Error::RankExceedsBudget { rank: 4, budget: 3 })));
        let cfg = RoofConfig {
            restarts: 0,
            ..RoofConfig::default()
        };
        assert!(convex_roof(&rho, PureFunctional::Concurrence, &a_split(), RoofDirection::Min, &cfg).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let psi = haar_random_pure(3, 21).unwrap();
        let rho = reduce_pair_pure(&psi, 1).unwrap();
        let cfg = RoofConfig {
            restarts: 6,
            seed: 99,
            ..RoofConfig::default()
        };
        let a = convex_roof(&rho, PureFunctional::Concurrence, &a_split(), RoofDirection::Min, &cfg).unwrap();
        let b = convex_roof(&rho, PureFunctional::Concurrence, &a_split(), RoofDirection::Min, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn min_roof_matches_wootters_on_a_few_states() {
        for seed in 0..5 {
            let psi = haar_random_pure(3, 300 + seed).unwrap();
            let rho = reduce_pair_pure(&psi, 1).unwrap();
            let w = concurrence_wootters(&rho).unwrap();
            let res = convex_roof(
                &rho,
                PureFunctional::Concurrence,
                &a_split(),
                RoofDirection::Min,
                &RoofConfig::with_seed(seed),
            )
            .unwrap();
            assert!((res.value - w).abs() < 1e-3, "seed {seed}: roof {} vs {w}", res.value);
        }
    }

    #[test]
    fn weighted_functionals_match_normalized_evaluation() {
        // qubit ⊗ 4 and 4 ⊗ 4 blocks exercise both evaluation paths
        for (n, block) in [(3usize, vec![0usize]), (4, vec![0, 1]), (3, vec![1, 2])] {
            let psi = haar_random_pure(n, 40 + n as u64).unwrap();
            let split = Bipartition::new(block.clone());
            let sig = psi.signature();
            let rest = sig.complement(&block);
            let (da, db) = (sig.offsets(&block).len(), sig.offsets(&rest).len());
            let (_, _, m) = psi.block_matrix(&block).unwrap();
            let p: f64 = 0.37;
            let scaled: Vec<C64> = m.iter().map(|z| z * p.sqrt()).collect();
            for f in [PureFunctional::Concurrence, PureFunctional::Negativity] {
                let direct = f.evaluate(&psi, &split).unwrap();
                let weighted = f.weighted(&scaled, da, db);
                assert!((weighted - p * direct).abs() < 1e-12, "{f:?} {n}: {weighted} vs {}", p * direct);
            }
            if n == 3 && block == [0] {
                let neg = negativity_pure(&psi, &split).unwrap();
                assert!(neg >= 0.0);
            }
        }
    }

    #[test]
    fn w_class_marginals_max_roof() {
        let psi = w_class_state(0.5, 0.5, 2f64.sqrt() / 2.0).unwrap();
        let ab = reduce_pair_pure(&psi, 1).unwrap();
        let res = convex_roof(
            &ab,
            PureFunctional::Negativity,
            &a_split(),
            RoofDirection::Max,
            &RoofConfig::default(),
        )
        .unwrap();
        assert!((res.value.powi(2) - 0.25).abs() < 2e-3, "{}", res.value);
    }
}
