//! Dense complex linear algebra on composite quantum systems.
//!
//! Subsystems are indexed big-endian over the signature: index 0 is the
//! leftmost tensor factor and carries the most significant digit of a
//! basis-state index.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::PureState;

pub type C64 = Complex64;

pub const TAU_HERM: f64 = 1e-10;
pub const TAU_TRACE: f64 = 1e-10;
pub const TAU_PSD: f64 = 1e-9;
pub const TAU_MUL: f64 = 1e-10;

/// Eigenvalues below this are treated as zero when counting rank.
pub const RANK_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Ordered subsystem dimensions of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemSignature {
    dims: Vec<usize>,
}

impl SystemSignature {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSignature("no subsystems".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidSignature(format!(
                "zero-dimensional subsystem in {dims:?}"
            )));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidSignature("total dimension overflows".into()))?;
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Stride of each subsystem's digit in a flat big-endian index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        Self::new(keep.iter().map(|&k| self.dims[k]).collect())
    }

    /// Validates an index set against this signature: in range, no repeats.
    /// Returns the indices sorted ascending.
    pub fn check_indices(&self, indices: &[usize]) -> Result<Vec<usize>> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSplit(format!("subsystem {} repeated", w[0])));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.dims.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                count: self.dims.len(),
            });
        }
        Ok(sorted)
    }

    pub fn complement(&self, indices: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|i| !indices.contains(i)).collect()
    }

    /// Flat-index offsets of every multi-index over `subsystems`, in
    /// big-endian order of those subsystems. Offsets of disjoint subsystem
    /// sets add to a full flat index.
    pub(crate) fn offsets(&self, subsystems: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &s in subsystems {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[s]);
            for &base in &offsets {
                for digit in 0..self.dims[s] {
                    next.push(base + digit * strides[s]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

impl fmt::Display for SystemSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix from {} entries",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut data = Vec::with_capacity(n * n);
        for a in v {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("operand shapes differ".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add_assign_scaled(&mut self, rhs: &Self, s: f64) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest |M - M†| entry.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian eigendecomposition. Eigenvalues ascending; eigenvectors are the
/// columns of the returned matrix in matching order.
pub fn hermitian_eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigendecomposition of non-square matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = eig.eigenvectors[(i, k)];
        }
    }
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigh(m)?.0)
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let gram = m.adjoint().matmul(m)?;
    let mut sv: Vec<f64> = hermitian_eigenvalues(&gram)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    sv.reverse();
    Ok(sv)
}

/// Hermitian, PSD, unit-trace complex matrix tagged with its subsystem
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    sig: SystemSignature,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, sig: SystemSignature) -> Result<Self> {
        if !mat.is_square() || mat.rows() != sig.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for signature {sig}",
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = mat.hermiticity_defect();
        if defect > TAU_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TAU_TRACE || tr.im.abs() > TAU_TRACE {
            return Err(Error::TraceNotUnit(tr.re));
        }
        let min_eig = hermitian_eigenvalues(&mat)?[0];
        if min_eig < -TAU_PSD {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self { mat, sig })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, sig: SystemSignature) -> Self {
        Self { mat, sig }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            mat: ComplexMatrix::outer(psi.amps()),
            sig: psi.signature().clone(),
        }
    }

    pub fn maximally_mixed(sig: SystemSignature) -> Self {
        let d = sig.total_dim();
        let mat = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Self { mat, sig }
    }

    /// Σ pᵢ |ψᵢ⟩⟨ψᵢ| over states sharing one signature.
    pub fn mixture(members: &[(f64, PureState)]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty mixture".into()))?;
        let sig = first.1.signature().clone();
        let d = sig.total_dim();
        let mut mat = ComplexMatrix::zeros(d, d);
        for (p, psi) in members {
            if psi.signature() != &sig {
                return Err(Error::DimensionMismatch("mixture members differ in shape".into()));
            }
            mat.add_assign_scaled(&ComplexMatrix::outer(psi.amps()), *p);
        }
        Self::new(mat, sig)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn signature(&self) -> &SystemSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        hermitian_eigh(&self.mat)
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(hermitian_eigenvalues(&self.mat)?
            .iter()
            .filter(|&&l| l > RANK_TOL)
            .count())
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.mat.data().iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Traces out every subsystem not listed in `keep`. The result's subsystems
/// appear in ascending index order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let sig = rho.signature();
    let keep = sig.check_indices(keep)?;
    if keep.is_empty() {
        return Err(Error::InvalidSplit("nothing kept by partial trace".into()));
    }
    let traced = sig.complement(&keep);
    let keep_off = sig.offsets(&keep);
    let trace_off = sig.offsets(&traced);
    let dk = keep_off.len();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (a, &oa) in keep_off.iter().enumerate() {
        for (b, &ob) in keep_off.iter().enumerate() {
            out[(a, b)] = trace_off.iter().map(|&c| m[(oa + c, ob + c)]).sum();
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(out, sig.restrict(&keep)?))
}

/// Transposes the row and column digits of one subsystem.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    partial_transpose_matrix(rho.matrix(), rho.signature(), subsystem)
}

pub(crate) fn partial_transpose_matrix(
    m: &ComplexMatrix,
    sig: &SystemSignature,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    if subsystem >= sig.len() {
        return Err(Error::IndexOutOfRange {
            index: subsystem,
            count: sig.len(),
        });
    }
    let d = sig.dims()[subsystem];
    let stride = sig.strides()[subsystem];
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let di = (i / stride) % d;
        for j in 0..n {
            let dj = (j / stride) % d;
            let src_i = i - di * stride + dj * stride;
            let src_j = j - dj * stride + di * stride;
            out[(i, j)] = m[(src_i, src_j)];
        }
    }
    Ok(out)
}

/// Sum of singular values. Hermitian inputs use Σ|λᵢ| directly.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.is_square() && m.is_hermitian(1e-12 * (1.0 + m.frobenius_norm())) {
        return Ok(hermitian_eigenvalues(m)?.iter().map(|l| l.abs()).sum());
    }
    Ok(singular_values(m)?.iter().sum())
}

/// Principal square root of a PSD matrix. Eigenvalues in (−τ_psd, 0) are
/// clipped to zero.
pub fn principal_sqrt_psd(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    sqrt_psd_with_floor(rho.matrix(), 0.0)
}

/// Square root that zeroes every eigenvalue at or below `floor`.
pub(crate) fn sqrt_psd_with_floor(m: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eigh(m)?;
    if vals[0] < -TAU_PSD {
        return Err(Error::NotPsd(vals[0]));
    }
    let roots: Vec<f64> = vals
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
        .collect();
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &r) in roots.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vecs[(i, k)] * r;
            for j in 0..n {
                out[(i, j)] += vi * vecs[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Squared Schmidt coefficients across `block`, descending, negatives
/// clipped to zero. There are min(d_block, d_rest) of them.
pub fn schmidt_coefficients(psi: &PureState, block: &[usize]) -> Result<Vec<f64>> {
    let sig = psi.signature();
    let block = sig.check_indices(block)?;
    if block.is_empty() || block.len() == sig.len() {
        return Err(Error::InvalidSplit("both sides of a split must be non-empty".into()));
    }
    // the larger side's marginal only adds zero eigenvalues, whose rounding
    // noise would survive a square root
    let rest = sig.complement(&block);
    let dim = |s: &[usize]| s.iter().map(|&i| sig.dims()[i]).product::<usize>();
    let side = if dim(&block) <= dim(&rest) { block } else { rest };
    let reduced = psi.reduced_matrix(&side)?;
    let mut vals: Vec<f64> = hermitian_eigenvalues(&reduced)?
        .into_iter()
        .map(|l| l.max(0.0))
        .collect();
    vals.reverse();
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{w_class_state, PureState};

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_real_qubits(&[h, 0.0, 0.0, h]).unwrap()
    }

    fn ket00() -> PureState {
        PureState::from_real_qubits(&[1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn signature_rejects_zero_dims() {
        assert!(SystemSignature::new(vec![2, 0]).is_err());
        assert!(SystemSignature::new(vec![]).is_err());
        assert_eq!(SystemSignature::new(vec![2, 2, 4]).unwrap().total_dim(), 16);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell());
        let a = partial_trace(&rho, &[0]).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        assert!(a.matrix().max_abs_diff(&expected) < 1e-15);
        assert_eq!(a.signature().dims(), &[2]);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = DensityMatrix::from_pure(&ket00());
        let a = partial_trace(&rho, &[0]).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(a.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_of_w_class_marginal() {
        // conditional BC states for A=0 and A=1 are orthogonal, so ρ_A is
        // diagonal with weights c2²+c3² and c1²
        let psi = w_class_state(0.5, 0.5, 2f64.sqrt() / 2.0).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let a = partial_trace(&rho, &[0]).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.75, 0.25]);
        assert!(a.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::from_pure(&bell());
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::IndexOutOfRange { index: 2, count: 2 })
        ));
        assert!(partial_trace(&rho, &[0, 0]).is_err());
        assert!(partial_trace(&rho, &[]).is_err());
    }

    #[test]
    fn partial_transpose_cases() {
        let prod = DensityMatrix::from_pure(&ket00());
        let pt = partial_transpose(&prod, 0).unwrap();
        assert_eq!(&pt, prod.matrix());

        let rho = DensityMatrix::from_pure(&bell());
        let pt = partial_transpose(&rho, 0).unwrap();
        let vals = hermitian_eigenvalues(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14, "{vals:?}");
        }
        assert!(partial_transpose(&rho, 5).is_err());
    }

    #[test]
    fn trace_norm_cases() {
        assert!((trace_norm(&ComplexMatrix::identity(2)).unwrap() - 2.0).abs() < 1e-15);
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-15);
        let rho = DensityMatrix::from_pure(&bell());
        let pt = partial_transpose(&rho, 0).unwrap();
        assert!((trace_norm(&pt).unwrap() - 2.0).abs() < 1e-14);

        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(trace_norm(&bad), Err(Error::NonFinite)));
    }

    #[test]
    fn trace_norm_of_non_hermitian() {
        // [[0, 2], [0, 0]] has singular values {2, 0}
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![ZERO, C64::new(2.0, 0.0), ZERO, ZERO],
        )
        .unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn principal_sqrt_cases() {
        let sig = SystemSignature::qubits(1).unwrap();
        let half = DensityMatrix::maximally_mixed(sig.clone());
        let s = principal_sqrt_psd(&half).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[r, r])) < 1e-15);

        let proj = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), sig.clone())
            .unwrap();
        let s = principal_sqrt_psd(&proj).unwrap();
        assert!(s.max_abs_diff(proj.matrix()) < 1e-15);

        let diag = DensityMatrix::new(
            ComplexMatrix::from_real_diagonal(&[0.8, 0.2]),
            sig.clone(),
        )
        .unwrap();
        let s = principal_sqrt_psd(&diag).unwrap();
        let r5 = 5f64.sqrt();
        assert!(s.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0 / r5, 1.0 / r5])) < 1e-15);
    }

    #[test]
    fn sqrt_rejects_negative_eigenvalues() {
        let m = ComplexMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(matches!(sqrt_psd_with_floor(&m, 0.0), Err(Error::NotPsd(_))));
        // noise above −τ_psd is clipped
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-12]);
        let s = sqrt_psd_with_floor(&m, 0.0).unwrap();
        assert_eq!(s[(1, 1)], ZERO);
    }

    #[test]
    fn density_matrix_validation() {
        let sig = SystemSignature::qubits(1).unwrap();
        let not_unit = ComplexMatrix::from_real_diagonal(&[0.6, 0.6]);
        assert!(matches!(
            DensityMatrix::new(not_unit, sig.clone()),
            Err(Error::TraceNotUnit(_))
        ));
        let neg = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(neg, sig.clone()), Err(Error::NotPsd(_))));
        let mut nh = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        nh[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(nh, sig.clone()), Err(Error::NotHermitian(_))));
        let wrong = ComplexMatrix::identity(4);
        assert!(DensityMatrix::new(wrong, sig).is_err());
    }

    #[test]
    fn schmidt_cases() {
        let s = schmidt_coefficients(&bell(), &[0]).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-15 && (s[1] - 0.5).abs() < 1e-15);
        let s = schmidt_coefficients(&ket00(), &[0]).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15 && s[1].abs() < 1e-15);
        let w = w_class_state(0.5, 0.5, 2f64.sqrt() / 2.0).unwrap();
        let s = schmidt_coefficients(&w, &[0]).unwrap();
        assert!((s[0] - 0.75).abs() < 1e-15 && (s[1] - 0.25).abs() < 1e-15);
        assert!(schmidt_coefficients(&w, &[]).is_err());
        assert!(schmidt_coefficients(&w, &[0, 1, 2]).is_err());
    }
}
