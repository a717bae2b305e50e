//! Dense complex linear algebra for small Hermitian operators (dim <= 16).
//!
//! Everything here is sized for two-to-four qubit problems: matrices are
//! stored row-major in plain `Vec<Complex64>` and the eigensolver is a
//! cyclic Jacobi sweep, which is exact enough at these dimensions and
//! keeps the crate dependency-free on the numerics side.

use num_complex::Complex64;
use thiserror::Error;

/// Supported operator dimensions (one to four qubit factors).
pub const SUPPORTED_DIMS: [usize; 4] = [2, 4, 8, 16];

/// Elementwise Hermiticity tolerance. Inputs are constructed, not measured,
/// so any asymmetry beyond floating-point drift is a bug in the caller.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Jacobi sweep target: max off-diagonal modulus, relative to matrix scale.
const JACOBI_OFF_TOL: f64 = 5e-15;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Largest exponent fed to `exp` before we refuse; callers shift the
/// spectrum by its maximum instead of relying on saturation.
const EXP_OVERFLOW_LIMIT: f64 = 700.0;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |A - A^dagger| element is {max_asymmetry:.3e} (tolerance {tol:.1e})")]
    NotHermitian { max_asymmetry: f64, tol: f64 },
    #[error("unsupported dimension {dim}: expected one of {SUPPORTED_DIMS:?}")]
    UnsupportedDim { dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("exponent {exponent:.3e} would overflow exp(); shift the spectrum by its maximum first")]
    ExpOverflow { exponent: f64 },
    #[error("Jacobi sweep did not converge: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    NoConvergence { residual: f64, sweeps: usize },
    #[error("entry count {got} does not match dim {dim} (need {need})")]
    BadEntryCount { got: usize, dim: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense square complex matrix, row-major. Workhorse for intermediate
/// products that are not themselves Hermitian (e.g. V * diag * V^dagger
/// before symmetrization, or the spin-flip sandwich in the concurrence).
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data length mismatch");
        CMat { dim, data }
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let n = self.dim;
        CMat::from_fn(n, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate (computational-basis conjugation).
    pub fn conjugate(&self) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> CMat {
        let n = self.dim;
        CMat::from_fn(n, |i, j| self[(j, i)])
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = CMat::zeros(n);
        for ia in 0..na {
            for ja in 0..na {
                let a = self[(ia, ja)];
                for ib in 0..nb {
                    for jb in 0..nb {
                        out[(ia * nb + ib, ja * nb + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frob_dist(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max modulus of A - A^dagger entries.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Average with own adjoint; kills floating-point asymmetry after a
    /// chain of products that is Hermitian in exact arithmetic.
    pub fn hermitize(&self) -> CMat {
        let n = self.dim;
        CMat::from_fn(n, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)].conj())
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    fn has_non_finite(&self) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Self-adjoint operator on a 1-4 qubit space. Construction checks
/// Hermiticity, finiteness, and the supported dimension set.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        if !SUPPORTED_DIMS.contains(&mat.dim()) {
            return Err(LinalgError::UnsupportedDim { dim: mat.dim() });
        }
        if let Some((row, col)) = mat.has_non_finite() {
            return Err(LinalgError::NonFinite { row, col });
        }
        let asym = mat.max_asymmetry();
        let scale = mat.max_abs().max(1.0);
        if asym > HERMITICITY_TOL * scale {
            return Err(LinalgError::NotHermitian {
                max_asymmetry: asym,
                tol: HERMITICITY_TOL,
            });
        }
        // Store the exactly Hermitian average so downstream arithmetic
        // never re-trips the tolerance.
        Ok(HermitianOperator {
            mat: mat.hermitize(),
        })
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(LinalgError::BadEntryCount {
                got: data.len(),
                dim,
                need: dim * dim,
            });
        }
        HermitianOperator::new(CMat::from_rows(dim, data))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        HermitianOperator::new(CMat::identity(dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        HermitianOperator::new(CMat::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues and
/// the matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, ordered as `eigenvalues`.
    pub eigenvectors: CMat,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Reassemble V * diag(f(lambda)) * V^dagger.
    pub fn assemble(&self, mut f: impl FnMut(f64) -> f64) -> CMat {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        let mut out = CMat::zeros(n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each pivot (p, q) is annihilated by a unitary built from the phase of
/// the pivot entry and a real Jacobi rotation; sweeps continue until the
/// largest off-diagonal modulus drops below `1e-13` (relative to the
/// matrix scale).
pub fn eig_hermitian(a: &HermitianOperator) -> Result<Spectrum> {
    let n = a.dim();
    let mut m = a.mat().clone();
    let mut v = CMat::identity(n);
    let scale = m.max_abs().max(1.0);
    let tol = JACOBI_OFF_TOL * scale;

    let mut residual = off_diag_max(&m);
    let mut sweeps = 0;
    while residual > tol {
        if sweeps >= MAX_JACOBI_SWEEPS {
            return Err(LinalgError::NoConvergence { residual, sweeps });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
        residual = off_diag_max(&m);
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = CMat::from_fn(n, |i, j| v[(i, order[j])]);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diag_max(m: &CMat) -> f64 {
    let n = m.dim();
    let mut worst = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            worst = worst.max(m[(p, q)].norm());
        }
    }
    worst
}

/// One two-sided rotation A <- U^dagger A U annihilating the (p, q) entry.
/// U restricted to the (p, q) plane is diag(1, e^{-i phi}) times a real
/// Jacobi rotation, with phi the phase of A[p][q].
fn jacobi_rotate(m: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let b = m[(p, q)];
    let r = b.norm();
    if r == 0.0 {
        return;
    }
    let phase = b / r;
    let alpha = m[(p, p)].re;
    let delta = m[(q, q)].re;
    let tau = (delta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U[p][p] = c, U[p][q] = s, U[q][p] = -s e^{-i phi}, U[q][q] = c e^{-i phi}
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -s * phase.conj();
    let uqq = c * phase.conj();

    let n = m.dim();
    // Column update: A <- A U.
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * upp + akq * uqp;
        m[(k, q)] = akp * upq + akq * uqq;
    }
    // Row update: A <- U^dagger A.
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        m[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    // Pin the annihilated pair and keep the diagonal real.
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    // Accumulate V <- V U.
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// exp(s A) via eigendecomposition. Rejects exponents that would overflow;
/// Gibbs-state construction pre-shifts the spectrum by its maximum.
pub fn expm_hermitian(a: &HermitianOperator, s: f64) -> Result<HermitianOperator> {
    let spec = eig_hermitian(a)?;
    for &lam in &spec.eigenvalues {
        let e = s * lam;
        if e > EXP_OVERFLOW_LIMIT {
            return Err(LinalgError::ExpOverflow { exponent: e });
        }
    }
    let m = spec.assemble(|lam| (s * lam).exp());
    HermitianOperator::new(m.hermitize())
}

/// Trace norm of a Hermitian operator: sum of |eigenvalues|.
pub fn trace_norm(a: &HermitianOperator) -> Result<f64> {
    let spec = eig_hermitian(a)?;
    Ok(spec.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Kronecker product of two Hermitian operators (Hermitian again).
pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    HermitianOperator::new(a.mat().kron(b.mat()))
}

/// Adjoint; identity map on Hermitian operators, kept for interface parity.
pub fn dagger(a: &HermitianOperator) -> HermitianOperator {
    HermitianOperator {
        mat: a.mat().dagger(),
    }
}

/// Frobenius distance between two operators of equal dimension.
pub fn frob_dist(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.mat().frob_dist(b.mat()))
}

/// Largest singular value estimate by power iteration on A^dagger A.
/// Used only as a cross-check against the trace norm.
pub fn op_norm_estimate(a: &HermitianOperator, iters: usize) -> f64 {
    let n = a.dim();
    let m = a.mat();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 / ((i + 1) as f64), 0.3 / ((i + 2) as f64)))
        .collect();
    let norm = |x: &[Complex64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut lam = 0.0;
    for _ in 0..iters {
        let w = m.apply(&v);
        lam = norm(&w);
        if lam == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|z| z / lam).collect();
    }
    lam
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_hermitian;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> HermitianOperator {
        HermitianOperator::from_rows(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identity_eigenvalues() {
        let spec = eig_hermitian(&HermitianOperator::identity(2).unwrap()).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_spectrum() {
        let spec = eig_hermitian(&pauli_x()).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-13);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn reconstruction_and_orthonormality_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [4usize, 8] {
            for _ in 0..100 {
                let a = random_hermitian(dim, &mut rng);
                let spec = eig_hermitian(&a).unwrap();
                let recon = spec.assemble(|l| l);
                assert!(recon.frob_dist(a.mat()) <= 1e-10, "reconstruction failed");
                let v = &spec.eigenvectors;
                let gram = v.dagger().matmul(v);
                assert!(gram.frob_dist(&CMat::identity(dim)) <= 1e-10, "V not unitary");
                for w in spec.eigenvalues.windows(2) {
                    assert!(w[0] <= w[1], "eigenvalues not ascending");
                }
            }
        }
    }

    #[test]
    fn non_hermitian_rejected_with_diagnostic() {
        let mut m = CMat::identity(2);
        m[(0, 1)] = Complex64::new(1e-6, 0.0);
        let err = HermitianOperator::new(m).unwrap_err();
        match err {
            LinalgError::NotHermitian { max_asymmetry, .. } => {
                assert!((max_asymmetry - 1e-6).abs() < 1e-9)
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn expm_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_hermitian(4, &mut rng);
        let e = expm_hermitian(&a, 0.0).unwrap();
        assert!(e.mat().frob_dist(&CMat::identity(4)) < 1e-12);
    }

    #[test]
    fn expm_diagonal_case() {
        let d = HermitianOperator::from_rows(
            2,
            vec![
                Complex64::new(0.3, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.1, 0.0),
            ],
        )
        .unwrap();
        let e = expm_hermitian(&d, 1.0).unwrap();
        assert!((e.get(0, 0).re - 0.3f64.exp()).abs() < 1e-13);
        assert!((e.get(1, 1).re - (-1.1f64).exp()).abs() < 1e-13);
        assert!(e.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn expm_semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let a = random_hermitian(4, &mut rng);
            let s = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(-2.0..2.0);
            let lhs = expm_hermitian(&a, s)
                .unwrap()
                .mat()
                .matmul(expm_hermitian(&a, t).unwrap().mat());
            let rhs = expm_hermitian(&a, s + t).unwrap();
            assert!(lhs.frob_dist(rhs.mat()) <= 1e-9);
        }
    }

    #[test]
    fn expm_overflow_rejected() {
        let a = HermitianOperator::identity(2).unwrap();
        assert!(matches!(
            expm_hermitian(&a, 1000.0),
            Err(LinalgError::ExpOverflow { .. })
        ));
    }

    #[test]
    fn trace_norm_identity() {
        let i4 = HermitianOperator::identity(4).unwrap();
        assert!((trace_norm(&i4).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_vs_eigensum_and_op_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_hermitian(4, &mut rng);
            let spec = eig_hermitian(&a).unwrap();
            let tn = trace_norm(&a).unwrap();
            let by_eig: f64 = spec.eigenvalues.iter().map(|l| l.abs()).sum();
            assert_eq!(tn, by_eig);
            let op = op_norm_estimate(&a, 200);
            assert!(tn >= op - 1e-8, "trace norm {tn} below op norm {op}");
        }
    }

    #[test]
    fn kron_identities() {
        let i2 = HermitianOperator::identity(2).unwrap();
        let i4 = kron(&i2, &i2).unwrap();
        assert!(i4.mat().frob_dist(&CMat::identity(4)) < 1e-15);

        let sx = pauli_x();
        let xx = kron(&sx, &sx).unwrap();
        let spec = eig_hermitian(&xx).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (got, want) in spec.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn frob_dist_self_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(8, &mut rng);
        assert_eq!(frob_dist(&a, &a).unwrap(), 0.0);
        let b = random_hermitian(4, &mut rng);
        assert!(matches!(
            frob_dist(&a, &b),
            Err(LinalgError::DimMismatch { .. })
        ));
    }
}
