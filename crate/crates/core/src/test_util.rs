//! Shared random-instance generators for unit tests.

use crate::linalg::{CMat, HermitianOperator};
use crate::quantum::DensityMatrix;
use num_complex::Complex64;
use rand::Rng;

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let mut m = CMat::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = random_complex(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

/// Random mixed state from the Ginibre ensemble: G G^dagger / Tr.
pub fn random_density(dims: &[usize], rng: &mut impl Rng) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let g = CMat::from_fn(dim, |_, _| random_complex(rng));
    let gg = g.matmul(&g.dagger());
    let tr = gg.trace().re;
    let rho = gg.scale(Complex64::new(1.0 / tr, 0.0));
    DensityMatrix::new(HermitianOperator::new(rho.hermitize()).unwrap(), dims.to_vec()).unwrap()
}

/// Haar-ish random single-qubit unitary via Gram-Schmidt on Gaussianless
/// uniform entries; good enough for invariance tests.
pub fn random_unitary2(rng: &mut impl Rng) -> CMat {
    loop {
        let a = random_complex(rng);
        let b = random_complex(rng);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n < 1e-3 {
            continue;
        }
        let (a, b) = (a / n, b / n);
        // Second column orthogonal to (a, b): (-conj(b), conj(a)).
        let mut u = CMat::zeros(2);
        u[(0, 0)] = a;
        u[(1, 0)] = b;
        u[(0, 1)] = -b.conj();
        u[(1, 1)] = a.conj();
        return u;
    }
}

/// Normalized random pure state vector of the given dimension.
pub fn random_pure(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Projector onto a pure state as a density matrix.
pub fn pure_density(dims: &[usize], v: &[Complex64]) -> DensityMatrix {
    let dim = v.len();
    let m = CMat::from_fn(dim, |i, j| v[i] * v[j].conj());
    DensityMatrix::new(HermitianOperator::new(m).unwrap(), dims.to_vec()).unwrap()
}
