//! Shared helpers for integration tests.
#![allow(dead_code)]

use entpt::linalg::{CMat, HermitianOperator};
use entpt::quantum::{bell_basis, DensityMatrix};
use num_complex::Complex64;
use rand::prelude::*;

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
}

/// Ginibre-induced random density matrix on the given factor dims.
pub fn random_density(dims: &[usize], rng: &mut impl Rng) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    let g = CMat::from_fn(dim, |_, _| random_complex(rng));
    let mut rho = g.matmul(&g.dagger());
    let tr = rho.trace().re;
    rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
    DensityMatrix::new(HermitianOperator::new(rho.hermitize()).unwrap(), dims.to_vec()).unwrap()
}

/// Density matrix of a normalized pure state vector.
pub fn pure_density(dims: &[usize], v: &[Complex64]) -> DensityMatrix {
    let dim: usize = dims.iter().product();
    assert_eq!(v.len(), dim);
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut m = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = v[i] * v[j].conj() / (norm * norm);
        }
    }
    DensityMatrix::new(HermitianOperator::new(m.hermitize()).unwrap(), dims.to_vec()).unwrap()
}

/// The k-th Bell state as a two-qubit density matrix.
pub fn bell_state(k: usize) -> DensityMatrix {
    pure_density(&[2, 2], &bell_basis()[k])
}

/// Random Bell-diagonal density matrix.
pub fn random_bell_diagonal(rng: &mut impl Rng) -> DensityMatrix {
    let mut pops = [0.0; 4];
    let mut total = 0.0;
    for p in pops.iter_mut() {
        *p = rng.gen::<f64>();
        total += *p;
    }
    for p in pops.iter_mut() {
        *p /= total;
    }
    let basis = bell_basis();
    let mut m = CMat::zeros(4);
    for (k, v) in basis.iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] += Complex64::new(pops[k], 0.0) * v[i] * v[j].conj();
            }
        }
    }
    DensityMatrix::new(HermitianOperator::new(m.hermitize()).unwrap(), vec![2, 2]).unwrap()
}

/// Mix toward white noise until the state is PPT (with margin).
pub fn make_ppt(rho: &DensityMatrix) -> DensityMatrix {
    let mm = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
    for k in 0..=40 {
        let s = k as f64 / 40.0;
        let m = rho
            .op()
            .mat()
            .scale(Complex64::new(1.0 - s, 0.0))
            .add(&mm.op().mat().scale(Complex64::new(s, 0.0)));
        let cand =
            DensityMatrix::new(HermitianOperator::new(m.hermitize()).unwrap(), vec![2, 2])
                .unwrap();
        if entpt::quantifiers::negativity(&cand).unwrap() <= 0.0 {
            return cand;
        }
    }
    mm
}
