//! Qubit operators, XYZ exchange Hamiltonians, thermal states, and
//! subsystem operations.
//!
//! Conventions, fixed here and in the file formats:
//! - factor ordering is big-endian (first factor owns the most
//!   significant index block);
//! - partial transpose defaults to the first factor ("T_A");
//! - the Bell basis is ordered (Phi+, Phi-, Psi+, Psi-) with the
//!   standard phases, e.g. |Psi-> = (|01> - |10>)/sqrt(2);
//! - k_B = 1, so beta carries units of inverse coupling energy.

use crate::linalg::{self, CMat, HermitianOperator, LinalgError};
use num_complex::Complex64;
use thiserror::Error;

/// Trace-of-one tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

/// Density-matrix eigenvalues below this are a construction bug, not
/// eigensolver round-off.
pub const PSD_TOL: f64 = -1e-9;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("trace is {trace} (must be 1 within {TRACE_TOL:.0e})")]
    BadTrace { trace: f64 },
    #[error("not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },
    #[error("subsystem dims {dims:?} do not multiply to operator dim {dim}")]
    BadSubsystemDims { dims: Vec<usize>, dim: usize },
    #[error("subsystem index {index} out of range for {count} factors")]
    BadSubsystemIndex { index: usize, count: usize },
    #[error("keep set is empty or out of range")]
    BadKeepSet,
    #[error("coupling {name} is not finite")]
    NonFiniteCoupling { name: &'static str },
    #[error("beta {beta} is invalid (must be finite and >= 0)")]
    BadBeta { beta: f64 },
    #[error("expected a 2-qubit state, got dims {dims:?}")]
    NotTwoQubit { dims: Vec<usize> },
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Exchange couplings (x, y, z) of H = x XX + y YY + z ZZ, in energy
/// units with k_B = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYZCouplings {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl XYZCouplings {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        for (v, name) in [(x, "x"), (y, "y"), (z, "z")] {
            if !v.is_finite() {
                return Err(QuantumError::NonFiniteCoupling { name });
            }
        }
        Ok(XYZCouplings { x, y, z })
    }

    /// Energies in the Bell basis (Phi+, Phi-, Psi+, Psi-); the XYZ
    /// Hamiltonian is diagonal there.
    pub fn bell_energies(&self) -> [f64; 4] {
        [
            self.x - self.y + self.z,
            -self.x + self.y + self.z,
            self.x + self.y - self.z,
            -self.x - self.y - self.z,
        ]
    }
}

/// Inverse temperature beta = 1/(k_B T), k_B = 1. beta = 0 is the
/// infinite-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(QuantumError::BadBeta { beta });
        }
        Ok(InverseTemperature(beta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Unit-trace positive semidefinite operator with a declared tensor
/// factorization.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: HermitianOperator,
    subsystem_dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator, subsystem_dims: Vec<usize>) -> Result<Self> {
        let prod: usize = subsystem_dims.iter().product();
        if prod != op.dim() || subsystem_dims.is_empty() {
            return Err(QuantumError::BadSubsystemDims {
                dims: subsystem_dims,
                dim: op.dim(),
            });
        }
        let trace = op.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(QuantumError::BadTrace { trace });
        }
        let spec = linalg::eig_hermitian(&op)?;
        if spec.min() < PSD_TOL {
            return Err(QuantumError::NotPsd { min_eig: spec.min() });
        }
        Ok(DensityMatrix {
            op,
            subsystem_dims,
        })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.subsystem_dims == [2, 2]
    }

    pub fn require_two_qubit(&self) -> Result<()> {
        if self.is_two_qubit() {
            Ok(())
        } else {
            Err(QuantumError::NotTwoQubit {
                dims: self.subsystem_dims.clone(),
            })
        }
    }

    /// Maximally mixed state I/d on the given factors.
    pub fn maximally_mixed(subsystem_dims: Vec<usize>) -> Result<Self> {
        let dim: usize = subsystem_dims.iter().product();
        let m = CMat::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        DensityMatrix::new(HermitianOperator::new(m)?, subsystem_dims)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// The 2x2 Pauli matrix along the given axis.
pub fn pauli(axis: PauliAxis) -> HermitianOperator {
    let (a, b, c, d) = match axis {
        PauliAxis::X => (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ),
        PauliAxis::Y => (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ),
        PauliAxis::Z => (
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ),
    };
    HermitianOperator::from_rows(2, vec![a, b, c, d]).expect("Pauli matrices are Hermitian")
}

/// H = x XX + y YY + z ZZ on two qubits; diagonal in the Bell basis.
pub fn build_xyz(c: &XYZCouplings) -> HermitianOperator {
    let mut m = CMat::zeros(4);
    for (coupling, axis) in [
        (c.x, PauliAxis::X),
        (c.y, PauliAxis::Y),
        (c.z, PauliAxis::Z),
    ] {
        let p = pauli(axis);
        let pp = p.mat().kron(p.mat());
        m = m.add(&pp.scale(Complex64::new(coupling, 0.0)));
    }
    HermitianOperator::new(m).expect("XYZ Hamiltonian is Hermitian")
}

/// Thermal state exp(-beta H)/Z. The spectrum is shifted by its minimum
/// before exponentiating, so large beta stays finite.
pub fn gibbs_state(h: &HermitianOperator, beta: InverseTemperature) -> Result<DensityMatrix> {
    let b = beta.value();
    let spec = linalg::eig_hermitian(h)?;
    let lam_min = spec.min();
    let weights: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| (-b * (l - lam_min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let mut k = 0;
    let rho = spec.assemble(|_| {
        let w = weights[k] / z;
        k += 1;
        w
    });
    // Factor dims: qubits throughout this crate.
    let n_qubits = h.dim().trailing_zeros() as usize;
    let dims = vec![2usize; n_qubits];
    DensityMatrix::new(HermitianOperator::new(rho.hermitize())?, dims)
}

/// Linear index <-> factor digits, big-endian.
fn to_digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn from_digits(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (d, &dim) in digits.iter().zip(dims) {
        idx = idx * dim + d;
    }
    idx
}

/// Transpose the listed tensor factors of a raw matrix. Assumes dims and
/// subset have been validated; see `transpose_subsystems` for the checked
/// operator-level version.
pub fn transpose_subsystems_mat(m: &CMat, dims: &[usize], subset: &[usize]) -> CMat {
    let n = m.dim();
    let mut out = CMat::zeros(n);
    for i in 0..n {
        let di = to_digits(i, dims);
        for j in 0..n {
            let dj = to_digits(j, dims);
            let mut ti = di.clone();
            let mut tj = dj.clone();
            for &s in subset {
                ti[s] = dj[s];
                tj[s] = di[s];
            }
            out[(from_digits(&ti, dims), from_digits(&tj, dims))] = m[(i, j)];
        }
    }
    out
}

/// Transpose the listed tensor factors of an operator. Involution;
/// preserves Hermiticity and trace, not positivity.
pub fn transpose_subsystems(
    op: &HermitianOperator,
    dims: &[usize],
    subset: &[usize],
) -> Result<HermitianOperator> {
    let prod: usize = dims.iter().product();
    if prod != op.dim() {
        return Err(QuantumError::BadSubsystemDims {
            dims: dims.to_vec(),
            dim: op.dim(),
        });
    }
    for &s in subset {
        if s >= dims.len() {
            return Err(QuantumError::BadSubsystemIndex {
                index: s,
                count: dims.len(),
            });
        }
    }
    Ok(HermitianOperator::new(transpose_subsystems_mat(
        op.mat(),
        dims,
        subset,
    ))?)
}

/// Partial transpose of a density matrix on one factor (index 0 is "T_A").
pub fn partial_transpose(rho: &DensityMatrix, subsystem_index: usize) -> Result<HermitianOperator> {
    transpose_subsystems(rho.op(), rho.subsystem_dims(), &[subsystem_index])
}

/// Reduced state on the factors listed in `keep` (ascending output order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.subsystem_dims();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(QuantumError::BadKeepSet);
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    if traced.is_empty() {
        return Ok(rho.clone());
    }
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let tr_dim: usize = traced_dims.iter().product();

    let mut out = CMat::zeros(out_dim);
    for i in 0..out_dim {
        let ki = to_digits(i, &keep_dims);
        for j in 0..out_dim {
            let kj = to_digits(j, &keep_dims);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..tr_dim {
                let td = to_digits(t, &traced_dims);
                let mut full_i = vec![0usize; dims.len()];
                let mut full_j = vec![0usize; dims.len()];
                for (pos, &k) in keep.iter().enumerate() {
                    full_i[k] = ki[pos];
                    full_j[k] = kj[pos];
                }
                for (pos, &k) in traced.iter().enumerate() {
                    full_i[k] = td[pos];
                    full_j[k] = td[pos];
                }
                acc += rho.op().get(from_digits(&full_i, dims), from_digits(&full_j, dims));
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::new(HermitianOperator::new(out)?, keep_dims)
}

/// The four Bell vectors, ordered (Phi+, Phi-, Psi+, Psi-).
pub fn bell_basis() -> [[Complex64; 4]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(s, 0.0);
    let m = Complex64::new(-s, 0.0);
    [
        [p, z, z, p], // Phi+ = (|00> + |11>)/sqrt2
        [p, z, z, m], // Phi- = (|00> - |11>)/sqrt2
        [z, p, p, z], // Psi+ = (|01> + |10>)/sqrt2
        [z, p, m, z], // Psi- = (|01> - |10>)/sqrt2
    ]
}

/// Diagonal of a 2-qubit state in the Bell basis. For XYZ thermal states
/// these are the full spectrum, which gives closed-form oracles.
pub fn bell_populations(rho: &DensityMatrix) -> Result<[f64; 4]> {
    rho.require_two_qubit()?;
    let basis = bell_basis();
    let mut pops = [0.0f64; 4];
    for (k, v) in basis.iter().enumerate() {
        let w = rho.op().mat().apply(v);
        let p: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        pops[k] = p.re;
    }
    Ok(pops)
}
