//! The five entanglement quantifiers: concurrence, entanglement of
//! formation, negativity, logarithmic negativity, and the 0/1 indicator.
//!
//! Log bases: entanglement of formation and logarithmic negativity both
//! use base 2, so Bell states score exactly 1.

use crate::linalg::{self, CMat, HermitianOperator};
use crate::quantum::{self, DensityMatrix, PauliAxis, QuantumError};
use thiserror::Error;

/// PPT threshold for the indicator: an order of magnitude above the
/// eigensolver tolerance, two below any negativity seen in the sweeps.
pub const EPS_PPT: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QuantifierError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error("indicator is only decidable by PPT for 2-qubit states, got dims {dims:?}")]
    IndicatorUndecidable { dims: Vec<usize> },
}

pub type Result<T> = std::result::Result<T, QuantifierError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantifierKind {
    Concurrence,
    EoF,
    Negativity,
    LogNegativity,
    Indicator,
}

impl QuantifierKind {
    pub const ALL: [QuantifierKind; 5] = [
        QuantifierKind::Concurrence,
        QuantifierKind::EoF,
        QuantifierKind::Negativity,
        QuantifierKind::LogNegativity,
        QuantifierKind::Indicator,
    ];

    /// Short label used in CSV headers and CLI flags.
    pub fn label(&self) -> &'static str {
        match self {
            QuantifierKind::Concurrence => "C",
            QuantifierKind::EoF => "Ef",
            QuantifierKind::Negativity => "N",
            QuantifierKind::LogNegativity => "EN",
            QuantifierKind::Indicator => "IM",
        }
    }

    pub fn parse(s: &str) -> Option<QuantifierKind> {
        match s {
            "C" | "c" | "concurrence" => Some(QuantifierKind::Concurrence),
            "Ef" | "EF" | "ef" | "eof" => Some(QuantifierKind::EoF),
            "N" | "n" | "negativity" => Some(QuantifierKind::Negativity),
            "EN" | "En" | "en" | "logneg" => Some(QuantifierKind::LogNegativity),
            "IM" | "im" | "indicator" => Some(QuantifierKind::Indicator),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantifierValue {
    pub kind: QuantifierKind,
    pub value: f64,
}

/// Evaluate one quantifier on a state.
pub fn evaluate(kind: QuantifierKind, rho: &DensityMatrix) -> Result<f64> {
    match kind {
        QuantifierKind::Concurrence => concurrence(rho),
        QuantifierKind::EoF => entanglement_of_formation(rho),
        QuantifierKind::Negativity => negativity(rho),
        QuantifierKind::LogNegativity => log_negativity(rho),
        QuantifierKind::Indicator => indicator(rho).map(|v| v as f64),
    }
}

/// Hermitian square root of a PSD operator, clamping round-off negatives.
fn psd_sqrt(op: &HermitianOperator) -> Result<CMat> {
    let spec = linalg::eig_hermitian(op)?;
    Ok(spec.assemble(|l| if l > 0.0 { l.sqrt() } else { 0.0 }))
}

/// Wootters concurrence of a 2-qubit state.
///
/// The spin-flip values are the singular values of
/// X = sqrt(rho) (YY) conj(sqrt(rho)): X X^dagger equals the usual
/// sqrt(rho) (YY) rho* (YY) sqrt(rho). Taking them from the Hermitian
/// embedding [[0, X], [X^dagger, 0]] (eigenvalues +-sigma_i) keeps their
/// absolute error at machine level; a direct eigensolve of the sandwich
/// followed by a square root would amplify round-off in the small values
/// to ~sqrt(eps).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    rho.require_two_qubit()?;
    let sy = quantum::pauli(PauliAxis::Y);
    let yy = sy.mat().kron(sy.mat());
    let root = psd_sqrt(rho.op())?;
    let x = root.matmul(&yy).matmul(&root.conjugate());
    let mut embed = CMat::zeros(8);
    for i in 0..4 {
        for j in 0..4 {
            embed[(i, 4 + j)] = x[(i, j)];
            embed[(4 + i, j)] = x[(j, i)].conj();
        }
    }
    let spec = linalg::eig_hermitian(&HermitianOperator::new(embed)?)?;
    // Eigenvalues ascend; the top four are the singular values.
    let mut lams: Vec<f64> = spec.eigenvalues[4..]
        .iter()
        .map(|&l| l.max(0.0))
        .collect();
    lams.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lams[0] - lams[1] - lams[2] - lams[3]).max(0.0))
}

/// Binary entropy in bits, with the 0 log 0 = 0 convention.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 || p >= 1.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation as a function of the concurrence.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    Ok(eof_from_concurrence(c))
}

pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 + 0.5 * (1.0 - c * c).sqrt())
}

/// Negativity: trace norm of the partial transpose minus one, clamped at 0.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = quantum::partial_transpose(rho, 0)?;
    Ok((linalg::trace_norm(&pt)? - 1.0).max(0.0))
}

/// Logarithmic negativity log2(1 + N).
pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok((1.0 + negativity(rho)?).log2())
}

/// Indicator measure: 1 iff the partial transpose has an eigenvalue below
/// -EPS_PPT. Only 2-qubit states are accepted; beyond 2x2 (and 2x3) PPT
/// no longer decides separability.
pub fn indicator(rho: &DensityMatrix) -> Result<u8> {
    if !rho.is_two_qubit() {
        return Err(QuantifierError::IndicatorUndecidable {
            dims: rho.subsystem_dims().to_vec(),
        });
    }
    let pt = quantum::partial_transpose(rho, 0)?;
    let spec = linalg::eig_hermitian(&pt)?;
    Ok(if spec.min() < -EPS_PPT { 1 } else { 0 })
}

/// Closed-form concurrence for Bell-diagonal states: max(0, 2 p_max - 1).
/// Used as an independent oracle against the general spin-flip route.
pub fn bell_diagonal_concurrence(populations: &[f64; 4]) -> f64 {
    let p_max = populations.iter().cloned().fold(f64::MIN, f64::max);
    (2.0 * p_max - 1.0).max(0.0)
}
