//! Locating and classifying the entangled-to-separable transition.
//!
//! The critical inverse temperature is the zero of the smallest
//! partial-transpose eigenvalue of the thermal state, found by bisection.
//! Transition orders come from one-sided Richardson-extrapolated
//! derivatives of each quantifier across the critical point: the order is
//! the smallest n whose n-th derivative jumps, with n = 0 meaning the
//! quantifier itself is discontinuous (the indicator case).

use crate::linalg;
use crate::quantifiers::{self, QuantifierKind};
use crate::quantum::{self, DensityMatrix, InverseTemperature, QuantumError, XYZCouplings};
use rayon::prelude::*;
use thiserror::Error;

/// Bisection stops when the bracket is narrower than this.
pub const BETA_BRACKET_TOL: f64 = 1e-10;

/// Default finite-difference base step.
pub const DEFAULT_H0: f64 = 1e-2;

/// Number of step halvings in the Richardson table (k = 0..=6).
pub const RICHARDSON_STEPS: usize = 7;

/// Default bisection bracket.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-6, 10.0);

#[derive(Debug, Error)]
pub enum CriticalityError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Quantifier(#[from] quantifiers::QuantifierError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error("invalid sweep spec: {0}")]
    BadSpec(String),
    #[error("function value at beta = {at} is not finite")]
    NonFiniteSample { at: f64 },
    #[error("invalid bracket [{lo}, {hi}]")]
    BadBracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, CriticalityError>;

/// Inverse-temperature grid plus the quantifiers to evaluate on it.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub beta_min: f64,
    pub beta_max: f64,
    pub points: usize,
    pub kinds: Vec<QuantifierKind>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_min >= 0.0 && self.beta_max > self.beta_min) {
            return Err(CriticalityError::BadSpec(format!(
                "need 0 <= beta_min < beta_max, got [{}, {}]",
                self.beta_min, self.beta_max
            )));
        }
        if self.points < 2 || self.points > 1_000_000 {
            return Err(CriticalityError::BadSpec(format!(
                "points must be in 2..=1e6, got {}",
                self.points
            )));
        }
        if self.kinds.is_empty() {
            return Err(CriticalityError::BadSpec("no quantifiers requested".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                self.beta_min + (self.beta_max - self.beta_min) * i as f64 / (n - 1) as f64
            })
            .collect()
    }
}

/// Quantifier values along a beta grid, one series per requested kind.
#[derive(Debug, Clone)]
pub struct QuantifierSeries {
    pub betas: Vec<f64>,
    pub series: Vec<(QuantifierKind, Vec<f64>)>,
}

/// Thermal state of the XYZ model at inverse temperature beta.
pub fn thermal_state(c: &XYZCouplings, beta: f64) -> Result<DensityMatrix> {
    let h = quantum::build_xyz(c);
    Ok(quantum::gibbs_state(&h, InverseTemperature::new(beta)?)?)
}

/// One quantifier of the thermal state, as a plain function of beta.
pub fn quantifier_at(c: &XYZCouplings, kind: QuantifierKind, beta: f64) -> Result<f64> {
    quantifiers::evaluate(kind, &thermal_state(c, beta)?).map_err(Into::into)
}

/// Evaluate the requested quantifiers on the grid. Grid points are
/// independent and run in parallel; output order follows the grid.
pub fn sweep(c: &XYZCouplings, spec: &SweepSpec) -> Result<QuantifierSeries> {
    spec.validate()?;
    let betas = spec.grid();
    let rows: Vec<Vec<f64>> = betas
        .par_iter()
        .map(|&beta| -> Result<Vec<f64>> {
            let rho = thermal_state(c, beta)?;
            spec.kinds
                .iter()
                .map(|&k| quantifiers::evaluate(k, &rho).map_err(Into::into))
                .collect()
        })
        .collect::<Result<_>>()?;
    let series = spec
        .kinds
        .iter()
        .enumerate()
        .map(|(col, &k)| (k, rows.iter().map(|r| r[col]).collect()))
        .collect();
    Ok(QuantifierSeries { betas, series })
}

/// Smallest eigenvalue of the partial transpose of the thermal state;
/// positive in the separable phase, negative in the entangled one.
pub fn min_pt_eigenvalue(c: &XYZCouplings, beta: f64) -> Result<f64> {
    let rho = thermal_state(c, beta)?;
    let pt = quantum::partial_transpose(&rho, 0)?;
    Ok(linalg::eig_hermitian(&pt)?.min())
}

/// Outcome of the critical-point search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalPoint {
    Found { beta_c: f64 },
    /// No sign change in the bracket; the phase is uniform across it.
    NoTransition { entangled_everywhere: bool },
}

/// Bisect the PPT boundary inside the bracket.
pub fn find_critical_beta(c: &XYZCouplings, bracket: (f64, f64)) -> Result<CriticalPoint> {
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0 && hi > lo) {
        return Err(CriticalityError::BadBracket { lo, hi });
    }
    let f_lo = min_pt_eigenvalue(c, lo)?;
    let f_hi = min_pt_eigenvalue(c, hi)?;
    // Separable phase sits at small beta; entangled at large.
    if f_lo.signum() == f_hi.signum() {
        return Ok(CriticalPoint::NoTransition {
            entangled_everywhere: f_lo < 0.0,
        });
    }
    while hi - lo > BETA_BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = min_pt_eigenvalue(c, mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalPoint::Found {
        beta_c: 0.5 * (lo + hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A derivative (or limit) estimate with its extrapolation error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivEstimate {
    pub value: f64,
    pub error_bar: f64,
}

/// One-sided derivative of `f` at `x0` by finite differences at steps
/// h0 * 2^-k, k = 0..=6, extrapolated with a Richardson table whose error
/// expansion starts at first order. `order` 0 returns the one-sided limit
/// of `f` itself.
pub fn one_sided_derivative(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    x0: f64,
    side: Side,
    order: usize,
    h0: f64,
) -> Result<DerivEstimate> {
    assert!(order <= 2, "orders beyond 2 are not estimated");
    assert!(h0 > 0.0, "step must be positive");
    let sgn = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let mut check = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(CriticalityError::NonFiniteSample { at: x });
        }
        Ok(v)
    };
    let f0 = if order > 0 { check(x0)? } else { 0.0 };
    let mut estimates = Vec::with_capacity(RICHARDSON_STEPS);
    for k in 0..RICHARDSON_STEPS {
        let h = h0 * 0.5f64.powi(k as i32);
        let est = match order {
            0 => check(x0 + sgn * h)?,
            1 => (check(x0 + sgn * h)? - f0) / (sgn * h),
            _ => (f0 - 2.0 * check(x0 + sgn * h)? + check(x0 + sgn * 2.0 * h)?) / (h * h),
        };
        estimates.push(est);
    }
    Ok(richardson(&estimates))
}

/// Richardson extrapolation for a step-halving sequence whose error is a
/// power series in h starting at h^1. The error bar is the spread of the
/// last two diagonal extrapolants.
fn richardson(estimates: &[f64]) -> DerivEstimate {
    let mut prev = estimates.to_vec();
    let mut last_heads = (prev[0], prev[0]);
    for j in 1..estimates.len() {
        let fac = 2.0f64.powi(j as i32);
        let next: Vec<f64> = (0..prev.len() - 1)
            .map(|i| (fac * prev[i + 1] - prev[i]) / (fac - 1.0))
            .collect();
        last_heads = (prev[0], next[0]);
        prev = next;
    }
    DerivEstimate {
        value: last_heads.1,
        error_bar: (last_heads.1 - last_heads.0).abs(),
    }
}

/// Order of the transition as seen by one quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionOrder {
    /// The quantifier itself jumps at beta_c.
    Discontinuous,
    First,
    Second,
    /// No jump found through second derivatives.
    AnalyticAtLeast3,
}

impl TransitionOrder {
    pub fn as_int(&self) -> Option<u8> {
        match self {
            TransitionOrder::Discontinuous => Some(0),
            TransitionOrder::First => Some(1),
            TransitionOrder::Second => Some(2),
            TransitionOrder::AnalyticAtLeast3 => None,
        }
    }
}

impl std::fmt::Display for TransitionOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransitionOrder::Discontinuous => write!(f, "0 (discontinuous)"),
            TransitionOrder::First => write!(f, "1"),
            TransitionOrder::Second => write!(f, "2"),
            TransitionOrder::AnalyticAtLeast3 => write!(f, "analytic >= 3"),
        }
    }
}

/// Left/right estimates of one derivative order across beta_c.
#[derive(Debug, Clone, Copy)]
pub struct SidePair {
    pub order: usize,
    pub left: DerivEstimate,
    pub right: DerivEstimate,
}

impl SidePair {
    pub fn jump(&self) -> f64 {
        (self.right.value - self.left.value).abs()
    }

    /// A jump counts as a discontinuity only when it clears both an
    /// absolute floor and ten times the combined extrapolation noise.
    pub fn jump_threshold(&self) -> f64 {
        (10.0 * (self.left.error_bar + self.right.error_bar)).max(1e-4)
    }

    pub fn is_discontinuous(&self) -> bool {
        self.jump() > self.jump_threshold()
    }
}

/// Per-quantifier classification outcome.
#[derive(Debug, Clone)]
pub struct KindReport {
    pub kind: QuantifierKind,
    pub order: TransitionOrder,
    /// Estimates for orders 0, 1, 2 (index = derivative order).
    pub side_pairs: Vec<SidePair>,
}

/// Full transition report for one coupling set.
#[derive(Debug, Clone)]
pub struct TransitionReport {
    pub beta_c: f64,
    pub kinds: Vec<KindReport>,
}

/// Classify the transition order seen by one quantifier at a known beta_c.
pub fn classify_order(
    c: &XYZCouplings,
    beta_c: f64,
    kind: QuantifierKind,
) -> Result<KindReport> {
    let mut f = |beta: f64| quantifier_at(c, kind, beta.max(0.0));
    let mut side_pairs = Vec::with_capacity(3);
    let mut order = TransitionOrder::AnalyticAtLeast3;
    for n in 0..=2 {
        let left = one_sided_derivative(&mut f, beta_c, Side::Left, n, DEFAULT_H0)?;
        let right = one_sided_derivative(&mut f, beta_c, Side::Right, n, DEFAULT_H0)?;
        let pair = SidePair { order: n, left, right };
        let disc = pair.is_discontinuous();
        side_pairs.push(pair);
        if disc {
            order = match n {
                0 => TransitionOrder::Discontinuous,
                1 => TransitionOrder::First,
                _ => TransitionOrder::Second,
            };
            break;
        }
    }
    Ok(KindReport {
        kind,
        order,
        side_pairs,
    })
}

/// Locate beta_c in the bracket and classify every requested quantifier.
pub fn analyze_transition(
    c: &XYZCouplings,
    bracket: (f64, f64),
    kinds: &[QuantifierKind],
) -> Result<Option<TransitionReport>> {
    let beta_c = match find_critical_beta(c, bracket)? {
        CriticalPoint::Found { beta_c } => beta_c,
        CriticalPoint::NoTransition { .. } => return Ok(None),
    };
    let kinds = kinds
        .iter()
        .map(|&k| classify_order(c, beta_c, k))
        .collect::<Result<_>>()?;
    Ok(Some(TransitionReport { beta_c, kinds }))
}

/// Residual of the log-negativity chain rule
/// dEN/dbeta = dN/dbeta / ((1 + N) ln 2), both sides from one-sided
/// differences on the right of beta.
pub fn verify_chain_rule_en(c: &XYZCouplings, beta: f64) -> Result<f64> {
    let n_val = quantifier_at(c, QuantifierKind::Negativity, beta)?;
    let mut fn_ = |b: f64| quantifier_at(c, QuantifierKind::Negativity, b);
    let dn = one_sided_derivative(&mut fn_, beta, Side::Right, 1, DEFAULT_H0)?.value;
    let mut fen = |b: f64| quantifier_at(c, QuantifierKind::LogNegativity, b);
    let den = one_sided_derivative(&mut fen, beta, Side::Right, 1, DEFAULT_H0)?.value;
    Ok((den - dn / ((1.0 + n_val) * std::f64::consts::LN_2)).abs())
}

/// Chain-rule prefactor dE_f/dC in natural-log units:
/// (C / (2 sqrt(1 - C^2))) * ln((1 + sqrt(1 - C^2)) / (1 - sqrt(1 - C^2))).
/// Vanishes as C -> 0+, which is what pushes the E_f singularity one
/// derivative order up.
pub fn ef_prefactor(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    if c >= 1.0 {
        // Limit C -> 1-: the log vanishes like sqrt(1 - C^2) times 2.
        return 1.0;
    }
    let w = (1.0 - c * c).sqrt();
    (c / (2.0 * w)) * ((1.0 + w) / (1.0 - w)).ln()
}

/// Residual of the entanglement-of-formation chain rule
/// d(E_f ln 2)/dbeta = ef_prefactor(C) * dC/dbeta, checked in natural-log
/// units on both sides.
pub fn verify_chain_rule_ef(c: &XYZCouplings, beta: f64) -> Result<f64> {
    let c_val = quantifier_at(c, QuantifierKind::Concurrence, beta)?;
    let mut fc = |b: f64| quantifier_at(c, QuantifierKind::Concurrence, b);
    let dc = one_sided_derivative(&mut fc, beta, Side::Right, 1, DEFAULT_H0)?.value;
    let mut fe = |b: f64| {
        quantifier_at(c, QuantifierKind::EoF, b).map(|v| v * std::f64::consts::LN_2)
    };
    let def = one_sided_derivative(&mut fe, beta, Side::Right, 1, DEFAULT_H0)?.value;
    Ok((def - ef_prefactor(c_val) * dc).abs())
}
