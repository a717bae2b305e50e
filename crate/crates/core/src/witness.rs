//! Witnessed entanglement as a PPT-relaxed generalized-robustness
//! semidefinite program, with optimal-witness extraction, bipartition
//! scans, and witness-jump detection along state paths.
//!
//! Primal:  min Tr(Delta)  s.t.  Delta >= 0,  (rho + Delta)^Gamma >= 0,
//! where Gamma is partial transposition over the chosen cut. The dual
//! variable of the second cone yields a decomposable witness W = Z^Gamma
//! with Z >= 0 and W <= I, and the reported value is max(0, -Tr(W rho)).
//! PPT equals separability for 2x2 (and 2x3) cuts; above that every
//! result carries an explicit lower-bound flag.

use crate::linalg::{self, CMat, HermitianOperator, LinalgError};
use crate::quantum::{self, DensityMatrix, QuantumError};
use num_complex::Complex64;
use thiserror::Error;

/// Success contract on the duality-gap certificate.
pub const GAP_CONTRACT: f64 = 1e-6;

/// Internal target; the solver stops once the certified gap is this small.
const GAP_TARGET: f64 = 1e-8;

const MAX_OUTER: usize = 200;
const MAX_NEWTON: usize = 60;

/// Witness directions closer than this (after Frobenius normalization)
/// are "the same witness"; larger jumps flag a geometric transition.
pub const DEFAULT_THETA_W: f64 = 0.5;

/// Path smoothness certificate: consecutive states must be closer than
/// this in Frobenius distance.
pub const DEFAULT_DELTA_SMOOTH: f64 = 0.05;

/// E_W below this has no meaningful witness direction.
pub const WITNESS_VALUE_EPS: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid cut {side_a:?} for {factors} factors")]
    BadCut { side_a: Vec<usize>, factors: usize },
    #[error("empty partition spec")]
    EmptyPartitionSpec,
    #[error(
        "solver did not converge: best primal {best_primal:.6e}, best dual {best_dual:.6e}, gap {gap:.3e} after {iterations} iterations"
    )]
    NoConvergence {
        best_primal: f64,
        best_dual: f64,
        gap: f64,
        iterations: usize,
    },
    #[error("state path too short or not smooth: {0}")]
    BadPath(String),
}

pub type Result<T> = std::result::Result<T, WitnessError>;

/// A bipartition of the tensor factors, named by the transposed side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteCut {
    pub side_a: Vec<usize>,
}

impl BipartiteCut {
    pub fn new(mut side_a: Vec<usize>, factors: usize) -> Result<Self> {
        side_a.sort_unstable();
        side_a.dedup();
        if side_a.is_empty() || side_a.len() >= factors || side_a.iter().any(|&i| i >= factors) {
            return Err(WitnessError::BadCut { side_a, factors });
        }
        Ok(BipartiteCut { side_a })
    }

    /// First factor against the rest; the "T_A" default.
    pub fn first_factor() -> Self {
        BipartiteCut { side_a: vec![0] }
    }

    pub fn label(&self, factors: usize) -> String {
        let a: Vec<String> = self.side_a.iter().map(|i| i.to_string()).collect();
        let b: Vec<String> = (0..factors)
            .filter(|i| !self.side_a.contains(i))
            .map(|i| i.to_string())
            .collect();
        format!("{}|{}", a.join(","), b.join(","))
    }

    /// PPT decides separability exactly only for 2x2 and 2x3 cuts.
    pub fn ppt_is_exact(&self, dims: &[usize]) -> bool {
        let da: usize = self.side_a.iter().map(|&i| dims[i]).product();
        let db: usize = dims
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.side_a.contains(i))
            .map(|(_, &d)| d)
            .product();
        let (lo, hi) = (da.min(db), da.max(db));
        lo == 2 && hi <= 3
    }
}

/// Bipartitions to scan; each unordered cut listed once.
#[derive(Debug, Clone)]
pub struct PartitionSpec {
    pub cuts: Vec<BipartiteCut>,
}

impl PartitionSpec {
    pub fn new(cuts: Vec<BipartiteCut>) -> Result<Self> {
        if cuts.is_empty() {
            return Err(WitnessError::EmptyPartitionSpec);
        }
        Ok(PartitionSpec { cuts })
    }

    /// Every unordered bipartition of `factors` parts (subsets containing
    /// factor 0, proper and non-empty).
    pub fn all_bipartitions(factors: usize) -> Result<Self> {
        let mut cuts = Vec::new();
        for mask in 0u32..(1 << (factors - 1)) {
            // Bit k set means factor k+... keep factor 0 on side A and
            // choose the rest from the mask, so each cut appears once.
            let mut side_a = vec![0usize];
            for k in 1..factors {
                if mask & (1 << (k - 1)) != 0 {
                    side_a.push(k);
                }
            }
            if side_a.len() < factors {
                cuts.push(BipartiteCut::new(side_a, factors)?);
            }
        }
        // The full-mask subset equals all factors; drop happened above.
        PartitionSpec::new(cuts)
    }
}

/// An entanglement witness with the generalized-robustness normalization
/// W <= I (decomposable: W = Z^Gamma for some Z >= 0).
#[derive(Debug, Clone)]
pub struct Witness {
    pub op: HermitianOperator,
}

impl Witness {
    /// Direction after Frobenius normalization; scale-free comparisons.
    pub fn normalized(&self) -> Option<CMat> {
        let n = self.op.mat().frob_norm();
        if n < 1e-12 {
            return None;
        }
        Some(self.op.mat().scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.op.mat().matmul(rho.op().mat()).trace().re
    }
}

/// Outcome of one witnessed-entanglement solve.
#[derive(Debug, Clone)]
pub struct EwResult {
    /// max(0, -Tr(W_opt rho)).
    pub value: f64,
    pub witness: Witness,
    /// |primal - dual| certificate; <= 1e-6 on success.
    pub duality_gap: f64,
    /// Total Newton iterations spent.
    pub iterations: usize,
    /// Primal optimum Tr(Delta).
    pub primal_value: f64,
    /// True when PPT coincides with separability on this cut, so the
    /// value is the generalized robustness rather than a lower bound.
    pub exact: bool,
}

/// The optimal witness of a successful solve.
pub fn extract_optimal_witness(result: &EwResult) -> Witness {
    result.witness.clone()
}

// ---------------------------------------------------------------------------
// Interior-point solver
// ---------------------------------------------------------------------------

/// Sparse Hermitian basis element: explicit nonzero entries.
struct BasisElem {
    entries: Vec<(usize, usize, Complex64)>,
}

fn hermitian_basis(dim: usize) -> Vec<BasisElem> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        basis.push(BasisElem {
            entries: vec![(i, i, Complex64::new(1.0, 0.0))],
        });
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            basis.push(BasisElem {
                entries: vec![
                    (i, j, Complex64::new(s, 0.0)),
                    (j, i, Complex64::new(s, 0.0)),
                ],
            });
            basis.push(BasisElem {
                entries: vec![
                    (i, j, Complex64::new(0.0, s)),
                    (j, i, Complex64::new(0.0, -s)),
                ],
            });
        }
    }
    basis
}

/// X B X for a sparse Hermitian basis element B.
fn sandwich(x: &CMat, b: &BasisElem) -> CMat {
    let n = x.dim();
    let mut out = CMat::zeros(n);
    for &(a, c, v) in &b.entries {
        for i in 0..n {
            let xia = x[(i, a)] * v;
            if xia.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += xia * x[(c, j)];
            }
        }
    }
    out
}

fn inner(b: &BasisElem, m: &CMat) -> f64 {
    // Tr(B M) with B sparse Hermitian.
    b.entries
        .iter()
        .map(|&(i, j, v)| (v * m[(j, i)]).re)
        .sum()
}

/// Transpose a sparse basis element over the cut.
fn transpose_elem(b: &BasisElem, dims: &[usize], subset: &[usize], dim: usize) -> BasisElem {
    // Route through a dense one-hot trick only on the touched entries.
    let mut entries = Vec::with_capacity(b.entries.len());
    for &(i, j, v) in &b.entries {
        let (ti, tj) = transpose_index_pair(i, j, dims, subset);
        let _ = dim;
        entries.push((ti, tj, v));
    }
    BasisElem { entries }
}

fn transpose_index_pair(i: usize, j: usize, dims: &[usize], subset: &[usize]) -> (usize, usize) {
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            out[k] = idx % dims[k];
            idx /= dims[k];
        }
        out
    };
    let join = |d: &[usize]| -> usize {
        let mut idx = 0;
        for (v, &dim) in d.iter().zip(dims) {
            idx = idx * dim + v;
        }
        idx
    };
    let di = digits(i);
    let dj = digits(j);
    let mut ti = di.clone();
    let mut tj = dj.clone();
    for &s in subset {
        ti[s] = dj[s];
        tj[s] = di[s];
    }
    (join(&ti), join(&tj))
}

/// Solve the dense symmetric system M x = rhs by Gaussian elimination with
/// partial pivoting; M is the Newton Hessian (PD up to round-off).
fn solve_sym(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        if pivot == 0.0 || !pivot.is_finite() {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in (r + 1)..n {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
        if !x[r].is_finite() {
            return None;
        }
    }
    Some(x)
}

struct SolverState {
    delta: CMat,
    t: f64,
    iterations: usize,
}

struct Certificate {
    primal: f64,
    dual: f64,
    gap: f64,
    witness: HermitianOperator,
}

/// Barrier interior-point solve of
///   min Tr(Delta)  s.t.  Delta >= 0,  rho_gamma + Delta^Gamma >= 0.
fn solve_ppt_robustness(
    rho: &CMat,
    dims: &[usize],
    subset: &[usize],
) -> Result<(Certificate, usize)> {
    let dim = rho.dim();
    let gamma = |m: &CMat| quantum::transpose_subsystems_mat(m, dims, subset);
    let rho_gamma = gamma(rho);
    let basis = hermitian_basis(dim);
    let basis_gamma: Vec<BasisElem> = basis
        .iter()
        .map(|b| transpose_elem(b, dims, subset, dim))
        .collect();
    let nb = basis.len();

    let lam_min_rg = eig_min(&rho_gamma)?;
    let c0 = 1.0 + (-2.0 * lam_min_rg).max(0.0);
    let mut state = SolverState {
        delta: CMat::identity(dim).scale(Complex64::new(c0, 0.0)),
        t: 1.0,
        iterations: 0,
    };

    let mut best: Option<Certificate> = None;
    let mut no_progress = 0usize;
    for _outer in 0..MAX_OUTER {
        // Newton recentering at the current barrier weight.
        let mut stalled = false;
        for _ in 0..MAX_NEWTON {
            state.iterations += 1;
            let spec_d = linalg::eig_hermitian(&HermitianOperator::new(state.delta.hermitize())?)?;
            let s_mat = rho_gamma.add(&gamma(&state.delta)).hermitize();
            let spec_s = linalg::eig_hermitian(&HermitianOperator::new(s_mat.clone())?)?;
            let d_inv = spec_d.assemble(|l| 1.0 / l);
            let s_inv = spec_s.assemble(|l| 1.0 / l);

            // Gradient: t I - Delta^-1 - Gamma(S^-1).
            let mut grad = CMat::identity(dim).scale(Complex64::new(state.t, 0.0));
            grad = grad.sub(&d_inv).sub(&gamma(&s_inv));

            let g: Vec<f64> = basis.iter().map(|b| inner(b, &grad)).collect();

            // Hessian over the basis: <B_k, D^-1 B_l D^-1> plus the same
            // with Gamma-transposed elements against S^-1.
            let mut hls: Vec<CMat> = Vec::with_capacity(nb);
            let mut hls_g: Vec<CMat> = Vec::with_capacity(nb);
            for l in 0..nb {
                hls.push(sandwich(&d_inv, &basis[l]));
                hls_g.push(sandwich(&s_inv, &basis_gamma[l]));
            }
            let mut m = vec![vec![0.0; nb]; nb];
            for k in 0..nb {
                for l in 0..nb {
                    m[k][l] = inner(&basis[k], &hls[l]) + inner(&basis_gamma[k], &hls_g[l]);
                }
            }
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let x = match solve_sym(m, rhs) {
                Some(x) => x,
                None => {
                    stalled = true;
                    break;
                }
            };
            let decrement_sq: f64 = -g.iter().zip(&x).map(|(gi, xi)| gi * xi).sum::<f64>();
            if decrement_sq.abs() < 1e-11 {
                break;
            }

            // Assemble the step and backtrack into the feasible region.
            let mut step = CMat::zeros(dim);
            for (l, &xl) in x.iter().enumerate() {
                for &(i, j, v) in &basis[l].entries {
                    step[(i, j)] += v * xl;
                }
            }
            let phi_now = barrier_value(state.t, &state.delta, &spec_d, &spec_s);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = state.delta.add(&step.scale(Complex64::new(alpha, 0.0)));
                if let Some(phi_trial) =
                    barrier_value_checked(state.t, &trial, &rho_gamma, &gamma)
                {
                    // Tolerance absorbs round-off in the logdet sums so
                    // progress near the noise floor is not rejected.
                    if phi_trial < phi_now + 1e-10 * phi_now.abs().max(1.0) {
                        state.delta = trial;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                stalled = true;
                break;
            }
        }

        // Certify the current point.
        let cert = certificate(&state, &rho_gamma, rho, &gamma)?;
        if std::env::var("ENTPT_SDP_TRACE").is_ok() {
            eprintln!(
                "outer t={:.3e} stalled={} gap={:.3e} primal={:.6e} dual={:.6e} iters={}",
                state.t, stalled, cert.gap, cert.primal, cert.dual, state.iterations
            );
        }
        let done = cert.gap <= GAP_TARGET;
        let better = best.as_ref().map_or(true, |b| cert.gap < b.gap);
        if better {
            best = Some(cert);
            no_progress = 0;
        } else {
            no_progress += 1;
        }
        // A Newton stall means the noise floor at this t; pushing t
        // further still tightens the certificate for a while, so only
        // stop once the gap has stopped improving.
        let _ = stalled;
        if done || no_progress >= 5 || state.t > 1e14 {
            break;
        }
        // Halve the barrier weight.
        state.t *= 2.0;
    }

    let best = best.expect("at least one certificate was computed");
    if best.gap > GAP_CONTRACT {
        return Err(WitnessError::NoConvergence {
            best_primal: best.primal,
            best_dual: best.dual,
            gap: best.gap,
            iterations: state.iterations,
        });
    }
    Ok((best, state.iterations))
}

fn eig_min(m: &CMat) -> Result<f64> {
    Ok(linalg::eig_hermitian(&HermitianOperator::new(m.hermitize())?)?.min())
}

fn barrier_value(
    t: f64,
    delta: &CMat,
    spec_d: &linalg::Spectrum,
    spec_s: &linalg::Spectrum,
) -> f64 {
    let logdet_d: f64 = spec_d.eigenvalues.iter().map(|&l| l.ln()).sum();
    let logdet_s: f64 = spec_s.eigenvalues.iter().map(|&l| l.ln()).sum();
    t * delta.trace().re - logdet_d - logdet_s
}

/// Barrier value of a trial point, or None when it leaves either cone.
fn barrier_value_checked(
    t: f64,
    delta: &CMat,
    rho_gamma: &CMat,
    gamma: &impl Fn(&CMat) -> CMat,
) -> Option<f64> {
    let spec_d = linalg::eig_hermitian(&HermitianOperator::new(delta.hermitize()).ok()?).ok()?;
    if spec_d.min() <= 0.0 {
        return None;
    }
    let s = rho_gamma.add(&gamma(delta)).hermitize();
    let spec_s = linalg::eig_hermitian(&HermitianOperator::new(s).ok()?).ok()?;
    if spec_s.min() <= 0.0 {
        return None;
    }
    Some(barrier_value(t, delta, &spec_d, &spec_s))
}

/// Duality certificate at the current central-path point: the dual
/// witness is Gamma(S^-1)/t, shifted to respect W <= I exactly.
fn certificate(
    state: &SolverState,
    rho_gamma: &CMat,
    rho: &CMat,
    gamma: &impl Fn(&CMat) -> CMat,
) -> Result<Certificate> {
    let s_mat = rho_gamma.add(&gamma(&state.delta)).hermitize();
    let spec_s = linalg::eig_hermitian(&HermitianOperator::new(s_mat)?)?;
    // Clamp against round-off so the dual variable Z = S^-1 / t stays
    // positive semidefinite and the certificate stays honest.
    let floor = spec_s.max().abs().max(1e-300) * 1e-15;
    let z = spec_s
        .assemble(|l| 1.0 / l.max(floor))
        .scale(Complex64::new(1.0 / state.t, 0.0));
    let mut w = gamma(&z).hermitize();
    // W must satisfy W <= I; rescaling Z keeps it decomposable (a shift
    // would not, since I is not Gamma of a PSD matrix shifted from Z).
    let w_max = linalg::eig_hermitian(&HermitianOperator::new(w.clone())?)?.max();
    if w_max > 1.0 {
        w = w.scale(Complex64::new(1.0 / w_max, 0.0));
    }
    let primal = state.delta.trace().re;
    let dual = -w.matmul(rho).trace().re;
    Ok(Certificate {
        primal,
        dual,
        gap: (primal - dual).abs(),
        witness: HermitianOperator::new(w)?,
    })
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Witnessed entanglement of `rho` across `cut`: the generalized
/// robustness under the PPT relaxation (exact for 2x2 and 2x3 cuts).
pub fn witnessed_entanglement(rho: &DensityMatrix, cut: &BipartiteCut) -> Result<EwResult> {
    let factors = rho.subsystem_dims().len();
    if cut.side_a.is_empty()
        || cut.side_a.len() >= factors
        || cut.side_a.iter().any(|&i| i >= factors)
    {
        return Err(WitnessError::BadCut {
            side_a: cut.side_a.clone(),
            factors,
        });
    }
    let (cert, iterations) =
        solve_ppt_robustness(rho.op().mat(), rho.subsystem_dims(), &cut.side_a)?;
    Ok(EwResult {
        value: cert.dual.max(0.0),
        witness: Witness {
            op: cert.witness,
        },
        duality_gap: cert.gap,
        iterations,
        primal_value: cert.primal,
        exact: cut.ppt_is_exact(rho.subsystem_dims()),
    })
}

/// Per-cut scan result.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub per_cut: Vec<(BipartiteCut, EwResult)>,
    /// Minimum over cuts: the fully-inseparable indicator.
    pub min_value: f64,
    /// True only when every scanned cut is PPT-exact.
    pub exact: bool,
}

/// Witnessed entanglement across every cut in the spec (up to 4 qubits).
pub fn ew_bipartition_scan(rho: &DensityMatrix, spec: &PartitionSpec) -> Result<ScanResult> {
    if spec.cuts.is_empty() {
        return Err(WitnessError::EmptyPartitionSpec);
    }
    let mut per_cut = Vec::with_capacity(spec.cuts.len());
    let mut min_value = f64::MAX;
    let mut exact = true;
    for cut in &spec.cuts {
        let res = witnessed_entanglement(rho, cut)?;
        min_value = min_value.min(res.value);
        exact &= res.exact;
        per_cut.push((cut.clone(), res));
    }
    Ok(ScanResult {
        per_cut,
        min_value,
        exact,
    })
}

/// A parametrized family of states with a smoothness certificate.
#[derive(Debug, Clone)]
pub struct StatePath {
    pub params: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub delta_smooth: f64,
}

impl StatePath {
    pub fn new(params: Vec<f64>, states: Vec<DensityMatrix>, delta_smooth: f64) -> Result<Self> {
        if params.len() != states.len() || params.len() < 2 {
            return Err(WitnessError::BadPath(format!(
                "{} params vs {} states",
                params.len(),
                states.len()
            )));
        }
        for (i, w) in states.windows(2).enumerate() {
            let d = w[0].op().mat().frob_dist(w[1].op().mat());
            if d > delta_smooth {
                return Err(WitnessError::BadPath(format!(
                    "step {i} moves {d:.4} > delta_smooth {delta_smooth}"
                )));
            }
        }
        Ok(StatePath {
            params,
            states,
            delta_smooth,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrackOptions {
    pub cut: BipartiteCut,
    pub theta_w: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            cut: BipartiteCut::first_factor(),
            theta_w: DEFAULT_THETA_W,
        }
    }
}

/// One tracked point along a path.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub param: f64,
    /// None marks a solver failure (gap marker).
    pub value: Option<f64>,
    pub duality_gap: Option<f64>,
    /// Frobenius-normalized witness direction; None when the state is
    /// (numerically) separable or the solve failed.
    pub witness_dir: Option<CMat>,
    /// Distance to the previous defined witness direction, if any.
    pub witness_jump: Option<f64>,
}

/// Path-tracking report: values, witness directions, geometric-PT flags.
#[derive(Debug, Clone)]
pub struct PathReport {
    pub points: Vec<PathPoint>,
    /// Indices where the witness direction jumped beyond theta_w relative
    /// to the previous defined direction.
    pub flags: Vec<usize>,
    /// Indices where the solver failed.
    pub failures: Vec<usize>,
    /// One-sided E_W slope estimates between consecutive solved points:
    /// (left difference, right difference) per index where defined.
    pub left_slopes: Vec<Option<f64>>,
    pub right_slopes: Vec<Option<f64>>,
}

/// Solve E_W along a path and flag optimal-witness discontinuities.
///
/// The optimal witness has a direction only where E_W > 0; a flag is
/// raised when the direction jumps by more than theta_w between
/// consecutive *defined* witnesses. A separable stretch between two
/// entangled segments therefore localizes the flag at re-entry, which is
/// where the supporting face of the separable set changes.
pub fn track_witness_path(path: &StatePath, opts: &TrackOptions) -> PathReport {
    let n = path.states.len();
    let mut points = Vec::with_capacity(n);
    let mut flags = Vec::new();
    let mut failures = Vec::new();
    let mut last_dir: Option<CMat> = None;

    for (i, state) in path.states.iter().enumerate() {
        let param = path.params[i];
        match witnessed_entanglement(state, &opts.cut) {
            Ok(res) => {
                let defined = res.value > WITNESS_VALUE_EPS;
                let dir = if defined {
                    res.witness.normalized()
                } else {
                    None
                };
                let jump = match (&dir, &last_dir) {
                    (Some(d), Some(prev)) => Some(d.frob_dist(prev)),
                    _ => None,
                };
                if let Some(j) = jump {
                    if j > opts.theta_w {
                        flags.push(i);
                    }
                }
                if dir.is_some() {
                    last_dir = dir.clone();
                }
                points.push(PathPoint {
                    param,
                    value: Some(res.value),
                    duality_gap: Some(res.duality_gap),
                    witness_dir: dir,
                    witness_jump: jump,
                });
            }
            Err(_) => {
                failures.push(i);
                points.push(PathPoint {
                    param,
                    value: None,
                    duality_gap: None,
                    witness_dir: None,
                    witness_jump: None,
                });
            }
        }
    }

    // Grid-difference slope estimates of E_W along the path.
    let value_at = |i: usize| -> Option<f64> { points[i].value };
    let mut left_slopes = vec![None; n];
    let mut right_slopes = vec![None; n];
    for i in 0..n {
        if let Some(v) = value_at(i) {
            if i > 0 {
                if let Some(prev) = value_at(i - 1) {
                    let dt = path.params[i] - path.params[i - 1];
                    if dt != 0.0 {
                        left_slopes[i] = Some((v - prev) / dt);
                    }
                }
            }
            if i + 1 < n {
                if let Some(next) = value_at(i + 1) {
                    let dt = path.params[i + 1] - path.params[i];
                    if dt != 0.0 {
                        right_slopes[i] = Some((next - v) / dt);
                    }
                }
            }
        }
    }

    PathReport {
        points,
        flags,
        failures,
        left_slopes,
        right_slopes,
    }
}
