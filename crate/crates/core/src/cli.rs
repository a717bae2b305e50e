//! Command-line front-end: sweeps, transition location/classification,
//! witnessed entanglement, and path scans, with CSV output.
//!
//! Exit codes: 0 success, 2 I/O or configuration, 3 no transition in the
//! bracket, 4 state-file parse error, 5 invalid state.

use crate::criticality::{self, CriticalPoint, SweepSpec, DEFAULT_BRACKET};
use crate::quantifiers::QuantifierKind;
use crate::quantum::XYZCouplings;
use crate::statefile::{self, StateFileError};
use crate::witness::{
    self, BipartiteCut, PartitionSpec, StatePath, TrackOptions, DEFAULT_DELTA_SMOOTH,
    DEFAULT_THETA_W,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NO_TRANSITION: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_INVALID_STATE: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "entpt",
    version,
    about = "Thermal-entanglement phase-transition toolkit for two-qubit XYZ chains"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Upper bound on parallel workers (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep quantifiers over a beta grid and emit CSV with derivatives
    Sweep(SweepArgs),
    /// Locate beta_c and classify the transition order per quantifier
    Critical(CriticalArgs),
    /// Witnessed entanglement of a state read from file
    Ew(EwArgs),
    /// Scan E_W along a state path and flag optimal-witness jumps
    Geoscan(GeoscanArgs),
}

#[derive(Args, Debug)]
struct CouplingArgs {
    /// XX coupling
    #[arg(short = 'x', allow_hyphen_values = true)]
    x: f64,
    /// YY coupling
    #[arg(short = 'y', allow_hyphen_values = true)]
    y: f64,
    /// ZZ coupling
    #[arg(short = 'z', allow_hyphen_values = true)]
    z: f64,
}

impl CouplingArgs {
    fn couplings(&self) -> Result<XYZCouplings, CliError> {
        XYZCouplings::new(self.x, self.y, self.z)
            .map_err(|e| CliError::config(format!("invalid couplings: {e}")))
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    couplings: CouplingArgs,
    /// Beta grid as min:max:points (inclusive endpoints)
    #[arg(long)]
    beta: String,
    /// Quantifiers, comma-separated from {C, Ef, N, EN, IM}; default all
    #[arg(short = 'q', long)]
    quantifiers: Option<String>,
    /// Output CSV path (default: stdout)
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    couplings: CouplingArgs,
    /// Bisection bracket as lo:hi
    #[arg(long, default_value = "1e-6:10")]
    bracket: String,
    /// Quantifiers, comma-separated from {C, Ef, N, EN, IM}; default all
    #[arg(short = 'q', long)]
    quantifiers: Option<String>,
}

#[derive(Args, Debug)]
struct EwArgs {
    /// State file (dims: header plus one `i j re im` line per entry)
    state: PathBuf,
    /// Cuts to scan: "all", or comma-separated factor indices of side A
    #[arg(long, default_value = "0")]
    cuts: String,
    /// Write the optimal witness to this file
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GeoscanArgs {
    /// Path family: gibbs-beta or linear-mix
    #[arg(long)]
    family: String,
    /// XX coupling (gibbs-beta family)
    #[arg(short = 'x', allow_hyphen_values = true, required_if_eq("family", "gibbs-beta"))]
    x: Option<f64>,
    /// YY coupling (gibbs-beta family)
    #[arg(short = 'y', allow_hyphen_values = true, required_if_eq("family", "gibbs-beta"))]
    y: Option<f64>,
    /// ZZ coupling (gibbs-beta family)
    #[arg(short = 'z', allow_hyphen_values = true, required_if_eq("family", "gibbs-beta"))]
    z: Option<f64>,
    /// First endpoint state file (linear-mix family)
    #[arg(long, required_if_eq("family", "linear-mix"))]
    state_a: Option<PathBuf>,
    /// Second endpoint state file (linear-mix family)
    #[arg(long, required_if_eq("family", "linear-mix"))]
    state_b: Option<PathBuf>,
    /// Parameter grid as min:max:points
    #[arg(long)]
    range: String,
    /// Witness-jump flag threshold on Frobenius-normalized directions
    #[arg(long, default_value_t = DEFAULT_THETA_W)]
    theta_w: f64,
    /// Maximum allowed Frobenius step between consecutive states
    #[arg(long, default_value_t = DEFAULT_DELTA_SMOOTH)]
    delta_smooth: f64,
    /// Output CSV path (default: stdout)
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

/// Internal error carrying its exit code.
#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn config(message: String) -> Self {
        CliError {
            code: EXIT_IO,
            message,
        }
    }
    fn io(message: String) -> Self {
        CliError {
            code: EXIT_IO,
            message,
        }
    }
}

impl From<StateFileError> for CliError {
    fn from(e: StateFileError) -> Self {
        let code = match &e {
            StateFileError::Parse { .. } => EXIT_PARSE,
            _ => EXIT_INVALID_STATE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Shortest round-trip decimal representation capped at 12 significant
/// digits, locale-independent, always with a decimal point or exponent.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("round-trip parse");
    let mut s = rounded.to_string();
    if !s.contains('.') && !s.contains('e') {
        s.push_str(".0");
    }
    s
}

/// Parse `min:max:points` into a grid spec.
fn parse_grid(text: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::config(format!(
            "grid '{text}' must be min:max:points"
        )));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::config(format!("bad grid minimum '{}'", parts[0])))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::config(format!("bad grid maximum '{}'", parts[1])))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| CliError::config(format!("bad grid point count '{}'", parts[2])))?;
    if points < 2 || !(min < max) {
        return Err(CliError::config(format!(
            "grid '{text}' needs min < max and at least 2 points"
        )));
    }
    Ok((min, max, points))
}

fn parse_bracket(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::config(format!("bracket '{text}' must be lo:hi")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::config(format!("bad bracket low '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::config(format!("bad bracket high '{}'", parts[1])))?;
    if !(lo < hi) || lo < 0.0 {
        return Err(CliError::config(format!(
            "bracket '{text}' needs 0 <= lo < hi"
        )));
    }
    Ok((lo, hi))
}

fn parse_kinds(text: Option<&str>) -> Result<Vec<QuantifierKind>, CliError> {
    match text {
        None => Ok(QuantifierKind::ALL.to_vec()),
        Some(t) => {
            let mut kinds = Vec::new();
            for item in t.split(',') {
                let item = item.trim();
                let kind = QuantifierKind::parse(item)
                    .ok_or_else(|| CliError::config(format!("unknown quantifier '{item}'")))?;
                if !kinds.contains(&kind) {
                    kinds.push(kind);
                }
            }
            if kinds.is_empty() {
                return Err(CliError::config("empty quantifier list".to_string()));
            }
            Ok(kinds)
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_state(path: &Path) -> Result<crate::quantum::DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    Ok(statefile::parse_density(&text)?)
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_IO,
            };
            let _ = e.print();
            return code;
        }
    };

    let body = || -> Result<i32, CliError> {
        match &cli.command {
            Command::Sweep(a) => cmd_sweep(a),
            Command::Critical(a) => cmd_critical(a),
            Command::Ew(a) => cmd_ew(a),
            Command::Geoscan(a) => cmd_geoscan(a),
        }
    };

    let outcome = match cli.jobs {
        Some(jobs) if jobs >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))
            .and_then(|pool| pool.install(body)),
        Some(_) => Err(CliError::config("--jobs must be at least 1".to_string())),
        None => body(),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let c = args.couplings.couplings()?;
    let (beta_min, beta_max, points) = parse_grid(&args.beta)?;
    let kinds = parse_kinds(args.quantifiers.as_deref())?;

    let spec = SweepSpec {
        beta_min,
        beta_max,
        points,
        kinds: kinds.clone(),
    };
    let series = criticality::sweep(&c, &spec)
        .map_err(|e| CliError::config(format!("sweep failed: {e}")))?;

    // Locate beta_c inside the grid so the derivative columns can switch
    // to one-sided differences at the two points adjacent to it.
    let bracket_lo = beta_min.max(1e-6);
    let beta_c = if bracket_lo < beta_max {
        match criticality::find_critical_beta(&c, (bracket_lo, beta_max)) {
            Ok(CriticalPoint::Found { beta_c }) => Some(beta_c),
            _ => None,
        }
    } else {
        None
    };

    let betas = &series.betas;
    let n = betas.len();
    let derivative = |values: &[f64], i: usize| -> f64 {
        // One-sided at grid ends and at the two points adjacent to
        // beta_c, so no difference straddles the kink.
        let one_sided_low = beta_c.is_some_and(|bc| {
            betas[i] < bc && i + 1 < n && betas[i + 1] >= bc
        });
        let one_sided_high = beta_c.is_some_and(|bc| {
            betas[i] >= bc && i > 0 && betas[i - 1] < bc
        });
        if i == 0 || one_sided_high {
            (values[i + 1] - values[i]) / (betas[i + 1] - betas[i])
        } else if i == n - 1 || one_sided_low {
            (values[i] - values[i - 1]) / (betas[i] - betas[i - 1])
        } else {
            (values[i + 1] - values[i - 1]) / (betas[i + 1] - betas[i - 1])
        }
    };

    let mut csv = String::from("beta");
    for kind in &kinds {
        write!(csv, ",{}", kind.label()).unwrap();
    }
    for kind in &kinds {
        write!(csv, ",d{}_dbeta", kind.label()).unwrap();
    }
    csv.push('\n');
    for i in 0..n {
        write!(csv, "{}", format_sig12(betas[i])).unwrap();
        for (_, values) in &series.series {
            write!(csv, ",{}", format_sig12(values[i])).unwrap();
        }
        for (_, values) in &series.series {
            write!(csv, ",{}", format_sig12(derivative(values, i))).unwrap();
        }
        csv.push('\n');
    }

    write_output(args.output.as_deref(), &csv)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// critical
// ---------------------------------------------------------------------------

fn cmd_critical(args: &CriticalArgs) -> Result<i32, CliError> {
    let c = args.couplings.couplings()?;
    let bracket = if args.bracket == "1e-6:10" {
        DEFAULT_BRACKET
    } else {
        parse_bracket(&args.bracket)?
    };
    let kinds = parse_kinds(args.quantifiers.as_deref())?;

    let report = criticality::analyze_transition(&c, bracket, &kinds)
        .map_err(|e| CliError::config(format!("analysis failed: {e}")))?;

    let report = match report {
        Some(r) => r,
        None => {
            println!(
                "no transition in bracket [{}, {}]",
                format_sig12(bracket.0),
                format_sig12(bracket.1)
            );
            return Ok(EXIT_NO_TRANSITION);
        }
    };

    println!("beta_c = {}", format_sig12(report.beta_c));
    println!("T_c = {}", format_sig12(1.0 / report.beta_c));
    for kr in &report.kinds {
        println!("kind = {} order = {}", kr.kind.label(), kr.order);
        for pair in &kr.side_pairs {
            println!(
                "  d{}: left = {} (err {}) right = {} (err {}) jump = {}",
                pair.order,
                format_sig12(pair.left.value),
                format_sig12(pair.left.error_bar),
                format_sig12(pair.right.value),
                format_sig12(pair.right.error_bar),
                format_sig12(pair.jump()),
            );
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// ew
// ---------------------------------------------------------------------------

fn parse_cuts(text: &str, factors: usize) -> Result<PartitionSpec, CliError> {
    if text == "all" {
        return PartitionSpec::all_bipartitions(factors)
            .map_err(|e| CliError::config(format!("cannot enumerate cuts: {e}")));
    }
    let side_a: Vec<usize> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::config(format!("bad cut index '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    let cut = BipartiteCut::new(side_a, factors)
        .map_err(|e| CliError::config(format!("invalid cut: {e}")))?;
    PartitionSpec::new(vec![cut]).map_err(|e| CliError::config(format!("invalid cut: {e}")))
}

fn cmd_ew(args: &EwArgs) -> Result<i32, CliError> {
    let rho = read_state(&args.state)?;
    let factors = rho.subsystem_dims().len();
    let spec = parse_cuts(&args.cuts, factors)?;

    let scan = witness::ew_bipartition_scan(&rho, &spec)
        .map_err(|e| CliError::config(format!("solver failed: {e}")))?;

    let mut best: Option<&witness::EwResult> = None;
    for (cut, res) in &scan.per_cut {
        println!(
            "cut {}: value = {} gap = {} iterations = {} exact = {}",
            cut.label(factors),
            format_sig12(res.value),
            format_sig12(res.duality_gap),
            res.iterations,
            res.exact
        );
        if best.is_none_or(|b| res.value < b.value) {
            best = Some(res);
        }
    }
    println!("min value = {}", format_sig12(scan.min_value));
    println!("exact = {}", scan.exact);

    if let Some(path) = &args.witness_out {
        let res = best.expect("scan returned at least one cut");
        let text = statefile::write_operator(&res.witness.op, rho.subsystem_dims());
        std::fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// geoscan
// ---------------------------------------------------------------------------

fn cmd_geoscan(args: &GeoscanArgs) -> Result<i32, CliError> {
    let (t_min, t_max, points) = parse_grid(&args.range)?;
    let params: Vec<f64> = (0..points)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (points - 1) as f64)
        .collect();

    let states = match args.family.as_str() {
        "gibbs-beta" => {
            let c = XYZCouplings::new(
                args.x.expect("clap enforces -x"),
                args.y.expect("clap enforces -y"),
                args.z.expect("clap enforces -z"),
            )
            .map_err(|e| CliError::config(format!("invalid couplings: {e}")))?;
            params
                .iter()
                .map(|&b| {
                    criticality::thermal_state(&c, b)
                        .map_err(|e| CliError::config(format!("cannot build state: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        "linear-mix" => {
            let a = read_state(args.state_a.as_ref().expect("clap enforces --state-a"))?;
            let b = read_state(args.state_b.as_ref().expect("clap enforces --state-b"))?;
            if a.subsystem_dims() != b.subsystem_dims() {
                return Err(CliError::config(
                    "state files have different subsystem dimensions".to_string(),
                ));
            }
            params
                .iter()
                .map(|&t| {
                    let m = a
                        .op()
                        .mat()
                        .scale(num_complex::Complex64::new(1.0 - t, 0.0))
                        .add(&b.op().mat().scale(num_complex::Complex64::new(t, 0.0)));
                    crate::quantum::DensityMatrix::new(
                        crate::linalg::HermitianOperator::new(m.hermitize())
                            .map_err(|e| CliError::config(format!("bad mixture: {e}")))?,
                        a.subsystem_dims().to_vec(),
                    )
                    .map_err(|e| CliError::config(format!("bad mixture: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        other => {
            return Err(CliError::config(format!(
                "unknown family '{other}' (expected gibbs-beta or linear-mix)"
            )))
        }
    };

    if args.family == "linear-mix" && !(0.0..=1.0).contains(&t_min) | !(0.0..=1.0).contains(&t_max)
    {
        return Err(CliError::config(
            "linear-mix range must lie within [0, 1]".to_string(),
        ));
    }

    let path = StatePath::new(params, states, args.delta_smooth)
        .map_err(|e| CliError::config(format!("invalid path: {e}")))?;
    let opts = TrackOptions {
        cut: BipartiteCut::first_factor(),
        theta_w: args.theta_w,
    };
    let report = witness::track_witness_path(&path, &opts);

    let mut csv = String::from("t,Ew,gap,witness_jump\n");
    for p in &report.points {
        let value = p.value.map(format_sig12).unwrap_or_default();
        let gap = p.duality_gap.map(format_sig12).unwrap_or_default();
        let jump = p.witness_jump.map(format_sig12).unwrap_or_default();
        writeln!(csv, "{},{value},{gap},{jump}", format_sig12(p.param)).unwrap();
    }
    write_output(args.output.as_deref(), &csv)?;

    println!("flags: {}", report.flags.len());
    for &i in &report.flags {
        println!("flag t = {}", format_sig12(report.points[i].param));
    }
    for &i in &report.failures {
        println!("failure t = {}", format_sig12(report.points[i].param));
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_sig12_basics() {
        assert_eq!(format_sig12(0.0), "0.0");
        assert_eq!(format_sig12(1.0), "1.0");
        assert_eq!(format_sig12(0.5), "0.5");
        assert_eq!(format_sig12(-2.25), "-2.25");
        // Capped at 12 significant digits.
        assert_eq!(format_sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        // Shortest form is preserved when it already round-trips.
        assert_eq!(format_sig12(0.1), "0.1");
        assert_eq!(format_sig12(1e-7), "0.0000001");
    }

    #[test]
    fn format_sig12_is_deterministic_and_locale_free() {
        for &x in &[1.5e-12, 123456.789, -9.999999999999e5] {
            let s = format_sig12(x);
            assert!(!s.contains(','));
            assert_eq!(s, format_sig12(x));
        }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:2:5").unwrap(), (0.0, 2.0, 5));
        assert!(parse_grid("2:0:5").is_err());
        assert!(parse_grid("0:2:1").is_err());
        assert!(parse_grid("0:2").is_err());
        assert!(parse_grid("a:2:5").is_err());
    }

    #[test]
    fn bracket_parsing() {
        assert_eq!(parse_bracket("1e-6:10").unwrap(), (1e-6, 10.0));
        assert!(parse_bracket("5:1").is_err());
        assert!(parse_bracket("-1:1").is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(parse_kinds(None).unwrap().len(), 5);
        let kinds = parse_kinds(Some("C,EN")).unwrap();
        assert_eq!(kinds.len(), 2);
        assert!(parse_kinds(Some("C,bogus")).is_err());
        assert!(parse_kinds(Some("")).is_err());
    }

    #[test]
    fn cuts_parsing() {
        let spec = parse_cuts("all", 3).unwrap();
        assert_eq!(spec.cuts.len(), 3);
        let spec = parse_cuts("0", 2).unwrap();
        assert_eq!(spec.cuts[0].side_a, vec![0]);
        assert!(parse_cuts("0,1", 2).is_err());
        assert!(parse_cuts("q", 2).is_err());
    }
}
