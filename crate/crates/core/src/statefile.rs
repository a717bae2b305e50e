//! Text format for density matrices and witness operators.
//!
//! UTF-8, hand-editable:
//!
//! ```text
//! # optional comments
//! dims: 2 2
//! 0 0 0.25 0.0
//! 0 1 0.0 0.0
//! ...
//! ```
//!
//! First non-comment line declares the tensor factors; then one line per
//! matrix entry as `row col re im` (0-based, row-major order not
//! required). Every entry of the dim x dim matrix must appear exactly
//! once.

use crate::linalg::{CMat, HermitianOperator};
use crate::quantum::{DensityMatrix, QuantumError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("matrix is not a valid Hermitian operator: {0}")]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, StateFileError>;

fn parse_err(line: usize, msg: impl Into<String>) -> StateFileError {
    StateFileError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse the raw operator and dims without density-matrix validation.
pub fn parse_operator(text: &str) -> Result<(HermitianOperator, Vec<usize>)> {
    let mut dims: Option<Vec<usize>> = None;
    let mut mat: Option<CMat> = None;
    let mut seen: Vec<bool> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("dims:") {
            if dims.is_some() {
                return Err(parse_err(lineno, "duplicate dims line"));
            }
            let parsed: std::result::Result<Vec<usize>, _> =
                rest.split_whitespace().map(str::parse).collect();
            let d = parsed.map_err(|e| parse_err(lineno, format!("bad dims: {e}")))?;
            if d.is_empty() || d.iter().any(|&x| x < 2) {
                return Err(parse_err(lineno, "dims must list factors >= 2"));
            }
            let total: usize = d.iter().product();
            mat = Some(CMat::zeros(total));
            seen = vec![false; total * total];
            dims = Some(d);
            continue;
        }
        let (mat, dims) = match (mat.as_mut(), dims.as_ref()) {
            (Some(m), Some(d)) => (m, d),
            _ => return Err(parse_err(lineno, "entry before dims line")),
        };
        let dim: usize = dims.iter().product();
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                lineno,
                format!("expected `i j re im`, got {} fields", fields.len()),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad row index: {e}")))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad col index: {e}")))?;
        let re: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad re field: {e}")))?;
        let im: f64 = fields[3]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad im field: {e}")))?;
        if i >= dim || j >= dim {
            return Err(parse_err(lineno, format!("index ({i}, {j}) out of range for dim {dim}")));
        }
        if seen[i * dim + j] {
            return Err(parse_err(lineno, format!("duplicate entry ({i}, {j})")));
        }
        seen[i * dim + j] = true;
        mat[(i, j)] = Complex64::new(re, im);
    }

    let dims = dims.ok_or_else(|| parse_err(0, "missing dims line"))?;
    let mat = mat.unwrap();
    if let Some(pos) = seen.iter().position(|&s| !s) {
        let dim: usize = dims.iter().product();
        return Err(parse_err(
            0,
            format!("missing entry ({}, {})", pos / dim, pos % dim),
        ));
    }
    Ok((HermitianOperator::new(mat)?, dims))
}

/// Parse and validate a density matrix.
pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let (op, dims) = parse_operator(text)?;
    Ok(DensityMatrix::new(op, dims)?)
}

/// Serialize an operator with its factor dims; inverse of `parse_operator`
/// to within 1e-12 elementwise (full 17-significant-digit floats).
pub fn write_operator(op: &HermitianOperator, dims: &[usize]) -> String {
    let dim = op.dim();
    let mut out = String::new();
    out.push_str("dims:");
    for d in dims {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    for i in 0..dim {
        for j in 0..dim {
            let z = op.get(i, j);
            out.push_str(&format!("{i} {j} {:.17e} {:.17e}\n", z.re, z.im));
        }
    }
    out
}

pub fn write_density(rho: &DensityMatrix) -> String {
    write_operator(rho.op(), rho.subsystem_dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for dims in [vec![2usize, 2], vec![2, 2, 2]] {
            let rho = random_density(&dims, &mut rng);
            let text = write_density(&rho);
            let back = parse_density(&text).unwrap();
            assert_eq!(back.subsystem_dims(), rho.subsystem_dims());
            let d = crate::linalg::frob_dist(back.op(), rho.op()).unwrap();
            assert!(d < 1e-12, "round-trip drift {d}");
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# a comment\n\ndims: 2\n0 0 0.5 0.0 # trailing\n0 1 0.0 0.0\n1 0 0.0 0.0\n1 1 0.5 0.0\n";
        let rho = parse_density(text).unwrap();
        assert_eq!(rho.dim(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "dims: 2\n0 0 0.5\n";
        match parse_density(text) {
            Err(StateFileError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let text = "0 0 1.0 0.0\n";
        assert!(matches!(
            parse_density(text),
            Err(StateFileError::Parse { line: 1, .. })
        ));

        // Missing entries.
        let text = "dims: 2\n0 0 1.0 0.0\n";
        assert!(matches!(parse_density(text), Err(StateFileError::Parse { .. })));
    }

    #[test]
    fn invalid_state_distinguished_from_parse_error() {
        // Parses fine but trace is 2.
        let text = "dims: 2\n0 0 1.0 0.0\n0 1 0.0 0.0\n1 0 0.0 0.0\n1 1 1.0 0.0\n";
        assert!(matches!(
            parse_density(text),
            Err(StateFileError::InvalidState(_))
        ));
    }
}
