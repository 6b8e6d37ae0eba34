//! Matrix Market coordinate files (`complex general`, one-based indices).

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::csr::ComplexSparseMatrix;
use crate::error::{Error, Result};

pub fn write_matrix_market<W: Write>(m: &ComplexSparseMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(w, "{} {} {}", m.dim(), m.dim(), m.nnz())?;
    for i in 0..m.dim() {
        let (cols, vals) = m.row(i);
        for (&j, v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:.17e} {:.17e}", i + 1, j + 1, v.re, v.im)?;
        }
    }
    Ok(())
}

/// Reads `coordinate` files with `real` or `complex` fields and `general` or
/// `symmetric` structure. Only square matrices are accepted.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<ComplexSparseMatrix> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::MatrixMarket("empty input".into()))??;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(Error::MatrixMarket(format!("unsupported header `{header}`")));
    }
    let complex = match tokens[3].as_str() {
        "complex" => true,
        "real" | "integer" => false,
        other => return Err(Error::MatrixMarket(format!("unsupported field `{other}`"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::MatrixMarket(format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num =
            |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| Error::MatrixMarket(format!("bad number `{s}`"))) };
        let idx = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::MatrixMarket(format!("bad index `{s}`")))
        };
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(Error::MatrixMarket(format!("bad size line `{line}`")));
                }
                let (rows, cols) = (idx(parts[0])?, idx(parts[1])?);
                if rows != cols {
                    return Err(Error::MatrixMarket(format!("matrix is {rows}x{cols}, not square")));
                }
                size = Some((rows, idx(parts[2])?));
            }
            Some((dim, _)) => {
                let expected = if complex { 4 } else { 3 };
                if parts.len() != expected {
                    return Err(Error::MatrixMarket(format!("bad entry line `{line}`")));
                }
                let (i, j) = (idx(parts[0])?, idx(parts[1])?);
                if i == 0 || j == 0 || i > dim || j > dim {
                    return Err(Error::MatrixMarket(format!("index out of range in `{line}`")));
                }
                let v = Complex64::new(num(parts[2])?, if complex { num(parts[3])? } else { 0.0 });
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (dim, declared) = size.ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    let stored = if symmetric { triplets.iter().filter(|(i, j, _)| i <= j).count() } else { triplets.len() };
    if stored != declared {
        return Err(Error::MatrixMarket(format!("header declares {declared} entries, found {stored}")));
    }
    ComplexSparseMatrix::from_triplets(dim, triplets)
}
