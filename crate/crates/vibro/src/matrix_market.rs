//! Matrix Market `coordinate complex general` files.

use std::fmt::Write as _;
use std::path::Path;

use vibro_core::sparse::CsrMatrix;
use vibro_core::C64;

use crate::error::{Result, RunError};

pub fn matrix_to_string(a: &CsrMatrix<C64>) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate complex general\n");
    let entries: Vec<(usize, usize, C64)> = a.triplets().collect();
    let _ = writeln!(out, "{} {} {}", a.nrows(), a.ncols(), entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im);
    }
    out
}

/// A vector as an `n × 1` coordinate matrix including zero entries.
pub fn vector_to_string(b: &[C64]) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate complex general\n");
    let _ = writeln!(out, "{} 1 {}", b.len(), b.len());
    for (i, v) in b.iter().enumerate() {
        let _ = writeln!(out, "{} 1 {:e} {:e}", i + 1, v.re, v.im);
    }
    out
}

pub fn write_matrix(path: &Path, a: &CsrMatrix<C64>) -> Result<()> {
    std::fs::write(path, matrix_to_string(a)).map_err(|e| RunError::io(path, e))
}

pub fn write_vector(path: &Path, b: &[C64]) -> Result<()> {
    std::fs::write(path, vector_to_string(b)).map_err(|e| RunError::io(path, e))
}

/// Reads back a coordinate complex file as `(rows, cols, triplets)`.
pub fn parse(text: &str) -> Option<(usize, usize, Vec<(usize, usize, C64)>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    let dims: Vec<usize> = lines.next()?.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
    let mut t = Vec::with_capacity(dims[2]);
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let i: usize = f[0].parse().ok()?;
        let j: usize = f[1].parse().ok()?;
        t.push((i - 1, j - 1, C64::new(f[2].parse().ok()?, f[3].parse().ok()?)));
    }
    (t.len() == dims[2]).then_some((dims[0], dims[1], t))
}
