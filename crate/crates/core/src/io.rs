//! Deterministic text and binary encodings for output datasets.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::linalg::CMatrix;

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // Collapse −0 so digests do not depend on the sign of zero.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

/// Density matrix as CSV: one line per row, columns `re_0,im_0,re_1,im_1,…`.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    for k in 0..m.ncols() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&format!("re_{k},im_{k}"));
    }
    out.push('\n');
    for r in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols())
            .flat_map(|col| {
                let z = m[(r, col)];
                [fmt_f64(z.re), fmt_f64(z.im)]
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Little-endian f64 payload.
pub fn f64_le_bytes(values: impl IntoIterator<Item = f64>) -> Vec<u8> {
    values.into_iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Complex matrix as interleaved re/im little-endian f64, row-major.
pub fn matrix_le_bytes(m: &CMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(m.len() * 16);
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `bytes` and return their digest.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<String> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes)?;
    Ok(sha256_hex(bytes))
}
