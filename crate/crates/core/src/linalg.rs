//! Dense complex linear algebra shared by the simulation modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} is not square",
            n,
            m.ncols()
        )));
    }
    // Symmetrize so tiny asymmetries from arithmetic never reach the solver.
    let h = (m + m.adjoint()).scale(0.5);
    let se = h
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::Eigensolver(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| se.eigenvectors[(r, order[col])]);
    Ok(Eigh { values, vectors })
}

pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    eigh(m).map(|e| e.values)
}

impl Eigh {
    /// `f(H) = V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for r in 0..n {
                scaled[(r, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn unitary_propagator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(eigh(h)?.apply_fn(|lam| (-I * lam * t).exp()))
}

/// Largest absolute entry of `A - A†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Small negative eigenvalues from rounding are clamped to zero.
pub fn sqrtm_psd(m: &CMatrix) -> Result<CMatrix> {
    Ok(eigh(m)?.apply_fn(|lam| c(lam.max(0.0).sqrt())))
}
