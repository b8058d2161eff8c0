//! Dense kernels on top of faer. Everything runs sequentially so results are
//! reproducible bit for bit on a given machine.

use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};
use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric
/// matrix. Only the lower triangle is read.
pub fn symmetric_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)
}

/// Eigenvalues (ascending) and eigenvectors of a complex Hermitian matrix.
pub fn hermitian_eigen(m: MatRef<'_, Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn hermitian_eigenvalues(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    let values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Eigen)?;
    Ok(values)
}

/// `a * b` for real matrices.
pub fn mul_real(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(&mut out, Accum::Replace, a, b, 1.0, Par::Seq);
    out
}

/// `a * b` for complex matrices.
pub fn mul_complex(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(&mut out, Accum::Replace, a, b, Complex64::new(1.0, 0.0), Par::Seq);
    out
}

/// Conjugate transpose as an owned matrix.
pub fn adjoint(m: MatRef<'_, Complex64>) -> Mat<Complex64> {
    Mat::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)].conj())
}

/// `V diag(w) Vᵀ` for a real `V`, returned as a complex matrix.
pub fn weighted_projector_sum(vectors: MatRef<'_, f64>, weights: &[f64]) -> Mat<Complex64> {
    let n = vectors.nrows();
    let scaled = Mat::from_fn(n, weights.len(), |i, a| vectors[(i, a)] * weights[a]);
    let real = mul_real(scaled.as_ref(), vectors.subcols(0, weights.len()).transpose());
    Mat::from_fn(n, n, |i, j| Complex64::new(real[(i, j)], 0.0))
}

/// `V x` for a real `V` and complex `x`, via two real products.
pub fn real_times_complex(v: MatRef<'_, f64>, x: &[Complex64]) -> Vec<Complex64> {
    let rhs = Mat::from_fn(x.len(), 2, |i, c| if c == 0 { x[i].re } else { x[i].im });
    let out = mul_real(v, rhs.as_ref());
    (0..v.nrows())
        .map(|i| Complex64::new(out[(i, 0)], out[(i, 1)]))
        .collect()
}

/// `Vᵀ x` for a real `V` and complex `x`.
pub fn real_transpose_times_complex(v: MatRef<'_, f64>, x: &[Complex64]) -> Vec<Complex64> {
    real_times_complex(v.transpose(), x)
}

/// `V X` for a real `V` and complex matrix `X`.
pub fn real_times_complex_mat(v: MatRef<'_, f64>, x: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let (n, k) = (x.nrows(), x.ncols());
    let rhs = Mat::from_fn(n, 2 * k, |i, c| {
        if c < k {
            x[(i, c)].re
        } else {
            x[(i, c - k)].im
        }
    });
    let out = mul_real(v, rhs.as_ref());
    Mat::from_fn(v.nrows(), k, |i, c| Complex64::new(out[(i, c)], out[(i, c + k)]))
}

pub fn max_abs_real(m: MatRef<'_, f64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].abs());
        }
    }
    best
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}


#[cfg(test)]
pub fn max_abs_diff(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}
