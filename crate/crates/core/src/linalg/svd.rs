use num_complex::Complex64;

use super::{hermitian::hermitian_eigenvalues, lu::Lu, vec_norm, CMatrix};
use crate::error::Result;

/// Extreme singular values, plus the full list when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdSummary {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Descending.
    pub all_values: Option<Vec<f64>>,
}

/// Singular values from the eigenvalues of the smaller Gram matrix.
///
/// Small singular values lose relative accuracy this way (roughly
/// `ε σ_max² / σ_min`); use [`least_singular_value`] when the bottom of the
/// spectrum matters.
pub fn singular_values(a: &CMatrix, want_all: bool) -> Result<SvdSummary> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(SvdSummary { sigma_max: 0.0, sigma_min: 0.0, all_values: want_all.then(Vec::new) });
    }
    let g = if a.rows() < a.cols() { a.adjoint().gram() } else { a.gram() };
    let vals: Vec<f64> = hermitian_eigenvalues(&g)?.into_iter().rev().map(|x| x.max(0.0).sqrt()).collect();
    Ok(SvdSummary {
        sigma_max: vals[0],
        sigma_min: *vals.last().unwrap(),
        all_values: want_all.then_some(vals),
    })
}

fn start_vector(n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.37 * ((i as f64) * 0.7).sin(), 0.21 * ((i as f64) * 1.3).cos()))
        .collect();
    let s = vec_norm(&v);
    v.into_iter().map(|z| z / s).collect()
}

/// Power-iteration estimate of `‖A‖_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Relative change at the final iteration.
    pub achieved_tol: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const POWER_ITERATION_CAP: usize = 20_000;

/// `‖A‖_2` by power iteration on `A^* A`, stopping when successive estimates
/// agree to relative `tol` or after [`POWER_ITERATION_CAP`] steps.
pub fn spectral_norm_detailed(a: &CMatrix, tol: f64) -> NormEstimate {
    if a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0 {
        return NormEstimate { value: 0.0, achieved_tol: 0.0, iterations: 0, converged: true };
    }
    let mut x = start_vector(a.cols());
    let mut prev = 0.0;
    let mut change = f64::INFINITY;
    for it in 1..=POWER_ITERATION_CAP {
        let y = a.mul_vec(&x);
        let est = vec_norm(&y);
        let z = a.adjoint_mul_vec(&y);
        let zn = vec_norm(&z);
        if zn == 0.0 {
            return NormEstimate { value: est, achieved_tol: 0.0, iterations: it, converged: true };
        }
        x = z.into_iter().map(|v| v / zn).collect();
        change = (est - prev).abs() / est;
        if change <= tol {
            return NormEstimate { value: est, achieved_tol: change, iterations: it, converged: true };
        }
        prev = est;
    }
    NormEstimate { value: prev, achieved_tol: change, iterations: POWER_ITERATION_CAP, converged: false }
}

pub fn spectral_norm(a: &CMatrix, tol: f64) -> f64 {
    spectral_norm_detailed(a, tol).value
}

/// Smallest singular value of a square matrix.
///
/// Inverse iteration on `(A A^*)^{-1}` through a single LU factorisation, which
/// keeps relative accuracy for well-separated small singular values. An
/// exactly zero pivot returns 0.
pub fn least_singular_value(a: &CMatrix) -> Result<f64> {
    if !a.is_square() {
        let s = singular_values(a, false)?;
        return Ok(s.sigma_min);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let lu = Lu::factor(a);
    if lu.logdet().log_abs_det == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mut x = start_vector(n);
    let mut prev = f64::INFINITY;
    let mut est = f64::INFINITY;
    for _ in 0..2000 {
        let y = lu.solve(&x);
        let ny = vec_norm(&y);
        if !ny.is_finite() {
            return Ok(0.0);
        }
        est = 1.0 / ny;
        let z = lu.solve_adjoint(&y);
        let nz = vec_norm(&z);
        if !nz.is_finite() || nz == 0.0 {
            return Ok(est.max(0.0));
        }
        x = z.into_iter().map(|v| v / nz).collect();
        if (prev - est).abs() <= 1e-14 * est {
            break;
        }
        prev = est;
    }
    Ok(est)
}
