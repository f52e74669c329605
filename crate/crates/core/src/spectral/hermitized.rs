use num_complex::Complex64;

use super::esd::{esd_scale, Esd};
use crate::ensembles::MatrixSample;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, lu_logdet, CMatrix};

/// Spectrum of `H = (N/(σ√n) - zI)(N/(σ√n) - zI)^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuEsd {
    /// Ascending, non-negative.
    pub xs: Vec<f64>,
    pub z: Complex64,
}

fn shifted_scaled(a: &CMatrix, scale: f64, z: Complex64) -> CMatrix {
    a.scale_real(scale).shifted(-z)
}

pub fn nu_esd(sample: &MatrixSample, z: Complex64, sigma: f64) -> Result<NuEsd> {
    if !(sigma > 0.0) {
        return Err(Error::Precondition(format!("sigma must be positive, got {sigma}")));
    }
    let m = shifted_scaled(&sample.entries, esd_scale(sample.n, sigma, None), z);
    let mut xs = hermitian_eigenvalues(&m.gram())?;
    for x in xs.iter_mut() {
        *x = x.max(0.0);
    }
    Ok(NuEsd { xs, z })
}

/// `∫ log x dν_n` split at `ε_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSplit {
    /// `(1/n) Σ_{x > ε} log x`.
    pub upper: f64,
    /// `(1/n) Σ_{x ≤ ε} log x`; `-inf` when some `x` is exactly zero.
    pub lower: f64,
    /// Number of `x` at or below `ε`.
    pub lower_count: usize,
}

impl LogSplit {
    pub fn total(&self) -> f64 {
        self.upper + self.lower
    }
}

/// `ε_n = n^{-2B}`.
pub fn eps_n(n: usize, b: f64) -> f64 {
    (n as f64).powf(-2.0 * b)
}

pub fn log_integral_split(nu: &NuEsd, eps: f64) -> Result<LogSplit> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps_n must be positive, got {eps}")));
    }
    let n = nu.xs.len().max(1) as f64;
    let mut upper = 0.0;
    let mut lower = 0.0;
    let mut lower_count = 0;
    for &x in &nu.xs {
        if x > eps {
            upper += x.ln();
        } else {
            lower_count += 1;
            lower += if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
        }
    }
    Ok(LogSplit { upper: upper / n, lower: lower / n, lower_count })
}

/// `(1/n) log det H = (2/n) log |det(N/(σ√n) - zI)|`, from an LU factorisation.
pub fn log_integral(sample: &MatrixSample, z: Complex64, sigma: f64) -> f64 {
    let m = shifted_scaled(&sample.entries, esd_scale(sample.n, sigma, None), z);
    2.0 * lu_logdet(&m).log_abs_det / sample.n as f64
}

/// Central difference in `s` of `∫ log x dν_n(x, s + it)`. A singular stencil
/// point gives a non-finite value.
pub fn g_n_fd(sample: &MatrixSample, s: f64, t: f64, h: f64, sigma: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step h must be positive, got {h}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Precondition(format!("sigma must be positive, got {sigma}")));
    }
    let hi = log_integral(sample, Complex64::new(s + h, t), sigma);
    let lo = log_integral(sample, Complex64::new(s - h, t), sigma);
    if !hi.is_finite() || !lo.is_finite() {
        return Ok(f64::NAN);
    }
    Ok((hi - lo) / (2.0 * h))
}

/// Both sides of `(1/n) Σ|λ_k|² ≤ (1/(σ² n²)) Σ|a_jk|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Schur's inequality for the scaled ESD. For sparse scaling pass `σ√ρ`.
pub fn second_moment_check(sample: &MatrixSample, esd: &Esd, sigma: f64) -> SecondMomentCheck {
    let n = sample.n as f64;
    let lhs = esd.second_moment();
    let rhs = sample.entries.frobenius_norm_sqr() / (sigma * sigma * n * n);
    SecondMomentCheck { lhs, rhs, holds: lhs <= rhs + 1e-9 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::Descriptor;

    fn wrap(entries: CMatrix) -> MatrixSample {
        MatrixSample {
            n: entries.rows(),
            entries,
            seed: 0,
            descriptor: Descriptor { ensemble: "test".into(), sparse_alpha: None, rho: 1.0 },
        }
    }

    #[test]
    fn zero_matrix_shift_two() {
        let nu = nu_esd(&wrap(CMatrix::zeros(5, 5)), Complex64::new(2.0, 0.0), 1.0).unwrap();
        assert!(nu.xs.iter().all(|&x| (x - 4.0).abs() < 1e-14));
        let split = log_integral_split(&nu, 1e-6).unwrap();
        assert!((split.upper - 4f64.ln()).abs() < 1e-14);
        assert_eq!(split.lower, 0.0);
    }

    #[test]
    fn tiny_value_goes_low() {
        let nu = NuEsd { xs: vec![1e-20], z: Complex64::new(0.0, 0.0) };
        let s = log_integral_split(&nu, 1e-12).unwrap();
        assert!((s.lower - 1e-20f64.ln()).abs() < 1e-12);
        assert_eq!(s.upper, 0.0);
        let nu = NuEsd { xs: vec![0.0, 1.0], z: Complex64::new(0.0, 0.0) };
        assert_eq!(log_integral_split(&nu, 1e-12).unwrap().lower, f64::NEG_INFINITY);
        assert!(log_integral_split(&nu, 0.0).is_err());
    }

    #[test]
    fn g_n_of_zero_matrix() {
        let m = wrap(CMatrix::zeros(4, 4));
        let (s, t, h) = (0.7, -0.4, 1e-4);
        let g = g_n_fd(&m, s, t, h, 1.0).unwrap();
        assert!((g - 2.0 * s / (s * s + t * t)).abs() < 1e-6);
        assert!(g_n_fd(&m, s, t, 0.0, 1.0).is_err());
    }

    #[test]
    fn second_moment_cases() {
        let d = wrap(CMatrix::diag(&[Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)]));
        let esd = super::super::esd_of_matrix(&d, 1.0, None).unwrap();
        let r = second_moment_check(&d, &esd, 1.0);
        assert!(r.holds && (r.lhs - r.rhs).abs() < 1e-12);

        let nil = wrap(CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let esd = super::super::esd_of_matrix(&nil, 2.0, None).unwrap();
        let r = second_moment_check(&nil, &esd, 2.0);
        assert_eq!(r.lhs, 0.0);
        assert!((r.rhs - 1.0 / 16.0).abs() < 1e-15);
        assert!(r.holds);
    }
}
