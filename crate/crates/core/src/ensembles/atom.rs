use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::seed::SplitMix64;
use crate::error::{Error, Result};

/// Seed used by every internal Monte Carlo fallback, so that repeated calls
/// on the same law return the same estimate.
pub(crate) const INTERNAL_MC_SEED: u64 = 0x5EED_C1C1_AB1E_0001;

/// Sample count for Monte Carlo moment fallbacks on laws with no closed form.
pub(crate) const MOMENT_MC_SAMPLES: usize = 1_000_000;

/// Law of the scalar entry variable.
///
/// The composite kinds mirror the transformations the experiments apply to a
/// base law: hard truncation `x·1(|x| < cutoff)`, affine normalisation
/// `(x - shift) / scale`, phase rotation `e^{iθ}x` and sparsification by an
/// independent Bernoulli(`keep`) mask.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomDistribution {
    /// Uniform on {+1, -1}.
    Bernoulli,
    /// Standard real normal.
    RealGaussian,
    /// Independent real and imaginary parts, each N(0, 1/2), so E|x|² = 1.
    ComplexGaussian,
    Discrete { values: Vec<Complex64>, probs: Vec<f64> },
    Truncated { base: Box<AtomDistribution>, cutoff: f64 },
    Normalized { base: Box<AtomDistribution>, shift: Complex64, scale: f64 },
    Rotated { base: Box<AtomDistribution>, theta: f64 },
    Masked { base: Box<AtomDistribution>, keep: f64 },
}

/// First and second absolute moments of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: Complex64,
    /// E|x|².
    pub second: f64,
    /// Zero when exact; Monte Carlo standard error of `second` otherwise.
    pub stderr: f64,
}

impl Moments {
    pub fn variance(&self) -> f64 {
        (self.second - self.mean.norm_sqr()).max(0.0)
    }
}

impl AtomDistribution {
    pub fn discrete(values: Vec<Complex64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "discrete law needs matching non-empty values/probs, got {} and {}",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite atom".into()));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidDistribution("probability outside [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::Discrete { values, probs })
    }

    pub fn real_discrete(values: &[f64], probs: &[f64]) -> Result<Self> {
        Self::discrete(
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            probs.to_vec(),
        )
    }

    pub fn point_mass(value: Complex64) -> Self {
        Self::Discrete { values: vec![value], probs: vec![1.0] }
    }

    pub fn truncated(base: AtomDistribution, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::InvalidDistribution(format!("cutoff {cutoff} must be positive")));
        }
        Ok(Self::Truncated { base: Box::new(base), cutoff })
    }

    pub fn normalized(base: AtomDistribution, shift: Complex64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidDistribution(format!("scale {scale} must be positive")));
        }
        Ok(Self::Normalized { base: Box::new(base), shift, scale })
    }

    pub fn rotated(base: AtomDistribution, theta: f64) -> Self {
        Self::Rotated { base: Box::new(base), theta }
    }

    /// `x · I_keep` with an independent Bernoulli(`keep`) indicator.
    pub fn masked(base: AtomDistribution, keep: f64) -> Result<Self> {
        if !(keep > 0.0 && keep <= 1.0) {
            return Err(Error::InvalidDistribution(format!("keep probability {keep} not in (0, 1]")));
        }
        Ok(Self::Masked { base: Box::new(base), keep })
    }

    /// Short human-readable name used in CSV tags.
    pub fn label(&self) -> String {
        match self {
            Self::Bernoulli => "bernoulli".into(),
            Self::RealGaussian => "real_gaussian".into(),
            Self::ComplexGaussian => "complex_gaussian".into(),
            Self::Discrete { values, .. } => format!("discrete{}", values.len()),
            Self::Truncated { base, .. } => format!("truncated({})", base.label()),
            Self::Normalized { base, .. } => format!("normalized({})", base.label()),
            Self::Rotated { base, .. } => format!("rotated({})", base.label()),
            Self::Masked { base, .. } => format!("masked({})", base.label()),
        }
    }

    /// Finite support with probabilities, when the law is discrete.
    pub fn support(&self) -> Option<Vec<(Complex64, f64)>> {
        let atoms = match self {
            Self::Bernoulli => vec![(Complex64::new(1.0, 0.0), 0.5), (Complex64::new(-1.0, 0.0), 0.5)],
            Self::RealGaussian | Self::ComplexGaussian => return None,
            Self::Discrete { values, probs } => {
                values.iter().copied().zip(probs.iter().copied()).collect()
            }
            Self::Truncated { base, cutoff } => base
                .support()?
                .into_iter()
                .map(|(x, p)| (if x.norm() < *cutoff { x } else { Complex64::new(0.0, 0.0) }, p))
                .collect(),
            Self::Normalized { base, shift, scale } => base
                .support()?
                .into_iter()
                .map(|(x, p)| ((x - shift) / scale, p))
                .collect(),
            Self::Rotated { base, theta } => {
                let phase = Complex64::from_polar(1.0, *theta);
                base.support()?.into_iter().map(|(x, p)| (x * phase, p)).collect()
            }
            Self::Masked { base, keep } => {
                let mut atoms: Vec<_> =
                    base.support()?.into_iter().map(|(x, p)| (x, p * keep)).collect();
                atoms.push((Complex64::new(0.0, 0.0), 1.0 - keep));
                atoms
            }
        };
        Some(merge_atoms(atoms))
    }

    pub fn has_exact_enumeration(&self) -> bool {
        self.support().is_some()
    }

    /// Mean and covariance of (Re x, Im x) when the law is Gaussian.
    pub fn gaussian_params(&self) -> Option<(Complex64, [[f64; 2]; 2])> {
        match self {
            Self::RealGaussian => Some((Complex64::new(0.0, 0.0), [[1.0, 0.0], [0.0, 0.0]])),
            Self::ComplexGaussian => Some((Complex64::new(0.0, 0.0), [[0.5, 0.0], [0.0, 0.5]])),
            Self::Normalized { base, shift, scale } => {
                let (m, c) = base.gaussian_params()?;
                let s2 = scale * scale;
                Some(((m - shift) / scale, [[c[0][0] / s2, c[0][1] / s2], [c[1][0] / s2, c[1][1] / s2]]))
            }
            Self::Rotated { base, theta } => {
                let (m, c) = base.gaussian_params()?;
                Some((m * Complex64::from_polar(1.0, *theta), rotate_cov(&c, *theta)))
            }
            _ => None,
        }
    }

    /// Draws one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            Self::Bernoulli => {
                if rng.random::<bool>() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
            Self::RealGaussian => Complex64::new(rng.sample(StandardNormal), 0.0),
            Self::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
            }
            Self::Discrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                // Rounding in the cumulative sum: fall back to the last atom
                // with positive mass.
                values
                    .iter()
                    .zip(probs)
                    .rev()
                    .find(|(_, &p)| p > 0.0)
                    .map(|(v, _)| *v)
                    .unwrap_or(values[values.len() - 1])
            }
            Self::Truncated { base, cutoff } => {
                let x = base.sample(rng);
                if x.norm() < *cutoff {
                    x
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Self::Normalized { base, shift, scale } => (base.sample(rng) - shift) / scale,
            Self::Rotated { base, theta } => base.sample(rng) * Complex64::from_polar(1.0, *theta),
            Self::Masked { base, keep } => {
                // Draw both so that the value stream does not depend on the mask.
                let x = base.sample(rng);
                let u: f64 = rng.random();
                if u < *keep {
                    x
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Moments, exact whenever the law is discrete or a Gaussian chain with a
    /// closed form, Monte Carlo otherwise.
    pub fn moments(&self) -> Moments {
        if let Some((mean, second)) = self.analytic_moments() {
            return Moments { mean, second, stderr: 0.0 };
        }
        let mut rng = SplitMix64::new(INTERNAL_MC_SEED);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum2 = 0.0;
        let mut sum4 = 0.0;
        for _ in 0..MOMENT_MC_SAMPLES {
            let x = self.sample(&mut rng);
            let a = x.norm_sqr();
            sum += x;
            sum2 += a;
            sum4 += a * a;
        }
        let m = MOMENT_MC_SAMPLES as f64;
        let second = sum2 / m;
        let var2 = (sum4 / m - second * second).max(0.0);
        Moments { mean: sum / m, second, stderr: (var2 / m).sqrt() }
    }

    pub fn mean(&self) -> Complex64 {
        self.moments().mean
    }

    /// σ² = E|x - Ex|².
    pub fn variance(&self) -> f64 {
        self.moments().variance()
    }

    fn analytic_moments(&self) -> Option<(Complex64, f64)> {
        if let Some(atoms) = self.support() {
            let mean = atoms.iter().map(|(x, p)| x * p).sum();
            let second = atoms.iter().map(|(x, p)| x.norm_sqr() * p).sum();
            return Some((mean, second));
        }
        match self {
            Self::RealGaussian | Self::ComplexGaussian => Some((Complex64::new(0.0, 0.0), 1.0)),
            Self::Truncated { base, cutoff } => {
                let (m, cov) = base.gaussian_params()?;
                if m.norm() != 0.0 {
                    return None;
                }
                truncated_centered_gaussian_second(&cov, *cutoff)
                    .map(|second| (Complex64::new(0.0, 0.0), second))
            }
            Self::Normalized { base, shift, scale } => {
                let (m, s) = base.analytic_moments()?;
                let second = (s - 2.0 * (shift.conj() * m).re + shift.norm_sqr()) / (scale * scale);
                Some(((m - shift) / scale, second))
            }
            Self::Rotated { base, theta } => {
                let (m, s) = base.analytic_moments()?;
                Some((m * Complex64::from_polar(1.0, *theta), s))
            }
            Self::Masked { base, keep } => {
                let (m, s) = base.analytic_moments()?;
                Some((m * keep, s * keep))
            }
            _ => None,
        }
    }
}

/// E|x|² 1(|x| < c) for a centred Gaussian whose (Re, Im) covariance is
/// either rank one or isotropic; other shapes have no elementary form.
pub(crate) fn truncated_centered_gaussian_second(cov: &[[f64; 2]; 2], cutoff: f64) -> Option<f64> {
    let (l1, l2) = sym2_eigenvalues(cov);
    let tol = 1e-14 * (l1 + l2).max(1e-300);
    if l2.abs() <= tol {
        // Rank one: x = sqrt(l1) g along a fixed direction.
        let s = l1.sqrt();
        let c = cutoff / s;
        Some(l1 * truncated_normal_second(c))
    } else if (l1 - l2).abs() <= tol {
        // Isotropic: |x|² ~ Exp with mean 2 l1.
        let mean = 2.0 * l1;
        let u = cutoff * cutoff / mean;
        Some(mean * (1.0 - (-u).exp() * (1.0 + u)))
    } else {
        None
    }
}

/// E g² 1(|g| < c) for a standard normal g.
pub(crate) fn truncated_normal_second(c: f64) -> f64 {
    let phi = (-0.5 * c * c).exp() / (2.0 * PI).sqrt();
    statrs::function::erf::erf(c / std::f64::consts::SQRT_2) - 2.0 * c * phi
}

/// Eigenvalues (descending) of a symmetric 2×2 matrix.
pub(crate) fn sym2_eigenvalues(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let diff = m[0][0] - m[1][1];
    let disc = (diff * diff + 4.0 * m[0][1] * m[1][0]).max(0.0).sqrt();
    (0.5 * (tr + disc), 0.5 * (tr - disc))
}

pub(crate) fn rotate_cov(c: &[[f64; 2]; 2], theta: f64) -> [[f64; 2]; 2] {
    let (s, co) = theta.sin_cos();
    let r = [[co, -s], [s, co]];
    let mut rc = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            rc[i][j] = r[i][0] * c[0][j] + r[i][1] * c[1][j];
        }
    }
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = rc[i][0] * r[j][0] + rc[i][1] * r[j][1];
        }
    }
    out
}

/// Sorts atoms and merges exact duplicates; drops zero-mass atoms.
pub(crate) fn merge_atoms(mut atoms: Vec<(Complex64, f64)>) -> Vec<(Complex64, f64)> {
    atoms.retain(|&(_, p)| p > 0.0);
    atoms.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.im.partial_cmp(&b.0.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut out: Vec<(Complex64, f64)> = Vec::with_capacity(atoms.len());
    for (x, p) in atoms {
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 += p,
            _ => out.push((x, p)),
        }
    }
    out
}
