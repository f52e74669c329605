use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::ball::{CoeffTuple, EstimateMethod, ProbEstimate};
use super::law::{difference_law, lazy_symmetrized_law, walk_law, Atoms};
use crate::ensembles::{derive_seed, AtomDistribution, SplitMix64, INTERNAL_MC_SEED};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Draws of `α₁ - α₂` used when the law has no closed form.
pub const KERNEL_MC_SAMPLES: usize = 100_000;

/// Law of `α₁ - α₂` in the form the Fourier side needs.
#[derive(Debug, Clone)]
pub enum DifferenceKernel {
    Discrete(Atoms),
    /// Centred Gaussian with this `(Re, Im)` covariance.
    Gaussian([[f64; 2]; 2]),
    Samples(Vec<Complex64>),
}

impl DifferenceKernel {
    pub fn new(dist: &AtomDistribution) -> Self {
        if let Some(atoms) = dist.support() {
            return Self::Discrete(difference_law(&atoms));
        }
        if let Some((_, c)) = dist.gaussian_params() {
            return Self::Gaussian([[2.0 * c[0][0], 2.0 * c[0][1]], [2.0 * c[1][0], 2.0 * c[1][1]]]);
        }
        let mut rng = SplitMix64::new(INTERNAL_MC_SEED ^ 0xD1FF);
        Self::Samples((0..KERNEL_MC_SAMPLES).map(|_| dist.sample(&mut rng) - dist.sample(&mut rng)).collect())
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Self::Samples(_))
    }

    fn gaussian_var(c: &[[f64; 2]; 2], z: Complex64) -> f64 {
        // Re(z d) = a X - b Y for d = X + iY.
        let (a, b) = (z.re, -z.im);
        a * a * c[0][0] + 2.0 * a * b * c[0][1] + b * b * c[1][1]
    }

    /// `f(z) = E cos(2π Re(z(α₁ - α₂)))`.
    pub fn f(&self, z: Complex64) -> f64 {
        let v = match self {
            Self::Discrete(d) => d.iter().map(|(x, p)| p * (2.0 * PI * (z * x).re).cos()).sum(),
            Self::Gaussian(c) => (-2.0 * PI * PI * Self::gaussian_var(c, z)).exp(),
            Self::Samples(s) => s.iter().map(|x| (2.0 * PI * (z * x).re).cos()).sum::<f64>() / s.len() as f64,
        };
        v.clamp(0.0, 1.0)
    }

    /// `E ‖Re(z(α₁ - α₂))‖²_{ℝ/ℤ}`.
    pub fn norm_sqr(&self, z: Complex64) -> f64 {
        let circ = |t: f64| {
            let d = t - t.round();
            d * d
        };
        match self {
            Self::Discrete(d) => d.iter().map(|(x, p)| p * circ((z * x).re)).sum(),
            Self::Gaussian(c) => gaussian_circle_second(Self::gaussian_var(c, z)),
            Self::Samples(s) => s.iter().map(|x| circ((z * x).re)).sum::<f64>() / s.len() as f64,
        }
    }

    /// Largest `|α₁ - α₂|` that matters for oscillation.
    fn diameter(&self) -> f64 {
        match self {
            Self::Discrete(d) => d.iter().fold(0.0, |m, (x, _)| m.max(x.norm())),
            Self::Gaussian(c) => 8.0 * (c[0][0] + c[1][1]).max(0.0).sqrt(),
            Self::Samples(s) => s.iter().fold(0.0, |m, x| m.max(x.norm())),
        }
    }
}

/// `E ‖G‖²_{ℝ/ℤ}` for `G ~ N(0, s2)`.
fn gaussian_circle_second(s2: f64) -> f64 {
    if s2 <= 0.0 {
        return 0.0;
    }
    if s2 < 0.0025 {
        // P(|G| > 1/2) < e^{-50}.
        return s2;
    }
    // ‖x‖² = 1/12 + Σ_k (-1)^k cos(2πkx) / (π²k²).
    let mut acc = 1.0 / 12.0;
    for k in 1..=400 {
        let kf = k as f64;
        let damp = (-2.0 * PI * PI * kf * kf * s2).exp();
        if damp < 1e-300 {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * damp / (PI * PI * kf * kf);
    }
    acc.max(0.0)
}

/// `f(z) = |E e(Re(αz))|²`: exact for finitely supported and Gaussian laws.
pub fn char_fn_f(dist: &AtomDistribution, z: Complex64) -> f64 {
    DifferenceKernel::new(dist).f(z)
}

/// `‖w‖_α = (E ‖Re(w(α₁ - α₂))‖²_{ℝ/ℤ})^{1/2}`.
pub fn alpha_norm(dist: &AtomDistribution, w: Complex64) -> f64 {
    DifferenceKernel::new(dist).norm_sqr(w).sqrt()
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("mu must lie in (0, 1], got {mu}")))
    }
}

/// Law of `α^{(μ)} = (α₁ - α₂)·1_{μ/2}` for a finitely supported α.
pub fn lazy_law(dist: &AtomDistribution, mu: f64) -> Result<Vec<(Complex64, f64)>> {
    check_mu(mu)?;
    let atoms = dist
        .support()
        .ok_or_else(|| Error::Precondition(format!("{} is not finitely supported", dist.label())))?;
    Ok(lazy_symmetrized_law(&atoms, mu))
}

/// `P_μ(v)` by enumerating the law of `W_{α^{(μ)}}(v)`, when α is finitely
/// supported and the walk has at most `cap` atoms.
pub fn conc_prob_exact(dist: &AtomDistribution, mu: f64, v: &CoeffTuple, cap: usize) -> Result<Option<ProbEstimate>> {
    check_mu(mu)?;
    let Some(atoms) = dist.support() else { return Ok(None) };
    let lazy = lazy_symmetrized_law(&atoms, mu);
    Ok(walk_law(&lazy, v.coords(), cap)
        .map(|law| ProbEstimate::exact(law.iter().map(|(w, p)| p * (-PI * w.norm_sqr()).exp()).sum())))
}

/// `P_μ(v) = E exp(-π |W_{α^{(μ)}}(v)|²)`: exact for finitely supported α
/// with a walk support of at most 10⁶ atoms, Monte Carlo over `trials`
/// draws otherwise.
pub fn conc_prob_mc(dist: &AtomDistribution, mu: f64, v: &CoeffTuple, trials: usize, seed: u64) -> Result<ProbEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    if let Some(e) = conc_prob_exact(dist, mu, v, 1_000_000)? {
        return Ok(e);
    }
    conc_prob_sampled(dist, mu, v, trials, seed)
}

/// Monte Carlo `P_μ(v)` regardless of the law.
pub fn conc_prob_sampled(dist: &AtomDistribution, mu: f64, v: &CoeffTuple, trials: usize, seed: u64) -> Result<ProbEstimate> {
    check_mu(mu)?;
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let half = mu / 2.0;
    let (s1, s2) = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = SplitMix64::new(derive_seed(&[seed, k as u64]));
            let mut w = Complex64::new(0.0, 0.0);
            for &vi in v.coords() {
                let a = dist.sample(&mut rng);
                let b = dist.sample(&mut rng);
                if rng.next_f64() < half {
                    w += vi * (a - b);
                }
            }
            let x = (-PI * w.norm_sqr()).exp();
            (x, x * x)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = trials as f64;
    let mean = s1 / m;
    let var = if trials > 1 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(ProbEstimate {
        value: mean.clamp(0.0, 1.0),
        stderr: (var / m).sqrt(),
        method: EstimateMethod::MonteCarlo,
        lower_bound_only: false,
    })
}

/// Default disk radius for [`conc_prob_fourier`].
pub const DEFAULT_RADIUS_CUTOFF: f64 = 6.0;
/// Largest number of quadrature nodes [`conc_prob_fourier`] will use.
pub const MAX_FOURIER_NODES: u64 = 400_000_000;

/// Polar node counts `(radial panels of 16 Gauss points, angular points)`
/// resolving an integrand of bandwidth `omega` on a disk of radius `r`.
fn node_plan(omega: f64, r: f64) -> (usize, usize) {
    let phase = omega * r;
    let panels = ((phase / 8.0).ceil() as usize).max(16);
    let angular = ((1.25 * phase).ceil() as usize + 64).max(256);
    (panels, angular)
}

/// Quadrature cost of [`conc_prob_fourier`] for this law and tuple.
pub fn fourier_node_count(kernel: &DifferenceKernel, v: &CoeffTuple, radius_cutoff: f64) -> u64 {
    let omega = 2.0 * PI * kernel.diameter() * v.coords().iter().map(|z| z.norm()).sum::<f64>();
    let (p, a) = node_plan(omega, radius_cutoff);
    (p as u64) * 16 * a as u64
}

/// `∫_{|ξ| ≤ R} Π (1 - μ/2 + μ/2 f(ξ v_i)) e^{-π|ξ|²} dξ` by a polar product
/// rule sized to the integrand's oscillation. The omitted tail is at most
/// `e^{-πR²}`, which is reported as the standard error (plus the kernel's
/// sampling error when α has no closed form).
pub fn conc_prob_fourier(dist: &AtomDistribution, mu: f64, v: &CoeffTuple, radius_cutoff: f64) -> Result<ProbEstimate> {
    conc_prob_fourier_with(&DifferenceKernel::new(dist), mu, v, radius_cutoff)
}

pub fn conc_prob_fourier_with(
    kernel: &DifferenceKernel,
    mu: f64,
    v: &CoeffTuple,
    radius_cutoff: f64,
) -> Result<ProbEstimate> {
    check_mu(mu)?;
    if !(radius_cutoff > 0.0) || !radius_cutoff.is_finite() {
        return Err(Error::Precondition(format!("radius_cutoff must be positive, got {radius_cutoff}")));
    }
    let nodes = fourier_node_count(kernel, v, radius_cutoff);
    if nodes > MAX_FOURIER_NODES {
        return Err(Error::CapExceeded { size: nodes as u128, cap: MAX_FOURIER_NODES as u128 });
    }
    let omega = 2.0 * PI * kernel.diameter() * v.coords().iter().map(|z| z.norm()).sum::<f64>();
    let (panels, angular) = node_plan(omega, radius_cutoff);
    let rule = gauss_legendre(16);
    let h = radius_cutoff / panels as f64;
    let dirs: Vec<Complex64> = (0..angular)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / angular as f64))
        .collect();
    let dphi = 2.0 * PI / angular as f64;
    let coords = v.coords();
    let total: f64 = (0..panels)
        .into_par_iter()
        .map(|p| {
            let mut acc = 0.0;
            for (r, w) in rule.mapped(p as f64 * h, (p + 1) as f64 * h) {
                let gauss = (-PI * r * r).exp();
                if gauss == 0.0 {
                    continue;
                }
                let mut ring = 0.0;
                for d in &dirs {
                    let xi = d * r;
                    let mut prod = 1.0;
                    for &vi in coords {
                        prod *= 1.0 - mu / 2.0 + mu / 2.0 * kernel.f(xi * vi);
                        if prod == 0.0 {
                            break;
                        }
                    }
                    ring += prod;
                }
                acc += w * r * gauss * ring * dphi;
            }
            acc
        })
        .sum();
    let tail = (-PI * radius_cutoff * radius_cutoff).exp();
    let kernel_err = match kernel {
        DifferenceKernel::Samples(s) => 3.0 / (s.len() as f64).sqrt(),
        _ => 0.0,
    };
    Ok(ProbEstimate {
        value: total.clamp(0.0, 1.0),
        stderr: tail + kernel_err,
        method: EstimateMethod::FourierQuadrature,
        lower_bound_only: false,
    })
}

/// How [`conc_prob`] evaluates `P_μ(v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcMethod {
    /// Exact enumeration if the walk support fits in 10⁶ atoms, then the
    /// Fourier rule if it fits in [`MAX_FOURIER_NODES`], then Monte Carlo.
    Auto { trials: usize, seed: u64 },
    /// Exact enumeration with this support cap; fails if it does not fit.
    Exact { cap: usize },
    MonteCarlo { trials: usize, seed: u64 },
    Fourier { radius_cutoff: f64 },
}

impl Default for ConcMethod {
    fn default() -> Self {
        Self::Auto { trials: 100_000, seed: INTERNAL_MC_SEED }
    }
}

/// `P_μ(v)` by the requested method.
pub fn conc_prob(dist: &AtomDistribution, mu: f64, v: &CoeffTuple, method: ConcMethod) -> Result<ProbEstimate> {
    match method {
        ConcMethod::Auto { trials, seed } => {
            if let Some(e) = conc_prob_exact(dist, mu, v, 1_000_000)? {
                return Ok(e);
            }
            let kernel = DifferenceKernel::new(dist);
            if fourier_node_count(&kernel, v, DEFAULT_RADIUS_CUTOFF) <= MAX_FOURIER_NODES {
                return conc_prob_fourier_with(&kernel, mu, v, DEFAULT_RADIUS_CUTOFF);
            }
            conc_prob_sampled(dist, mu, v, trials, seed)
        }
        ConcMethod::Exact { cap } => conc_prob_exact(dist, mu, v, cap)?.ok_or_else(|| {
            Error::Precondition(format!("exact enumeration of P_mu is unavailable within {cap} atoms"))
        }),
        ConcMethod::MonteCarlo { trials, seed } => conc_prob_mc(dist, mu, v, trials, seed),
        ConcMethod::Fourier { radius_cutoff } => conc_prob_fourier(dist, mu, v, radius_cutoff),
    }
}
