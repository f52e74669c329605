use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::progression::{enumerate, epsilon_net, Gap};
use crate::ensembles::{derive_seed, AtomDistribution, SplitMix64};
use crate::error::{Error, Result};
use crate::smallball::{conc_prob, CoeffTuple, ConcMethod, DifferenceKernel, ProbEstimate};
use crate::stats::binomial_stderr;

/// Smallest sample count accepted by [`level_set_measure`].
pub const MIN_LEVEL_SET_SAMPLES: usize = 1_000;

/// Longest tuple [`forward_lo_experiment`] builds.
pub const MAX_FORWARD_TUPLE: usize = 10_000;

/// Area estimate of a level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetEstimate {
    pub measure: f64,
    pub stderr: f64,
    /// `D(Q)` of the GAP defining the set.
    pub dispersion: f64,
}

/// Whether `ξ` lies in `{‖ξ v_i‖_α ≤ D^ε / L_i for all i}`.
pub fn in_level_set(kernel: &DifferenceKernel, gap: &Gap, dispersion: f64, eps: f64, xi: Complex64) -> bool {
    let scale = dispersion.powf(eps);
    gap.generators().iter().zip(gap.dims()).all(|(v, l)| {
        let t = scale / l;
        kernel.norm_sqr(xi * v) <= t * t
    })
}

/// Monte Carlo area of `Σ = {ξ ∈ B(ξ₀,1) : ‖ξ v_i‖_α ≤ D(Q)^ε / L_i ∀i}`
/// from `samples` uniform points of the disk.
pub fn level_set_measure(
    gap: &Gap,
    dist: &AtomDistribution,
    xi0: Complex64,
    eps: f64,
    samples: usize,
    seed: u64,
    cap: u128,
) -> Result<LevelSetEstimate> {
    if samples < MIN_LEVEL_SET_SAMPLES {
        return Err(Error::Precondition(format!(
            "level set estimation needs at least {MIN_LEVEL_SET_SAMPLES} samples, got {samples}"
        )));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("eps must be non-negative, got {eps}")));
    }
    let dispersion = enumerate(gap, cap)?.dispersion();
    let kernel = DifferenceKernel::new(dist);
    let hits = (0..samples)
        .into_par_iter()
        .filter(|&k| {
            let mut rng = SplitMix64::new(derive_seed(&[seed, k as u64]));
            let rad = rng.next_f64().sqrt();
            let xi = xi0 + Complex64::from_polar(rad, 2.0 * PI * rng.next_f64());
            in_level_set(&kernel, gap, dispersion, eps, xi)
        })
        .count();
    Ok(LevelSetEstimate {
        measure: PI * hits as f64 / samples as f64,
        stderr: PI * binomial_stderr(hits, samples),
        dispersion,
    })
}

/// Result of [`forward_lo_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardLo {
    /// `P_μ(v_1^{L_1²} … v_r^{L_r²})`.
    pub p: ProbEstimate,
    /// `D(GAP((v_i), (√μ L_i)))`.
    pub dispersion_scaled: f64,
    pub tuple_len: usize,
}

/// `P_μ` of the tuple with `⌊L_i²⌋` copies of each `v_i`, together with the
/// dispersion of the `√μ`-scaled GAP.
pub fn forward_lo_experiment(dist: &AtomDistribution, mu: f64, gap: &Gap, method: ConcMethod, cap: u128) -> Result<ForwardLo> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Precondition(format!("mu must lie in (0, 1], got {mu}")));
    }
    let copies: Vec<usize> = gap.dims().iter().map(|l| (l * l).floor() as usize).collect();
    let tuple_len: usize = copies.iter().sum();
    if tuple_len > MAX_FORWARD_TUPLE {
        return Err(Error::CapExceeded { size: tuple_len as u128, cap: MAX_FORWARD_TUPLE as u128 });
    }
    let mut coords = Vec::with_capacity(tuple_len);
    for (v, &m) in gap.generators().iter().zip(&copies) {
        coords.extend(std::iter::repeat(*v).take(m));
    }
    let scaled = Gap::new(gap.generators().to_vec(), gap.dims().iter().map(|l| mu.sqrt() * l).collect())?;
    let dispersion_scaled = enumerate(&scaled, cap)?.dispersion();
    let v = CoeffTuple::from_vec_allow_empty(coords)?;
    let p = conc_prob(dist, mu, &v, method)?;
    Ok(ForwardLo { p, dispersion_scaled, tuple_len })
}

/// Result of [`weak_element_survey`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSurvey {
    /// Grid points `z` with `D(Q + GAP(z,k)) < l·D(Q)`, in grid order.
    pub weak_points: Vec<Complex64>,
    /// Size of the greedy 24-net of the weak set.
    pub net24_size: usize,
    pub dispersion_base: f64,
}

/// Classifies each grid point `z` as weak when extending `Q` by
/// `{-kz, …, kz}` raises the dispersion by less than a factor `l`.
pub fn weak_element_survey(gap: &Gap, k: usize, l: f64, grid: &[Complex64], cap: u128) -> Result<WeakSurvey> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let base = enumerate(gap, cap)?.dispersion();
    let flags = grid
        .par_iter()
        .map(|&z| Ok(enumerate(&gap.extend(z, k as f64)?, cap)?.dispersion() < l * base))
        .collect::<Result<Vec<bool>>>()?;
    let weak_points: Vec<Complex64> = grid.iter().zip(flags).filter(|(_, w)| *w).map(|(z, _)| *z).collect();
    let net24_size = epsilon_net(&weak_points, 24.0)?.len();
    Ok(WeakSurvey { weak_points, net24_size, dispersion_base: base })
}
