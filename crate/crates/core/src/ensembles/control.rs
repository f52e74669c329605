use num_complex::Complex64;

use super::atom::{rotate_cov, sym2_eigenvalues, truncated_normal_second, AtomDistribution, INTERNAL_MC_SEED};
use super::seed::SplitMix64;
use crate::error::{Error, Result};

/// Monte Carlo settings for moment checks on laws without exact moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOptions {
    pub mc_samples: usize,
    /// Tolerance in standard errors.
    pub sigmas: f64,
    pub seed: u64,
}

impl Default for ControlOptions {
    fn default() -> Self {
        Self { mc_samples: 100_000, sigmas: 5.0, seed: INTERNAL_MC_SEED }
    }
}

/// Outcome of [`check_controlled_moment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ControlReport {
    pub upper_ok: bool,
    pub lower_ok: bool,
    /// min over the grid of `E Re(zα - w)² 1(|α| ≤ κ) · κ / Re(z)²`.
    pub worst_ratio: f64,
    pub worst_point: Option<(Complex64, Complex64)>,
    pub second_moment: f64,
    pub second_moment_stderr: f64,
    /// All moments were computed exactly.
    pub exact: bool,
}

impl ControlReport {
    pub fn passed(&self) -> bool {
        self.upper_ok && self.lower_ok
    }
}

/// Moments of `φ = (X, Y, 1) · 1(|α| ≤ κ)` with `α = X + iY`.
#[derive(Debug, Clone)]
struct IndicatorMoments {
    /// `E φ_i φ_j`.
    s: [[f64; 3]; 3],
    /// `E φ_i φ_j φ_k φ_l`, Monte Carlo only.
    t: Option<Box<[f64; 81]>>,
    samples: usize,
}

impl IndicatorMoments {
    fn from_second(p: f64, mean: [f64; 2], cov: [[f64; 2]; 2]) -> Self {
        let s = [
            [cov[0][0], cov[0][1], mean[0]],
            [cov[1][0], cov[1][1], mean[1]],
            [mean[0], mean[1], p],
        ];
        Self { s, t: None, samples: 0 }
    }

    fn exact(dist: &AtomDistribution, kappa: f64) -> Option<Self> {
        if let Some(atoms) = dist.support() {
            let mut s = [[0.0; 3]; 3];
            for (x, p) in atoms {
                if x.norm() <= kappa {
                    let phi = [x.re, x.im, 1.0];
                    for i in 0..3 {
                        for j in 0..3 {
                            s[i][j] += p * phi[i] * phi[j];
                        }
                    }
                }
            }
            return Some(Self { s, t: None, samples: 0 });
        }
        match dist {
            AtomDistribution::RealGaussian => Some(Self::from_second(
                statrs::function::erf::erf(kappa / std::f64::consts::SQRT_2),
                [0.0, 0.0],
                [[truncated_normal_second(kappa), 0.0], [0.0, 0.0]],
            )),
            AtomDistribution::ComplexGaussian => {
                let e = (-kappa * kappa).exp();
                let half = 0.5 * (1.0 - (1.0 + kappa * kappa) * e);
                Some(Self::from_second(1.0 - e, [0.0, 0.0], [[half, 0.0], [0.0, half]]))
            }
            AtomDistribution::Rotated { base, theta } => {
                let m = Self::exact(base, kappa)?;
                let (sn, cs) = theta.sin_cos();
                let mean = [cs * m.s[0][2] - sn * m.s[1][2], sn * m.s[0][2] + cs * m.s[1][2]];
                let cov = rotate_cov(&[[m.s[0][0], m.s[0][1]], [m.s[1][0], m.s[1][1]]], *theta);
                Some(Self::from_second(m.s[2][2], mean, cov))
            }
            _ => None,
        }
    }

    fn monte_carlo(dist: &AtomDistribution, kappa: f64, opts: &ControlOptions) -> Self {
        let mut rng = SplitMix64::new(opts.seed);
        let mut s = [[0.0; 3]; 3];
        let mut t = Box::new([0.0; 81]);
        for _ in 0..opts.mc_samples {
            let x = dist.sample(&mut rng);
            if x.norm() > kappa {
                continue;
            }
            let phi = [x.re, x.im, 1.0];
            for i in 0..3 {
                for j in 0..3 {
                    let pij = phi[i] * phi[j];
                    s[i][j] += pij;
                    for k in 0..3 {
                        let pijk = pij * phi[k];
                        for l in 0..3 {
                            t[((i * 3 + j) * 3 + k) * 3 + l] += pijk * phi[l];
                        }
                    }
                }
            }
        }
        let m = opts.mc_samples as f64;
        for row in s.iter_mut() {
            for v in row.iter_mut() {
                *v /= m;
            }
        }
        for v in t.iter_mut() {
            *v /= m;
        }
        Self { s, t: Some(t), samples: opts.mc_samples }
    }

    fn compute(dist: &AtomDistribution, kappa: f64, opts: &ControlOptions) -> Self {
        Self::exact(dist, kappa).unwrap_or_else(|| Self::monte_carlo(dist, kappa, opts))
    }

    fn quad(&self, u: &[f64; 3]) -> f64 {
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += u[i] * u[j] * self.s[i][j];
            }
        }
        q
    }

    fn quad_stderr(&self, u: &[f64; 3], q: f64) -> f64 {
        let Some(t) = &self.t else { return 0.0 };
        let mut q4 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        q4 += u[i] * u[j] * u[k] * u[l] * t[((i * 3 + j) * 3 + k) * 3 + l];
                    }
                }
            }
        }
        ((q4 - q * q).max(0.0) / self.samples as f64).sqrt()
    }

    fn probability(&self) -> f64 {
        self.s[2][2]
    }

    /// Covariance of `(Re, Im)` of α conditioned on `|α| ≤ κ`.
    fn conditioned_cov(&self) -> Option<[[f64; 2]; 2]> {
        let p = self.probability();
        if p <= 0.0 {
            return None;
        }
        let mx = self.s[0][2] / p;
        let my = self.s[1][2] / p;
        Some([
            [self.s[0][0] / p - mx * mx, self.s[0][1] / p - mx * my],
            [self.s[1][0] / p - my * mx, self.s[1][1] / p - my * my],
        ])
    }
}

/// `points_per_axis` log-spaced magnitudes mirrored to ± on each axis, scaled
/// so that every grid point has modulus at most `radius`.
pub fn log_grid_axis(points_per_axis: usize, radius: f64) -> Vec<f64> {
    let half = (points_per_axis / 2).max(1);
    let top = radius / std::f64::consts::SQRT_2;
    let mags: Vec<f64> = (0..half)
        .map(|k| {
            let e = if half == 1 { 0.0 } else { -3.0 + 3.0 * k as f64 / (half - 1) as f64 };
            top * 10f64.powf(e)
        })
        .collect();
    let mut axis: Vec<f64> = mags.iter().rev().map(|m| -m).chain(mags.iter().copied()).collect();
    axis.truncate(points_per_axis.max(1));
    axis
}

/// All `(z, w)` with `z` and `w` on the square complex grid built from
/// [`log_grid_axis`]; `z` points with zero real part are never produced.
pub fn controlled_moment_grid(points_per_axis: usize, radius: f64) -> Vec<(Complex64, Complex64)> {
    let axis = log_grid_axis(points_per_axis, radius);
    let pts: Vec<Complex64> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| Complex64::new(x, y)))
        .collect();
    pts.iter().flat_map(|&z| pts.iter().map(move |&w| (z, w))).collect()
}

/// The default 16×16 grid with radius 10.
pub fn default_grid() -> Vec<(Complex64, Complex64)> {
    controlled_moment_grid(16, 10.0)
}

pub fn check_controlled_moment(
    dist: &AtomDistribution,
    kappa: f64,
    grid: &[(Complex64, Complex64)],
) -> Result<ControlReport> {
    check_controlled_moment_with(dist, kappa, grid, &ControlOptions::default())
}

/// Checks `E|α|² ≤ κ` and `E Re(zα - w)² 1(|α| ≤ κ) ≥ Re(z)²/κ` on `grid`.
pub fn check_controlled_moment_with(
    dist: &AtomDistribution,
    kappa: f64,
    grid: &[(Complex64, Complex64)],
    opts: &ControlOptions,
) -> Result<ControlReport> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::Precondition(format!("kappa must be >= 1, got {kappa}")));
    }
    if grid.is_empty() {
        return Err(Error::Precondition("empty (z, w) grid".into()));
    }
    let m = dist.moments();
    let upper_ok = m.second <= kappa * (1.0 + 1e-12) + opts.sigmas * m.stderr;
    let im = IndicatorMoments::compute(dist, kappa, opts);
    let exact = m.stderr == 0.0 && im.t.is_none();
    let mut lower_ok = true;
    let mut worst_ratio = f64::INFINITY;
    let mut worst_point = None;
    for &(z, w) in grid {
        let a = z.re;
        if a == 0.0 {
            continue;
        }
        let u = [a, -z.im, -w.re];
        let lhs = im.quad(&u);
        let bound = a * a / kappa;
        let ratio = lhs * kappa / (a * a);
        if ratio < worst_ratio {
            worst_ratio = ratio;
            worst_point = Some((z, w));
        }
        let slack = opts.sigmas * im.quad_stderr(&u, lhs) + 1e-12 * bound + 1e-300;
        if lhs + slack < bound {
            lower_ok = false;
        }
    }
    Ok(ControlReport {
        upper_ok,
        lower_ok,
        worst_ratio,
        worst_point,
        second_moment: m.second,
        second_moment_stderr: m.stderr,
        exact,
    })
}

/// Phase and κ from [`find_phase_rotation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRotation {
    /// In `(-π/2, π/2]`.
    pub theta: f64,
    /// Smallest power of two that passes the default grid check.
    pub kappa: f64,
}

pub const MAX_KAPPA_EXPONENT: i32 = 40;

/// Finds `θ` and `κ` such that `e^{iθ}α` has κ-controlled second moment.
///
/// For κ = 1, 2, 4, … the covariance of `(Re, Im)` of α conditioned on
/// `|α| ≤ κ` is formed, its leading eigenvector is rotated onto the real axis,
/// and the rotated law is checked on the default grid.
pub fn find_phase_rotation(dist: &AtomDistribution) -> Result<PhaseRotation> {
    find_phase_rotation_with(dist, &default_grid(), &ControlOptions::default())
}

pub fn find_phase_rotation_with(
    dist: &AtomDistribution,
    grid: &[(Complex64, Complex64)],
    opts: &ControlOptions,
) -> Result<PhaseRotation> {
    let var = dist.variance();
    if var < 1e-12 {
        return Err(Error::Degenerate(format!("variance {var:e} is below 1e-12")));
    }
    let mut last_err = String::new();
    for e in 0..=MAX_KAPPA_EXPONENT {
        let kappa = 2f64.powi(e);
        let im = IndicatorMoments::compute(dist, kappa, opts);
        let Some(cov) = im.conditioned_cov() else { continue };
        let theta = leading_direction(&cov);
        let rotated = AtomDistribution::rotated(dist.clone(), -theta);
        let report = check_controlled_moment_with(&rotated, kappa, grid, opts)?;
        if report.passed() {
            return Ok(PhaseRotation { theta: -theta, kappa });
        }
        last_err = format!("kappa={kappa}: worst ratio {:.3e}", report.worst_ratio);
    }
    Err(Error::Degenerate(format!("no kappa up to 2^{MAX_KAPPA_EXPONENT} passed ({last_err})")))
}

/// Angle in `(-π/2, π/2]` of the leading eigenvector of a symmetric 2×2 matrix.
fn leading_direction(c: &[[f64; 2]; 2]) -> f64 {
    let (l1, _) = sym2_eigenvalues(c);
    // (c - l1 I) v = 0; pick the better-conditioned row.
    let r0 = (c[0][1], l1 - c[0][0]);
    let r1 = (l1 - c[1][1], c[1][0]);
    let (vx, vy) = if r0.0.hypot(r0.1) >= r1.0.hypot(r1.1) { r0 } else { r1 };
    if vx == 0.0 && vy == 0.0 {
        return 0.0;
    }
    let mut t = vy.atan2(vx);
    if t <= -std::f64::consts::FRAC_PI_2 {
        t += std::f64::consts::PI;
    } else if t > std::f64::consts::FRAC_PI_2 {
        t -= std::f64::consts::PI;
    }
    t
}

/// Law of `(α 1(|α| < n^δ) - mean) / sd`, the truncated and renormalised entry.
pub fn truncate_normalize(dist: &AtomDistribution, n: usize, delta: f64) -> Result<AtomDistribution> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1/4), got {delta}")));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let cutoff = (n as f64).powf(delta);
    let truncated = AtomDistribution::truncated(dist.clone(), cutoff)?;
    let m = truncated.moments();
    let var = m.variance();
    if var < 1e-12 {
        return Err(Error::Degenerate(format!(
            "truncation at {cutoff:.6} leaves variance {var:e}"
        )));
    }
    AtomDistribution::normalized(truncated, m.mean, var.sqrt())
}
