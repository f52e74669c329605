use num_complex::Complex64;
use rayon::prelude::*;

use super::disk::uniform_disk_cdf;
use crate::ensembles::MatrixSample;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix};

/// Empirical spectral distribution: equal mass on each point.
#[derive(Debug, Clone, PartialEq)]
pub struct Esd {
    points: Vec<Complex64>,
}

impl Esd {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("empirical distribution needs at least one point".into()));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Precondition("non-finite point".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    /// Fraction of points with `Re ≤ s` and `Im ≤ t`.
    pub fn cdf(&self, s: f64, t: f64) -> f64 {
        let c = self.points.iter().filter(|z| z.re <= s && z.im <= t).count();
        c as f64 / self.points.len() as f64
    }

    /// `(1/n) Σ exp(i(u Re λ + v Im λ))`.
    pub fn char_fn(&self, u: f64, v: f64) -> Complex64 {
        let s: Complex64 = self.points.iter().map(|z| Complex64::from_polar(1.0, u * z.re + v * z.im)).sum();
        s / self.points.len() as f64
    }

    /// `(1/n) Σ |λ|²`.
    pub fn second_moment(&self) -> f64 {
        self.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }
}

pub fn cdf(esd: &Esd, s: f64, t: f64) -> f64 {
    esd.cdf(s, t)
}

pub fn char_fn_empirical(esd: &Esd, u: f64, v: f64) -> Complex64 {
    esd.char_fn(u, v)
}

/// `1/(σ√n)`, or `1/(σ√(nρ))` in the sparse case.
pub fn esd_scale(n: usize, sigma: f64, sparse_rho: Option<f64>) -> f64 {
    1.0 / (sigma * (n as f64 * sparse_rho.unwrap_or(1.0)).sqrt())
}

/// Eigenvalues of the matrix multiplied by `scale`.
pub fn esd_of_cmatrix(a: &CMatrix, scale: f64) -> Result<Esd> {
    let spec = eigenvalues(a)?;
    Esd::new(spec.eigenvalues.into_iter().map(|z| z * scale).collect())
}

/// ESD of `N / (σ√n)`, or of `N / (σ√(nρ))` when `sparse_rho` is given.
pub fn esd_of_matrix(sample: &MatrixSample, sigma: f64, sparse_rho: Option<f64>) -> Result<Esd> {
    if !(sigma > 0.0) {
        return Err(Error::Precondition(format!("sigma must be positive, got {sigma}")));
    }
    if let Some(rho) = sparse_rho {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Precondition(format!("rho must lie in (0, 1], got {rho}")));
        }
    }
    esd_of_cmatrix(&sample.entries, esd_scale(sample.n, sigma, sparse_rho))
}

/// Evaluation grid for [`sup_distance`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    s_values: Vec<f64>,
    t_values: Vec<f64>,
}

impl GridSpec {
    pub fn new(s_values: Vec<f64>, t_values: Vec<f64>) -> Result<Self> {
        for (name, v) in [("s", &s_values), ("t", &t_values)] {
            if v.is_empty() {
                return Err(Error::Precondition(format!("{name} grid is empty")));
            }
            if v.windows(2).any(|w| !(w[0] < w[1])) || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Precondition(format!("{name} grid must be finite and strictly increasing")));
            }
        }
        Ok(Self { s_values, t_values })
    }

    /// `[lo, hi]` on both axes with `points` equally spaced values.
    pub fn square(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < 2 || !(hi > lo) {
            return Err(Error::Precondition("square grid needs lo < hi and >= 2 points".into()));
        }
        let v: Vec<f64> = (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect();
        Self::new(v.clone(), v)
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }
}

impl Default for GridSpec {
    /// `[-2, 2]²` with spacing 0.01.
    fn default() -> Self {
        Self::square(-2.0, 2.0, 401).expect("valid default grid")
    }
}

/// Largest number of empirical jump coordinates added per axis.
pub const MAX_JUMP_COORDS: usize = 2000;

fn augment(base: &[f64], jumps: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut j: Vec<f64> = jumps.collect();
    j.sort_by(|a, b| a.partial_cmp(b).unwrap());
    j.dedup();
    if j.len() > MAX_JUMP_COORDS {
        let step = j.len() as f64 / MAX_JUMP_COORDS as f64;
        j = (0..MAX_JUMP_COORDS).map(|k| j[((k as f64 + 0.5) * step) as usize]).collect();
    }
    let mut all: Vec<f64> = base.iter().copied().chain(j).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();
    all
}

/// `max |μ_n(s,t) - μ_∞(s,t)|` over the grid augmented with the real and
/// imaginary parts of the ESD points (at most [`MAX_JUMP_COORDS`] per axis,
/// evenly thinned beyond that).
pub fn sup_distance(esd: &Esd, grid: &GridSpec) -> Result<f64> {
    let ss = augment(&grid.s_values, esd.points.iter().map(|z| z.re));
    let ts = augment(&grid.t_values, esd.points.iter().map(|z| z.im));
    let (ns, nt) = (ss.len(), ts.len());
    // counts[i][j]: points whose smallest dominating grid indices are (i, j).
    let mut counts = vec![0u32; ns * nt];
    for z in &esd.points {
        let i = ss.partition_point(|&s| s < z.re);
        let j = ts.partition_point(|&t| t < z.im);
        if i < ns && j < nt {
            counts[i * nt + j] += 1;
        }
    }
    for i in 0..ns {
        for j in 1..nt {
            counts[i * nt + j] += counts[i * nt + j - 1];
        }
    }
    for i in 1..ns {
        for j in 0..nt {
            counts[i * nt + j] += counts[(i - 1) * nt + j];
        }
    }
    let w = esd.weight();
    let sup = (0..ns)
        .into_par_iter()
        .map(|i| {
            let row = &counts[i * nt..(i + 1) * nt];
            ts.iter()
                .zip(row)
                .map(|(&t, &c)| (c as f64 * w - uniform_disk_cdf(ss[i], t)).abs())
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cdf_examples() {
        let e = Esd::new(vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(e.cdf(0.0, 0.0), 1.0);
        let e = Esd::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(e.cdf(0.0, f64::INFINITY), 0.5);
        assert_eq!(e.cdf(f64::INFINITY, f64::INFINITY), 1.0);
        assert!((e.char_fn(std::f64::consts::PI, 0.0) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn point_mass_distance() {
        let e = Esd::new(vec![c(0.0, 0.0)]).unwrap();
        let d = sup_distance(&e, &GridSpec::default()).unwrap();
        assert!(d >= 0.75);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(vec![], vec![0.0]).is_err());
        assert!(GridSpec::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert_eq!(GridSpec::default().s_values().len(), 401);
    }

    #[test]
    fn empty_esd_rejected() {
        assert!(Esd::new(vec![]).is_err());
    }
}
