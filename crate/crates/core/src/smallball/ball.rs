use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::law::walk_law;
use crate::ensembles::{derive_seed, AtomDistribution, SplitMix64};
use crate::error::{Error, Result};

/// Coefficients `(v_1, …, v_n)` of the walk `W = Σ v_i α_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTuple {
    coords: Vec<Complex64>,
}

impl CoeffTuple {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Precondition("coefficient tuple must be non-empty".into()));
        }
        Self::from_vec_allow_empty(coords)
    }

    /// The empty tuple, whose walk is identically 0.
    pub fn empty() -> Self {
        Self { coords: Vec::new() }
    }

    pub(crate) fn from_vec_allow_empty(coords: Vec<Complex64>) -> Result<Self> {
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Precondition("coefficients must be finite".into()));
        }
        Ok(Self { coords })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::vec_norm(&self.coords)
    }

    /// `self ⌢ other`.
    pub fn concat(&self, other: &CoeffTuple) -> CoeffTuple {
        let mut c = self.coords.clone();
        c.extend_from_slice(&other.coords);
        CoeffTuple { coords: c }
    }

    /// `k` consecutive copies of the tuple.
    pub fn repeat(&self, k: usize) -> CoeffTuple {
        CoeffTuple { coords: self.coords.repeat(k) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateMethod {
    ExactEnumeration,
    MonteCarlo,
    FourierQuadrature,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ExactEnumeration => "exact_enumeration",
            Self::MonteCarlo => "monte_carlo",
            Self::FourierQuadrature => "fourier_quadrature",
        }
    }
}

/// A probability with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEstimate {
    pub value: f64,
    /// 0 for exact results.
    pub stderr: f64,
    pub method: EstimateMethod,
    /// The search for the supremum was truncated, so the value is only a
    /// lower bound.
    pub lower_bound_only: bool,
}

impl ProbEstimate {
    pub(crate) fn exact(value: f64) -> Self {
        Self { value: value.clamp(0.0, 1.0), stderr: 0.0, method: EstimateMethod::ExactEnumeration, lower_bound_only: false }
    }

    pub fn is_exact(&self) -> bool {
        self.method == EstimateMethod::ExactEnumeration && !self.lower_bound_only
    }
}

/// Resource limits for [`small_ball_prob`] and the concentration estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Largest walk support enumerated exactly.
    pub max_support: usize,
    pub mc_samples: usize,
    /// Largest number of candidate centres tried by the Monte Carlo path.
    pub max_candidates: usize,
    /// Largest number of point-in-ball tests on the exact path.
    pub max_work: u64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_support: 1_000_000,
            mc_samples: 100_000,
            max_candidates: 2_000,
            max_work: 2_000_000_000,
            seed: crate::ensembles::INTERNAL_MC_SEED,
        }
    }
}

/// `count` i.i.d. draws of `Σ v_i α_i`. Draw `k` uses its own keyed stream.
pub fn walk_sample(dist: &AtomDistribution, v: &CoeffTuple, seed: u64, count: usize) -> Result<Vec<Complex64>> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    Ok((0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = SplitMix64::new(derive_seed(&[seed, k as u64]));
            v.coords.iter().map(|&vi| vi * dist.sample(&mut rng)).sum()
        })
        .collect())
}

/// Uniform grid hash for closed-ball counting.
struct BallIndex<'a> {
    cell: f64,
    points: &'a [(Complex64, f64)],
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> BallIndex<'a> {
    fn new(points: &'a [(Complex64, f64)], cell: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, (z, _)) in points.iter().enumerate() {
            cells.entry(Self::key(*z, cell)).or_default().push(i);
        }
        Self { cell, points, cells }
    }

    fn key(z: Complex64, cell: f64) -> (i64, i64) {
        ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
    }

    /// Visits indices of points that may lie within `radius ≤ cell` of `c`.
    fn near(&self, c: Complex64, mut f: impl FnMut(usize)) {
        let (kx, ky) = Self::key(c, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.cells.get(&(kx + dx, ky + dy)) {
                    v.iter().for_each(|&i| f(i));
                }
            }
        }
    }

    fn mass_within(&self, c: Complex64, r: f64) -> f64 {
        let lim = r * (1.0 + 1e-9) + 1e-12 * self.cell;
        let mut m = 0.0;
        self.near(c, |i| {
            if (self.points[i].0 - c).norm() <= lim {
                m += self.points[i].1;
            }
        });
        m
    }
}

/// Centres of the (at most two) circles of radius `r` through `a` and `b`.
fn circle_centres(a: Complex64, b: Complex64, r: f64) -> Option<[Complex64; 2]> {
    let d = b - a;
    let dn = d.norm();
    if dn == 0.0 || dn > 2.0 * r {
        return None;
    }
    let mid = (a + b) * 0.5;
    let h = (r * r - 0.25 * dn * dn).max(0.0).sqrt();
    let perp = Complex64::new(-d.im, d.re) / dn;
    Some([mid + perp * h, mid - perp * h])
}

/// `sup_z μ(B̄(z, r))` for a finitely supported law. Candidate centres are
/// the atoms and the centres of radius-`r` circles through pairs of atoms,
/// which realise the supremum. Returns `(value, truncated)`.
pub(crate) fn sup_ball_mass(atoms: &[(Complex64, f64)], r: f64, max_work: u64) -> (f64, bool) {
    let best_atom = atoms.iter().fold(0.0f64, |m, a| m.max(a.1));
    if r == 0.0 || atoms.len() < 2 {
        return (best_atom, false);
    }
    let cell = 2.0 * r;
    let index = BallIndex::new(atoms, cell);
    // Mass within 2r of each atom bounds any ball that touches it.
    let reach: Vec<(f64, usize)> = atoms
        .par_iter()
        .map(|(z, _)| {
            let mut m = 0.0;
            let mut k = 0usize;
            index.near(*z, |i| {
                if (atoms[i].0 - z).norm() <= 2.0 * r * (1.0 + 1e-9) {
                    m += atoms[i].1;
                    k += 1;
                }
            });
            (m, k)
        })
        .collect();
    let work: u64 = reach.iter().map(|&(_, k)| (k as u64) * (k as u64)).sum();
    let mut best = atoms.iter().map(|(z, _)| index.mass_within(*z, r)).fold(best_atom, f64::max);
    if work > max_work {
        return (best, true);
    }
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| reach[b].0.partial_cmp(&reach[a].0).unwrap());
    for &i in &order {
        if reach[i].0 <= best {
            break;
        }
        let a = atoms[i].0;
        let mut local = best;
        index.near(a, |j| {
            if j == i {
                return;
            }
            if let Some(cs) = circle_centres(a, atoms[j].0, r) {
                for c in cs {
                    local = local.max(index.mass_within(c, r));
                }
            }
        });
        best = best.max(local);
    }
    (best.min(1.0), false)
}

/// `p_{r,α}(v) = sup_z P(W ∈ B̄(z, r))`.
///
/// Exact when α is finitely supported and the walk has at most
/// `budget.max_support` atoms. Otherwise Monte Carlo: half of the draws
/// propose centres (together with an `r`-spaced lattice over their bounding
/// box), the other half count hits, so the estimate for each candidate is
/// unbiased.
pub fn small_ball_prob(dist: &AtomDistribution, v: &CoeffTuple, r: f64, budget: &Budget) -> Result<ProbEstimate> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("radius must be finite and >= 0, got {r}")));
    }
    if let Some(atoms) = dist.support() {
        if let Some(law) = walk_law(&atoms, &v.coords, budget.max_support) {
            let (value, truncated) = sup_ball_mass(&law, r, budget.max_work);
            let mut e = ProbEstimate::exact(value);
            e.lower_bound_only = truncated;
            return Ok(e);
        }
    }
    small_ball_prob_mc(dist, v, r, budget)
}

pub fn small_ball_prob_mc(dist: &AtomDistribution, v: &CoeffTuple, r: f64, budget: &Budget) -> Result<ProbEstimate> {
    let m = budget.mc_samples.max(2);
    let draws = walk_sample(dist, v, budget.seed, m)?;
    let (propose, count) = draws.split_at(m / 2);
    let mut candidates: Vec<Complex64> = propose.to_vec();
    let mut truncated = false;
    if r > 0.0 {
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in propose {
            lo_x = lo_x.min(z.re);
            hi_x = hi_x.max(z.re);
            lo_y = lo_y.min(z.im);
            hi_y = hi_y.max(z.im);
        }
        let nx = ((hi_x - lo_x) / r).floor() as u64 + 1;
        let ny = ((hi_y - lo_y) / r).floor() as u64 + 1;
        if nx.saturating_mul(ny) <= budget.max_candidates as u64 {
            for ix in 0..nx {
                for iy in 0..ny {
                    candidates.push(Complex64::new(lo_x + ix as f64 * r, lo_y + iy as f64 * r));
                }
            }
        } else {
            truncated = true;
        }
    }
    if candidates.len() > budget.max_candidates {
        let step = candidates.len() as f64 / budget.max_candidates as f64;
        candidates = (0..budget.max_candidates).map(|k| candidates[(k as f64 * step) as usize]).collect();
        truncated = true;
    }
    let weighted: Vec<(Complex64, f64)> = count.iter().map(|&z| (z, 1.0)).collect();
    let hits = if r > 0.0 {
        let index = BallIndex::new(&weighted, r);
        candidates.par_iter().map(|&c| index.mass_within(c, r)).reduce(|| 0.0, f64::max)
    } else {
        let mut exact: HashMap<(u64, u64), f64> = HashMap::new();
        for z in count {
            *exact.entry((z.re.to_bits(), z.im.to_bits())).or_default() += 1.0;
        }
        candidates
            .iter()
            .map(|c| exact.get(&(c.re.to_bits(), c.im.to_bits())).copied().unwrap_or(0.0))
            .fold(0.0, f64::max)
    };
    let mc = count.len() as f64;
    let p = hits / mc;
    Ok(ProbEstimate {
        value: p,
        stderr: (p * (1.0 - p) / mc).sqrt().max(1.0 / mc),
        method: EstimateMethod::MonteCarlo,
        lower_bound_only: truncated,
    })
}
