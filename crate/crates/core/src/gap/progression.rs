use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default limit on the number of integer combinations enumerated.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// Lattice spacing used to identify floating-point points.
pub const FLOAT_DEDUP_TOL: f64 = 1e-9;

/// Largest denominator for which a coordinate is treated as rational.
pub const MAX_EXACT_DENOMINATOR: i128 = 1_000_000;

/// Symmetric generalized arithmetic progression
/// `{Σ n_i v_i : |n_i| ≤ L_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    generators: Vec<Complex64>,
    dims: Vec<f64>,
}

impl Gap {
    pub fn new(generators: Vec<Complex64>, dims: Vec<f64>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Precondition("a GAP needs rank at least 1".into()));
        }
        if generators.len() != dims.len() {
            return Err(Error::Precondition(format!(
                "{} generators but {} dimensions",
                generators.len(),
                dims.len()
            )));
        }
        if let Some(l) = dims.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::Precondition(format!("dimensions must be positive and finite, got {l}")));
        }
        if generators.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(Error::Precondition("generators must be finite".into()));
        }
        Ok(Self { generators, dims })
    }

    /// `GAP((v_1, …, v_r), (L, …, L))`.
    pub fn uniform(generators: Vec<Complex64>, dim: f64) -> Result<Self> {
        let dims = vec![dim; generators.len()];
        Self::new(generators, dims)
    }

    pub fn generators(&self) -> &[Complex64] {
        &self.generators
    }

    pub fn dims(&self) -> &[f64] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `Q + GAP(z, k)`.
    pub fn extend(&self, z: Complex64, k: f64) -> Result<Self> {
        let mut g = self.generators.clone();
        let mut d = self.dims.clone();
        g.push(z);
        d.push(k);
        Self::new(g, d)
    }

    /// `Π (2⌊L_i⌋ + 1)`, saturating.
    pub fn combination_count(&self) -> u128 {
        self.dims
            .iter()
            .fold(1u128, |acc, l| acc.saturating_mul(2 * (l.floor() as u128) + 1))
    }
}

/// `tQ`: same generators, dimensions scaled by `t`.
pub fn dilate(gap: &Gap, t: f64) -> Result<Gap> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Precondition(format!("dilation factor must be positive, got {t}")));
    }
    Gap::new(gap.generators.clone(), gap.dims.iter().map(|l| l * t).collect())
}

/// Integer representation `(A + iB)/D` of every distinct point.
#[derive(Debug, Clone, PartialEq)]
struct ExactPoints {
    denom: i128,
    coords: Vec<(i128, i128)>,
}

/// The materialised point set of a GAP.
#[derive(Debug, Clone, PartialEq)]
pub struct GapPoints {
    pub distinct_points: Vec<Complex64>,
    pub multiplicity_total: u128,
    pub exact_arithmetic: bool,
    exact: Option<ExactPoints>,
}

impl GapPoints {
    pub fn len(&self) -> usize {
        self.distinct_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_points.is_empty()
    }

    /// `#(Q ∩ B̄(0, radius))`, exact in integer arithmetic when available.
    pub fn count_within(&self, radius: f64) -> usize {
        match &self.exact {
            Some(ex) => {
                let rd = radius * ex.denom as f64;
                if rd.fract() == 0.0 && rd.abs() < 9.0e15 {
                    let lim = (rd as i128) * (rd as i128);
                    ex.coords.iter().filter(|(a, b)| a * a + b * b <= lim).count()
                } else {
                    let lim = rd * rd;
                    ex.coords.iter().filter(|(a, b)| (*a as f64).powi(2) + (*b as f64).powi(2) <= lim).count()
                }
            }
            None => {
                let lim = radius + FLOAT_DEDUP_TOL;
                self.distinct_points.iter().filter(|z| z.norm() <= lim).count()
            }
        }
    }

    /// `#Q / #(Q ∩ B̄(0,1))`.
    pub fn dispersion(&self) -> f64 {
        // 0 ∈ Q, so the denominator is at least one.
        self.len() as f64 / self.count_within(1.0).max(1) as f64
    }
}

/// Best rational approximation `p/q` with `q ≤ max_q`, accepted only if it
/// reproduces `x` to within a few ulps.
fn as_rational(x: f64, max_q: i128) -> Option<(i128, i128)> {
    if x == 0.0 {
        return Some((0, 1));
    }
    if x.abs() > 1e15 {
        return None;
    }
    let tol = 8.0 * f64::EPSILON * x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_q {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= tol {
            return Some((p1, q1));
        }
        let frac = y - a;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integer generators `(a_j, b_j)` and the common denominator `D`, when all
/// coordinates are rationals with small denominators.
fn exact_generators(gens: &[Complex64], dims: &[f64]) -> Option<(i128, Vec<(i128, i128)>)> {
    let mut fracs = Vec::with_capacity(2 * gens.len());
    for g in gens {
        fracs.push(as_rational(g.re, MAX_EXACT_DENOMINATOR)?);
        fracs.push(as_rational(g.im, MAX_EXACT_DENOMINATOR)?);
    }
    let mut denom: i128 = 1;
    for &(_, q) in &fracs {
        denom = denom / gcd(denom, q) * q;
        if denom > 1_000_000_000_000 {
            return None;
        }
    }
    let ints: Vec<i128> = fracs.iter().map(|&(p, q)| p * (denom / q)).collect();
    // Keep every partial sum comfortably inside i128 (and squares of sums).
    let reach: f64 = ints
        .chunks(2)
        .zip(dims)
        .map(|(c, l)| (c[0].abs() + c[1].abs()) as f64 * l.floor())
        .sum();
    if reach > 1e30 {
        return None;
    }
    Some((denom, ints.chunks(2).map(|c| (c[0], c[1])).collect()))
}

/// Odometer over `Π [-m_i, m_i]`, calling `visit` with each coefficient vector.
fn for_each_combination(bounds: &[i64], mut visit: impl FnMut(&[i64])) {
    let mut n: Vec<i64> = bounds.iter().map(|m| -m).collect();
    loop {
        visit(&n);
        let mut i = 0;
        loop {
            if i == n.len() {
                return;
            }
            if n[i] < bounds[i] {
                n[i] += 1;
                break;
            }
            n[i] = -bounds[i];
            i += 1;
        }
    }
}

/// All points `Σ n_i v_i` with `|n_i| ≤ ⌊L_i⌋`, deduplicated. Uses exact
/// Gaussian-rational arithmetic when every generator coordinate is a
/// rational with denominator at most 10⁶, and a 1e-9 lattice otherwise.
pub fn enumerate(gap: &Gap, cap: u128) -> Result<GapPoints> {
    let total = gap.combination_count();
    if total > cap {
        return Err(Error::CapExceeded { size: total, cap });
    }
    let bounds: Vec<i64> = gap.dims.iter().map(|l| l.floor() as i64).collect();
    if let Some((denom, ints)) = exact_generators(&gap.generators, &gap.dims) {
        let mut seen = HashSet::with_capacity(total as usize);
        let mut coords = Vec::new();
        for_each_combination(&bounds, |n| {
            let (mut a, mut b) = (0i128, 0i128);
            for (k, &(x, y)) in n.iter().zip(&ints) {
                a += *k as i128 * x;
                b += *k as i128 * y;
            }
            if seen.insert((a, b)) {
                coords.push((a, b));
            }
        });
        let d = denom as f64;
        let distinct_points = coords.iter().map(|&(a, b)| Complex64::new(a as f64 / d, b as f64 / d)).collect();
        return Ok(GapPoints {
            distinct_points,
            multiplicity_total: total,
            exact_arithmetic: true,
            exact: Some(ExactPoints { denom, coords }),
        });
    }
    let mut seen = HashSet::with_capacity(total as usize);
    let mut distinct_points = Vec::new();
    for_each_combination(&bounds, |n| {
        let z: Complex64 = n.iter().zip(&gap.generators).map(|(k, v)| v * *k as f64).sum();
        if seen.insert(lattice_key(z)) {
            distinct_points.push(z);
        }
    });
    Ok(GapPoints { distinct_points, multiplicity_total: total, exact_arithmetic: false, exact: None })
}

pub(crate) fn lattice_key(z: Complex64) -> (i128, i128) {
    ((z.re / FLOAT_DEDUP_TOL).round() as i128, (z.im / FLOAT_DEDUP_TOL).round() as i128)
}

/// Whether all `Π(2⌊L_i⌋+1)` combinations are distinct.
pub fn is_proper(gap: &Gap, cap: u128) -> Result<bool> {
    let pts = enumerate(gap, cap)?;
    Ok(pts.len() as u128 == pts.multiplicity_total)
}

/// `D(Q) = #Q / #(Q ∩ B̄(0,1))`.
pub fn dispersion(gap: &Gap, cap: u128) -> Result<f64> {
    Ok(enumerate(gap, cap)?.dispersion())
}

/// Greedy maximal ε-separated subset, scanning `points` in order: a point
/// joins the net unless some net point lies within distance `eps`.
pub fn epsilon_net(points: &[Complex64], eps: f64) -> Result<Vec<Complex64>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    let cell = |z: Complex64| ((z.re / eps).floor() as i64, (z.im / eps).floor() as i64);
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    let mut net: Vec<Complex64> = Vec::new();
    for &z in points {
        let (cx, cy) = cell(z);
        let covered = (cx - 1..=cx + 1).any(|x| {
            (cy - 1..=cy + 1).any(|y| {
                grid.get(&(x, y)).is_some_and(|ids| ids.iter().any(|&i| (net[i] - z).norm() <= eps))
            })
        });
        if !covered {
            grid.entry((cx, cy)).or_default().push(net.len());
            net.push(z);
        }
    }
    Ok(net)
}

/// Checks `#((Q-Q) ∩ B̄(0,r)) ≥ #(Q ∩ Ω)/M` where Ω is the union of the
/// `M` closed balls of radius `r/2` around `cover_centres`.
pub fn pigeonhole_check(points: &[Complex64], cover_centres: &[Complex64], r: f64) -> Result<bool> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("radius must be positive, got {r}")));
    }
    let mut q: Vec<Complex64> = Vec::new();
    let mut seen = HashSet::new();
    for &z in points {
        if seen.insert(lattice_key(z)) {
            q.push(z);
        }
    }
    let half = r / 2.0 + FLOAT_DEDUP_TOL;
    let in_omega = q.iter().filter(|z| cover_centres.iter().any(|c| (**z - c).norm() <= half)).count();
    if in_omega == 0 {
        return Ok(true);
    }
    let mut diffs = HashSet::new();
    for a in &q {
        for b in &q {
            let d = a - b;
            if d.norm() <= r + FLOAT_DEDUP_TOL {
                diffs.insert(lattice_key(d));
            }
        }
    }
    Ok(diffs.len() as f64 * cover_centres.len() as f64 >= in_omega as f64)
}
