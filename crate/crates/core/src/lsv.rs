//! Least-singular-value experiments: tails of `σ_n(M + N)`, condition
//! numbers, exact singularity probabilities and row-to-hyperplane
//! distances.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ensembles::{derive_seed, sample_matrix, sample_sparse_matrix, AtomDistribution, SparseSpec, SplitMix64};
use crate::error::{Error, Result};
use crate::linalg::{least_singular_value, spectral_norm, CMatrix, Lu};
use crate::smallball::{EstimateMethod, ProbEstimate};
use crate::stats::binomial_stderr;

/// Deterministic shift `M` added to the random matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Shift {
    Zero,
    /// `z·I`.
    Scalar(Complex64),
    Custom(CMatrix),
}

impl Shift {
    pub fn label(&self) -> String {
        match self {
            Self::Zero => "zero".into(),
            Self::Scalar(z) => format!("scalar({}{:+}i)", z.re, z.im),
            Self::Custom(m) => format!("custom{}x{}", m.rows(), m.cols()),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Scalar(z) if z.re.is_finite() && z.im.is_finite() => Ok(()),
            Self::Scalar(_) => Err(Error::Precondition("shift must be finite".into())),
            Self::Custom(m) if m.rows() != n || m.cols() != n => {
                Err(Error::Precondition(format!("shift is {}x{}, expected {n}x{n}", m.rows(), m.cols())))
            }
            Self::Custom(m) if !m.is_finite() => Err(Error::Precondition("shift must be finite".into())),
            Self::Custom(_) => Ok(()),
        }
    }

    fn apply(&self, a: CMatrix) -> CMatrix {
        match self {
            Self::Zero => a,
            Self::Scalar(z) => a.shifted(*z),
            Self::Custom(m) => a.add(m),
        }
    }
}

/// `M + N` with `N` drawn from `seed`, dense or sparse.
pub fn shifted_sample(
    dist: &AtomDistribution,
    n: usize,
    shift: &Shift,
    sparse: Option<&SparseSpec>,
    seed: u64,
) -> Result<CMatrix> {
    shift.check(n)?;
    let sample = match sparse {
        Some(s) => sample_sparse_matrix(dist, n, s, seed)?,
        None => sample_matrix(dist, n, seed)?,
    };
    Ok(shift.apply(sample.entries))
}

/// Per-trial statistics shared by the tail experiments. Failed trials are
/// counted, never dropped silently.
#[derive(Debug, Clone, PartialEq)]
pub struct LsvSamples {
    pub n: usize,
    pub ensemble: String,
    pub shift: String,
    /// One value per successful trial, in trial order.
    pub values: Vec<f64>,
    pub errors: usize,
}

impl LsvSamples {
    pub fn trials(&self) -> usize {
        self.values.len() + self.errors
    }
}

fn collect_samples(
    dist: &AtomDistribution,
    n: usize,
    shift: &Shift,
    trials: usize,
    seed: u64,
    sparse: Option<&SparseSpec>,
    stat: impl Fn(&CMatrix) -> Result<f64> + Sync,
) -> Result<LsvSamples> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    shift.check(n)?;
    let outcomes: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            shifted_sample(dist, n, shift, sparse, derive_seed(&[seed, t as u64]))
                .and_then(|a| stat(&a))
                .ok()
                .filter(|v| !v.is_nan())
        })
        .collect();
    let errors = outcomes.iter().filter(|o| o.is_none()).count();
    Ok(LsvSamples {
        n,
        ensemble: dist.label(),
        shift: shift.label(),
        values: outcomes.into_iter().flatten().collect(),
        errors,
    })
}

/// `σ_n(M + N)` for each trial.
pub fn lsv_samples(
    dist: &AtomDistribution,
    n: usize,
    shift: &Shift,
    trials: usize,
    seed: u64,
    sparse: Option<&SparseSpec>,
) -> Result<LsvSamples> {
    collect_samples(dist, n, shift, trials, seed, sparse, least_singular_value)
}

/// `‖M + N‖ · ‖(M + N)^{-1}‖` for each trial; `+∞` when singular.
pub fn condition_samples(
    dist: &AtomDistribution,
    n: usize,
    shift: &Shift,
    trials: usize,
    seed: u64,
    sparse: Option<&SparseSpec>,
) -> Result<LsvSamples> {
    collect_samples(dist, n, shift, trials, seed, sparse, condition_number)
}

/// `‖A‖ ‖A^{-1}‖`, `+∞` for singular `A`.
pub fn condition_number(a: &CMatrix) -> Result<f64> {
    let smin = least_singular_value(a)?;
    let smax = spectral_norm(a, 1e-12);
    Ok(if smin == 0.0 { f64::INFINITY } else { (smax / smin).max(1.0) })
}

/// Empirical frequency of a tail event.
#[derive(Debug, Clone, PartialEq)]
pub struct LsvTailResult {
    pub n: usize,
    pub ensemble: String,
    pub shift: String,
    pub b: f64,
    /// Successful trials.
    pub trials: usize,
    pub hits: usize,
    pub rate: f64,
    pub stderr: f64,
    /// Trials whose linear algebra failed.
    pub errors: usize,
}

impl LsvSamples {
    /// Frequency of `σ_n ≤ n^{-B}` (singular matrices count as hits).
    pub fn lower_tail(&self, b: f64) -> LsvTailResult {
        let t = (self.n as f64).powf(-b);
        self.tail(b, |v| v <= t)
    }

    /// Frequency of `κ ≥ n^B`.
    pub fn upper_tail(&self, b: f64) -> LsvTailResult {
        let t = (self.n as f64).powf(b);
        self.tail(b, |v| v >= t)
    }

    fn tail(&self, b: f64, hit: impl Fn(f64) -> bool) -> LsvTailResult {
        let trials = self.values.len();
        let hits = self.values.iter().filter(|&&v| hit(v)).count();
        LsvTailResult {
            n: self.n,
            ensemble: self.ensemble.clone(),
            shift: self.shift.clone(),
            b,
            trials,
            hits,
            rate: if trials > 0 { hits as f64 / trials as f64 } else { f64::NAN },
            stderr: if trials > 0 { binomial_stderr(hits, trials) } else { f64::NAN },
            errors: self.errors,
        }
    }
}

/// Frequency of `σ_n(M + N) ≤ n^{-B}`, equivalently `‖(M+N)^{-1}‖ ≥ n^B`.
pub fn lsv_tail(
    dist: &AtomDistribution,
    n: usize,
    shift: &Shift,
    b: f64,
    trials: usize,
    seed: u64,
    sparse: Option<&SparseSpec>,
) -> Result<LsvTailResult> {
    Ok(lsv_samples(dist, n, shift, trials, seed, sparse)?.lower_tail(b))
}

/// Frequency of `‖M + N‖ ‖(M + N)^{-1}‖ ≥ n^B`.
pub fn condition_number_experiment(
    dist: &AtomDistribution,
    n: usize,
    shift: &Shift,
    b: f64,
    trials: usize,
    seed: u64,
    sparse: Option<&SparseSpec>,
) -> Result<LsvTailResult> {
    Ok(condition_samples(dist, n, shift, trials, seed, sparse)?.upper_tail(b))
}

/// Largest `|supp|^{n²}` enumerated exactly by [`singularity_prob`].
pub const MAX_SINGULARITY_ENUMERATION: u128 = 100_000_000;

type Gi = (i128, i128);

fn gi_mul(a: Gi, b: Gi) -> Gi {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn gi_sub(a: Gi, b: Gi) -> Gi {
    (a.0 - b.0, a.1 - b.1)
}

/// Exact quotient in `ℤ[i]`; the caller guarantees divisibility.
fn gi_div(a: Gi, b: Gi) -> Gi {
    let nb = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / nb, (a.1 * b.0 - a.0 * b.1) / nb)
}

/// Whether a Gaussian-integer matrix is singular, by fraction-free
/// (Bareiss) elimination.
fn bareiss_singular(mut m: Vec<Vec<Gi>>) -> bool {
    let n = m.len();
    let mut prev: Gi = (1, 0);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| m[i][k] != (0, 0)) else { return true };
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..n {
                let num = gi_sub(gi_mul(m[i][j], m[k][k]), gi_mul(m[i][k], m[k][j]));
                m[i][j] = gi_div(num, prev);
            }
            m[i][k] = (0, 0);
        }
        prev = m[k][k];
    }
    false
}

/// Exact integer entries when every entry is a Gaussian integer and the
/// Hadamard bound keeps Bareiss intermediates inside `i128`.
fn as_gaussian_integers(a: &CMatrix) -> Option<Vec<Vec<Gi>>> {
    let n = a.rows();
    let mut log_bound = 0.0;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let row = a.row(i);
        let mut out = Vec::with_capacity(n);
        for z in row {
            if z.re.fract() != 0.0 || z.im.fract() != 0.0 || z.re.abs() > 1e6 || z.im.abs() > 1e6 {
                return None;
            }
            out.push((z.re as i128, z.im as i128));
        }
        log_bound += row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0).ln();
        rows.push(out);
    }
    // Products of two minors must fit: |minor| ≤ Hadamard bound.
    (2.0 * log_bound < 80.0).then_some(rows)
}

/// Singularity test: exact for Gaussian-integer matrices of modest size,
/// LU pivot test otherwise.
pub fn is_singular(a: &CMatrix) -> bool {
    match as_gaussian_integers(a) {
        Some(m) => bareiss_singular(m),
        None => Lu::factor(a).is_singular(),
    }
}

/// `P(N singular)`: exact enumeration over all `|supp|^{n²}` entry
/// assignments when that is at most 10⁸, Monte Carlo over `trials`
/// matrices otherwise.
pub fn singularity_prob(dist: &AtomDistribution, n: usize, trials: usize, seed: u64) -> Result<ProbEstimate> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if let Some(atoms) = dist.support() {
        let s = atoms.len() as u128;
        let total = (0..n * n).try_fold(1u128, |acc, _| acc.checked_mul(s).filter(|&x| x <= MAX_SINGULARITY_ENUMERATION));
        if let Some(total) = total {
            return Ok(ProbEstimate {
                value: singularity_enumerate(&atoms, n, total as u64),
                stderr: 0.0,
                method: EstimateMethod::ExactEnumeration,
                lower_bound_only: false,
            });
        }
    }
    singularity_mc(dist, n, trials, seed)
}

/// Monte Carlo `P(N singular)` regardless of the law.
pub fn singularity_mc(dist: &AtomDistribution, n: usize, trials: usize, seed: u64) -> Result<ProbEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| sample_matrix(dist, n, derive_seed(&[seed, t as u64])).map(|s| is_singular(&s.entries)))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&h| h)
        .count();
    Ok(ProbEstimate {
        value: hits as f64 / trials as f64,
        stderr: binomial_stderr(hits, trials),
        method: EstimateMethod::MonteCarlo,
        lower_bound_only: false,
    })
}

fn singularity_enumerate(atoms: &[(Complex64, f64)], n: usize, total: u64) -> f64 {
    const CHUNK: u64 = 1 << 14;
    let s = atoms.len() as u64;
    let chunks = total.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = 0.0;
            for code in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut x = code;
                let mut p = 1.0;
                let a = CMatrix::from_fn(n, n, |_, _| {
                    let (v, q) = atoms[(x % s) as usize];
                    x /= s;
                    p *= q;
                    v
                });
                if is_singular(&a) {
                    acc += p;
                }
            }
            acc
        })
        .collect();
    // Fixed-order summation keeps the result independent of scheduling.
    partial.iter().sum::<f64>().clamp(0.0, 1.0)
}

/// Distance from `x` to the span of `rows`, by twice-iterated modified
/// Gram–Schmidt; dependent rows are skipped so degenerate spans are handled.
pub fn distance_to_span(rows: &[Vec<Complex64>], x: &[Complex64]) -> f64 {
    let scale = rows.iter().map(|r| norm(r)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            basis.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    let mut y = x.to_vec();
    for _ in 0..2 {
        for q in &basis {
            let c = dot(q, &y);
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi -= c * qi;
            }
        }
    }
    norm(&y)
}

/// `Σ conj(a_i) b_i`.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn random_row(dist: &AtomDistribution, n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// Distance of the last row of a fresh `n × n` matrix to the span of the
/// other rows, one value per trial.
pub fn row_distance_experiment(dist: &AtomDistribution, n: usize, trials: usize, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let rows: Vec<Vec<Complex64>> =
                (0..n).map(|i| random_row(dist, n, derive_seed(&[seed, t as u64, i as u64]))).collect();
            distance_to_span(&rows[..n - 1], &rows[n - 1])
        })
        .collect())
}

/// As [`row_distance_experiment`] with the first `n - 1` rows drawn once
/// (from `seed`) and only the last row redrawn per trial.
pub fn row_distance_fixed_rows(dist: &AtomDistribution, n: usize, trials: usize, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let fixed: Vec<Vec<Complex64>> =
        (0..n - 1).map(|i| random_row(dist, n, derive_seed(&[seed, u64::MAX, i as u64]))).collect();
    Ok((0..trials)
        .into_par_iter()
        .map(|t| distance_to_span(&fixed, &random_row(dist, n, derive_seed(&[seed, t as u64, (n - 1) as u64]))))
        .collect())
}

/// `|⟨X, u⟩|` for a random row `X` and the hyperplane with unit normal `u`.
pub fn row_distance_to_hyperplane(
    dist: &AtomDistribution,
    normal: &[Complex64],
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let nu = norm(normal);
    if normal.is_empty() || !(nu > 0.0) {
        return Err(Error::Precondition("the normal vector must be nonzero".into()));
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let u: Vec<Complex64> = normal.iter().map(|z| z / nu).collect();
    Ok((0..trials)
        .into_par_iter()
        .map(|t| dot(&u, &random_row(dist, u.len(), derive_seed(&[seed, t as u64]))).norm())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_with_identity_never_hits() {
        let zero = AtomDistribution::point_mass(Complex64::new(0.0, 0.0));
        let r = lsv_tail(&zero, 6, &Shift::Scalar(Complex64::new(1.0, 0.0)), 0.5, 10, 1, None).unwrap();
        assert_eq!((r.hits, r.trials, r.errors), (0, 10, 0));
        let k = condition_number_experiment(&zero, 6, &Shift::Custom(CMatrix::identity(6)), 0.1, 5, 1, None).unwrap();
        assert_eq!(k.hits, 0);
        let s = condition_samples(&zero, 6, &Shift::Custom(CMatrix::identity(6)), 3, 1, None).unwrap();
        assert!(s.values.iter().all(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn singular_matrices_are_hits() {
        let zero = AtomDistribution::point_mass(Complex64::new(0.0, 0.0));
        let r = lsv_tail(&zero, 4, &Shift::Zero, 10.0, 3, 1, None).unwrap();
        assert_eq!(r.hits, 3);
    }

    #[test]
    fn shift_shape_checked() {
        let s = Shift::Custom(CMatrix::identity(3));
        assert!(lsv_tail(&AtomDistribution::Bernoulli, 4, &s, 1.0, 3, 1, None).is_err());
    }

    #[test]
    fn small_singularity_probabilities() {
        let b = AtomDistribution::Bernoulli;
        assert_eq!(singularity_prob(&b, 1, 1, 0).unwrap().value, 0.0);
        let two = singularity_prob(&b, 2, 1, 0).unwrap();
        assert!(two.is_exact());
        assert_eq!(two.value, 0.5);
    }

    #[test]
    fn bareiss_matches_known_determinants() {
        let m = |rows: &[[i128; 3]]| rows.iter().map(|r| r.iter().map(|&x| (x, 0)).collect()).collect();
        assert!(bareiss_singular(m(&[[1, 2, 3], [4, 5, 6], [7, 8, 9]])));
        assert!(!bareiss_singular(m(&[[2, 0, 1], [1, 3, 2], [1, 1, 2]])));
        assert!(bareiss_singular(m(&[[2, 0, 1], [1, 3, 2], [1, 1, 1]])));
        assert!(bareiss_singular(m(&[[0, 0, 1], [0, 0, 2], [1, 1, 1]])));
        // [[i, 1], [1, -i]] has determinant i·(-i) - 1 = 0.
        assert!(bareiss_singular(vec![vec![(0, 1), (1, 0)], vec![(1, 0), (0, -1)]]));
    }

    #[test]
    fn distance_handles_degenerate_span() {
        let e = |k: usize| {
            let mut v = vec![Complex64::new(0.0, 0.0); 3];
            v[k] = Complex64::new(1.0, 0.0);
            v
        };
        let rows = vec![e(0), e(0), e(1)];
        let x = vec![Complex64::new(5.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 3.0)];
        assert!((distance_to_span(&rows, &x) - 3.0).abs() < 1e-12);
        assert!((distance_to_span(&[], &x) - norm(&x)).abs() < 1e-12);
    }

    #[test]
    fn half_of_bernoulli_rows_lie_on_the_diagonal_hyperplane() {
        let mut normal = vec![Complex64::new(0.0, 0.0); 6];
        normal[0] = Complex64::new(1.0, 0.0);
        normal[1] = Complex64::new(1.0, 0.0);
        let d = row_distance_to_hyperplane(&AtomDistribution::Bernoulli, &normal, 20_000, 5).unwrap();
        let zeros = d.iter().filter(|&&x| x == 0.0).count() as f64 / d.len() as f64;
        assert!((zeros - 0.5).abs() < 5.0 * (0.25f64 / 20_000.0).sqrt());
    }
}
