//! Constructive side of the inverse Littlewood–Offord theory: rich/poor
//! classification, rounding to a Gaussian-integer lattice and the greedy
//! GAP-growth structure search.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ensembles::{derive_seed, AtomDistribution};
use crate::error::{Error, Result};
use crate::gap::{enumerate, Gap, DEFAULT_ENUM_CAP, FLOAT_DEDUP_TOL};
use crate::smallball::{conc_prob, small_ball_prob, Budget, CoeffTuple, ConcMethod, ProbEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Rich,
    Poor,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rich => "rich",
            Self::Poor => "poor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichPoorVerdict {
    pub verdict: Verdict,
    pub p_est: ProbEstimate,
    /// `n^{-A-1}`.
    pub threshold: f64,
    /// Ball radius `n^{-B+1/2}`.
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

/// A unit vector is poor when `p_{β,α}(v) + 3σ ≤ n^{-A-1}` with
/// `β = n^{-B+1/2}`. A truncated supremum search only gives a lower bound,
/// so it is classified rich.
pub fn classify_rich_poor(
    dist: &AtomDistribution,
    v: &CoeffTuple,
    n: usize,
    a: f64,
    b: f64,
    budget: &Budget,
) -> Result<RichPoorVerdict> {
    if ((v.norm() - 1.0).abs()) > 1e-9 {
        return Err(Error::Precondition(format!("v must be a unit vector, |v| = {}", v.norm())));
    }
    if n < 1 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let nf = n as f64;
    let beta = nf.powf(-b + 0.5);
    let threshold = nf.powf(-a - 1.0);
    let p_est = small_ball_prob(dist, v, beta, budget)?;
    let poor = !p_est.lower_bound_only && p_est.value + 3.0 * p_est.stderr <= threshold;
    Ok(RichPoorVerdict { verdict: if poor { Verdict::Poor } else { Verdict::Rich }, p_est, threshold, beta, a, b })
}

/// Largest `β^{-1}` accepted by the rounding routines.
pub const MAX_INVERSE_BETA: f64 = 1e12;

/// `V = β^{-1} v / 2` rounded to the Gaussian-integer multiples of
/// `n^{-A-20}`.
pub fn round_to_lattice(v: &CoeffTuple, beta: f64, n: usize, a: f64) -> Result<CoeffTuple> {
    round_to_lattice_with_spacing(v, beta, (n as f64).powf(-a - 20.0))
}

/// `V = β^{-1} v / 2` rounded coordinatewise to the lattice
/// `spacing·ℤ[i]`; exact half-way cases go to the even multiple.
pub fn round_to_lattice_with_spacing(v: &CoeffTuple, beta: f64, spacing: f64) -> Result<CoeffTuple> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Precondition(format!("beta must be positive, got {beta}")));
    }
    if 1.0 / beta > MAX_INVERSE_BETA {
        return Err(Error::Precondition(format!("1/beta = {} exceeds {MAX_INVERSE_BETA:e}", 1.0 / beta)));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::Precondition(format!("lattice spacing must be positive, got {spacing}")));
    }
    let round = |x: f64| (x / spacing).round_ties_even() * spacing;
    let coords = v
        .coords()
        .iter()
        .map(|z| {
            let w = z / (2.0 * beta);
            Complex64::new(round(w.re), round(w.im))
        })
        .collect();
    CoeffTuple::from_vec_allow_empty(coords)
}

/// Parameters of [`structure_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub n: usize,
    pub eps: f64,
    /// Number of generators at which the search stops with an error.
    pub d_max: usize,
    /// `None` for the dense search (`μ = 1`, `k = ⌊n^{1/2-ε}⌋`); `Some(ρ)`
    /// for the sparse one (`μ = ρ`, `k = ⌊√(n^ε/ρ)⌋`, dimensions `√ρ·k`).
    pub sparse_mu: Option<f64>,
}

impl SearchParams {
    pub fn dense(n: usize, eps: f64) -> Self {
        Self { n, eps, d_max: 10, sparse_mu: None }
    }

    pub fn mu(&self) -> f64 {
        self.sparse_mu.unwrap_or(1.0)
    }

    pub fn k(&self) -> usize {
        let nf = self.n as f64;
        match self.sparse_mu {
            None => nf.powf(0.5 - self.eps).floor() as usize,
            Some(mu) => (nf.powf(self.eps) / mu).sqrt().floor() as usize,
        }
    }

    /// Dimension given to every generator of the search GAPs.
    pub fn dim(&self) -> f64 {
        self.mu().sqrt() * self.k() as f64
    }
}

/// One accepted generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    /// Index of the chosen coordinate in the input tuple.
    pub index: usize,
    pub generator: Complex64,
    /// Coordinates that passed the growth test at this step.
    pub growing_count: usize,
    pub dispersion_before: f64,
    pub dispersion_after: f64,
    /// `P_μ(V^{[r]} w_1^{k²} … w_r^{k²})`.
    pub p_before: ProbEstimate,
    /// `P_μ(V^{[r+1]} w_1^{k²} … w_{r+1}^{k²})`, the selection score.
    pub p_after: ProbEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub r: usize,
    pub generators: Vec<Complex64>,
    pub k: usize,
    /// `D(GAP((w_1, …, w_r), k))`; 1 for `r = 0`.
    pub dispersion_final: f64,
    /// Coordinates still passing the growth test at exit.
    pub final_growing_count: usize,
    /// `final_growing_count + r·k²`: every coordinate not shown to be weak.
    pub exceptional_count: usize,
    pub terminated_normally: bool,
    pub trace: Vec<SearchStep>,
}

fn search_dispersion(gens: &[Complex64], dim: f64) -> Result<f64> {
    if gens.is_empty() {
        return Ok(1.0);
    }
    Ok(enumerate(&Gap::uniform(gens.to_vec(), dim)?, DEFAULT_ENUM_CAP)?.dispersion())
}

fn dedup_key(z: Complex64) -> (i64, i64) {
    ((z.re / FLOAT_DEDUP_TOL).round() as i64, (z.im / FLOAT_DEDUP_TOL).round() as i64)
}

/// Greedy search for a small set of generators `w_1, …, w_r` drawn from
/// `V` such that adding any other coordinate to `GAP((w_i), k)` raises the
/// dispersion by less than `n^ε`, apart from fewer than `k²` coordinates.
///
/// Each round counts the coordinates whose addition multiplies the
/// dispersion by at least `n^ε`. With fewer than `k²` of them the search
/// stops. Otherwise the first `k²` such coordinates (by index) form a block
/// that is removed from `V`, and the block member `V_j` maximising
/// `P_μ(V^{[r+1]} w_1^{k²} … w_r^{k²} V_j^{k²})` becomes `w_{r+1}`; ties go to
/// the lowest index. Probabilities are exact when the walk is enumerable,
/// otherwise by Fourier quadrature or Monte Carlo with `budget.mc_samples`.
pub fn structure_search(
    dist: &AtomDistribution,
    v: &CoeffTuple,
    params: &SearchParams,
    budget: &Budget,
    seed: u64,
) -> Result<GapReport> {
    if v.is_empty() {
        return Err(Error::Precondition("structure search needs a nonempty tuple".into()));
    }
    if !(params.eps > 0.0 && params.eps < 0.5) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1/2), got {}", params.eps)));
    }
    if let Some(mu) = params.sparse_mu {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::Precondition(format!("mu must lie in (0, 1], got {mu}")));
        }
    }
    let k = params.k();
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    let block = k * k;
    let dim = params.dim();
    let mu = params.mu();
    let growth = (params.n as f64).powf(params.eps);
    let coords = v.coords();

    let mut remaining: Vec<usize> = (0..coords.len()).collect();
    let mut gens: Vec<Complex64> = Vec::new();
    let mut trace = Vec::new();
    let mut d_cur = 1.0;
    let prob = |tuple: Vec<Complex64>, step: u64, cand: u64| -> Result<ProbEstimate> {
        let t = CoeffTuple::from_vec_allow_empty(tuple)?;
        let method = ConcMethod::Auto { trials: budget.mc_samples, seed: derive_seed(&[seed, step, cand]) };
        conc_prob(dist, mu, &t, method)
    };
    let with_gens = |base: &[usize], gens: &[Complex64]| -> Vec<Complex64> {
        let mut t: Vec<Complex64> = base.iter().map(|&i| coords[i]).collect();
        for g in gens {
            t.extend(std::iter::repeat(*g).take(block));
        }
        t
    };

    loop {
        // Equal coordinates share one dispersion computation.
        let mut cache: HashMap<(i64, i64), bool> = HashMap::new();
        let distinct: Vec<Complex64> = remaining
            .iter()
            .map(|&i| coords[i])
            .filter(|z| cache.insert(dedup_key(*z), false).is_none())
            .collect();
        let flags = distinct
            .par_iter()
            .map(|z| {
                let mut g = gens.clone();
                g.push(*z);
                Ok(search_dispersion(&g, dim)? >= growth * d_cur)
            })
            .collect::<Result<Vec<bool>>>()?;
        for (z, f) in distinct.iter().zip(flags) {
            cache.insert(dedup_key(*z), f);
        }
        let growing: Vec<usize> = remaining.iter().copied().filter(|&i| cache[&dedup_key(coords[i])]).collect();
        if growing.len() < block {
            return Ok(GapReport {
                r: gens.len(),
                generators: gens.clone(),
                k,
                dispersion_final: d_cur,
                final_growing_count: growing.len(),
                exceptional_count: growing.len() + gens.len() * block,
                terminated_normally: true,
                trace,
            });
        }
        if gens.len() == params.d_max {
            return Ok(GapReport {
                r: gens.len(),
                generators: gens.clone(),
                k,
                dispersion_final: d_cur,
                final_growing_count: growing.len(),
                exceptional_count: growing.len() + gens.len() * block,
                terminated_normally: false,
                trace,
            });
        }
        let step = gens.len() as u64;
        let chosen_block: Vec<usize> = growing[..block].to_vec();
        let rest: Vec<usize> = remaining.iter().copied().filter(|i| !chosen_block.contains(i)).collect();
        let p_before = prob(with_gens(&remaining, &gens), step, u64::MAX)?;
        let base = with_gens(&rest, &gens);
        let scores = chosen_block
            .par_iter()
            .map(|&j| {
                let mut t = base.clone();
                t.extend(std::iter::repeat(coords[j]).take(block));
                prob(t, step, j as u64)
            })
            .collect::<Result<Vec<ProbEstimate>>>()?;
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if s.value > scores[best].value {
                best = i;
            }
        }
        let j = chosen_block[best];
        gens.push(coords[j]);
        let d_next = search_dispersion(&gens, dim)?;
        trace.push(SearchStep {
            index: j,
            generator: coords[j],
            growing_count: growing.len(),
            dispersion_before: d_cur,
            dispersion_after: d_next,
            p_before,
            p_after: scores[best],
        });
        d_cur = d_next;
        remaining = rest;
    }
}

/// `n^{(-1/2+ε)n} p^{-n} + exp(c·n/log n)`, with `exp(o(n))` modelled by
/// the last term. Report-only; may overflow to infinity.
pub fn net_size_bound(n: usize, eps: f64, p: f64, o_n_constant: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Precondition(format!("p must lie in (0, 1], got {p}")));
    }
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    let nf = n as f64;
    let main = ((-0.5 + eps) * nf * nf.ln() - nf * p.ln()).exp();
    Ok(main + (o_n_constant * nf / nf.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_vector_is_rich() {
        let v = CoeffTuple::from_real(&[0.25; 16]).unwrap();
        let out = classify_rich_poor(&AtomDistribution::Bernoulli, &v, 16, 1.0, 2.0, &Budget::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Rich);
        assert!(out.p_est.is_exact());
        // binom(16, 8) / 2^16
        assert!((out.p_est.value - 12870.0 / 65536.0).abs() < 1e-12);
        assert_eq!(out.threshold, 16f64.powi(-2));
    }

    #[test]
    fn non_unit_vector_rejected() {
        let v = CoeffTuple::from_real(&[1.0, 1.0]).unwrap();
        assert!(classify_rich_poor(&AtomDistribution::Bernoulli, &v, 2, 1.0, 2.0, &Budget::default()).is_err());
    }

    #[test]
    fn rounding_rules() {
        let v = CoeffTuple::new(vec![c(0.6, -0.5)]).unwrap();
        // v/2 = 0.3 - 0.25i on spacing 0.5: 0.3 → 0.5, -0.25 is a tie → 0.
        let r = round_to_lattice_with_spacing(&v, 1.0, 0.5).unwrap();
        assert_eq!(r.coords(), &[c(0.5, 0.0)]);
        let on = CoeffTuple::new(vec![c(1.0, 2.0)]).unwrap();
        assert_eq!(round_to_lattice_with_spacing(&on, 0.5, 0.25).unwrap().coords(), &[c(1.0, 2.0)]);
        assert!(round_to_lattice_with_spacing(&on, 1e-13, 0.25).is_err());
        assert!(round_to_lattice_with_spacing(&on, 0.0, 0.25).is_err());
    }

    #[test]
    fn constant_vector_needs_one_generator() {
        let v = CoeffTuple::new(vec![c(3.0, 1.0); 64]).unwrap();
        let report = structure_search(
            &AtomDistribution::Bernoulli,
            &v,
            &SearchParams::dense(64, 0.2),
            &Budget::default(),
            7,
        )
        .unwrap();
        assert!(report.terminated_normally);
        assert_eq!(report.r, 1);
        assert_eq!(report.generators, vec![c(3.0, 1.0)]);
        assert_eq!(report.k, 3);
        assert_eq!(report.final_growing_count, 0);
    }

    #[test]
    fn empty_tuple_rejected() {
        let err = structure_search(
            &AtomDistribution::Bernoulli,
            &CoeffTuple::empty(),
            &SearchParams::dense(64, 0.2),
            &Budget::default(),
            7,
        );
        assert!(err.is_err());
    }

    #[test]
    fn net_bound_examples() {
        let b = net_size_bound(100, 0.5, 1.0, 1.0).unwrap();
        assert!((b - (1.0 + (100f64 / 100f64.ln()).exp())).abs() < 1e-6 * b);
        let x = net_size_bound(100, 0.1, 0.1, 1.0).unwrap();
        assert!(x.is_finite() && x > 0.0);
        assert!(net_size_bound(100, 0.1, 0.05, 1.0).unwrap() > x);
    }
}
