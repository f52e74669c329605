use rayon::prelude::*;

use super::atom::AtomDistribution;
use super::seed::{stream, SplitMix64};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Sparsity `ρ(n) = n^{-1+α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseSpec {
    alpha: f64,
}

impl SparseSpec {
    /// `alpha` must lie in `(0, 1]`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Precondition(format!("sparsity alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(Self { alpha })
    }

    /// The excluded endpoint `α = 0`, i.e. `ρ = 1/n`.
    pub fn alpha_zero_limit() -> Self {
        Self { alpha: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self, n: usize) -> f64 {
        (n as f64).powf(self.alpha - 1.0).clamp(0.0, 1.0)
    }
}

/// Ensemble metadata carried with a sampled matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub ensemble: String,
    pub sparse_alpha: Option<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSample {
    pub n: usize,
    pub entries: CMatrix,
    pub seed: u64,
    pub descriptor: Descriptor,
}

/// `n × n` matrix of i.i.d. draws. Entry `(i, j)` is generated from its own
/// counter-keyed stream, so the result does not depend on thread scheduling.
pub fn sample_matrix(dist: &AtomDistribution, n: usize, seed: u64) -> Result<MatrixSample> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let entries = fill(n, |i, j| {
        let mut rng = SplitMix64::for_entry(seed, stream::VALUE, i, j);
        dist.sample(&mut rng)
    });
    Ok(MatrixSample {
        n,
        entries,
        seed,
        descriptor: Descriptor { ensemble: dist.label(), sparse_alpha: None, rho: 1.0 },
    })
}

/// Entries `I_ij a_ij` with an independent Bernoulli(ρ(n)) mask. Values use
/// the same streams as [`sample_matrix`], so `α = 1` reproduces it exactly.
pub fn sample_sparse_matrix(
    dist: &AtomDistribution,
    n: usize,
    sparse: &SparseSpec,
    seed: u64,
) -> Result<MatrixSample> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let rho = sparse.rho(n);
    let entries = fill(n, |i, j| {
        let keep = SplitMix64::for_entry(seed, stream::MASK, i, j).next_f64() < rho;
        if keep {
            let mut rng = SplitMix64::for_entry(seed, stream::VALUE, i, j);
            dist.sample(&mut rng)
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    });
    Ok(MatrixSample {
        n,
        entries,
        seed,
        descriptor: Descriptor { ensemble: dist.label(), sparse_alpha: Some(sparse.alpha), rho },
    })
}

fn fill(n: usize, f: impl Fn(usize, usize) -> num_complex::Complex64 + Sync) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m.as_mut_slice().par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, x) in row.iter_mut().enumerate() {
            *x = f(i, j);
        }
    });
    m
}
