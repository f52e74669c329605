use crate::ensembles::{derive_seed, sample_matrix, truncate_normalize, AtomDistribution};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;

/// Monte Carlo mean of `tr((Ñ Ñ^*)^k)` and its standard error, where `Ñ` has
/// i.i.d. truncated and renormalised entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceMoment {
    pub estimate: f64,
    pub stderr: f64,
}

pub fn trace_moment_estimate(
    dist: &AtomDistribution,
    n: usize,
    k: u32,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<TraceMoment> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let law = truncate_normalize(dist, n, delta)?;
    let mut values = Vec::with_capacity(trials);
    for trial in 0..trials {
        let m = sample_matrix(&law, n, derive_seed(&[seed, trial as u64]))?;
        let eig = hermitian_eigenvalues(&m.entries.adjoint().gram())?;
        values.push(eig.iter().map(|x| x.max(0.0).powi(k as i32)).sum::<f64>());
    }
    let (estimate, stderr) = crate::stats::mean_stderr(&values);
    Ok(TraceMoment { estimate, stderr })
}
