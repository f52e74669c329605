//! Small statistical helpers shared by the experiments.

use crate::error::{Error, Result};

/// Sample mean and standard error of the mean (0 for a single value).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Standard error of a Bernoulli frequency `hits / trials`.
pub fn binomial_stderr(hits: usize, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = hits as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData(format!("linear fit needs >= 2 paired points, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LinearFit { slope, intercept, r_squared })
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Two-sample Kolmogorov–Smirnov statistic and p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Exact p-value by lattice-path counting when `n·m ≤ 10^6`, the asymptotic
/// Kolmogorov distribution otherwise.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("two-sample test needs non-empty samples".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let p_value = if (n as u64) * (m as u64) <= 1_000_000 {
        ks_exact_p(n, m, d)
    } else {
        let en = ((n * m) as f64 / (n + m) as f64).sqrt();
        kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
    };
    Ok(KsTest { statistic: d, p_value })
}

/// `P(D ≥ d)` under the null, counting monotone paths that stay strictly
/// inside the band `|i/n - j/m| < d`.
fn ks_exact_p(n: usize, m: usize, d: f64) -> f64 {
    let tol = 1e-12;
    let inside = |i: usize, j: usize| ((i as f64 / n as f64) - (j as f64 / m as f64)).abs() < d - tol;
    // Probabilities rather than counts keep the table in range.
    let mut prev = vec![0.0f64; m + 1];
    for i in 0..=n {
        let mut cur = vec![0.0f64; m + 1];
        for j in 0..=m {
            if !inside(i, j) {
                continue;
            }
            if i == 0 && j == 0 {
                cur[0] = 1.0;
                continue;
            }
            // Each path has C(n+m, n) equally likely orderings; weight the
            // step into (i, j) by its conditional probability.
            let mut v = 0.0;
            if i > 0 {
                v += prev[j] * (n - i + 1) as f64 / (n + m - (i + j) + 1) as f64;
            }
            if j > 0 {
                v += cur[j - 1] * (m - j + 1) as f64 / (n + m - (i + j) + 1) as f64;
            }
            cur[j] = v;
        }
        prev = cur;
    }
    (1.0 - prev[m]).clamp(0.0, 1.0)
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * x * x).exp();
        s += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}
