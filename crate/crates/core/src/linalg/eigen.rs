use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues of a square complex matrix with convergence diagnostics.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    /// Largest discarded subdiagonal relative to `‖A‖_F`; a backward-error estimate.
    pub max_residual: f64,
    /// Total QR iterations.
    pub iterations: usize,
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues with the default tolerance and an iteration budget of `50 n`.
pub fn eigenvalues(a: &CMatrix) -> Result<SpectrumResult> {
    eigenvalues_with(a, DEFAULT_TOL, 50 * a.rows().max(1))
}

/// Balancing by permutation, Hessenberg reduction, then shifted complex QR.
///
/// `max_iter` bounds the total number of QR sweeps. Each deflation discards a
/// subdiagonal no larger than `tol · ‖A‖_F / (100 n)` (or at machine precision
/// relative to its neighbours), so the accumulated backward error stays below
/// `tol · ‖A‖_F`.
pub fn eigenvalues_with(a: &CMatrix, tol: f64, max_iter: usize) -> Result<SpectrumResult> {
    if !a.is_square() {
        return Err(Error::Precondition(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SpectrumResult { eigenvalues: vec![], max_residual: 0.0, iterations: 0 });
    }
    let norm = a.frobenius_norm();
    let (isolated, mut block) = isolate(a);
    let m = block.rows();
    hessenberg(&mut block);
    let tol_abs = tol * norm / (100.0 * n as f64);
    let (mut eig, iterations, max_def) = hessenberg_qr(&mut block, tol_abs, max_iter, n - m)?;
    eig.extend(isolated);
    let max_residual = if norm > 0.0 { (max_def / norm).max(f64::EPSILON) } else { 0.0 };
    Ok(SpectrumResult { eigenvalues: eig, max_residual, iterations })
}

/// Permutes rows/columns that decouple from the rest (a zero off-diagonal row
/// or column), reading their eigenvalue off the diagonal. Returns the isolated
/// eigenvalues and the remaining active block.
fn isolate(a: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut lo = 0;
    let mut hi = n;
    let swap = |h: &mut CMatrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        for k in 0..n {
            let t = h[(i, k)];
            h[(i, k)] = h[(j, k)];
            h[(j, k)] = t;
        }
        for k in 0..n {
            let t = h[(k, i)];
            h[(k, i)] = h[(k, j)];
            h[(k, j)] = t;
        }
    };
    let mut isolated = Vec::new();
    'rows: loop {
        if hi <= lo {
            break;
        }
        for j in (lo..hi).rev() {
            if (lo..hi).all(|k| k == j || h[(j, k)] == ZERO) {
                swap(&mut h, j, hi - 1);
                isolated.push(h[(hi - 1, hi - 1)]);
                hi -= 1;
                continue 'rows;
            }
        }
        break;
    }
    'cols: loop {
        if hi <= lo {
            break;
        }
        for j in lo..hi {
            if (lo..hi).all(|k| k == j || h[(k, j)] == ZERO) {
                swap(&mut h, j, lo);
                isolated.push(h[(lo, lo)]);
                lo += 1;
                continue 'cols;
            }
        }
        break;
    }
    let m = hi - lo;
    let block = CMatrix::from_fn(m, m, |i, j| h[(lo + i, lo + j)]);
    (isolated, block)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(h: &mut CMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut v: Vec<Complex64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let tail: f64 = v[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (tail + v[0].norm_sqr()).sqrt();
        let phase = if v[0] == ZERO { Complex64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = super::vec_norm(&v);
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Left: rows k+1.., columns k..
        for z in w[k..].iter_mut() {
            *z = ZERO;
        }
        for (i, vi) in v.iter().enumerate() {
            let cv = vi.conj();
            let row = &h.row(k + 1 + i)[k..];
            for (wj, hij) in w[k..].iter_mut().zip(row) {
                *wj += cv * hij;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let f = 2.0 * vi;
            let r = k + 1 + i;
            for j in k..n {
                let wj = w[j];
                h[(r, j)] -= f * wj;
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let s = &h.row(i)[k + 1..];
            let dot: Complex64 = s.iter().zip(&v).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot;
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= f * vj.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Rotation `G = [[c, s], [-s̄, c]]` with `G (x, y)^T = (r, 0)^T`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    if x == ZERO {
        return (0.0, Complex64::new(1.0, 0.0), y);
    }
    let nx = x.norm();
    let nu = nx.hypot(y.norm());
    let ph = x / nx;
    (nx / nu, ph * y.conj() / nu, ph * nu)
}

fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let m = (a + d) * 0.5;
    let h = (a - d) * 0.5;
    let disc = (h * h + b * c).sqrt();
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(
    h: &mut CMatrix,
    tol_abs: f64,
    max_iter: usize,
    already: usize,
) -> Result<(Vec<Complex64>, usize, f64)> {
    let n = h.rows();
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok((eig, 0, 0.0));
    }
    let total_n = n + already;
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut max_def: f64 = 0.0;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let sub = h[(l, l - 1)].norm();
            if sub <= f64::EPSILON * s || sub <= tol_abs {
                max_def = max_def.max(sub);
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= max_iter {
            return Err(Error::NoConvergence {
                iterations: total,
                deflated: already + (n - 1 - hi),
                n: total_n,
            });
        }
        total += 1;
        its += 1;
        let shift = if its % 10 == 0 {
            let extra = h[(hi, hi - 1)].re.abs()
                + if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(extra, 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s, r) = givens(x, y);
            if k > l {
                h[(k, k - 1)] = r;
                h[(k + 1, k - 1)] = ZERO;
            }
            let sc = s.conj();
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = b * c - sc * a;
            }
            for i in l..=(k + 2).min(hi) {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * sc;
                h[(i, k + 1)] = b * c - a * s;
            }
        }
    }
    Ok((eig, total, max_def))
}
