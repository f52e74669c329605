use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues of a Hermitian matrix (only the lower triangle is trusted),
/// returned in ascending order.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Precondition("Hermitian eigenvalues need a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    let (mut d, mut e) = tridiagonalize(a);
    tql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Householder reduction to a real symmetric tridiagonal `(diag, subdiag)`.
fn tridiagonalize(a: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut h = a.clone();
    // Symmetrise from the lower triangle.
    for i in 0..n {
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in 0..i {
            h[(j, i)] = h[(i, j)].conj();
        }
    }
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
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
        // Trailing block B = h[k+1.., k+1..]; B <- B - 2 v w^* - 2 w v^*, w = Bv - (v^*Bv) v.
        for i in 0..len {
            let row = &h.row(k + 1 + i)[k + 1..];
            p[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let kk: Complex64 = v.iter().zip(&p[..len]).map(|(a, b)| a.conj() * b).sum();
        let w: Vec<Complex64> = (0..len).map(|i| p[i] - kk.re * v[i]).collect();
        for i in 0..len {
            for j in 0..len {
                h[(k + 1 + i, k + 1 + j)] -= 2.0 * (v[i] * w[j].conj() + w[i] * v[j].conj());
            }
        }
        h[(k + 1, k)] = alpha;
        h[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            h[(i, k)] = ZERO;
            h[(k, i)] = ZERO;
        }
    }
    let d = (0..n).map(|i| h[(i, i)].re).collect();
    // A diagonal unitary similarity makes the subdiagonal real and non-negative.
    let e = (0..n).map(|i| if i + 1 < n { h[(i + 1, i)].norm() } else { 0.0 }).collect();
    (d, e)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `e[i]` couples `d[i]` and `d[i+1]`.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { iterations: iter, deflated: l, n });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
