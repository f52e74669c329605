//! Independent reference computations used by the integration tests. None
//! of these call into the library's numerical routines.

#![allow(dead_code)]

use circlaw_core::linalg::CMatrix;
use circlaw_core::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut StdRng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn mat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn to_rows(a: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

/// Characteristic polynomial coefficients `[c_0, …, c_n]` (monic, `c_n = 1`)
/// by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let a = to_rows(a);
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0, 0.0);
    let mut m = vec![vec![c(0.0, 0.0); n]; n];
    for k in 1..=n {
        let mut next = mat_mul(&a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        m = next;
        let am = mat_mul(&a, &m);
        let tr: Complex64 = (0..n).map(|i| am[i][i]).sum();
        coeffs[n - k] = -tr / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Roots of a monic polynomial by Durand–Kerner iteration followed by
/// Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let scale = 1.0 + coeffs[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * scale * 0.5).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = horner(coeffs, roots[i]);
            let den: Complex64 = (0..n).filter(|&j| j != i).map(|j| roots[i] - roots[j]).product();
            if den.norm() == 0.0 {
                roots[i] += c(1e-8, 1e-8);
                continue;
            }
            let step = num / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * scale {
            break;
        }
    }
    let deriv: Vec<Complex64> = (1..=n).map(|k| coeffs[k] * k as f64).collect();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = horner(&deriv, *r);
            if d.norm() > 0.0 {
                *r -= horner(coeffs, *r) / d;
            }
        }
    }
    roots
}

/// Smallest possible `max_k |a_k - b_{π(k)}|` over permutations `π` with
/// minimum total cost (assignment by bitmask dynamic programming).
pub fn matched_max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    assert!(n <= 16);
    let full = 1usize << n;
    let mut cost = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    cost[0] = 0.0;
    for mask in 0..full {
        let i = mask.count_ones() as usize;
        if i >= n || !cost[mask].is_finite() {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let v = cost[mask] + (a[i] - b[j]).norm();
                if v < cost[next] {
                    cost[next] = v;
                    choice[next] = j;
                }
            }
        }
    }
    let mut mask = full - 1;
    let mut worst = 0.0f64;
    while mask != 0 {
        let i = mask.count_ones() as usize - 1;
        let j = choice[mask];
        worst = worst.max((a[i] - b[j]).norm());
        mask &= !(1 << j);
    }
    worst
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    if n == 0 {
        return c(1.0, 0.0);
    }
    if n == 1 {
        return a[0][0];
    }
    let mut total = c(0.0, 0.0);
    for j in 0..n {
        let minor: Vec<Vec<Complex64>> =
            a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, z)| *z).collect()).collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += a[0][j] * cofactor_det(&minor) * sign;
    }
    total
}

/// Integer determinant by cofactor expansion.
pub fn cofactor_det_i64(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, z)| *z).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] * cofactor_det_i64(&minor)
        })
        .sum()
}

/// Fraction of the `2^{n²}` sign matrices that are singular.
pub fn sign_matrix_singular_fraction(n: usize) -> f64 {
    let total = 1u64 << (n * n);
    let singular = (0..total)
        .filter(|bits| {
            let m: Vec<Vec<i64>> =
                (0..n).map(|i| (0..n).map(|j| if bits >> (i * n + j) & 1 == 1 { 1 } else { -1 }).collect()).collect();
            cofactor_det_i64(&m) == 0
        })
        .count();
    singular as f64 / total as f64
}

/// Law of the number of `+1`s among `n` fair signs, by Pascal's rule.
pub fn binomial_dp(n: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; p.len() + 1];
        for (k, &x) in p.iter().enumerate() {
            next[k] += 0.5 * x;
            next[k + 1] += 0.5 * x;
        }
        p = next;
    }
    p
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Uniform disk CDF by 1-D quadrature in the angle variable `x = sin θ`.
pub fn disk_cdf_quadrature(s: f64, t: f64) -> f64 {
    let hi = s.clamp(-1.0, 1.0);
    if hi <= -1.0 {
        return 0.0;
    }
    let theta_hi = hi.asin();
    let slice = |theta: f64| {
        let x = theta.sin();
        let h = (1.0 - x * x).max(0.0).sqrt();
        let top = t.min(h);
        (top + h).max(0.0) * theta.cos()
    };
    simpson(slice, -std::f64::consts::FRAC_PI_2, theta_hi, 200_000) / std::f64::consts::PI
}

/// `J_0` by its power series; accurate for moderate arguments.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Characteristic function of the uniform disk law, as the radial integral
/// `2 ∫_0^1 r J_0(ρ r) dr` with `ρ = |(u, v)|`.
pub fn disk_char_fn_radial(u: f64, v: f64) -> f64 {
    let rho = u.hypot(v);
    simpson(|r| 2.0 * r * bessel_j0(rho * r), 0.0, 1.0, 20_000)
}

/// `‖x‖_{ℝ/ℤ}`.
pub fn frac_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Minimum number of closed balls of radius `r` centred at input points
/// that cover all points, by exhaustive search over subsets.
pub fn min_cover(points: &[Complex64], r: f64) -> usize {
    let n = points.len();
    assert!(n <= 16);
    let covers: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| (points[i] - points[j]).norm() <= r).fold(0u32, |m, j| m | (1 << j)))
        .collect();
    let all = (1u32 << n) - 1;
    for size in 1..=n {
        if subsets_cover(&covers, all, size, 0, 0) {
            return size;
        }
    }
    n
}

fn subsets_cover(covers: &[u32], all: u32, left: usize, start: usize, acc: u32) -> bool {
    if acc == all {
        return true;
    }
    if left == 0 {
        return false;
    }
    (start..covers.len()).any(|i| subsets_cover(covers, all, left - 1, i + 1, acc | covers[i]))
}

/// Quasi-uniform points on the unit disk from a Fibonacci (sunflower)
/// spiral.
pub fn sunflower_disk(count: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let r = ((k as f64 + 0.5) / count as f64).sqrt();
            Complex64::from_polar(r, k as f64 * golden)
        })
        .collect()
}
