use num_complex::Complex64;

use super::CMatrix;

/// Result of [`lu_logdet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    /// `log |det A|`; `-inf` when a pivot is exactly zero.
    pub log_abs_det: f64,
    /// `det A / |det A|` (1 when the determinant vanishes).
    pub phase: Complex64,
    /// Some pivot fell below `n · ε · max|a_ij|`.
    pub is_singular: bool,
}

impl LogDet {
    pub fn det(&self) -> Complex64 {
        self.phase * self.log_abs_det.exp()
    }
}

/// Partially pivoted LU factorisation `P A = L U`, stored in place.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl Lu {
    /// Panics on a non-square input.
    pub fn factor(a: &CMatrix) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let threshold = n as f64 * f64::EPSILON * a.max_abs();
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            if pmax <= threshold {
                singular = true;
            }
            let pivot = lu[(k, k)];
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Self { lu, perm, swaps, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn logdet(&self) -> LogDet {
        let n = self.lu.rows();
        let mut log_abs = 0.0;
        let mut phase = if self.swaps % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        for i in 0..n {
            let u = self.lu[(i, i)];
            let m = u.norm();
            if m == 0.0 {
                return LogDet {
                    log_abs_det: f64::NEG_INFINITY,
                    phase: Complex64::new(1.0, 0.0),
                    is_singular: true,
                };
            }
            log_abs += m.ln();
            phase *= u / m;
        }
        LogDet { log_abs_det: log_abs, phase, is_singular: self.singular }
    }

    /// Solves `A x = b`. Meaningless when a pivot is exactly zero.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        // U^* y = b (forward), L^* w = y (backward), x = P^T w.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * y[j];
            }
            y[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// `log|det A|`, its phase and a singularity flag from partial-pivot LU.
pub fn lu_logdet(a: &CMatrix) -> LogDet {
    Lu::factor(a).logdet()
}
