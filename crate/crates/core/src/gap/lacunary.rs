use num_complex::Complex64;

use super::progression::{dilate, enumerate, Gap};
use crate::error::{Error, Result};

/// Default `C_r` in `d₀ = C_r (1 + log(#Q / #(Q ∩ B(0,R))) / log K)`.
pub const DEFAULT_LACUNARY_CONSTANT: f64 = 8.0;

/// Output of [`lacunary_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct LacunaryBasis {
    /// `w_1, …, w_d`, each of maximal modulus in its stage.
    pub primary: Vec<Complex64>,
    /// `w'_1, …, w'_d`.
    pub secondary: Vec<Complex64>,
    /// `K_i = 1 + K |Im(w'_i / w_i)|`.
    pub ratios: Vec<f64>,
    pub d: usize,
    pub k: f64,
    pub r: f64,
    pub c_r: f64,
    pub d0: f64,
    /// The loop ran past stage `d₀`; later stages were clamped to `Q` itself.
    pub exceeded_d0: bool,
    /// `#Q`.
    pub count_q: usize,
    /// `#(Q ∩ B̄(0,R))`.
    pub count_ball: usize,
}

impl LacunaryBasis {
    /// `#Q / (Π K·K_i · #(Q ∩ B(0,R)))`: the constant the "many vectors"
    /// bound has to absorb on this instance.
    pub fn many_vectors_ratio(&self) -> f64 {
        let prod: f64 = self.ratios.iter().map(|ki| self.k * ki).product();
        self.count_q as f64 / (prod * self.count_ball as f64)
    }

    /// `d / (1 + log(#Q/#(Q ∩ B(0,R))) / log K)`: the constant the crude
    /// bound on `d` needs on this instance.
    pub fn d_bound_constant(&self) -> f64 {
        self.d as f64 / self.log_scale()
    }

    fn log_scale(&self) -> f64 {
        1.0 + (self.count_q as f64 / self.count_ball as f64).ln() / self.k.ln()
    }
}

/// Greedy lacunary basis with `C_r = 8`.
pub fn lacunary_basis(gap: &Gap, k: f64, r: f64, cap: u128) -> Result<LacunaryBasis> {
    lacunary_basis_with(gap, k, r, cap, DEFAULT_LACUNARY_CONSTANT)
}

/// Greedy lacunary basis: with `w_0 = ∞`, stage `i` looks at
/// `Q_i = 2^{-d₀+i} Q ∩ B̄(0, |w_{i-1}|/K)`, stops with `d = i-1` once
/// `Q_i ⊂ B̄(0,R)`, and otherwise takes `w_i` of maximal modulus and `w'_i`
/// maximising `K_i`. Ties go to the first point in enumeration order.
pub fn lacunary_basis_with(gap: &Gap, k: f64, r: f64, cap: u128, c_r: f64) -> Result<LacunaryBasis> {
    if !(k >= 2.0) || !k.is_finite() {
        return Err(Error::Precondition(format!("K must be at least 2, got {k}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("R must be non-negative, got {r}")));
    }
    if !(c_r > 0.0) || !c_r.is_finite() {
        return Err(Error::Precondition(format!("C_r must be positive, got {c_r}")));
    }
    let full = enumerate(gap, cap)?;
    let count_q = full.len();
    let count_ball = full.count_within(r);
    let mut out = LacunaryBasis {
        primary: Vec::new(),
        secondary: Vec::new(),
        ratios: Vec::new(),
        d: 0,
        k,
        r,
        c_r,
        d0: 0.0,
        exceeded_d0: false,
        count_q,
        count_ball,
    };
    if count_ball == count_q {
        return Ok(out);
    }
    let d0 = c_r * (1.0 + (count_q as f64 / count_ball as f64).ln() / k.ln());
    out.d0 = d0;
    let mut bound = f64::INFINITY;
    for i in 1.. {
        let exponent = i as f64 - d0;
        let stage = if exponent < 0.0 {
            enumerate(&dilate(gap, exponent.exp2())?, cap)?
        } else {
            full.clone()
        };
        let qi: Vec<Complex64> = stage
            .distinct_points
            .into_iter()
            .filter(|z| k * z.norm() <= bound)
            .collect();
        let Some(w) = qi.iter().copied().filter(|z| z.norm() > r).reduce(|a, b| if b.norm() > a.norm() { b } else { a })
        else {
            out.d = i - 1;
            return Ok(out);
        };
        let ki = |z: &Complex64| 1.0 + k * (z / w).im.abs();
        let w2 = qi.iter().copied().reduce(|a, b| if ki(&b) > ki(&a) { b } else { a }).unwrap_or(w);
        out.exceeded_d0 |= exponent >= 0.0;
        out.primary.push(w);
        out.secondary.push(w2);
        out.ratios.push(ki(&w2).min(1.0 + k));
        bound = w.norm();
    }
    unreachable!()
}
