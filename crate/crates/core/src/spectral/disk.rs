use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quadrature::gauss_legendre;

/// `∫_{-1}^x sqrt(1 - u²) du` up to a constant.
fn antiderivative(x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    0.5 * (x * (1.0 - x * x).max(0.0).sqrt() + x.asin())
}

/// Mass of the uniform law on the closed unit disk in `{Re ≤ s, Im ≤ t}`.
pub fn uniform_disk_cdf(s: f64, t: f64) -> f64 {
    if s.is_nan() || t.is_nan() || s <= -1.0 || t <= -1.0 {
        return 0.0;
    }
    let s = s.min(1.0);
    let t = t.min(1.0);
    let a = (1.0 - t * t).max(0.0).sqrt();
    // Column at abscissa x has height min(t, r) + r with r = sqrt(1 - x²),
    // clipped at zero; it is `t + r` for |x| < a and `2r` or `0` outside.
    let full = |lo: f64, hi: f64| 2.0 * (antiderivative(hi) - antiderivative(lo));
    let cut = |lo: f64, hi: f64| t * (hi - lo) + antiderivative(hi) - antiderivative(lo);
    let mut area = 0.0;
    let mut add = |lo: f64, hi: f64, f: &dyn Fn(f64, f64) -> f64| {
        let hi = hi.min(s);
        if hi > lo {
            area += f(lo, hi);
        }
    };
    if t >= 0.0 {
        add(-1.0, -a, &full);
        add(-a, a, &cut);
        add(a, 1.0, &full);
    } else {
        add(-a, a, &cut);
    }
    (area / PI).clamp(0.0, 1.0)
}

/// Radial and angular node counts of the disk quadrature.
pub const DISK_QUADRATURE_NODES: usize = 512;

/// `∫ e^{i(ux + vy)} dμ_∞` by a polar product rule: Gauss–Legendre in the
/// radius and the trapezoid rule in the angle.
pub fn char_fn_disk(u: f64, v: f64) -> Complex64 {
    let rule = gauss_legendre(DISK_QUADRATURE_NODES);
    let m = DISK_QUADRATURE_NODES;
    let dphi = 2.0 * PI / m as f64;
    let dirs: Vec<f64> = (0..m)
        .map(|k| {
            let phi = k as f64 * dphi;
            u * phi.cos() + v * phi.sin()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, w) in rule.mapped(0.0, 1.0) {
        let mut ring = Complex64::new(0.0, 0.0);
        for d in &dirs {
            ring += Complex64::from_polar(1.0, r * d);
        }
        acc += ring * (w * r * dphi);
    }
    acc / PI
}
