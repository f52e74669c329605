use std::collections::HashMap;

use num_complex::Complex64;

/// Finitely supported law on ℂ as `(point, mass)` pairs.
pub type Atoms = Vec<(Complex64, f64)>;

/// Merges points that agree to a relative `1e-11` lattice. Sums of the same
/// values taken in different orders can differ in the last bits; snapping
/// keeps the support from inflating.
pub(crate) fn snap_merge(atoms: Atoms) -> Atoms {
    let scale = atoms.iter().fold(1.0f64, |m, (x, _)| m.max(x.re.abs()).max(x.im.abs()));
    let tau = 1e-11 * scale;
    let mut index: HashMap<(i64, i64), usize> = HashMap::with_capacity(atoms.len());
    let mut out: Atoms = Vec::with_capacity(atoms.len());
    for (x, p) in atoms {
        if p <= 0.0 {
            continue;
        }
        let key = ((x.re / tau).round() as i64, (x.im / tau).round() as i64);
        match index.get(&key) {
            Some(&i) => out[i].1 += p,
            None => {
                index.insert(key, out.len());
                out.push((x, p));
            }
        }
    }
    out
}

/// Law of `α₁ - α₂` for i.i.d. copies.
pub(crate) fn difference_law(atoms: &[(Complex64, f64)]) -> Atoms {
    let mut d = Vec::with_capacity(atoms.len() * atoms.len());
    for (a, p) in atoms {
        for (b, q) in atoms {
            d.push((a - b, p * q));
        }
    }
    snap_merge(d)
}

/// Law of `(α₁ - α₂)·1_{μ/2}`.
pub(crate) fn lazy_symmetrized_law(atoms: &[(Complex64, f64)], mu: f64) -> Atoms {
    let mut d: Atoms = difference_law(atoms).into_iter().map(|(x, p)| (x, p * mu / 2.0)).collect();
    d.push((Complex64::new(0.0, 0.0), 1.0 - mu / 2.0));
    snap_merge(d)
}

/// Law of `Σ v_i α_i` with i.i.d. `α_i ~ atoms`, or `None` once the support
/// exceeds `cap`.
pub(crate) fn walk_law(atoms: &[(Complex64, f64)], v: &[Complex64], cap: usize) -> Option<Atoms> {
    let mut cur: Atoms = vec![(Complex64::new(0.0, 0.0), 1.0)];
    for &vi in v {
        if vi == Complex64::new(0.0, 0.0) {
            continue;
        }
        if cur.len().saturating_mul(atoms.len()) > cap.saturating_mul(8) {
            return None;
        }
        let mut next = Vec::with_capacity(cur.len() * atoms.len());
        for (w, p) in &cur {
            for (a, q) in atoms {
                next.push((w + vi * a, p * q));
            }
        }
        cur = snap_merge(next);
        if cur.len() > cap {
            return None;
        }
    }
    Some(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bernoulli_lazy_law() {
        let b = vec![(r(1.0), 0.5), (r(-1.0), 0.5)];
        let mut l = lazy_symmetrized_law(&b, 0.6);
        l.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(l.len(), 3);
        assert!((l[0].1 - 0.6 / 8.0).abs() < 1e-15);
        assert!((l[1].1 - (1.0 - 0.6 / 4.0)).abs() < 1e-15);
        assert!((l[2].1 - 0.6 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn walk_of_ones_is_binomial() {
        let b = vec![(r(1.0), 0.5), (r(-1.0), 0.5)];
        let law = walk_law(&b, &vec![r(1.0); 4], 1000).unwrap();
        let at0 = law.iter().find(|(x, _)| x.norm() < 1e-12).unwrap().1;
        assert!((at0 - 6.0 / 16.0).abs() < 1e-15);
        assert_eq!(law.len(), 5);
        assert!(walk_law(&b, &[r(1.0), r(2f64.sqrt()), r(3f64.sqrt())], 4).is_none());
    }

    #[test]
    fn near_duplicates_merge() {
        let m = snap_merge(vec![(r(0.1 + 0.2), 0.5), (r(0.3), 0.5)]);
        assert_eq!(m.len(), 1);
    }
}
