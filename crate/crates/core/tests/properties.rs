//! Invariants checked on randomly generated inputs.

mod common;

use circlaw_core::ensembles::{sample_matrix, AtomDistribution, SparseSpec};
use circlaw_core::gap::{enumerate, Gap, DEFAULT_ENUM_CAP};
use circlaw_core::linalg::{eigenvalues, lu_logdet, singular_values, CMatrix};
use circlaw_core::lsv::{lsv_samples, Shift};
use circlaw_core::pipeline::{format_float, read_rows, write_rows, ExperimentConfig, ExperimentKind, ResultRow};
use circlaw_core::smallball::{alpha_norm, char_fn_f, small_ball_prob, Budget, CoeffTuple};
use circlaw_core::spectral::uniform_disk_cdf;
use circlaw_core::Complex64;
use common::{c, matched_max_distance};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
}

fn square(max_n: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_vec(n, n, v)))
}

fn law() -> impl Strategy<Value = AtomDistribution> {
    prop_oneof![
        Just(AtomDistribution::Bernoulli),
        Just(AtomDistribution::RealGaussian),
        Just(AtomDistribution::ComplexGaussian),
        prop::collection::vec((complex(), 0.1..1.0f64), 2..5).prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|(_, p)| p).sum();
            AtomDistribution::discrete(atoms.iter().map(|(z, _)| *z).collect(), atoms.iter().map(|(_, p)| p / total).collect())
                .unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_a_function_of_the_seed(dist in law(), n in 1usize..12, seed in any::<u64>()) {
        let a = sample_matrix(&dist, n, seed).unwrap();
        let b = sample_matrix(&dist, n, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_multiply_to_determinant(a in square(8)) {
        let eig = eigenvalues(&a).unwrap().eigenvalues;
        let scale = 1.0 + a.frobenius_norm();
        let sum: Complex64 = eig.iter().sum();
        prop_assert!((sum - a.trace()).norm() <= 1e-8 * scale);
        let prod: Complex64 = eig.iter().product();
        let det = lu_logdet(&a).det();
        prop_assert!((prod - det).norm() <= 1e-8 * scale.powi(a.rows() as i32));
    }

    #[test]
    fn eigenvalues_scale_with_the_matrix(a in square(6), k in complex()) {
        prop_assume!(k.norm() > 0.1);
        let base = eigenvalues(&a).unwrap().eigenvalues;
        let scaled = eigenvalues(&a.scale(k)).unwrap().eigenvalues;
        let want: Vec<Complex64> = base.iter().map(|z| z * k).collect();
        let tol = 1e-6 * (1.0 + a.frobenius_norm()) * k.norm();
        prop_assert!(matched_max_distance(&scaled, &want) <= tol);
    }

    #[test]
    fn singular_values_are_sorted_and_unitarily_invariant(a in square(7), phases in prop::collection::vec(0.0..6.3f64, 7)) {
        let s = singular_values(&a, true).unwrap().all_values.unwrap();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.iter().all(|&x| x >= 0.0));
        let n = a.rows();
        // A diagonal phase matrix times a cyclic shift is unitary.
        let u = CMatrix::from_fn(n, n, |i, j| if j == (i + 1) % n { Complex64::from_polar(1.0, phases[i]) } else { c(0.0, 0.0) });
        let t = singular_values(&u.matmul(&a), true).unwrap().all_values.unwrap();
        let tol = 1e-9 * (1.0 + s[0]);
        prop_assert!(s.iter().zip(&t).all(|(x, y)| (x - y).abs() <= tol));
    }

    #[test]
    fn disk_cdf_is_a_monotone_probability(s in -2.5..2.5f64, t in -2.5..2.5f64, ds in 0.0..1.0f64, dt in 0.0..1.0f64) {
        let f = uniform_disk_cdf(s, t);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(uniform_disk_cdf(s + ds, t) >= f - 1e-12);
        prop_assert!(uniform_disk_cdf(s, t + dt) >= f - 1e-12);
    }

    #[test]
    fn small_ball_grows_with_the_radius(v in prop::collection::vec(complex(), 1..8), r in 0.0..2.0f64, dr in 0.0..2.0f64) {
        let v = CoeffTuple::new(v).unwrap();
        let budget = Budget::default();
        let p = small_ball_prob(&AtomDistribution::Bernoulli, &v, r, &budget).unwrap();
        let q = small_ball_prob(&AtomDistribution::Bernoulli, &v, r + dr, &budget).unwrap();
        prop_assert!(q.value >= p.value - 1e-12);
        prop_assert!(p.value >= 0.5f64.powi(v.len() as i32) - 1e-12);
    }

    #[test]
    fn alpha_norm_is_even_and_bounded(dist in law(), w in complex()) {
        let a = alpha_norm(&dist, w);
        prop_assert!((a - alpha_norm(&dist, -w)).abs() <= 1e-12);
        prop_assert!((0.0..=0.5 + 1e-12).contains(&a));
        let f = char_fn_f(&dist, w);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn gap_size_and_dispersion_bounds(
        gens in prop::collection::vec((-4i32..=4, -4i32..=4), 1..=3),
        dims in prop::collection::vec(0.0..4.0f64, 3),
        denom in 1u32..=4,
    ) {
        let g: Vec<Complex64> = gens.iter().map(|&(x, y)| c(x as f64 / denom as f64, y as f64 / denom as f64)).collect();
        let gap = Gap::new(g.clone(), dims[..g.len()].to_vec()).unwrap();
        let pts = enumerate(&gap, DEFAULT_ENUM_CAP).unwrap();
        prop_assert!(pts.len() as u128 <= gap.combination_count());
        prop_assert!(pts.dispersion() >= 1.0);
        prop_assert!(pts.distinct_points.contains(&c(0.0, 0.0)));
    }

    #[test]
    fn lower_tail_hits_shrink_with_b(n in 2usize..12, seed in any::<u64>()) {
        let s = lsv_samples(&AtomDistribution::Bernoulli, n, &Shift::Zero, 30, seed, None).unwrap();
        let hits: Vec<usize> = [0.5, 1.0, 2.0, 3.0].iter().map(|&b| s.lower_tail(b).hits).collect();
        prop_assert!(hits.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>(), stat in "[a-z_]{1,12}", trial in -1i64..100, seed in any::<u64>()) {
        let text = format_float(x);
        let back: f64 = match text.as_str() {
            "NaN" => f64::NAN,
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            s => s.parse().unwrap(),
        };
        prop_assert!(back.to_bits() == x.to_bits() || (x.is_nan() && back.is_nan()));
        let row = ResultRow::new("circlaw", 16, trial, seed, stat, if x.is_nan() { 0.5 } else { x }, 0.25);
        let mut buf = Vec::new();
        write_rows(&mut buf, std::slice::from_ref(&row)).unwrap();
        prop_assert_eq!(read_rows(buf.as_slice()).unwrap(), vec![row]);
    }

    #[test]
    fn config_text_round_trips(
        kind_ix in 0usize..8,
        n_list in prop::collection::btree_set(50usize..400, 1..4),
        trials in 1usize..50,
        seed in any::<u64>(),
        dist in law(),
        alpha in 0.05..1.0f64,
    ) {
        let kind = ExperimentKind::ALL[kind_ix];
        let mut cfg = ExperimentConfig::new(kind);
        if kind != ExperimentKind::Gap {
            cfg.n_list = n_list.into_iter().collect();
        }
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.ensemble = dist;
        if kind == ExperimentKind::Sparse {
            cfg.sparse = Some(SparseSpec::new(alpha).unwrap());
        }
        let text = cfg.to_config_string();
        prop_assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }
}
