//! Library results checked against independently computed references.

mod common;

use std::f64::consts::PI;

use circlaw_core::ensembles::{
    check_controlled_moment, controlled_moment_grid, find_phase_rotation, sample_matrix, sample_sparse_matrix,
    AtomDistribution, SparseSpec,
};
use circlaw_core::gap::{
    dilate, enumerate, epsilon_net, forward_lo_experiment, in_level_set, is_proper, level_set_measure,
    pigeonhole_check, weak_element_survey, Gap, DEFAULT_ENUM_CAP,
};
use circlaw_core::inverse_lo::{classify_rich_poor, round_to_lattice, Verdict};
use circlaw_core::linalg::{eigenvalues, least_singular_value, lu_logdet, singular_values, spectral_norm, CMatrix};
use circlaw_core::lsv::{
    condition_samples, lsv_tail, row_distance_experiment, row_distance_fixed_rows, row_distance_to_hyperplane,
    singularity_prob, Shift,
};
use circlaw_core::smallball::{
    alpha_norm, char_fn_f, conc_prob, conc_prob_exact, lazy_law, small_ball_prob, walk_sample, Budget, CoeffTuple,
    ConcMethod, DifferenceKernel,
};
use circlaw_core::spectral::{
    char_fn_disk, eps_n, esd_of_matrix, g_n_fd, log_integral_split, nu_esd, sup_distance, trace_moment_estimate,
    uniform_disk_cdf, Esd, GridSpec,
};
use circlaw_core::stats::{ks_one_sample, mean_stderr};
use circlaw_core::Complex64;
use common::*;
use rand::Rng;

// ---------------------------------------------------------------- ensembles

#[test]
fn bernoulli_entries_average_to_zero() {
    let m = sample_matrix(&AtomDistribution::Bernoulli, 1000, 42).unwrap();
    let mean: Complex64 = m.entries.as_slice().iter().sum::<Complex64>() / 1e6;
    assert!(mean.norm() < 0.01, "{mean}");
    assert!(m.entries.as_slice().iter().all(|z| z.im == 0.0 && z.re.abs() == 1.0));
}

#[test]
fn sparse_nonzero_count_is_binomial() {
    let spec = SparseSpec::new(0.5).unwrap();
    let m = sample_sparse_matrix(&AtomDistribution::Bernoulli, 100, &spec, 7).unwrap();
    let nnz = m.entries.as_slice().iter().filter(|z| z.norm() > 0.0).count() as f64;
    let sd = (10_000.0f64 * 0.1 * 0.9).sqrt();
    assert!((nnz - 1000.0).abs() <= 5.0 * sd, "{nnz}");
}

#[test]
fn alpha_zero_limit_zero_rows_near_inverse_e() {
    let m = sample_sparse_matrix(&AtomDistribution::Bernoulli, 1000, &SparseSpec::alpha_zero_limit(), 3).unwrap();
    let zero_rows = (0..1000).filter(|&i| m.entries.row(i).iter().all(|z| z.norm() == 0.0)).count() as f64 / 1000.0;
    assert!((0.32..=0.42).contains(&zero_rows), "{zero_rows}");
}

#[test]
fn complex_gaussian_control_matches_closed_form() {
    let kappa: f64 = 4.0;
    let grid = controlled_moment_grid(6, 10.0);
    let rep = check_controlled_moment(&AtomDistribution::ComplexGaussian, kappa, &grid).unwrap();
    assert!(rep.exact);
    assert!(rep.passed());
    let k2 = kappa * kappa;
    let m2 = 1.0 - (1.0 + k2) * (-k2).exp();
    let p = 1.0 - (-k2).exp();
    let worst = grid
        .iter()
        .map(|(z, w)| {
            let lhs = z.norm_sqr() / 2.0 * m2 + w.re * w.re * p;
            lhs * kappa / (z.re * z.re)
        })
        .fold(f64::INFINITY, f64::min);
    assert!((rep.worst_ratio - worst).abs() <= 1e-9 * worst, "{} vs {worst}", rep.worst_ratio);
}

#[test]
fn phase_rotation_aligns_a_tilted_two_point_law() {
    let law = AtomDistribution::discrete(vec![c(1.0, 1.0), c(-1.0, -1.0)], vec![0.5, 0.5]).unwrap();
    let rot = find_phase_rotation(&law).unwrap();
    let turned = c(1.0, 1.0) * Complex64::from_polar(1.0, rot.theta);
    assert!(turned.im.abs() < 1e-9, "{turned}");
    assert!(rot.kappa >= 1.0);
}

// ------------------------------------------------------------------ linalg

fn sign_matrix(rng: &mut rand::rngs::StdRng, n: usize) -> Vec<Vec<Complex64>> {
    (0..n).map(|_| (0..n).map(|_| c(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect()).collect()
}

#[test]
fn lu_determinant_matches_cofactor_expansion() {
    let mut r = rng(1);
    for _ in 0..50 {
        let rows = sign_matrix(&mut r, 5);
        let want = cofactor_det(&rows);
        let ld = lu_logdet(&CMatrix::from_rows(&rows));
        if want.norm() == 0.0 {
            assert!(ld.is_singular || ld.det().norm() < 1e-10);
        } else {
            assert!((ld.det() - want).norm() <= 1e-12 * want.norm(), "{} vs {want}", ld.det());
        }
    }
    for _ in 0..20 {
        let a = gaussian_matrix(&mut r, 6);
        let rows: Vec<Vec<Complex64>> = (0..6).map(|i| a.row(i).to_vec()).collect();
        let want = cofactor_det(&rows);
        assert!((lu_logdet(&a).det() - want).norm() <= 1e-10 * want.norm());
    }
}

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    let mut r = rng(2);
    for _ in 0..50 {
        let a = gaussian_matrix(&mut r, 4);
        let got = eigenvalues(&a).unwrap().eigenvalues;
        let want = poly_roots(&char_poly(&a));
        assert!(matched_max_distance(&got, &want) < 1e-8);
    }
}

#[test]
fn singular_values_satisfy_frobenius_identity() {
    let mut r = rng(3);
    for _ in 0..20 {
        let a = gaussian_matrix(&mut r, 6);
        let s = singular_values(&a, true).unwrap();
        let sum: f64 = s.all_values.unwrap().iter().map(|x| x * x).sum();
        assert!((sum - a.frobenius_norm_sqr()).abs() <= 1e-12 * sum);
    }
}

#[test]
fn spectral_norm_matches_gram_polynomial() {
    let mut r = rng(4);
    for _ in 0..10 {
        let a = gaussian_matrix(&mut r, 8);
        let gram = a.adjoint().matmul(&a);
        let top = poly_roots(&char_poly(&gram)).iter().map(|z| z.re).fold(0.0, f64::max).sqrt();
        let got = spectral_norm(&a, 1e-12);
        assert!((got - top).abs() <= 1e-6 * top, "{got} vs {top}");
    }
}

#[test]
fn nearly_singular_two_by_two_least_singular_value() {
    let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-6]]);
    let det: f64 = 1e-6;
    let fro: f64 = 3.0 + (1.0f64 + 1e-6).powi(2);
    let smax = ((fro + (fro * fro - 4.0 * det * det).sqrt()) / 2.0).sqrt();
    let want = det / smax;
    let got = least_singular_value(&a).unwrap();
    assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
}

// ---------------------------------------------------------------- spectral

#[test]
fn ginibre_spectrum_stays_in_slightly_enlarged_disk() {
    let s = sample_matrix(&AtomDistribution::ComplexGaussian, 512, 11).unwrap();
    let esd = esd_of_matrix(&s, 1.0, None).unwrap();
    let inside = esd.points().iter().filter(|z| z.norm() <= 1.1).count();
    assert!(inside as f64 >= 0.99 * 512.0, "{inside}");
}

#[test]
fn disk_cdf_matches_quadrature() {
    for &(s, t) in &[(0.5, 0.5), (0.0, 0.0), (-0.3, 0.7), (0.9, -0.2), (-1.5, 0.3), (2.0, 2.0), (0.2, -0.95)] {
        let want = disk_cdf_quadrature(s, t);
        let got = uniform_disk_cdf(s, t);
        assert!((got - want).abs() < 1e-7, "({s},{t}): {got} vs {want}");
    }
}

#[test]
fn sunflower_points_are_close_to_disk_law() {
    let esd = Esd::new(sunflower_disk(100_000)).unwrap();
    let d = sup_distance(&esd, &GridSpec::square(-2.0, 2.0, 201).unwrap()).unwrap();
    assert!(d <= 0.01, "{d}");
}

#[test]
fn disk_char_fn_matches_radial_bessel_integral() {
    for &(u, v) in &[(3.0, 4.0), (0.0, 0.0), (1.0, -2.0), (7.5, 0.5)] {
        let got = char_fn_disk(u, v);
        let want = disk_char_fn_radial(u, v);
        assert!((got.re - want).abs() < 1e-6 && got.im.abs() < 1e-6, "({u},{v}): {got} vs {want}");
    }
}

#[test]
fn hermitized_spectrum_sums_to_frobenius_norm() {
    let s = sample_matrix(&AtomDistribution::Bernoulli, 8, 5).unwrap();
    let z = c(0.3, 0.2);
    let nu = nu_esd(&s, z, 1.0).unwrap();
    let scale = 1.0 / 8f64.sqrt();
    let mut want = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            let mut e = s.entries.row(i)[j] * scale;
            if i == j {
                e -= z;
            }
            want += e.norm_sqr();
        }
    }
    let got: f64 = nu.xs.iter().sum();
    assert!((got - want).abs() <= 1e-9 * want);
}

#[test]
fn log_integral_lower_part_is_usually_empty() {
    let eps = eps_n(16, 3.0);
    let empty = (0..200)
        .filter(|&t| {
            let s = sample_matrix(&AtomDistribution::ComplexGaussian, 16, 1000 + t).unwrap();
            let split = log_integral_split(&nu_esd(&s, c(0.5, 0.5), 1.0).unwrap(), eps).unwrap();
            split.lower_count == 0 && split.lower == 0.0
        })
        .count();
    assert!(empty >= 195, "{empty}");
}

#[test]
fn g_n_is_odd_in_s_for_symmetric_real_entries() {
    let (s, t, h) = (0.3, 0.2, 0.05);
    let sums: Vec<f64> = (0..200)
        .map(|k| {
            let m = sample_matrix(&AtomDistribution::Bernoulli, 32, 500 + k).unwrap();
            g_n_fd(&m, s, t, h, 1.0).unwrap() + g_n_fd(&m, -s, t, h, 1.0).unwrap()
        })
        .collect();
    let (mean, se) = mean_stderr(&sums);
    assert!(mean.abs() <= 5.0 * se, "{mean} ± {se}");
}

#[test]
fn trace_moments_of_sign_matrices() {
    let n = 16usize;
    let nf = n as f64;
    let m1 = trace_moment_estimate(&AtomDistribution::Bernoulli, n, 1, 0.2, 20, 8).unwrap();
    assert!((m1.estimate - nf * nf).abs() <= 1e-9 * nf * nf, "{m1:?}");
    // Pairings of tr(NN*NN*) for unit-variance entries with E|a|^4 = 1.
    let want = nf * nf + 2.0 * nf * nf * (nf - 1.0);
    let m2 = trace_moment_estimate(&AtomDistribution::Bernoulli, n, 2, 0.2, 400, 9).unwrap();
    assert!((m2.estimate - want).abs() <= 5.0 * m2.stderr, "{m2:?} vs {want}");
}

// --------------------------------------------------------------- smallball

#[test]
fn two_step_walk_histogram() {
    let v = CoeffTuple::from_real(&[1.0, 1.0]).unwrap();
    let draws = walk_sample(&AtomDistribution::Bernoulli, &v, 17, 100_000).unwrap();
    for (value, p) in [(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)] {
        let freq = draws.iter().filter(|z| (z.re - value).abs() < 1e-12 && z.im == 0.0).count() as f64 / 1e5;
        let sd = (p * (1.0 - p) / 1e5f64).sqrt();
        assert!((freq - p).abs() <= 5.0 * sd, "{value}: {freq}");
    }
}

#[test]
fn all_ones_small_ball_is_central_binomial() {
    for n in 1..=14usize {
        let v = CoeffTuple::from_real(&vec![1.0; n]).unwrap();
        let got = small_ball_prob(&AtomDistribution::Bernoulli, &v, 0.5, &Budget::default()).unwrap();
        let want = binomial_dp(n).into_iter().fold(0.0, f64::max);
        assert!(got.is_exact());
        assert!((got.value - want).abs() < 1e-12, "n={n}: {} vs {want}", got.value);
    }
    let v = CoeffTuple::from_real(&[1.0; 4]).unwrap();
    let p = small_ball_prob(&AtomDistribution::Bernoulli, &v, 0.5, &Budget::default()).unwrap();
    assert!((p.value - 0.375).abs() < 1e-15);
}

#[test]
fn bernoulli_f_is_cos_squared() {
    let mut r = rng(21);
    for _ in 0..100 {
        let z = c(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let want = (2.0 * PI * z.re).cos().powi(2);
        assert!((char_fn_f(&AtomDistribution::Bernoulli, z) - want).abs() < 1e-12);
    }
}

#[test]
fn bernoulli_alpha_norm_formula() {
    let mut r = rng(22);
    for _ in 0..100 {
        let w = c(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let want = frac_dist(2.0 * w.re) / 2f64.sqrt();
        assert!((alpha_norm(&AtomDistribution::Bernoulli, w) - want).abs() < 1e-12);
    }
}

#[test]
fn bernoulli_lazy_law() {
    for mu in [0.1, 0.5, 1.0] {
        let law = lazy_law(&AtomDistribution::Bernoulli, mu).unwrap();
        let mass = |x: f64| law.iter().filter(|(z, _)| (z.re - x).abs() < 1e-12 && z.im == 0.0).map(|(_, p)| p).sum::<f64>();
        assert!((mass(0.0) - (1.0 - mu / 4.0)).abs() < 1e-12);
        assert!((mass(2.0) - mu / 8.0).abs() < 1e-12);
        assert!((mass(-2.0) - mu / 8.0).abs() < 1e-12);
        assert!((law.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn concentration_of_single_step() {
    let v = CoeffTuple::from_real(&[1.0]).unwrap();
    let want = 0.75 + (-4.0 * PI).exp() / 4.0;
    let exact = conc_prob_exact(&AtomDistribution::Bernoulli, 1.0, &v, 1000).unwrap().unwrap();
    assert!((exact.value - want).abs() < 1e-15);
    let fourier = conc_prob(&AtomDistribution::Bernoulli, 1.0, &v, ConcMethod::Fourier { radius_cutoff: 8.0 }).unwrap();
    assert!((fourier.value - want).abs() < 1e-6, "{}", fourier.value);
}

#[test]
fn f_is_bounded_by_alpha_norm() {
    for theta in (0..=500).map(|k| k as f64 / 1000.0) {
        assert!((2.0 * PI * theta).cos() <= 1.0 - 8.0 * theta * theta + 1e-12);
    }
    let laws = [
        AtomDistribution::Bernoulli,
        AtomDistribution::discrete(vec![c(0.0, 0.0), c(1.0, 0.5), c(-0.3, 2.0)], vec![0.2, 0.5, 0.3]).unwrap(),
        AtomDistribution::ComplexGaussian,
    ];
    for law in &laws {
        let kernel = DifferenceKernel::new(law);
        for i in -40..=40 {
            for j in -40..=40 {
                let w = c(i as f64 * 0.05, j as f64 * 0.05);
                assert!(kernel.f(w) <= 1.0 - 8.0 * kernel.norm_sqr(w) + 1e-9, "{} at {w}", law.label());
            }
        }
    }
}

// --------------------------------------------------------------------- gap

/// Distinct points of a GAP with Gaussian-integer generators, by brute force.
fn brute_gap(gens: &[(i64, i64)], dims: &[i64]) -> Vec<(i64, i64)> {
    let mut pts = vec![(0i64, 0i64)];
    for (&(x, y), &l) in gens.iter().zip(dims) {
        let mut next = Vec::new();
        for &(a, b) in &pts {
            for k in -l..=l {
                next.push((a + k * x, b + k * y));
            }
        }
        next.sort();
        next.dedup();
        pts = next;
    }
    pts
}

#[test]
fn gap_enumeration_and_dilation_match_brute_force() {
    let mut r = rng(31);
    for _ in 0..60 {
        let rank = r.random_range(1..=3usize);
        let gens: Vec<(i64, i64)> = (0..rank).map(|_| (r.random_range(-4..=4), r.random_range(-4..=4))).collect();
        let dims: Vec<i64> = (0..rank).map(|_| r.random_range(1..=4)).collect();
        let gap = Gap::new(
            gens.iter().map(|&(x, y)| c(x as f64, y as f64)).collect(),
            dims.iter().map(|&l| l as f64).collect(),
        )
        .unwrap();
        let pts = enumerate(&gap, DEFAULT_ENUM_CAP).unwrap();
        let want = brute_gap(&gens, &dims);
        assert_eq!(pts.len(), want.len());
        let in_ball = want.iter().filter(|(a, b)| a * a + b * b <= 1).count();
        assert!((pts.dispersion() - want.len() as f64 / in_ball as f64).abs() < 1e-12);
        let combos: i64 = dims.iter().map(|l| 2 * l + 1).product();
        assert_eq!(is_proper(&gap, DEFAULT_ENUM_CAP).unwrap(), want.len() as i64 == combos);
        for t in [2i64, 3] {
            let big = enumerate(&dilate(&gap, t as f64).unwrap(), DEFAULT_ENUM_CAP).unwrap();
            let tdims: Vec<i64> = dims.iter().map(|l| l * t).collect();
            assert_eq!(big.len(), brute_gap(&gens, &tdims).len());
            if want.len() as i64 == combos {
                assert!(big.len() as f64 <= (t as f64).powi(rank as i32) * want.len() as f64);
            }
        }
    }
}

/// Area of `{ξ ∈ B(ξ₀,1) : ‖ξ v‖_α ≤ thr}` for Bernoulli atoms and a real
/// generator `v`, by midpoint counting on a 2000×2000 grid.
fn grid_level_set_area(v: f64, xi0: Complex64, thr: f64) -> f64 {
    let m = 2000usize;
    let h = 2.0 / m as f64;
    let mut hits = 0usize;
    for i in 0..m {
        for j in 0..m {
            let p = c(-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
            if p.norm() <= 1.0 && frac_dist(2.0 * ((xi0 + p) * v).re) / 2f64.sqrt() <= thr {
                hits += 1;
            }
        }
    }
    hits as f64 * h * h
}

#[test]
fn level_set_measure_matches_grid_count() {
    let dist = AtomDistribution::Bernoulli;
    // (generator, L, ξ₀, ε, D(Q)); the sampled area must match within 3σ.
    let cases = [(1.0, 20.0, c(0.0, 0.0), 0.1, 41.0 / 3.0), (0.3, 10.0, c(0.2, -0.1), 0.5, 21.0 / 7.0)];
    for (v, l, xi0, eps, d) in cases {
        let gap = Gap::new(vec![c(v, 0.0)], vec![l]).unwrap();
        let thr = f64::powf(d, eps) / l;
        let want = grid_level_set_area(v, xi0, thr);
        let est = level_set_measure(&gap, &dist, xi0, eps, 200_000, 5, DEFAULT_ENUM_CAP).unwrap();
        assert!((est.dispersion - d).abs() < 1e-12);
        assert!((est.measure - want).abs() <= 3.0 * est.stderr, "v={v}: {} ± {} vs {want}", est.measure, est.stderr);
        let kernel = DifferenceKernel::new(&dist);
        let probe = xi0 + c(0.05, 0.5);
        let inside = frac_dist(2.0 * (probe * v).re) / 2f64.sqrt() <= thr;
        assert_eq!(in_level_set(&kernel, &gap, d, eps, probe), inside);
    }
}

#[test]
fn forward_lo_interval_matches_dynamic_programme() {
    let gap = Gap::new(vec![c(1.0, 0.0)], vec![10.0]).unwrap();
    let res = forward_lo_experiment(&AtomDistribution::Bernoulli, 1.0, &gap, ConcMethod::default(), DEFAULT_ENUM_CAP)
        .unwrap();
    assert_eq!(res.tuple_len, 100);
    assert!((res.dispersion_scaled - 7.0).abs() < 1e-12);
    // S = sum of 100 steps in {0: 3/4, ±1: 1/8}; W = 2S.
    let mut law = vec![1.0];
    for _ in 0..100 {
        let mut next = vec![0.0; law.len() + 2];
        for (k, &p) in law.iter().enumerate() {
            next[k] += p / 8.0;
            next[k + 1] += 0.75 * p;
            next[k + 2] += p / 8.0;
        }
        law = next;
    }
    let want: f64 = law.iter().enumerate().map(|(k, p)| p * (-4.0 * PI * (k as f64 - 100.0).powi(2)).exp()).sum();
    assert!((res.p.value - want).abs() < 1e-12, "{} vs {want}", res.p.value);
}

#[test]
fn weak_survey_matches_brute_force_dispersion() {
    let gap = Gap::new(vec![c(1.0, 0.0)], vec![5.0]).unwrap();
    let grid: Vec<Complex64> =
        (0..12).flat_map(|i| (0..12).map(move |j| c(-2.9 + 0.61 * i as f64, -2.9 + 0.53 * j as f64 + 0.013))).collect();
    let survey = weak_element_survey(&gap, 1, 2.0, &grid, DEFAULT_ENUM_CAP).unwrap();
    assert!((survey.dispersion_base - 11.0 / 3.0).abs() < 1e-12);
    let brute = |z: Complex64| {
        let mut pts: Vec<Complex64> = Vec::new();
        for a in -5..=5 {
            for b in -1..=1 {
                let p = c(a as f64, 0.0) + z * b as f64;
                if pts.iter().all(|q| (p - q).norm() > 1e-9) {
                    pts.push(p);
                }
            }
        }
        pts.len() as f64 / pts.iter().filter(|p| p.norm() <= 1.0).count() as f64
    };
    let want: Vec<Complex64> = grid.iter().copied().filter(|&z| brute(z) < 2.0 * 11.0 / 3.0).collect();
    assert_eq!(survey.weak_points, want);
    assert!(survey.net24_size <= want.len());
}

#[test]
fn epsilon_net_is_sandwiched_by_optimal_covers() {
    let mut r = rng(41);
    for _ in 0..40 {
        let n = r.random_range(1..=12usize);
        let pts: Vec<Complex64> = (0..n).map(|_| c(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0))).collect();
        let eps = r.random_range(0.3..2.0);
        let net = epsilon_net(&pts, eps).unwrap();
        for (i, a) in net.iter().enumerate() {
            for b in &net[i + 1..] {
                assert!((a - b).norm() > eps);
            }
        }
        assert!(pts.iter().all(|p| net.iter().any(|q| (p - q).norm() <= eps)));
        assert!(min_cover(&pts, eps) <= net.len());
        assert!(net.len() <= min_cover(&pts, eps / 2.0));
    }
}

#[test]
fn pigeonhole_holds_on_random_instances() {
    let mut r = rng(43);
    for _ in 0..100 {
        let gap = Gap::new(
            vec![c(r.random_range(-3..=3) as f64 * 0.5, r.random_range(-3..=3) as f64 * 0.25), c(1.0, 0.0)],
            vec![r.random_range(1..=4) as f64, r.random_range(1..=4) as f64],
        )
        .unwrap();
        let pts = enumerate(&gap, DEFAULT_ENUM_CAP).unwrap().distinct_points;
        let centres: Vec<Complex64> =
            (0..r.random_range(1..=6)).map(|_| c(r.random_range(-4.0..4.0), r.random_range(-2.0..2.0))).collect();
        let rad = r.random_range(0.5..3.0);
        assert!(pigeonhole_check(&pts, &centres, rad).unwrap());
    }
}

// -------------------------------------------------------------- inverse LO

#[test]
fn generic_vector_is_poor_and_flat_vector_is_rich() {
    let mut r = rng(51);
    let raw: Vec<Complex64> = (0..16).map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v = CoeffTuple::new(raw.iter().map(|z| z / norm).collect()).unwrap();
    let poor = classify_rich_poor(&AtomDistribution::Bernoulli, &v, 16, 1.0, 2.0, &Budget::default()).unwrap();
    assert_eq!(poor.verdict, Verdict::Poor);
    assert!((poor.threshold - 1.0 / 256.0).abs() < 1e-15);
    assert!((poor.beta - 1.0 / 64.0).abs() < 1e-15);
    let flat = CoeffTuple::from_real(&[0.25; 16]).unwrap();
    let rich = classify_rich_poor(&AtomDistribution::Bernoulli, &flat, 16, 1.0, 2.0, &Budget::default()).unwrap();
    assert_eq!(rich.verdict, Verdict::Rich);
    assert!((rich.p_est.value - binomial_dp(16)[8]).abs() < 1e-12);
}

#[test]
fn rounding_does_not_lose_small_ball_mass() {
    let mut r = rng(52);
    for _ in 0..30 {
        let n = r.random_range(2..=10usize);
        let v = CoeffTuple::new((0..n).map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect()).unwrap();
        let beta = r.random_range(0.05..0.5);
        let big = round_to_lattice(&v, beta, n, 1.0).unwrap();
        let before = small_ball_prob(&AtomDistribution::Bernoulli, &v, beta, &Budget::default()).unwrap();
        let after = small_ball_prob(&AtomDistribution::Bernoulli, &big, 1.0, &Budget::default()).unwrap();
        assert!(before.is_exact() && after.is_exact());
        assert!(after.value >= before.value - 1e-12, "{} < {}", after.value, before.value);
    }
}

// --------------------------------------------------------------------- lsv

#[test]
fn small_sign_matrix_singularity_is_exact() {
    for n in 2..=4usize {
        let got = singularity_prob(&AtomDistribution::Bernoulli, n, 1, 0).unwrap();
        assert!(got.is_exact());
        assert!((got.value - sign_matrix_singular_fraction(n)).abs() < 1e-15, "n={n}");
    }
    let three = singularity_prob(&AtomDistribution::Bernoulli, 3, 1, 0).unwrap();
    assert!((three.value - 320.0 / 512.0).abs() < 1e-15);
}

#[test]
fn gaussian_row_distance_laws() {
    let half_normal = |x: f64| statrs::function::erf::erf(x / 2f64.sqrt());
    let rayleigh = |x: f64| 1.0 - (-x * x).exp();
    let crit = 1.63 / 100.0;
    let real = row_distance_experiment(&AtomDistribution::RealGaussian, 12, 10_000, 61).unwrap();
    assert!(ks_one_sample(&real, half_normal) < crit);
    let fixed = row_distance_fixed_rows(&AtomDistribution::RealGaussian, 12, 10_000, 62).unwrap();
    assert!(ks_one_sample(&fixed, half_normal) < crit);
    let cplx = row_distance_experiment(&AtomDistribution::ComplexGaussian, 12, 10_000, 63).unwrap();
    assert!(ks_one_sample(&cplx, rayleigh) < crit);
}

#[test]
fn bernoulli_distance_to_balanced_hyperplane_vanishes_at_central_binomial_rate() {
    for n in [4usize, 16, 64] {
        let trials = 20_000;
        let d = row_distance_to_hyperplane(&AtomDistribution::Bernoulli, &vec![c(1.0, 0.0); n], trials, 70 + n as u64)
            .unwrap();
        let freq = d.iter().filter(|&&x| x < 1e-9).count() as f64 / trials as f64;
        let want = binomial_dp(n)[n / 2];
        let sd = (want * (1.0 - want) / trials as f64).sqrt();
        assert!((freq - want).abs() <= 5.0 * sd, "n={n}: {freq} vs {want}");
    }
}

#[test]
fn bernoulli_least_singular_value_tail_is_empty() {
    let res = lsv_tail(&AtomDistribution::Bernoulli, 100, &Shift::Zero, 3.0, 200, 80, None).unwrap();
    assert_eq!(res.trials + res.errors, 200);
    assert_eq!(res.hits, 0);
}

#[test]
fn condition_numbers_are_at_least_one() {
    let s = condition_samples(&AtomDistribution::ComplexGaussian, 20, &Shift::Scalar(c(-1.0, -1.0)), 100, 81, None)
        .unwrap();
    assert_eq!(s.values.len(), 100);
    assert!(s.values.iter().all(|&k| k >= 1.0));
}
