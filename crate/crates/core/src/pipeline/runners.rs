//! Experiment runners. Every runner expands a config into `(n, trial)` jobs,
//! runs them on a bounded thread pool and returns rows in `(n, trial)` order,
//! followed by per-size aggregates.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, LsvStatistic, TupleKind};
use super::rows::{read_csv, write_csv, ResultRow, AGGREGATE_TRIAL, ERROR_STATISTIC};
use crate::ensembles::{sample_matrix, sample_sparse_matrix, trial_seed, AtomDistribution, SparseSpec, SplitMix64};
use crate::error::{Error, Result};
use crate::gap::{
    enumerate, forward_lo_experiment, lacunary_basis_with, level_set_measure, Gap, DEFAULT_ENUM_CAP,
    MIN_LEVEL_SET_SAMPLES,
};
use crate::inverse_lo::{classify_rich_poor, net_size_bound, round_to_lattice, structure_search, SearchParams, Verdict};
use crate::linalg::least_singular_value;
use crate::lsv::{condition_number, shifted_sample};
use crate::smallball::{conc_prob, small_ball_prob, Budget, CoeffTuple, ConcMethod};
use crate::spectral::{char_fn_disk, esd_of_matrix, second_moment_check, sup_distance, GridSpec};
use crate::stats::{binomial_stderr, linear_fit, mean_stderr};

/// Environment variable that overrides the `--jobs` setting.
pub const JOBS_ENV: &str = "CIRCLAW_JOBS";

/// Eigenvalues closer to the origin than this count as the atom at 0.
pub const ORIGIN_ATOM_TOL: f64 = 1e-9;

/// Rows of a run together with a message for each failed trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<String>,
}

impl RunOutput {
    /// Per-size aggregate of `statistic`, if present.
    pub fn aggregate(&self, n: usize, statistic: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.n == n && r.trial == AGGREGATE_TRIAL && r.statistic == statistic)
    }

    /// Per-trial values of `statistic` at size `n`, in trial order.
    pub fn trial_values(&self, n: usize, statistic: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.trial >= 0 && r.statistic == statistic)
            .map(|r| r.value)
            .collect()
    }
}

/// One statistic of one trial.
#[derive(Debug, Clone, PartialEq)]
struct Stat {
    name: String,
    value: f64,
    stderr: f64,
    /// Included in the per-size mean.
    aggregate: bool,
}

fn stat(name: impl Into<String>, value: f64) -> Stat {
    Stat { name: name.into(), value, stderr: f64::NAN, aggregate: true }
}

fn stat_err(name: impl Into<String>, value: f64, stderr: f64) -> Stat {
    Stat { name: name.into(), value, stderr, aggregate: true }
}

/// A statistic reported per trial only, such as a single eigenvalue.
fn point(name: impl Into<String>, value: f64) -> Stat {
    Stat { name: name.into(), value, stderr: f64::NAN, aggregate: false }
}

fn flag(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

struct TrialOutcome {
    n: usize,
    trial: usize,
    seed: u64,
    runtime_ms: u64,
    result: Result<Vec<Stat>>,
}

/// Worker count: `CIRCLAW_JOBS` if set, else `flag`, else the number of
/// available cores.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var(JOBS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(j) if j >= 1 => Ok(j),
            _ => Err(Error::Config(format!("{JOBS_ENV} must be a positive integer, got `{v}`"))),
        };
    }
    match flag {
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(j) => Ok(j),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Runs `body` for every `(n, trial)` pair with at most `jobs` workers.
fn run_trials<F>(cfg: &ExperimentConfig, jobs: usize, trials: usize, body: F) -> Result<Vec<TrialOutcome>>
where
    F: Fn(usize, u64) -> Result<Vec<Stat>> + Sync,
{
    let tag = cfg.kind.tag();
    let tasks: Vec<(usize, usize)> =
        cfg.n_list.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, trial)| {
                let seed = trial_seed(cfg.seed, tag, n as u64, trial as u64);
                let start = Instant::now();
                let result = body(n, seed);
                let runtime_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
                TrialOutcome { n, trial, seed, runtime_ms, result }
            })
            .collect()
    }))
}

/// Turns outcomes into rows: per-trial rows for each size, then the
/// aggregates (`mean ± stderr` of every aggregated statistic, the success
/// counts and whatever `extra` adds).
fn assemble(
    cfg: &ExperimentConfig,
    outcomes: Vec<TrialOutcome>,
    extra: impl Fn(usize, &[&Vec<Stat>]) -> Vec<Stat>,
) -> RunOutput {
    let tag = cfg.kind.tag();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &n in &cfg.n_list {
        let group: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.n == n).collect();
        let mut ok: Vec<&Vec<Stat>> = Vec::new();
        for o in &group {
            match &o.result {
                Ok(stats) => {
                    ok.push(stats);
                    for s in stats {
                        let mut row = ResultRow::new(tag, n, o.trial as i64, o.seed, s.name.clone(), s.value, s.stderr);
                        row.runtime_ms = o.runtime_ms;
                        rows.push(row);
                    }
                }
                Err(e) => {
                    failures.push(format!("{tag} n={n} trial={} seed={}: {e}", o.trial, o.seed));
                    let mut row = ResultRow::new(tag, n, o.trial as i64, o.seed, ERROR_STATISTIC, f64::NAN, f64::NAN);
                    row.runtime_ms = o.runtime_ms;
                    rows.push(row);
                }
            }
        }
        let mut names: Vec<&str> = Vec::new();
        let mut values: HashMap<&str, Vec<f64>> = HashMap::new();
        for stats in &ok {
            for s in stats.iter().filter(|s| s.aggregate) {
                let e = values.entry(s.name.as_str()).or_default();
                if e.is_empty() {
                    names.push(s.name.as_str());
                }
                e.push(s.value);
            }
        }
        let agg = |name: &str, value: f64, stderr: f64| ResultRow::new(tag, n, AGGREGATE_TRIAL, cfg.seed, name, value, stderr);
        for name in names {
            let (m, se) = mean_stderr(&values[name]);
            rows.push(agg(name, m, se));
        }
        rows.push(agg("trials_ok", ok.len() as f64, f64::NAN));
        rows.push(agg("trials_failed", (group.len() - ok.len()) as f64, f64::NAN));
        for s in extra(n, &ok) {
            rows.push(agg(&s.name, s.value, s.stderr));
        }
    }
    RunOutput { rows, failures }
}

fn no_extra(_: usize, _: &[&Vec<Stat>]) -> Vec<Stat> {
    Vec::new()
}

/// Runs the experiment named by `cfg.kind`.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Circlaw => run_circlaw(cfg, jobs),
        ExperimentKind::Sparse => run_sparse_circlaw(cfg, jobs),
        ExperimentKind::Degenerate => run_degenerate(cfg, jobs),
        ExperimentKind::Lsv => run_lsv(cfg, jobs),
        ExperimentKind::Smallball => run_smallball(cfg, jobs),
        ExperimentKind::Gap => run_gap(cfg, jobs),
        ExperimentKind::Invlo => run_invlo(cfg, jobs),
        ExperimentKind::Esd => run_esd(cfg, jobs),
    }
}

/// [`run_experiment`] followed by writing the rows to `path`.
pub fn run_to_csv(cfg: &ExperimentConfig, jobs: usize, path: &Path) -> Result<RunOutput> {
    let out = run_experiment(cfg, jobs)?;
    write_csv(path, &out.rows)?;
    Ok(out)
}

fn sigma(dist: &AtomDistribution) -> Result<f64> {
    let var = dist.variance();
    if !(var > 0.0) {
        return Err(Error::Config(format!("ensemble {} has zero variance", dist.label())));
    }
    Ok(var.sqrt())
}

fn grid_of(cfg: &ExperimentConfig) -> Result<GridSpec> {
    GridSpec::square(cfg.grid.lo, cfg.grid.hi, cfg.grid.points())
}

fn charfn_suffix(u: f64, v: f64) -> String {
    format!("u{u}_v{v}")
}

/// Dense circular-law run: for every trial the sup-distance between the
/// ESD of `N/(σ√n)` and the disk law, both sides of the second-moment
/// inequality and the empirical characteristic function at the configured
/// points.
pub fn run_circlaw(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    circlaw_common(cfg, jobs, None)
}

/// As [`run_circlaw`] with sparse sampling and `√(nρ)` scaling.
pub fn run_sparse_circlaw(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    let sparse = cfg.sparse.ok_or_else(|| Error::Config("sparse runs need sparse.alpha".into()))?;
    if !(sparse.alpha() > 0.0 && sparse.alpha() <= 1.0) {
        return Err(Error::Config(format!("sparse.alpha must lie in (0, 1], got {}", sparse.alpha())));
    }
    circlaw_common(cfg, jobs, Some(sparse))
}

fn circlaw_common(cfg: &ExperimentConfig, jobs: usize, sparse: Option<SparseSpec>) -> Result<RunOutput> {
    let sigma = sigma(&cfg.ensemble)?;
    let grid = grid_of(cfg)?;
    let reference: Vec<Complex64> = cfg.charfn_points.par_iter().map(|&(u, v)| char_fn_disk(u, v)).collect();
    let outcomes = run_trials(cfg, jobs, cfg.trials, |n, seed| {
        let (sample, rho) = match &sparse {
            Some(sp) => (sample_sparse_matrix(&cfg.ensemble, n, sp, seed)?, Some(sp.rho(n))),
            None => (sample_matrix(&cfg.ensemble, n, seed)?, None),
        };
        let esd = esd_of_matrix(&sample, sigma, rho)?;
        let mut stats = vec![stat("sup_distance", sup_distance(&esd, &grid)?)];
        let check = second_moment_check(&sample, &esd, sigma * rho.unwrap_or(1.0).sqrt());
        stats.push(stat("second_moment_lhs", check.lhs));
        stats.push(stat("second_moment_rhs", check.rhs));
        stats.push(stat("second_moment_holds", flag(check.holds)));
        for (&(u, v), r) in cfg.charfn_points.iter().zip(&reference) {
            let c = esd.char_fn(u, v);
            let sfx = charfn_suffix(u, v);
            stats.push(stat(format!("charfn_re_{sfx}"), c.re));
            stats.push(stat(format!("charfn_im_{sfx}"), c.im));
            stats.push(stat(format!("charfn_err_{sfx}"), (c - r).norm()));
        }
        Ok(stats)
    })?;
    Ok(assemble(cfg, outcomes, no_extra))
}

/// `ρ = 1/n` check: fraction of all-zero rows and fraction of eigenvalues
/// at the origin, for the configured sizes (each at least 50).
pub fn run_degenerate(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    if cfg.n_list.iter().any(|&n| n < 50) {
        return Err(Error::Precondition("the degenerate check needs n >= 50".into()));
    }
    let sparse = cfg.sparse.unwrap_or_else(SparseSpec::alpha_zero_limit);
    let sigma = sigma(&cfg.ensemble)?;
    let outcomes = run_trials(cfg, jobs, cfg.trials, |n, seed| {
        let sample = sample_sparse_matrix(&cfg.ensemble, n, &sparse, seed)?;
        let zero_rows = (0..n).filter(|&i| sample.entries.row(i).iter().all(|z| *z == Complex64::new(0.0, 0.0))).count();
        let esd = esd_of_matrix(&sample, sigma, Some(sparse.rho(n)))?;
        let at_origin = esd.points().iter().filter(|z| z.norm() < ORIGIN_ATOM_TOL).count();
        Ok(vec![
            stat("zero_row_fraction", zero_rows as f64 / n as f64),
            stat("origin_atom_fraction", at_origin as f64 / n as f64),
        ])
    })?;
    Ok(assemble(cfg, outcomes, |_, _| vec![stat("zero_row_reference", (-1.0f64).exp())]))
}

/// Degenerate check for Bernoulli entries with `ρ = 1/n` at a single size.
pub fn degenerate_alpha0_check(n: usize, trials: usize, seed: u64) -> Result<RunOutput> {
    if n < 50 {
        return Err(Error::Precondition(format!("the degenerate check needs n >= 50, got {n}")));
    }
    let mut cfg = ExperimentConfig::new(ExperimentKind::Degenerate);
    cfg.n_list = vec![n];
    cfg.trials = trials;
    cfg.seed = seed;
    run_degenerate(&cfg, resolve_jobs(None)?)
}

/// `σ_n(M + N)` or the condition number per trial; aggregates add the
/// tail counts `hits_B{B}` and `rate_B{B}` for every configured `B`, all on
/// the same samples, and the reference level `n^{-A}`.
pub fn run_lsv(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    let p = &cfg.lsv;
    let name = p.statistic.tag();
    let outcomes = run_trials(cfg, jobs, cfg.trials, |n, seed| {
        let a = shifted_sample(&cfg.ensemble, n, &p.shift, cfg.sparse.as_ref(), seed)?;
        let value = match p.statistic {
            LsvStatistic::SigmaMin => least_singular_value(&a)?,
            LsvStatistic::Condition => condition_number(&a)?,
        };
        Ok(vec![stat(name, value)])
    })?;
    Ok(assemble(cfg, outcomes, |n, ok| {
        let values: Vec<f64> = ok.iter().filter_map(|s| s.iter().find(|s| s.name == name)).map(|s| s.value).collect();
        let nf = n as f64;
        let mut out = Vec::new();
        for &b in &p.b_values {
            let hits = values
                .iter()
                .filter(|&&v| match p.statistic {
                    LsvStatistic::SigmaMin => v <= nf.powf(-b),
                    LsvStatistic::Condition => v >= nf.powf(b),
                })
                .count();
            let rate = if values.is_empty() { f64::NAN } else { hits as f64 / values.len() as f64 };
            out.push(stat(format!("hits_B{b}"), hits as f64));
            out.push(stat_err(format!("rate_B{b}"), rate, binomial_stderr(hits, values.len())));
        }
        out.push(stat("reference_n_pow_minus_a", nf.powf(-p.a)));
        out
    }))
}

/// Coefficient tuple of length `n` for `kind`.
pub fn build_tuple(kind: &TupleKind, n: usize, seed: u64) -> Result<CoeffTuple> {
    let coords: Vec<Complex64> = match kind {
        TupleKind::Ones => vec![Complex64::new(1.0, 0.0); n],
        TupleKind::UnitOnes => vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n],
        TupleKind::Gaussian => {
            let raw: Vec<Complex64> = (0..n)
                .map(|i| AtomDistribution::ComplexGaussian.sample(&mut SplitMix64::keyed(&[seed, i as u64])))
                .collect();
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(Error::Degenerate("gaussian tuple has zero norm".into()));
            }
            raw.into_iter().map(|z| z / norm).collect()
        }
        TupleKind::Explicit(v) => v.clone(),
    };
    CoeffTuple::new(coords)
}

/// Small-ball probability at the configured radius and the concentration
/// probability `P_μ` for a tuple of each length `n`.
pub fn run_smallball(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    let p = &cfg.smallball;
    let outcomes = run_trials(cfg, jobs, cfg.trials, |n, seed| {
        let v = build_tuple(&p.tuple, n, seed)?;
        let budget = Budget { mc_samples: p.mc_samples, seed, ..Budget::default() };
        let sb = small_ball_prob(&cfg.ensemble, &v, p.radius, &budget)?;
        let len = v.len() as f64;
        let conc = conc_prob(&cfg.ensemble, p.mu, &v, ConcMethod::Auto { trials: p.mc_samples, seed })?;
        Ok(vec![
            stat_err("small_ball_prob", sb.value, sb.stderr),
            stat("small_ball_exact", flag(sb.is_exact())),
            stat("small_ball_lower_bound_only", flag(sb.lower_bound_only)),
            stat("sqrt_n_p", len.sqrt() * sb.value),
            stat_err("conc_prob", conc.value, conc.stderr),
        ])
    })?;
    Ok(assemble(cfg, outcomes, no_extra))
}

/// GAP statistics for `GAP(generators, (L, …, L))` with `L` running over
/// the size list; a single trial per `L`. The aggregate row at `n = 0`
/// holds the fitted slope of `log P_μ` against `log D` across all `L`.
pub fn run_gap(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    let p = &cfg.gap;
    let outcomes = run_trials(cfg, jobs, 1, |l, seed| {
        let gap = Gap::uniform(p.generators.clone(), l as f64)?;
        let pts = enumerate(&gap, DEFAULT_ENUM_CAP)?;
        let proper = pts.len() as u128 == gap.combination_count();
        let lac = lacunary_basis_with(&gap, p.lacunary_k, p.radius, DEFAULT_ENUM_CAP, p.c_r)?;
        let method = ConcMethod::Auto { trials: cfg.smallball.mc_samples, seed };
        let fwd = forward_lo_experiment(&cfg.ensemble, p.mu, &gap, method, DEFAULT_ENUM_CAP)?;
        let samples = cfg.smallball.mc_samples.max(MIN_LEVEL_SET_SAMPLES);
        let level = level_set_measure(&gap, &cfg.ensemble, Complex64::new(0.0, 0.0), p.eps, samples, seed, DEFAULT_ENUM_CAP)?;
        Ok(vec![
            stat("gap_size", pts.len() as f64),
            stat("gap_proper", flag(proper)),
            stat("dispersion", pts.dispersion()),
            stat("lacunary_d", lac.d as f64),
            stat("lacunary_exceeded_d0", flag(lac.exceeded_d0)),
            stat("lacunary_many_vectors_ratio", lac.many_vectors_ratio()),
            stat("lacunary_d_constant", lac.d_bound_constant()),
            stat_err("forward_lo_p", fwd.p.value, fwd.p.stderr),
            stat("forward_lo_dispersion", fwd.dispersion_scaled),
            stat("forward_lo_tuple_len", fwd.tuple_len as f64),
            stat_err("level_set_measure", level.measure, level.stderr),
        ])
    })?;
    let mut out = assemble(cfg, outcomes, no_extra);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &l in &cfg.n_list {
        if let (Some(p), Some(d)) = (out.aggregate(l, "forward_lo_p"), out.aggregate(l, "forward_lo_dispersion")) {
            if p.value > 0.0 && d.value > 0.0 {
                xs.push(d.value.ln());
                ys.push(p.value.ln());
            }
        }
    }
    if let Ok(fit) = linear_fit(&xs, &ys) {
        let tag = cfg.kind.tag();
        out.rows.push(ResultRow::new(tag, 0, AGGREGATE_TRIAL, cfg.seed, "forward_lo_slope", fit.slope, f64::NAN));
        out.rows.push(ResultRow::new(tag, 0, AGGREGATE_TRIAL, cfg.seed, "forward_lo_r_squared", fit.r_squared, f64::NAN));
    }
    Ok(out)
}

/// Rich/poor verdict, structure search on the lattice-rounded vector and
/// the net-size bound, for a unit vector of each length `n`.
pub fn run_invlo(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    let p = &cfg.invlo;
    let outcomes = run_trials(cfg, jobs, cfg.trials, |n, seed| {
        let raw = build_tuple(&p.vector, n, seed)?;
        let norm = raw.norm();
        if !(norm > 0.0) {
            return Err(Error::Degenerate("vector has zero norm".into()));
        }
        let v = CoeffTuple::new(raw.coords().iter().map(|z| z / norm).collect())?;
        let dim = v.len();
        let budget = Budget { mc_samples: cfg.smallball.mc_samples, seed, ..Budget::default() };
        let verdict = classify_rich_poor(&cfg.ensemble, &v, dim, p.a, p.b, &budget)?;
        let rounded = round_to_lattice(&v, verdict.beta, dim, p.a)?;
        let params = SearchParams { n: dim, eps: p.eps, d_max: p.d_max, sparse_mu: cfg.sparse.map(|s| s.rho(dim)) };
        let report = structure_search(&cfg.ensemble, &rounded, &params, &budget, seed)?;
        let mut stats = vec![
            stat("verdict_poor", flag(verdict.verdict == Verdict::Poor)),
            stat_err("p_small_ball", verdict.p_est.value, verdict.p_est.stderr),
            stat("threshold", verdict.threshold),
            stat("beta", verdict.beta),
            stat("search_r", report.r as f64),
            stat("search_k", report.k as f64),
            stat("search_dispersion_final", report.dispersion_final),
            stat("search_exceptional", report.exceptional_count as f64),
            stat("search_terminated_normally", flag(report.terminated_normally)),
            stat("net_size_bound", net_size_bound(dim, p.eps, verdict.p_est.value.max(f64::MIN_POSITIVE), p.o_n_constant)?),
        ];
        for (i, g) in report.generators.iter().enumerate() {
            stats.push(point(format!("generator_{i}_re"), g.re));
            stats.push(point(format!("generator_{i}_im"), g.im));
        }
        Ok(stats)
    })?;
    Ok(assemble(cfg, outcomes, no_extra))
}

/// Scaled eigenvalues of one dense sample per trial, sorted by real then
/// imaginary part, with the sup-distance to the disk law.
pub fn run_esd(cfg: &ExperimentConfig, jobs: usize) -> Result<RunOutput> {
    let sigma = sigma(&cfg.ensemble)?;
    let grid = grid_of(cfg)?;
    let outcomes = run_trials(cfg, jobs, cfg.trials, |n, seed| {
        let sample = sample_matrix(&cfg.ensemble, n, seed)?;
        let esd = esd_of_matrix(&sample, sigma, None)?;
        let mut pts = esd.points().to_vec();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut stats = vec![stat("sup_distance", sup_distance(&esd, &grid)?)];
        for (k, z) in pts.iter().enumerate() {
            stats.push(point(format!("re_{k}"), z.re));
            stats.push(point(format!("im_{k}"), z.im));
        }
        Ok(stats)
    })?;
    Ok(assemble(cfg, outcomes, no_extra))
}

/// Power-law fit `sup_distance ≈ C n^{-η′}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub eta_prime: f64,
    pub r_squared: f64,
    pub intercept: f64,
    /// `(n, mean sup_distance)` used in the fit.
    pub points: Vec<(usize, f64)>,
}

/// Least-squares slope of `log(mean sup_distance)` against `log n`, read
/// from a pipeline CSV. Means are taken over the per-trial rows; sizes with
/// only an aggregate row use it directly.
pub fn fit_rate(csv_path: &Path) -> Result<RateFit> {
    fit_rate_rows(&read_csv(csv_path)?)
}

pub fn fit_rate_rows(rows: &[ResultRow]) -> Result<RateFit> {
    let mut sizes: Vec<usize> = rows.iter().filter(|r| r.statistic == "sup_distance").map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut points = Vec::new();
    for n in sizes {
        let trial: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n && r.trial >= 0 && r.statistic == "sup_distance" && r.value.is_finite())
            .map(|r| r.value)
            .collect();
        let mean = if trial.is_empty() {
            match rows.iter().find(|r| r.n == n && r.trial == AGGREGATE_TRIAL && r.statistic == "sup_distance") {
                Some(r) => r.value,
                None => continue,
            }
        } else {
            mean_stderr(&trial).0
        };
        if mean > 0.0 && mean.is_finite() && n > 0 {
            points.push((n, mean));
        }
    }
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs sup_distance rows for >= 3 distinct n, found {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(RateFit { eta_prime: -fit.slope, r_squared: fit.r_squared, intercept: fit.intercept, points })
}
