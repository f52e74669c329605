//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # circular law at four sizes
//! experiment = circlaw
//! ensemble.kind = bernoulli
//! n = 64, 128, 256, 512
//! trials = 5
//! seed = 42
//! ```
//!
//! Lists are comma separated, complex values use the `a+bi` form and `#`
//! starts a comment. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::ensembles::{AtomDistribution, SparseSpec};
use crate::error::{Error, Result};
use crate::lsv::Shift;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Circlaw,
    Sparse,
    Degenerate,
    Lsv,
    Smallball,
    Gap,
    Invlo,
    Esd,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::Circlaw,
        Self::Sparse,
        Self::Degenerate,
        Self::Lsv,
        Self::Smallball,
        Self::Gap,
        Self::Invlo,
        Self::Esd,
    ];

    /// Name used in config files and in the `experiment` CSV column.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Circlaw => "circlaw",
            Self::Sparse => "sparse",
            Self::Degenerate => "degenerate",
            Self::Lsv => "lsv",
            Self::Smallball => "smallball",
            Self::Gap => "gap",
            Self::Invlo => "invlo",
            Self::Esd => "esd",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// Comparison grid for `sup_distance`: `lo, lo + step, …, hi` on both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self { lo: -2.0, hi: 2.0, step: 0.02 }
    }
}

impl GridParams {
    pub fn points(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsvStatistic {
    SigmaMin,
    Condition,
}

impl LsvStatistic {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::SigmaMin => "sigma_min",
            Self::Condition => "condition",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsvParams {
    pub a: f64,
    /// Thresholds `B`; all are evaluated on the same samples.
    pub b_values: Vec<f64>,
    pub shift: Shift,
    pub statistic: LsvStatistic,
}

impl Default for LsvParams {
    fn default() -> Self {
        Self { a: 1.0, b_values: vec![1.0, 2.0, 3.0], shift: Shift::Zero, statistic: LsvStatistic::SigmaMin }
    }
}

/// Coefficient tuple of length `n` used by the small-ball and inverse
/// experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum TupleKind {
    /// `(1, …, 1)`.
    Ones,
    /// `(1, …, 1)/√n`.
    UnitOnes,
    /// I.i.d. complex Gaussian coordinates, normalised to unit length.
    Gaussian,
    /// Fixed coordinates; `n` is ignored.
    Explicit(Vec<Complex64>),
}

impl TupleKind {
    fn tag(&self) -> &'static str {
        match self {
            Self::Ones => "ones",
            Self::UnitOnes => "unit_ones",
            Self::Gaussian => "gaussian",
            Self::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallballParams {
    pub tuple: TupleKind,
    pub radius: f64,
    pub mu: f64,
    pub mc_samples: usize,
}

impl Default for SmallballParams {
    fn default() -> Self {
        Self { tuple: TupleKind::Ones, radius: 0.5, mu: 1.0, mc_samples: 100_000 }
    }
}

/// For each `L` in the size list the experiment studies
/// `GAP(generators, (L, …, L))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapParams {
    pub generators: Vec<Complex64>,
    /// Lacunarity ratio `K`.
    pub lacunary_k: f64,
    /// Radius `R` of the lacunary basis.
    pub radius: f64,
    pub c_r: f64,
    pub mu: f64,
    pub eps: f64,
}

impl Default for GapParams {
    fn default() -> Self {
        Self {
            generators: vec![Complex64::new(1.0, 0.0)],
            lacunary_k: 10.0,
            radius: 1.0,
            c_r: crate::gap::DEFAULT_LACUNARY_CONSTANT,
            mu: 1.0,
            eps: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvloParams {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub d_max: usize,
    pub vector: TupleKind,
    /// Constant `c` in the `exp(c·n/log n)` model of `exp(o(n))`.
    pub o_n_constant: f64,
}

impl Default for InvloParams {
    fn default() -> Self {
        Self { a: 1.0, b: 2.0, eps: 0.2, d_max: 10, vector: TupleKind::UnitOnes, o_n_constant: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub ensemble: AtomDistribution,
    /// Ascending sizes.
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridParams,
    pub sparse: Option<SparseSpec>,
    /// Points `(u, v)` where the empirical characteristic function is
    /// reported.
    pub charfn_points: Vec<(f64, f64)>,
    pub lsv: LsvParams,
    pub smallball: SmallballParams,
    pub gap: GapParams,
    pub invlo: InvloParams,
    pub output: Option<PathBuf>,
    /// Record wall-clock time in `runtime_ms`; otherwise it is 0 and the
    /// output is byte-reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    /// Defaults for `kind`. For the GAP experiment the size list holds the
    /// progression lengths `L`.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            ensemble: AtomDistribution::Bernoulli,
            n_list: match kind {
                ExperimentKind::Gap => vec![4, 8, 16, 32],
                ExperimentKind::Degenerate => vec![200],
                ExperimentKind::Smallball | ExperimentKind::Invlo => vec![16, 32, 64],
                _ => vec![64, 128, 256],
            },
            trials: 5,
            seed: 0,
            grid: GridParams::default(),
            sparse: match kind {
                ExperimentKind::Sparse => Some(SparseSpec::new(0.8).expect("valid alpha")),
                ExperimentKind::Degenerate => Some(SparseSpec::alpha_zero_limit()),
                _ => None,
            },
            charfn_points: vec![(0.5, 0.0), (0.0, 0.5), (1.0, 1.0)],
            lsv: LsvParams::default(),
            smallball: SmallballParams::default(),
            gap: GapParams::default(),
            invlo: InvloParams::default(),
            output: None,
            timing: false,
        }
    }

    /// Parses and validates a config file's text.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        let kind_value = entries
            .iter()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Config("missing `experiment` key".into()))?;
        let mut cfg = Self::new(kind_value.parse()?);
        let mut ens_kind: Option<String> = None;
        let mut ens_values: Option<Vec<Complex64>> = None;
        let mut ens_probs: Option<Vec<f64>> = None;
        let mut sb_values: Option<Vec<Complex64>> = None;
        let mut sb_tuple: Option<String> = None;
        let mut inv_values: Option<Vec<Complex64>> = None;
        let mut inv_vector: Option<String> = None;
        for (key, value) in &entries {
            let v = value.as_str();
            match key.as_str() {
                "experiment" => {}
                "ensemble.kind" => ens_kind = Some(v.to_string()),
                "ensemble.values" => ens_values = Some(parse_list(key, v)?),
                "ensemble.probs" => ens_probs = Some(parse_list(key, v)?),
                "n" => cfg.n_list = parse_list(key, v)?,
                "trials" => cfg.trials = parse_one(key, v)?,
                "seed" => cfg.seed = parse_one(key, v)?,
                "grid.lo" => cfg.grid.lo = parse_one(key, v)?,
                "grid.hi" => cfg.grid.hi = parse_one(key, v)?,
                "grid.step" => cfg.grid.step = parse_one(key, v)?,
                "sparse.alpha" => {
                    let alpha: f64 = parse_one(key, v)?;
                    cfg.sparse = Some(if alpha == 0.0 {
                        SparseSpec::alpha_zero_limit()
                    } else {
                        SparseSpec::new(alpha).map_err(|e| Error::Config(format!("sparse.alpha: {e}")))?
                    });
                }
                "circlaw.charfn" => cfg.charfn_points = parse_pairs(key, v)?,
                "lsv.a" => cfg.lsv.a = parse_one(key, v)?,
                "lsv.b" => cfg.lsv.b_values = parse_list(key, v)?,
                "lsv.shift" => cfg.lsv.shift = parse_shift(v)?,
                "lsv.statistic" => {
                    cfg.lsv.statistic = match v {
                        "sigma_min" => LsvStatistic::SigmaMin,
                        "condition" => LsvStatistic::Condition,
                        _ => return Err(Error::Config(format!("lsv.statistic: unknown value `{v}`"))),
                    }
                }
                "smallball.tuple" => sb_tuple = Some(v.to_string()),
                "smallball.values" => sb_values = Some(parse_list(key, v)?),
                "smallball.radius" => cfg.smallball.radius = parse_one(key, v)?,
                "smallball.mu" => cfg.smallball.mu = parse_one(key, v)?,
                "smallball.mc_samples" => cfg.smallball.mc_samples = parse_one(key, v)?,
                "gap.generators" => cfg.gap.generators = parse_list(key, v)?,
                "gap.k" => cfg.gap.lacunary_k = parse_one(key, v)?,
                "gap.radius" => cfg.gap.radius = parse_one(key, v)?,
                "gap.c_r" => cfg.gap.c_r = parse_one(key, v)?,
                "gap.mu" => cfg.gap.mu = parse_one(key, v)?,
                "gap.eps" => cfg.gap.eps = parse_one(key, v)?,
                "invlo.a" => cfg.invlo.a = parse_one(key, v)?,
                "invlo.b" => cfg.invlo.b = parse_one(key, v)?,
                "invlo.eps" => cfg.invlo.eps = parse_one(key, v)?,
                "invlo.d_max" => cfg.invlo.d_max = parse_one(key, v)?,
                "invlo.vector" => inv_vector = Some(v.to_string()),
                "invlo.values" => inv_values = Some(parse_list(key, v)?),
                "invlo.o_n" => cfg.invlo.o_n_constant = parse_one(key, v)?,
                "output" => cfg.output = Some(PathBuf::from(v)),
                "timing" => cfg.timing = parse_one(key, v)?,
                _ => return Err(Error::Config(format!("unknown key `{key}`"))),
            }
        }
        if let Some(kind) = ens_kind {
            cfg.ensemble = parse_ensemble(&kind, ens_values, ens_probs)?;
        } else if ens_values.is_some() || ens_probs.is_some() {
            return Err(Error::Config("ensemble.values/probs need ensemble.kind = discrete".into()));
        }
        if let Some(t) = sb_tuple {
            cfg.smallball.tuple = parse_tuple_kind("smallball", &t, sb_values)?;
        } else if sb_values.is_some() {
            return Err(Error::Config("smallball.values needs smallball.tuple = explicit".into()));
        }
        if let Some(t) = inv_vector {
            cfg.invlo.vector = parse_tuple_kind("invlo", &t, inv_values)?;
        } else if inv_values.is_some() {
            return Err(Error::Config("invlo.values needs invlo.vector = explicit".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks the invariants every runner relies on.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_list.is_empty() {
            return bad("n must list at least one size".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n must be strictly ascending".into());
        }
        if self.n_list[0] == 0 {
            return bad("sizes must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.grid.step > 0.0) || !(self.grid.hi > self.grid.lo) {
            return bad("grid needs lo < hi and a positive step".into());
        }
        let needs_variance = matches!(
            self.kind,
            ExperimentKind::Circlaw | ExperimentKind::Sparse | ExperimentKind::Degenerate | ExperimentKind::Esd
        );
        if needs_variance && !(self.ensemble.variance() > 0.0) {
            return bad(format!("ensemble {} has zero variance", self.ensemble.label()));
        }
        match self.kind {
            ExperimentKind::Sparse if self.sparse.is_none() => return bad("sparse runs need sparse.alpha".into()),
            ExperimentKind::Sparse if self.sparse.is_some_and(|s| s.alpha() == 0.0) => {
                return bad("sparse.alpha must lie in (0, 1]; use the degenerate experiment for 0".into())
            }
            ExperimentKind::Degenerate if self.n_list[0] < 50 => {
                return bad("the degenerate check needs n >= 50".into())
            }
            _ => {}
        }
        if self.lsv.b_values.is_empty() {
            return bad("lsv.b must list at least one threshold".into());
        }
        if !(self.smallball.radius >= 0.0) {
            return bad("smallball.radius must be non-negative".into());
        }
        for (name, mu) in [("smallball.mu", self.smallball.mu), ("gap.mu", self.gap.mu)] {
            if !(mu > 0.0 && mu <= 1.0) {
                return bad(format!("{name} must lie in (0, 1]"));
            }
        }
        if self.smallball.mc_samples == 0 {
            return bad("smallball.mc_samples must be positive".into());
        }
        if self.gap.generators.is_empty() {
            return bad("gap.generators must be nonempty".into());
        }
        if !(self.gap.lacunary_k >= 2.0) {
            return bad("gap.k must be at least 2".into());
        }
        if !(self.invlo.eps > 0.0 && self.invlo.eps < 0.5) {
            return bad("invlo.eps must lie in (0, 1/2)".into());
        }
        Ok(())
    }

    /// Serialises every setting; `parse` of the result reproduces `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("experiment", self.kind.tag().into());
        for (k, v) in ensemble_entries(&self.ensemble) {
            put(k, v);
        }
        put("n", join(&self.n_list));
        put("trials", self.trials.to_string());
        put("seed", self.seed.to_string());
        put("grid.lo", self.grid.lo.to_string());
        put("grid.hi", self.grid.hi.to_string());
        put("grid.step", self.grid.step.to_string());
        if let Some(sp) = &self.sparse {
            put("sparse.alpha", sp.alpha().to_string());
        }
        put(
            "circlaw.charfn",
            self.charfn_points.iter().map(|(u, v)| format!("{u}:{v}")).collect::<Vec<_>>().join(", "),
        );
        put("lsv.a", self.lsv.a.to_string());
        put("lsv.b", join(&self.lsv.b_values));
        put(
            "lsv.shift",
            match &self.lsv.shift {
                Shift::Scalar(z) => z.to_string(),
                _ => "zero".into(),
            },
        );
        put("lsv.statistic", self.lsv.statistic.tag().into());
        put("smallball.tuple", self.smallball.tuple.tag().into());
        if let TupleKind::Explicit(v) = &self.smallball.tuple {
            put("smallball.values", join(v));
        }
        put("smallball.radius", self.smallball.radius.to_string());
        put("smallball.mu", self.smallball.mu.to_string());
        put("smallball.mc_samples", self.smallball.mc_samples.to_string());
        put("gap.generators", join(&self.gap.generators));
        put("gap.k", self.gap.lacunary_k.to_string());
        put("gap.radius", self.gap.radius.to_string());
        put("gap.c_r", self.gap.c_r.to_string());
        put("gap.mu", self.gap.mu.to_string());
        put("gap.eps", self.gap.eps.to_string());
        put("invlo.a", self.invlo.a.to_string());
        put("invlo.b", self.invlo.b.to_string());
        put("invlo.eps", self.invlo.eps.to_string());
        put("invlo.d_max", self.invlo.d_max.to_string());
        put("invlo.vector", self.invlo.vector.tag().into());
        if let TupleKind::Explicit(v) = &self.invlo.vector {
            put("invlo.values", join(v));
        }
        put("invlo.o_n", self.invlo.o_n_constant.to_string());
        if let Some(p) = &self.output {
            put("output", p.display().to_string());
        }
        put("timing", self.timing.to_string());
        s
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// `(key, value)` pairs in file order; duplicate keys are an error.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            return Err(Error::Config(format!("line {}: invalid key `{k}`", lineno + 1)));
        }
        if out.iter().any(|(e, _)| e == k) {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_one(key, x)).collect()
}

fn parse_pairs(key: &str, v: &str) -> Result<Vec<(f64, f64)>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("{key}: expected `u:v`, got `{}`", p.trim())))?;
            Ok((parse_one(key, a)?, parse_one(key, b)?))
        })
        .collect()
}

fn parse_shift(v: &str) -> Result<Shift> {
    match v {
        "zero" | "0" => Ok(Shift::Zero),
        _ => Ok(Shift::Scalar(parse_one("lsv.shift", v)?)),
    }
}

fn parse_tuple_kind(section: &str, kind: &str, values: Option<Vec<Complex64>>) -> Result<TupleKind> {
    let t = match kind {
        "ones" => TupleKind::Ones,
        "unit_ones" => TupleKind::UnitOnes,
        "gaussian" => TupleKind::Gaussian,
        "explicit" => {
            let v = values.ok_or_else(|| Error::Config(format!("{section}: explicit tuple needs values")))?;
            if v.is_empty() {
                return Err(Error::Config(format!("{section}.values must be nonempty")));
            }
            return Ok(TupleKind::Explicit(v));
        }
        _ => return Err(Error::Config(format!("{section}: unknown tuple kind `{kind}`"))),
    };
    if values.is_some() {
        return Err(Error::Config(format!("{section}.values only applies to explicit tuples")));
    }
    Ok(t)
}

/// Builds an entry law from its config descriptor.
pub fn parse_ensemble(kind: &str, values: Option<Vec<Complex64>>, probs: Option<Vec<f64>>) -> Result<AtomDistribution> {
    let simple = |d: AtomDistribution| {
        if values.is_some() || probs.is_some() {
            Err(Error::Config(format!("ensemble.values/probs do not apply to `{kind}`")))
        } else {
            Ok(d)
        }
    };
    match kind {
        "bernoulli" => simple(AtomDistribution::Bernoulli),
        "real_gaussian" => simple(AtomDistribution::RealGaussian),
        "complex_gaussian" => simple(AtomDistribution::ComplexGaussian),
        "discrete" => {
            let values = values.ok_or_else(|| Error::Config("discrete ensemble needs ensemble.values".into()))?;
            let probs = match probs {
                Some(p) => p,
                None => vec![1.0 / values.len() as f64; values.len()],
            };
            AtomDistribution::discrete(values, probs).map_err(|e| Error::Config(e.to_string()))
        }
        _ => Err(Error::Config(format!("unknown ensemble kind `{kind}`"))),
    }
}

/// Config entries describing `dist`. Only the kinds [`parse_ensemble`]
/// accepts round-trip; other laws are written by label.
pub fn ensemble_entries(dist: &AtomDistribution) -> Vec<(&'static str, String)> {
    match dist {
        AtomDistribution::Discrete { values, probs } => vec![
            ("ensemble.kind", "discrete".into()),
            ("ensemble.values", join(values)),
            ("ensemble.probs", join(probs)),
        ],
        other => vec![("ensemble.kind", other.label())],
    }
}
