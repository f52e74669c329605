//! Result rows and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Exact CSV header.
pub const CSV_HEADER: [&str; 8] = ["experiment", "n", "trial", "seed", "statistic", "value", "stderr", "runtime_ms"];

/// Trial index used for rows aggregated over all trials of one size.
pub const AGGREGATE_TRIAL: i64 = -1;

/// Statistic name of the row recorded for a failed trial.
pub const ERROR_STATISTIC: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub n: usize,
    /// `-1` for aggregates.
    pub trial: i64,
    pub seed: u64,
    pub statistic: String,
    pub value: f64,
    /// NaN when not applicable.
    pub stderr: f64,
    pub runtime_ms: u64,
}

impl ResultRow {
    pub fn new(experiment: &str, n: usize, trial: i64, seed: u64, statistic: impl Into<String>, value: f64, stderr: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            n,
            trial,
            seed,
            statistic: statistic.into(),
            value,
            stderr,
            runtime_ms: 0,
        }
    }
}

/// 17 significant digits: every `f64` round-trips exactly.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.experiment.as_str(),
            &r.n.to_string(),
            &r.trial.to_string(),
            &r.seed.to_string(),
            r.statistic.as_str(),
            &format_float(r.value),
            &format_float(r.stderr),
            &r.runtime_ms.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_rows(std::fs::File::create(path)?, rows)
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |m: String| Error::InsufficientData(m);
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(bad(format!("unexpected CSV header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k).parse().map_err(|_| bad(format!("row {}: bad number `{}`", i + 2, field(k))))
        };
        let int = |k: usize| -> Result<i128> {
            field(k).parse().map_err(|_| bad(format!("row {}: bad integer `{}`", i + 2, field(k))))
        };
        rows.push(ResultRow {
            experiment: field(0).to_string(),
            n: int(1)? as usize,
            trial: int(2)? as i64,
            seed: int(3)? as u64,
            statistic: field(4).to_string(),
            value: num(5)?,
            stderr: num(6)?,
            runtime_ms: int(7)? as u64,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    read_rows(std::fs::File::open(path)?)
}
