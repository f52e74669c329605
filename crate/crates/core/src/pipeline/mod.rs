//! Experiment orchestration: configuration, runners and CSV output.

mod config;
mod rows;
mod runners;

pub use config::{
    parse_ensemble, parse_entries, ensemble_entries, ExperimentConfig, ExperimentKind, GapParams, GridParams,
    InvloParams, LsvParams, LsvStatistic, SmallballParams, TupleKind,
};
pub use rows::{format_float, read_csv, read_rows, write_csv, write_rows, ResultRow, AGGREGATE_TRIAL, CSV_HEADER, ERROR_STATISTIC};
pub use runners::{
    build_tuple, degenerate_alpha0_check, fit_rate, fit_rate_rows, resolve_jobs, run_circlaw, run_degenerate,
    run_esd, run_experiment, run_gap, run_invlo, run_lsv, run_smallball, run_sparse_circlaw, run_to_csv, RateFit,
    RunOutput, JOBS_ENV, ORIGIN_ATOM_TOL,
};
