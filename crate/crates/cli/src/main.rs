//! `circlaw` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
//! runtime failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use circlaw_core::pipeline::{
    fit_rate, resolve_jobs, run_experiment, write_csv, write_rows, ExperimentConfig, ExperimentKind,
};
use circlaw_core::Error;

#[derive(Parser, Debug)]
#[command(name = "circlaw", version, about = "Random matrix spectral experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalOpts {
    /// Experiment config file (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// CSV output path; overrides the config. Defaults to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Trials per size; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,
    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads (the CIRCLAW_JOBS variable takes precedence).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Record wall-clock milliseconds per trial.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dense circular-law convergence.
    Circlaw,
    /// Sparse circular law; a config with `experiment = degenerate` runs
    /// the `ρ = 1/n` check.
    Sparse,
    /// Least singular value and condition number tails.
    Lsv,
    /// Small-ball and concentration probabilities.
    Smallball,
    /// GAP enumeration, lacunary bases and the forward Littlewood-Offord
    /// trend.
    Gap,
    /// Rich/poor classification and structure search.
    Invlo,
    /// Eigenvalues of single samples.
    Esd,
    /// Fits `sup_distance ≈ C n^{-η′}` to a result CSV.
    Rate {
        /// CSV written by `circlaw` or `sparse`.
        csv: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run `circlaw --help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    let kind = match cli.command {
        Command::Rate { csv } => {
            let fit = fit_rate(&csv)?;
            println!("eta_prime = {:.6} r_squared = {:.6} sizes = {}", fit.eta_prime, fit.r_squared, fit.points.len());
            return Ok(());
        }
        Command::Circlaw => ExperimentKind::Circlaw,
        Command::Sparse => ExperimentKind::Sparse,
        Command::Lsv => ExperimentKind::Lsv,
        Command::Smallball => ExperimentKind::Smallball,
        Command::Gap => ExperimentKind::Gap,
        Command::Invlo => ExperimentKind::Invlo,
        Command::Esd => ExperimentKind::Esd,
    };
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::new(kind),
    };
    let compatible = cfg.kind == kind || (kind == ExperimentKind::Sparse && cfg.kind == ExperimentKind::Degenerate);
    if !compatible {
        return Err(Failure::Usage(format!(
            "config describes a `{}` experiment, not `{}`",
            cfg.kind.tag(),
            kind.tag()
        )));
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(o) = g.out {
        cfg.output = Some(o);
    }
    cfg.timing |= g.timing;
    cfg.validate()?;
    let jobs = resolve_jobs(g.jobs)?;
    let out = run_experiment(&cfg, jobs)?;
    match &cfg.output {
        Some(path) => write_csv(path, &out.rows)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_rows(&mut lock, &out.rows)?;
            lock.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    for f in &out.failures {
        eprintln!("trial failed: {f}");
    }
    if !g.quiet {
        let dest = cfg.output.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
        eprintln!(
            "{}: {} rows, {} failed trials, written to {dest}",
            cfg.kind.tag(),
            out.rows.len(),
            out.failures.len()
        );
    }
    Ok(())
}
