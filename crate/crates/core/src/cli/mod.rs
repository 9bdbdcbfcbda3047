//! Command-line front end: `eval`, `verify` and `experiment`.

pub mod config;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{eval_run, run_experiment, write_report, Experiment, ExperimentReport, ReportFormat};
use crate::qcore::Warning;
pub use config::{Resolved, RunConfig, DEFAULT_SEED};
pub use verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qdunkl",
    version,
    about = "q-Dunkl Kantorovich-Szasz-Mirakjan operators of Stancu type"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate T*_n f (and optionally D_n f) on the grid.
    Eval,
    /// Run an invariant suite: moments, integrals, gamma or moduli.
    Verify { suite: String },
    /// Run an experiment: korovkin, modulus, lipschitz, smooth, second_order or weighted.
    Experiment { name: String },
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Fixed q in (0, 1); excludes --qn-scheme.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// one_minus_inv[(offset)], one_minus_inv_sqrt or fixed(q).
    #[arg(long, global = true)]
    pub qn_scheme: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Comma-separated list of n.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// const, monomial(p), exp_decay(c), sine, abs_shift(x0), holder_cusp(nu[,center]).
    #[arg(long, global = true)]
    pub f: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub x0: Option<f64>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    /// Evaluation grid lo:hi:points.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Weighted-modulus range lo:hi:points.
    #[arg(long, global = true)]
    pub weighted_grid: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub fine_factor: Option<usize>,
    #[arg(long, global = true)]
    pub domain_margin: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true, env = "QDUNKL_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Add moment rows to `eval`.
    #[arg(long, global = true)]
    pub moments: bool,
    /// Add D_n f rows to `eval`.
    #[arg(long, global = true)]
    pub with_d: bool,
}

impl Opts {
    fn to_run_config(&self) -> RunConfig {
        RunConfig {
            q: self.q,
            qn_scheme: self.qn_scheme.clone(),
            mu: self.mu,
            n: self.n,
            n_list: self.n_list.clone(),
            alpha: self.alpha,
            beta: self.beta,
            f: self.f.clone(),
            p: self.p,
            c: self.c,
            x0: self.x0,
            nu: self.nu,
            grid: self.grid.clone(),
            weighted_grid: self.weighted_grid.clone(),
            tol: self.tol,
            fine_factor: self.fine_factor,
            domain_margin: self.domain_margin,
            out: self.out.clone(),
            format: self.format.clone(),
            threads: self.threads,
            seed: self.seed,
            moments: self.moments.then_some(true),
            with_d: self.with_d.then_some(true),
        }
    }
}

/// Exit code for an error: numeric failures are 3, everything else 2.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_CONFIG
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn resolve(opts: &Opts) -> Result<Resolved> {
    let base = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    base.merge(opts.to_run_config()).resolve()
}

fn warnings(cfg: &Resolved, uses_f: bool) -> Vec<Warning> {
    let e = &cfg.experiment;
    let mut w = Vec::new();
    if e.mu <= 0.5 {
        w.push(Warning::MuBelowHalf);
    }
    if e.alpha > e.beta {
        w.push(Warning::AlphaExceedsBeta);
    }
    if uses_f && !e.f.meta().is_nondecreasing {
        w.push(Warning::NonMonotoneFunction);
    }
    w
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = resolve(&cli.opts)?;
    let command = match &cli.command {
        Command::Eval => None,
        Command::Verify { suite } => Some(Ok(suite.parse::<Suite>()?)),
        Command::Experiment { name } => Some(Err(name.parse::<Experiment>()?)),
    };
    let warned: Vec<String> = warnings(&cfg, !matches!(command, Some(Ok(_))))
        .iter()
        .map(Warning::to_string)
        .collect();
    for w in &warned {
        eprintln!("warning: {w}");
    }
    let work = || -> Result<(ExperimentReport, bool)> {
        match command {
            None => Ok((eval_run(&cfg.experiment, cfg.with_d, cfg.moments)?, true)),
            Some(Ok(suite)) => Ok((run_suite(suite, &cfg)?, false)),
            Some(Err(exp)) => {
                let mut report = run_experiment(exp, &cfg.experiment)?;
                for (k, v) in cfg.echo() {
                    report.config.entry(k).or_insert(v);
                }
                Ok((report, exp.is_estimate()))
            }
        }
    };
    let (report, informational) = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    for note in report.summary.notes.iter().filter(|n| !warned.contains(n)) {
        eprintln!("note: {note}");
    }
    match &cfg.out {
        Some(path) => write_report(&report, path, cfg.format)?,
        None => match cfg.format {
            ReportFormat::Csv => print!("{}", report.to_csv()),
            ReportFormat::Json => print!("{}", report.to_json()?),
        },
    }
    if informational || report.summary.all_pass {
        Ok(EXIT_OK)
    } else {
        if report.summary.trend_ok == Some(false) {
            eprintln!("fail: errors do not decrease along n_list");
        }
        for row in report.failures().take(10) {
            eprintln!(
                "fail: n={} x={:?} {} lhs={:e} rhs={:?}",
                row.n, row.x, row.quantity, row.lhs, row.rhs
            );
        }
        Ok(EXIT_BOUND_FAILURE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_map_to_config() {
        let cli = Cli::try_parse_from(["qdunkl", "eval", "--q", "0.9", "--n-list", "5,10", "--moments"]).unwrap();
        let c = cli.opts.to_run_config();
        assert_eq!(c.q, Some(0.9));
        assert_eq!(c.n_list, Some(vec![5, 10]));
        assert_eq!(c.moments, Some(true));
        assert_eq!(c.with_d, None);
    }

    #[test]
    fn bad_values_exit_with_config_code() {
        assert_eq!(run_from(["qdunkl", "verify", "nothing"]), EXIT_CONFIG);
        assert_eq!(run_from(["qdunkl", "eval", "--q", "1.5"]), EXIT_CONFIG);
        assert_eq!(run_from(["qdunkl", "eval", "--threads", "0"]), EXIT_CONFIG);
    }
}
