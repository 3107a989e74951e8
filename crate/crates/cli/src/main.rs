//! Command-line runner: one experiment per invocation, configured by a TOML
//! file, writing a JSON report and CSV tables.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use muntz_lab::config::Config;
use muntz_lab::par::Exec;
use muntz_lab::verify::{
    run_counterexample_growth, run_embedding_corollaries, run_necessity_check, run_norm_report, run_sequence_report,
    run_theorem_a_check, run_theorem_b_check, run_typeconst_report, ExperimentReport, RunOpts, Status,
};
use muntz_lab::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "muntz-lab", version, about = "Type-constant and interpolation experiments on Muntz spaces")]
struct Cli {
    /// TOML experiment file (schema_version = 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides [experiment].seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving the JSON report and CSV tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// What is echoed on stdout: the JSON report or the verdicts as CSV.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    /// Exponent sequence and block partition.
    Seq,
    /// Moments, moment conditions and L^p norms for the configured measure.
    Norm,
    /// Restricted (or sampled global) type constants of the operator.
    Typeconst,
    /// Strong type from restricted weak types, beta >= 1.
    #[command(name = "thmA")]
    ThmA,
    /// Strong type from restricted weak types with decaying constants, beta < 1.
    #[command(name = "thmB")]
    ThmB,
    /// Growth of the counterexample kernels on dyadic N.
    Growth,
    /// Summability of the per-block ratios of a positive operator.
    Necessity,
    /// Moment conditions against boundedness of the identity embedding.
    Embed,
    /// Summarise every report in the output directory.
    Report,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AccuracyFailure { .. }
            | Error::Nonconvergence { .. }
            | Error::Truncation { .. }
            | Error::UndefinedConstant(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn exit_for(status: Status) -> u8 {
    match status {
        Status::Pass => 0,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn exec_for(parallel: Option<usize>) -> Result<Exec, Failure> {
    match parallel {
        None => Ok(Exec::default()),
        Some(0) => Err(Failure::Usage("--parallel needs at least one thread".into())),
        Some(1) => Ok(Exec::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
            #[cfg(not(feature = "parallel"))]
            eprintln!("built without the parallel feature; ignoring --parallel {n}");
            Ok(Exec::Parallel)
        }
    }
}

fn run_experiment(cmd: Cmd, cfg: &Config, opts: &RunOpts) -> Result<ExperimentReport, Failure> {
    let ex = &cfg.experiment;
    let part = cfg.partition()?;
    let rep = match cmd {
        Cmd::Seq => run_sequence_report(&part, opts.seed)?,
        Cmd::Norm => {
            let p = ex.s.or(ex.p).unwrap_or(2.0);
            run_norm_report(&part, &cfg.mu()?, p, ex.alpha, ex.beta, ex.coefficients.as_deref(), opts.seed)?
        }
        Cmd::Typeconst => {
            let op = cfg.operator(&part)?;
            let ic = ex.norms(cfg.mu()?)?;
            run_typeconst_report(ex.kind, &op, &part, &ic, ex.exponent()?, ex.k_max, ex.family_size, opts)?
        }
        Cmd::ThmA => {
            let op = cfg.operator(&part)?;
            run_theorem_a_check(&op, &part, &ex.interpolation(cfg.mu()?)?, ex.family_size, opts)?
        }
        Cmd::ThmB => {
            let op = cfg.operator(&part)?;
            run_theorem_b_check(&op, &part, &ex.interpolation(cfg.mu()?)?, ex.family_size, opts)?
        }
        Cmd::Growth => run_counterexample_growth(ex.which, &ex.counterexample()?, &ex.n_list, opts)?,
        Cmd::Necessity => {
            let op = cfg.operator(&part)?;
            run_necessity_check(&op, &part, &ex.interpolation(cfg.mu()?)?, ex.k_max, opts)?
        }
        Cmd::Embed => {
            let p = ex.p.ok_or_else(|| Failure::Usage("[experiment] needs p".into()))?;
            run_embedding_corollaries(&cfg.mu()?, &part, ex.alpha, ex.beta, p, &ex.r_list, opts)?
        }
        Cmd::Report => unreachable!("handled separately"),
    };
    Ok(rep)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if cli.cmd == Cmd::Report {
        let (summary, status) = output::summarise(&cli.out)?;
        output::echo_summary(&summary, cli.format)?;
        return Ok(exit_for(status));
    }
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let exec = exec_for(cli.parallel)?;
    let seed = cli.seed.or(cfg.experiment.seed).unwrap_or(0);
    let mut opts = RunOpts::new(seed, exec);
    opts.tol = cfg.experiment.tolerances;
    if let Some(n) = cfg.experiment.restarts {
        opts.sphere.restarts = n;
    }
    if let Some(n) = cfg.experiment.sphere_samples {
        opts.sphere.samples = n;
    }
    let rep = run_experiment(cli.cmd, &cfg, &opts)?;
    output::write_report(&cli.out, &rep)?;
    output::echo_report(&rep, cli.format)?;
    Ok(exit_for(rep.status))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("inconclusive: {msg}");
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
    }
}
