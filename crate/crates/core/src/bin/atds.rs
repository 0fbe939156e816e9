//! Command-line front end: `solve`, `bench`, `sweep`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use atds::cadzow::CadzowConfig;
use atds::experiments::{self, Algorithm, TrialBatch, TrialConfig};
use atds::{io as tuple_io, shrt, tuple, Result};

#[derive(Parser)]
#[command(
    name = "atds",
    version,
    about = "Approximate simultaneous diagonalization of matrix tuples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diagonalize a tuple read from a file and print S with diagnostics
    Solve {
        /// Tuple file ('n K' header followed by K blocks of n rows)
        input: PathBuf,
        #[arg(long, default_value = "atds")]
        algorithm: Algorithm,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run one configuration for a number of seeded trials and write CSV
    Bench {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
        snr_db: f64,
        #[arg(long, default_value_t = 5.0)]
        kappa: f64,
        #[arg(long, default_value = "atds")]
        algorithm: Algorithm,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Grid over SNR x kappa x algorithm, CSV out
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0,10,20,30,40,50",
            allow_negative_numbers = true
        )]
        snr_db: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "5,50")]
        kappa: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "atds,shrt")]
        algorithm: Vec<Algorithm>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long = "k", default_value_t = 20)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
    thresholds: Vec<f64>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 for every wall-clock column so reruns are byte-identical
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 20_000)]
    t_max: usize,
    #[arg(long, default_value_t = tuple::DEFAULT_SD_TOL)]
    tol: f64,
}

impl SolverArgs {
    fn cadzow(&self) -> CadzowConfig {
        CadzowConfig {
            epsilon: self.epsilon,
            t_max: self.t_max,
            rank_target: None,
        }
    }
}

fn base_config(p: &ProblemArgs, s: &SolverArgs) -> TrialConfig {
    TrialConfig {
        n: p.n,
        k: p.k,
        seed: p.seed,
        thresholds: p.thresholds.clone(),
        cadzow: s.cadzow(),
        tol: s.tol,
        record_timing: !p.no_timing,
        ..TrialConfig::default()
    }
}

fn emit(p: &ProblemArgs, batches: &[TrialBatch]) -> Result<()> {
    match &p.out {
        Some(path) => experiments::write_csv(BufWriter::new(File::create(path)?), batches),
        None => experiments::write_csv(io::stdout().lock(), batches),
    }
}

fn solve(input: &PathBuf, algorithm: Algorithm, s: &SolverArgs) -> Result<()> {
    let a = tuple_io::read_tuple(input)?;
    let mut out = io::stdout().lock();
    let (result, extra) = match algorithm {
        Algorithm::Atds => {
            let o = atds::atds_solve(&a, &s.cadzow(), s.tol)?;
            let extra = format!(
                "branch {}\nt_end {}\ncadzow_residual {:e}\napprox_error {:e}\n",
                o.branch.as_str(),
                o.cadzow_trace.t_end,
                o.cadzow_trace.residuals.last().copied().unwrap_or(0.0),
                o.approximation_error
            );
            (atds::DiagonalizerResult::evaluate(o.s, &o.a_tilde)?, extra)
        }
        Algorithm::Shrt => {
            let r = shrt::shrt_run(&a, shrt::DEFAULT_MAX_UPDATES, shrt::DEFAULT_REL_TOL)?;
            (r.result, format!("updates {}\n", r.updates))
        }
    };
    let s_tuple = atds::MatrixTuple::new(vec![result.s.clone()])?;
    writeln!(out, "# S")?;
    write!(out, "{}", tuple_io::format_tuple(&s_tuple))?;
    writeln!(out, "# diagnostics")?;
    write!(out, "{extra}")?;
    writeln!(
        out,
        "off {:e}",
        tuple::off_objective(&a, &result.s).unwrap_or(f64::NAN)
    )?;
    writeln!(out, "cond_S {:e}", result.cond_s)?;
    for (k, l) in result.lambdas.iter().enumerate() {
        let row: Vec<String> = l.iter().map(|&z| tuple_io::format_entry(z)).collect();
        writeln!(out, "lambda_{} {}", k + 1, row.join(" "))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            input,
            algorithm,
            solver,
        } => solve(&input, algorithm, &solver),
        Command::Bench {
            problem,
            snr_db,
            kappa,
            algorithm,
            solver,
        } => {
            let cfg = TrialConfig {
                snr_db,
                kappa,
                algorithm,
                ..base_config(&problem, &solver)
            };
            let batch = experiments::run_trials(&cfg, problem.trials)?;
            emit(&problem, &[batch])
        }
        Command::Sweep {
            problem,
            snr_db,
            kappa,
            algorithm,
            solver,
        } => {
            let base = base_config(&problem, &solver);
            let batches = experiments::sweep(&base, &snr_db, &kappa, &algorithm, problem.trials)?;
            emit(&problem, &batches)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
