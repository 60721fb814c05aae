//! `grover-opt`: run seeded optimization experiments and write CSV.
//!
//! Exit status is 0 on success, 2 for invalid settings and 1 for I/O or
//! other runtime failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grover_opt::algorithms::Algorithm;
use grover_opt::bench::{
    default_effort_grid, performance_curve, run_batch, summarize, table_sweep, write_curve_csv,
    write_records_csv, write_table_csv, ExperimentConfig, Mode, TableRow, DEFAULT_REPETITIONS,
};
use grover_opt::localopt::Routine;
use grover_opt::testbed::TestFunction;
use grover_opt::Error;

#[derive(Parser)]
#[command(name = "grover-opt", version, about = "Simulated Grover-search global optimization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its summary row.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Also write one row per repetition to this file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Run one configuration and write its success-versus-effort curve.
    Curve {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Sweep functions, algorithms and routines at one arity.
    Table {
        /// Number of variables.
        #[arg(long)]
        n: usize,
        /// Grid points per axis.
        #[arg(long)]
        points: usize,
        /// Comma-separated function names; defaults to every registered function.
        #[arg(long = "fns", value_delimiter = ',')]
        functions: Vec<String>,
        #[arg(long = "algs", value_delimiter = ',', default_value = "hybrid,bbw,dh")]
        algorithms: Vec<Algorithm>,
        /// Local routines tried by the hybrid algorithm.
        #[arg(long, value_delimiter = ',', default_value = "nmead,lbfgs,qmodel")]
        routines: Vec<Routine>,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "run-to-optimum")]
        mode: Mode,
        /// Keep functions that are constant at this arity.
        #[arg(long)]
        include_degenerate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// Test function name.
    #[arg(long = "fn")]
    function: String,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Grid points per axis.
    #[arg(long)]
    points: usize,
    #[arg(long = "alg")]
    algorithm: Algorithm,
    /// Local routine for the hybrid algorithm (default qmodel).
    #[arg(long)]
    routine: Option<Routine>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "terminated")]
    mode: Mode,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(&self.function, self.n, self.points, self.algorithm);
        cfg.routine = self.routine;
        cfg.repetitions = self.reps;
        cfg.seed = self.seed;
        cfg.mode = self.mode;
        cfg.output = self.out.clone();
        cfg
    }
}

fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { exp, records } => {
            let cfg = exp.config();
            let runs = run_batch(&cfg)?;
            let row = TableRow::new(&cfg, &summarize(&runs)?);
            write_table_csv(&[row], open(cfg.output.as_deref())?)?;
            if let Some(path) = records {
                write_records_csv(&runs, open(Some(&path))?)?;
            }
        }
        Command::Curve { exp } => {
            let cfg = exp.config();
            let runs = run_batch(&cfg)?;
            let curve = performance_curve(&runs, &default_effort_grid(&runs))?;
            write_curve_csv(&curve, open(cfg.output.as_deref())?)?;
        }
        Command::Table {
            n,
            points,
            functions,
            algorithms,
            routines,
            reps,
            seed,
            mode,
            include_degenerate,
            out,
        } => {
            let names: Vec<&str> = if functions.is_empty() {
                TestFunction::NAMES.to_vec()
            } else {
                functions.iter().map(String::as_str).collect()
            };
            let mut base = ExperimentConfig::new(names.first().copied().unwrap_or_default(), n, points, Algorithm::Hybrid);
            base.repetitions = reps;
            base.seed = seed;
            base.mode = mode;
            let rows = table_sweep(&base, &names, &algorithms, &routines, include_degenerate)?;
            write_table_csv(&rows, open(out.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grover-opt: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
