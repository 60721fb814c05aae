//! Seeded experiment batches, summary statistics, performance curves and
//! their CSV forms.
//!
//! Repetition `k` of a batch with master seed `s` always uses stream `k` of
//! the generator seeded by `s`, and results are gathered in repetition
//! order, so a batch is bit-for-bit reproducible regardless of how many
//! threads run it.
//!
//! CSV headers:
//!
//! * tables: `function,n,P,algorithm,routine,mean_evals,stddev_evals,success_rate,reps,seed`
//! * curves: `effort,success_prob,samples`
//! * per-run records: `rep,found_index,found_value,success,n1,n2,measurements,first_hit_effort`

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{gas_minimize, hybrid_minimize, Algorithm, RunRecord, Schedule, StopRule};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::localopt::{LocalOptimizerConfig, Routine};
use crate::oracle::{cache, DiscretizedObjective, EffortLedger};
use crate::rng::run_rng;
use crate::testbed::TestFunction;

pub const DEFAULT_REPETITIONS: usize = 1000;
pub const CURVE_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Each algorithm's own termination condition.
    Terminated,
    /// Termination disabled; run until the grid minimum is found.
    RunToOptimum,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Terminated => "terminated",
            Mode::RunToOptimum => "run-to-optimum",
        }
    }

    fn stop_rule(self) -> StopRule {
        match self {
            Mode::Terminated => StopRule::Default,
            Mode::RunToOptimum => StopRule::RunToOptimum,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "terminated" => Ok(Mode::Terminated),
            "run-to-optimum" => Ok(Mode::RunToOptimum),
            other => Err(Error::UnknownName {
                kind: "mode",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub function: String,
    pub n: usize,
    pub points_per_axis: usize,
    pub algorithm: Algorithm,
    /// Local routine; only used by the hybrid algorithm, where it defaults
    /// to `qmodel`.
    pub routine: Option<Routine>,
    pub repetitions: usize,
    pub seed: u64,
    pub mode: Mode,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(function: &str, n: usize, points_per_axis: usize, algorithm: Algorithm) -> Self {
        Self {
            function: function.to_string(),
            n,
            points_per_axis,
            algorithm,
            routine: None,
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
            mode: Mode::Terminated,
            output: None,
        }
    }

    /// Routine actually used, `None` for the purely quantum algorithms.
    pub fn effective_routine(&self) -> Option<Routine> {
        match self.algorithm {
            Algorithm::Hybrid => Some(self.routine.unwrap_or(Routine::QuadModel)),
            _ => None,
        }
    }

    /// Checks every field and resolves the function.
    pub fn validate(&self) -> Result<TestFunction> {
        let f: TestFunction = self.function.parse().map_err(|_| {
            Error::config(
                "function",
                format!(
                    "unknown function `{}`; expected one of {}",
                    self.function,
                    TestFunction::NAMES.join(", ")
                ),
            )
        })?;
        if !f.arity_range().contains(&self.n) {
            return Err(Error::config(
                "n",
                format!("{} does not support n = {}", f.name(), self.n),
            ));
        }
        if self.points_per_axis < 2 {
            return Err(Error::config("points", "need at least 2 points per axis"));
        }
        if self.repetitions < 1 {
            return Err(Error::config("reps", "need at least one repetition"));
        }
        let len = (self.points_per_axis as u128).checked_pow(self.n as u32);
        if len.is_none_or(|len| len > crate::oracle::MAX_POINTS as u128) {
            return Err(Error::config(
                "points",
                format!(
                    "{}^{} grid points exceed the limit of {}",
                    self.points_per_axis,
                    self.n,
                    crate::oracle::MAX_POINTS
                ),
            ));
        }
        Ok(f)
    }

    pub fn grid(&self, f: &TestFunction) -> Result<GridSpec> {
        GridSpec::new(f.domain_for(self.n)?, self.points_per_axis)
    }
}

/// A validated configuration together with its materialized objective.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub function: TestFunction,
    pub objective: DiscretizedObjective,
}

/// Validates `cfg` and builds (or loads from the cache directory named by
/// `GROVER_OPT_CACHE_DIR`) its objective table.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let function = cfg.validate()?;
    let grid = cfg.grid(&function)?;
    let objective = cache::load_or_build(&function, grid, cache::cache_dir_from_env().as_deref())?;
    Ok(Prepared { function, objective })
}

pub fn run_batch(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let prepared = prepare(cfg)?;
    run_batch_on(cfg, &prepared)
}

/// Runs `cfg.repetitions` independent repetitions against an already
/// prepared objective.
pub fn run_batch_on(cfg: &ExperimentConfig, prepared: &Prepared) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let d = &prepared.objective;
    let stop = cfg.mode.stop_rule();
    let local = cfg
        .effective_routine()
        .map(|routine| LocalOptimizerConfig::for_grid(routine, d.grid()));
    (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut rng = run_rng(cfg.seed, rep as u64);
            let mut ledger = EffortLedger::new();
            match cfg.algorithm {
                Algorithm::Dh => Ok(gas_minimize(d, Schedule::Dh, &mut rng, &mut ledger, stop)),
                Algorithm::Bbw => Ok(gas_minimize(d, Schedule::Bbw, &mut rng, &mut ledger, stop)),
                Algorithm::Hybrid => hybrid_minimize(
                    d,
                    &prepared.function,
                    local.as_ref().expect("hybrid has a routine"),
                    &mut rng,
                    &mut ledger,
                    stop,
                ),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    /// Mean of `n1 + n2` over runs.
    pub mean_evals: f64,
    /// Population standard deviation of `n1 + n2`.
    pub stddev_evals: f64,
    pub success_rate: f64,
    pub reps: usize,
}

pub fn summarize(records: &[RunRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::config("records", "cannot summarize an empty batch"));
    }
    let count = records.len() as f64;
    let evals: Vec<f64> = records.iter().map(|r| r.ledger.evaluations() as f64).collect();
    let mean = evals.iter().sum::<f64>() / count;
    let var = evals.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / count;
    let successes = records.iter().filter(|r| r.success).count();
    Ok(Summary {
        mean_evals: mean,
        stddev_evals: var.sqrt(),
        success_rate: successes as f64 / count,
        reps: records.len(),
    })
}

/// Empirical first-passage success probability against effort.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceCurve {
    pub efforts: Vec<u64>,
    pub success_prob: Vec<f64>,
    pub samples: usize,
}

/// `CURVE_POINTS` log-spaced integer efforts from 1 to the largest effort
/// any run spent, deduplicated after rounding.
pub fn default_effort_grid(records: &[RunRecord]) -> Vec<u64> {
    let max = records
        .iter()
        .map(|r| r.ledger.effort())
        .max()
        .unwrap_or(1)
        .max(1);
    let top = (max as f64).ln();
    let mut grid: Vec<u64> = (0..CURVE_POINTS)
        .map(|i| (top * i as f64 / (CURVE_POINTS - 1) as f64).exp().round() as u64)
        .collect();
    grid[CURVE_POINTS - 1] = max;
    grid.dedup();
    grid
}

pub fn performance_curve(records: &[RunRecord], efforts: &[u64]) -> Result<PerformanceCurve> {
    if records.is_empty() {
        return Err(Error::config("records", "cannot build a curve from an empty batch"));
    }
    let mut hits: Vec<u64> = records.iter().filter_map(|r| r.first_hit_effort).collect();
    hits.sort_unstable();
    let count = records.len() as f64;
    let success_prob = efforts
        .iter()
        .map(|&e| hits.partition_point(|&h| h <= e) as f64 / count)
        .collect();
    Ok(PerformanceCurve {
        efforts: efforts.to_vec(),
        success_prob,
        samples: records.len(),
    })
}

/// Smallest effort at which at least a fraction `p` of runs had reached the
/// optimum, or `None` if they never did.
pub fn effort_at_probability(records: &[RunRecord], p: f64) -> Option<u64> {
    let mut hits: Vec<u64> = records.iter().filter_map(|r| r.first_hit_effort).collect();
    hits.sort_unstable();
    let needed = (p * records.len() as f64).ceil().max(1.0) as usize;
    hits.get(needed - 1).copied()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub function: String,
    pub n: usize,
    #[serde(rename = "P")]
    pub points_per_axis: usize,
    pub algorithm: String,
    pub routine: String,
    pub mean_evals: f64,
    pub stddev_evals: f64,
    pub success_rate: f64,
    pub reps: usize,
    pub seed: u64,
}

impl TableRow {
    pub fn new(cfg: &ExperimentConfig, summary: &Summary) -> Self {
        Self {
            function: cfg.function.clone(),
            n: cfg.n,
            points_per_axis: cfg.points_per_axis,
            algorithm: cfg.algorithm.name().to_string(),
            routine: cfg
                .effective_routine()
                .map_or_else(|| "none".to_string(), |r| r.name().to_string()),
            mean_evals: summary.mean_evals,
            stddev_evals: summary.stddev_evals,
            success_rate: summary.success_rate,
            reps: summary.reps,
            seed: cfg.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub effort: u64,
    pub success_prob: f64,
    pub samples: usize,
}

impl PerformanceCurve {
    pub fn rows(&self) -> Vec<CurveRow> {
        self.efforts
            .iter()
            .zip(&self.success_prob)
            .map(|(&effort, &success_prob)| CurveRow {
                effort,
                success_prob,
                samples: self.samples,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub rep: usize,
    pub found_index: usize,
    pub found_value: f64,
    pub success: bool,
    pub n1: u64,
    pub n2: u64,
    pub measurements: u64,
    pub first_hit_effort: Option<u64>,
}

pub fn record_rows(records: &[RunRecord]) -> Vec<RecordRow> {
    records
        .iter()
        .enumerate()
        .map(|(rep, r)| RecordRow {
            rep,
            found_index: r.found_index,
            found_value: r.found_value,
            success: r.success,
            n1: r.ledger.n1,
            n2: r.ledger.n2,
            measurements: r.ledger.measurements,
            first_hit_effort: r.first_hit_effort,
        })
        .collect()
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(input: R, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::config(
            "csv",
            format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        ));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub const TABLE_HEADER: [&str; 10] = [
    "function",
    "n",
    "P",
    "algorithm",
    "routine",
    "mean_evals",
    "stddev_evals",
    "success_rate",
    "reps",
    "seed",
];
pub const CURVE_HEADER: [&str; 3] = ["effort", "success_prob", "samples"];
pub const RECORD_HEADER: [&str; 8] = [
    "rep",
    "found_index",
    "found_value",
    "success",
    "n1",
    "n2",
    "measurements",
    "first_hit_effort",
];

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    write_rows(rows, out)
}

pub fn read_table_csv<R: Read>(input: R) -> Result<Vec<TableRow>> {
    read_rows(input, &TABLE_HEADER)
}

pub fn write_curve_csv<W: Write>(curve: &PerformanceCurve, out: W) -> Result<()> {
    write_rows(&curve.rows(), out)
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurveRow>> {
    read_rows(input, &CURVE_HEADER)
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    write_rows(&record_rows(records), out)
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RecordRow>> {
    read_rows(input, &RECORD_HEADER)
}

/// Runs `base` once per (function, algorithm, routine) combination and
/// returns one summary row each. Functions that do not support `base.n`,
/// and constant functions (one-variable Rosenbrock) unless
/// `include_degenerate` is set, are skipped. Routines only vary for the
/// hybrid algorithm.
pub fn table_sweep(
    base: &ExperimentConfig,
    functions: &[&str],
    algorithms: &[Algorithm],
    routines: &[Routine],
    include_degenerate: bool,
) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for &name in functions {
        let f: TestFunction = name.parse()?;
        if !f.arity_range().contains(&base.n) || (f.is_degenerate(base.n) && !include_degenerate) {
            continue;
        }
        let mut cfg = base.clone();
        cfg.function = name.to_string();
        let prepared = prepare(&cfg)?;
        for &algorithm in algorithms {
            cfg.algorithm = algorithm;
            let variants: Vec<Option<Routine>> = match algorithm {
                Algorithm::Hybrid => routines.iter().copied().map(Some).collect(),
                _ => vec![None],
            };
            for routine in variants {
                cfg.routine = routine;
                let records = run_batch_on(&cfg, &prepared)?;
                rows.push(TableRow::new(&cfg, &summarize(&records)?));
            }
        }
    }
    Ok(rows)
}
