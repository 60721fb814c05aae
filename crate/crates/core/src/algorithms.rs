//! Grover-based minimizers over a [`DiscretizedObjective`].
//!
//! * [`dh_minimize`]: Dürr–Høyer, i.e. Grover adaptive search with λ = 8/7 and
//!   `m` reset to 1 after every improvement.
//! * [`gas_minimize`] with [`Schedule::Bbw`]: λ = 1.34, `m` set to 1 once.
//! * [`hybrid_minimize`]: local descent to a local minimum, then Grover
//!   search for any strictly better point, descending again from each hit.
//!
//! Marking is always strict (`values[i] < y`), so the current best is
//! never re-marked. After every measurement the outcome is checked with
//! one charged evaluation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::localopt::{minimize_local, minimize_local_from_known, LocalOptimizerConfig};
use crate::oracle::{DiscretizedObjective, EffortLedger};
use crate::qsearch::{draw_rotations, measure, BbhtParams};
use crate::testbed::TestFunction;

/// Absolute tolerance for counting a found value as the grid minimum.
pub const SUCCESS_TOLERANCE: f64 = 1e-12;

/// Safety cap on rotations in run-to-optimum mode.
pub const RUN_TO_OPTIMUM_MAX_ROTATIONS: u64 = 10_000_000;

/// Logarithm base used for `log^n N` in the hybrid stopping rule.
pub const DEFAULT_LOG_BASE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dh,
    Bbw,
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Dh, Algorithm::Bbw, Algorithm::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dh => "dh",
            Algorithm::Bbw => "bbw",
            Algorithm::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dh" => Ok(Algorithm::Dh),
            "bbw" => Ok(Algorithm::Bbw),
            "hybrid" => Ok(Algorithm::Hybrid),
            other => Err(Error::UnknownName {
                kind: "algorithm",
                name: other.to_string(),
            }),
        }
    }
}

/// Rotation-count schedule for Grover adaptive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// λ = 8/7, `m` reset to 1 on every improvement.
    Dh,
    /// λ = 1.34, `m` set to 1 only at the start.
    Bbw,
}

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// The algorithm's own termination condition.
    Default,
    /// Stop once accumulated rotations exceed this many.
    Rotations(u64),
    /// Ignore termination; run until the grid minimum value is reached or
    /// [`RUN_TO_OPTIMUM_MAX_ROTATIONS`] is exceeded.
    RunToOptimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// `n1 + n2 + measurements` when `best_value` became known.
    pub effort: u64,
    pub best_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub found_index: usize,
    pub found_value: f64,
    pub success: bool,
    pub ledger: EffortLedger,
    pub trace: Vec<TracePoint>,
    /// Effort at which the grid minimum value was first reached.
    pub first_hit_effort: Option<u64>,
}

/// Best-so-far state shared by all three minimizers.
struct Progress {
    best_index: usize,
    best_value: f64,
    trace: Vec<TracePoint>,
}

impl Progress {
    fn new(index: usize, value: f64, ledger: &EffortLedger) -> Self {
        Self {
            best_index: index,
            best_value: value,
            trace: vec![TracePoint {
                effort: ledger.effort(),
                best_value: value,
            }],
        }
    }

    /// Records `(index, value)` if it improves on the current best.
    fn offer(&mut self, index: usize, value: f64, ledger: &EffortLedger) -> bool {
        if value >= self.best_value {
            return false;
        }
        self.best_index = index;
        self.best_value = value;
        let point = TracePoint {
            effort: ledger.effort(),
            best_value: value,
        };
        match self.trace.last_mut() {
            Some(last) if last.effort == point.effort => *last = point,
            _ => self.trace.push(point),
        }
        true
    }

    fn finish(self, algorithm: Algorithm, d: &DiscretizedObjective, ledger: EffortLedger) -> RunRecord {
        let first_hit_effort = self
            .trace
            .iter()
            .find(|p| reached_optimum(d, p.best_value))
            .map(|p| p.effort);
        RunRecord {
            algorithm,
            found_index: self.best_index,
            found_value: self.best_value,
            success: reached_optimum(d, self.best_value),
            ledger,
            trace: self.trace,
            first_hit_effort,
        }
    }
}

fn reached_optimum(d: &DiscretizedObjective, value: f64) -> bool {
    value <= d.min_value() + SUCCESS_TOLERANCE
}

/// `n1 + (√N / log₂(N)^n) · n2 > 2.46 √N`.
pub fn termination_met(ledger: &EffortLedger, big_n: usize, n: usize) -> bool {
    termination_met_with_base(ledger, big_n, n, DEFAULT_LOG_BASE)
}

pub fn termination_met_with_base(ledger: &EffortLedger, big_n: usize, n: usize, log_base: f64) -> bool {
    let root = (big_n as f64).sqrt();
    let weight = root / (big_n as f64).log(log_base).powi(n as i32);
    ledger.n1 as f64 + weight * ledger.n2 as f64 > 2.46 * root
}

/// Rotation budget of the Dürr–Høyer algorithm: `22.5 √N + 1.4 log₂²N`.
pub fn dh_rotation_budget(big_n: usize) -> u64 {
    let nf = big_n as f64;
    (22.5 * nf.sqrt() + 1.4 * nf.log2().powi(2)).floor() as u64
}

/// Rotation budget used for the BBW schedule: `2.46 √N`.
pub fn bbw_rotation_budget(big_n: usize) -> u64 {
    (2.46 * (big_n as f64).sqrt()).floor() as u64
}

pub fn dh_minimize<R: Rng + ?Sized>(
    d: &DiscretizedObjective,
    rng: &mut R,
    ledger: &mut EffortLedger,
    stop: StopRule,
) -> RunRecord {
    gas_minimize(d, Schedule::Dh, rng, ledger, stop)
}

/// Grover adaptive search: start from a uniform random index, then
/// repeatedly search below the current best with `r` drawn uniformly from
/// `{0..ceil(m)-1}`.
pub fn gas_minimize<R: Rng + ?Sized>(
    d: &DiscretizedObjective,
    schedule: Schedule,
    rng: &mut R,
    ledger: &mut EffortLedger,
    stop: StopRule,
) -> RunRecord {
    let (algorithm, lambda, default_budget) = match schedule {
        Schedule::Dh => (Algorithm::Dh, BbhtParams::LAMBDA_BBHT, dh_rotation_budget(d.len())),
        Schedule::Bbw => (Algorithm::Bbw, BbhtParams::LAMBDA_BBW, bbw_rotation_budget(d.len())),
    };
    let params = BbhtParams::new(lambda, d.len()).expect("fixed lambda is valid");
    let rotation_limit = match stop {
        StopRule::Default => default_budget,
        StopRule::Rotations(r) => r,
        StopRule::RunToOptimum => RUN_TO_OPTIMUM_MAX_ROTATIONS,
    };
    let run_to_optimum = stop == StopRule::RunToOptimum;

    let x0 = rng.random_range(0..d.len());
    let y0 = d.value_at(x0, ledger).expect("index in range");
    let mut progress = Progress::new(x0, y0, ledger);
    let mut m = params.initial_m;
    if d.len() == 1 {
        // m is capped at sqrt(1) = 1, so no rotation would ever be drawn.
        return progress.finish(algorithm, d, *ledger);
    }

    while ledger.n1 <= rotation_limit {
        if run_to_optimum && reached_optimum(d, progress.best_value) {
            break;
        }
        let r = draw_rotations(m, rng);
        let x = measure(d, progress.best_value, r, rng, ledger);
        let y = d.value_at(x, ledger).expect("index in range");
        if progress.offer(x, y, ledger) {
            if schedule == Schedule::Dh {
                m = params.initial_m;
            }
        } else {
            m = params.grow(m);
        }
    }
    progress.finish(algorithm, d, *ledger)
}

/// Local descent from grid index `start`, snapped back to the grid.
///
/// Returns the better of the snapped point and `start` itself, so the
/// result never exceeds `start_value`.
fn descend(
    d: &DiscretizedObjective,
    f: &TestFunction,
    cfg: &LocalOptimizerConfig,
    start: usize,
    start_value: Option<f64>,
    ledger: &mut EffortLedger,
) -> Result<(usize, f64)> {
    let grid = d.grid();
    let x = grid.index_to_point(start)?;
    let local = match start_value {
        Some(v) => minimize_local_from_known(f, grid.domain(), &x, v, cfg, ledger)?,
        None => minimize_local(f, grid.domain(), &x, cfg, ledger)?,
    };
    let start_value = match start_value {
        Some(v) => v,
        None => d.value(start)?,
    };
    let snapped = grid.point_to_index(&local.point)?;
    if snapped == start {
        return Ok((start, start_value));
    }
    let snapped_value = d.value_at(snapped, ledger)?;
    Ok(if snapped_value <= start_value {
        (snapped, snapped_value)
    } else {
        (start, start_value)
    })
}

/// The hybrid method: uniform start, local descent, then Grover search
/// below the current local minimum with λ = 1.34, descending again from
/// every improving measurement.
///
/// With [`StopRule::Default`] the loop ends when [`termination_met`] fires;
/// [`StopRule::Rotations`] bounds `n1` instead.
pub fn hybrid_minimize<R: Rng + ?Sized>(
    d: &DiscretizedObjective,
    f: &TestFunction,
    cfg: &LocalOptimizerConfig,
    rng: &mut R,
    ledger: &mut EffortLedger,
    stop: StopRule,
) -> Result<RunRecord> {
    let grid = d.grid();
    if grid.len() != d.len() || grid.dim() == 0 {
        return Err(Error::config("objective", "hybrid search needs a grid-backed objective"));
    }
    let n = grid.dim();
    let params = BbhtParams::new(BbhtParams::LAMBDA_BBW, d.len())?;
    let should_stop = |ledger: &EffortLedger, best: f64| match stop {
        StopRule::Default => termination_met(ledger, d.len(), n),
        StopRule::Rotations(limit) => ledger.n1 > limit,
        StopRule::RunToOptimum => {
            reached_optimum(d, best) || ledger.n1 > RUN_TO_OPTIMUM_MAX_ROTATIONS
        }
    };

    let start = rng.random_range(0..d.len());
    let (x0, y0) = descend(d, f, cfg, start, None, ledger)?;
    let mut progress = Progress::new(x0, y0, ledger);
    let mut m = params.initial_m;

    while !should_stop(ledger, progress.best_value) {
        let r = draw_rotations(m, rng);
        let x = measure(d, progress.best_value, r, rng, ledger);
        let y = d.value_at(x, ledger)?;
        if y < progress.best_value {
            let (xi, yi) = descend(d, f, cfg, x, Some(y), ledger)?;
            progress.offer(xi, yi, ledger);
        } else {
            m = params.grow(m);
        }
    }
    Ok(progress.finish(Algorithm::Hybrid, d, *ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::localopt::Routine;
    use crate::rng::run_rng;

    #[test]
    fn termination_arithmetic() {
        let mut ledger = EffortLedger::new();
        assert!(!termination_met(&ledger, 2048, 1));
        // threshold 2.46 * sqrt(2048) = 111.33
        ledger.n1 = 112;
        assert!(termination_met(&ledger, 2048, 1));
        ledger.n1 = 111;
        assert!(!termination_met(&ledger, 2048, 1));
        // 100 + (45.25 / 11) * 2 = 108.23
        let ledger = EffortLedger { n1: 100, n2: 2, measurements: 0 };
        assert!(!termination_met(&ledger, 2048, 1));
        let ledger = EffortLedger { n1: 100, n2: 3, measurements: 0 };
        assert!(termination_met(&ledger, 2048, 1));
    }

    #[test]
    fn budgets() {
        assert_eq!(dh_rotation_budget(1024), (22.5 * 32.0 + 1.4 * 100.0) as u64);
        assert_eq!(bbw_rotation_budget(1024), 78);
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("grover".parse::<Algorithm>().is_err());
    }

    #[test]
    fn singleton_list() {
        let d = DiscretizedObjective::from_list(vec![4.2]).unwrap();
        let mut ledger = EffortLedger::new();
        let rec = dh_minimize(&d, &mut run_rng(0, 0), &mut ledger, StopRule::RunToOptimum);
        assert!(rec.success);
        assert_eq!(rec.found_index, 0);
        assert_eq!(ledger.n1, 0);
    }

    #[test]
    fn monotone_trace() {
        let d = DiscretizedObjective::from_list((0..512).map(f64::from).collect()).unwrap();
        for schedule in [Schedule::Dh, Schedule::Bbw] {
            for seed in 0..50 {
                let mut ledger = EffortLedger::new();
                let rec = gas_minimize(&d, schedule, &mut run_rng(seed, 0), &mut ledger, StopRule::Default);
                for w in rec.trace.windows(2) {
                    assert!(w[0].effort < w[1].effort);
                    assert!(w[0].best_value > w[1].best_value);
                }
                assert_eq!(rec.found_value, d.values()[rec.found_index]);
                assert_eq!(rec.ledger.n2, rec.ledger.measurements + 1);
            }
        }
    }

    #[test]
    fn initial_draw_at_minimum() {
        // Every value equal: the first draw is already optimal.
        let d = DiscretizedObjective::from_list(vec![1.0; 64]).unwrap();
        let mut ledger = EffortLedger::new();
        let rec = gas_minimize(&d, Schedule::Bbw, &mut run_rng(3, 0), &mut ledger, StopRule::Default);
        assert!(rec.success);
        assert_eq!(rec.trace.len(), 1);
    }

    #[test]
    fn hybrid_unimodal_succeeds() {
        let f = TestFunction::Dejong;
        let grid = GridSpec::new(f.domain_for(1).unwrap(), 2048).unwrap();
        let cfg = LocalOptimizerConfig::for_grid(Routine::QuadModel, &grid);
        let d = DiscretizedObjective::build(&f, grid).unwrap();
        for seed in 0..20 {
            let mut ledger = EffortLedger::new();
            let rec = hybrid_minimize(&d, &f, &cfg, &mut run_rng(seed, 0), &mut ledger, StopRule::Default).unwrap();
            assert!(rec.success, "seed {seed}: {rec:?}");
            assert!(termination_met(&ledger, d.len(), 1));
        }
    }

    #[test]
    fn hybrid_is_deterministic() {
        let f = TestFunction::Rastrigin;
        let grid = GridSpec::new(f.domain_for(2).unwrap(), 64).unwrap();
        let cfg = LocalOptimizerConfig::for_grid(Routine::NelderMead, &grid);
        let d = DiscretizedObjective::build(&f, grid).unwrap();
        let run = || {
            let mut ledger = EffortLedger::new();
            hybrid_minimize(&d, &f, &cfg, &mut run_rng(9, 4), &mut ledger, StopRule::RunToOptimum).unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        assert!(a.success);
    }
}
