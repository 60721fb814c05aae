//! Bound-constrained local minimization with evaluation accounting.
//!
//! Three routines are available, selected by [`Routine`]:
//!
//! * `nmead`: Nelder–Mead simplex.
//! * `lbfgs`: limited-memory BFGS with projected backtracking.
//! * `qmodel`: derivative-free trust region on a diagonal quadratic model
//!   interpolated from `2n + 1` points, in the spirit of BOBYQA (but not a
//!   port of it).
//!
//! All routines work on the continuous function, clamp every iterate into
//! the box, never return a point worse than the start, and charge each
//! objective evaluation (a value-and-gradient call counts once) to
//! `ledger.n2`.

mod lbfgs;
mod nelder_mead;
mod qmodel;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::oracle::EffortLedger;
use crate::testbed::{BoxDomain, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Routine {
    NelderMead,
    Lbfgs,
    QuadModel,
}

impl Routine {
    pub const ALL: [Routine; 3] = [Routine::NelderMead, Routine::Lbfgs, Routine::QuadModel];

    pub fn name(self) -> &'static str {
        match self {
            Routine::NelderMead => "nmead",
            Routine::Lbfgs => "lbfgs",
            Routine::QuadModel => "qmodel",
        }
    }
}

impl fmt::Display for Routine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Routine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nmead" => Ok(Routine::NelderMead),
            "lbfgs" => Ok(Routine::Lbfgs),
            "qmodel" => Ok(Routine::QuadModel),
            other => Err(Error::UnknownName {
                kind: "routine",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOptimizerConfig {
    pub routine: Routine,
    /// Stop once steps (simplex size, line-search step, trust radius) fall
    /// below this on every axis.
    pub tolerance: f64,
    pub max_evals: usize,
}

impl LocalOptimizerConfig {
    pub const MAX_EVALS_CAP: usize = 5000;

    pub fn new(routine: Routine, tolerance: f64, max_evals: usize) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::config("tolerance", format!("{tolerance} is not positive")));
        }
        Ok(Self {
            routine,
            tolerance,
            max_evals,
        })
    }

    /// Grid-matched defaults: tolerance is the finest grid spacing and the
    /// budget is `40 * ceil(log2 P)^n`, capped at 5000.
    pub fn for_grid(routine: Routine, grid: &GridSpec) -> Self {
        let bits = (grid.points_per_axis() as f64).log2().ceil().max(1.0);
        let budget = (40.0 * bits.powi(grid.dim() as i32)).min(Self::MAX_EVALS_CAP as f64) as usize;
        Self {
            routine,
            tolerance: grid.min_eps(),
            max_evals: budget.max(grid.dim() + 2),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.max_evals < n + 2 {
            return Err(Error::config(
                "max_evals",
                format!("{} is below n + 2 = {}", self.max_evals, n + 2),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub point: Vec<f64>,
    pub value: f64,
    /// Charged evaluations made by this call.
    pub evaluations: usize,
    pub converged: bool,
}

/// Budgeted, memoizing objective wrapper that tracks the best point seen.
pub(crate) struct Evaluator<'a> {
    f: &'a TestFunction,
    domain: &'a BoxDomain,
    max_evals: usize,
    evals: usize,
    best_point: Vec<f64>,
    best_value: f64,
    recent: Vec<(Vec<f64>, f64)>,
}

const MEMO_SLOTS: usize = 32;

impl<'a> Evaluator<'a> {
    fn new(f: &'a TestFunction, domain: &'a BoxDomain, max_evals: usize) -> Self {
        Self {
            f,
            domain,
            max_evals,
            evals: 0,
            best_point: Vec::new(),
            best_value: f64::INFINITY,
            recent: Vec::with_capacity(MEMO_SLOTS),
        }
    }

    pub(crate) fn domain(&self) -> &BoxDomain {
        self.domain
    }

    fn record(&mut self, x: &[f64], v: f64) {
        if v < self.best_value || self.best_point.is_empty() {
            self.best_value = v;
            self.best_point = x.to_vec();
        }
        if self.recent.len() == MEMO_SLOTS {
            self.recent.remove(0);
        }
        self.recent.push((x.to_vec(), v));
    }

    /// Registers an already known value without charging it.
    fn seed(&mut self, x: &[f64], v: f64) {
        self.record(x, v);
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    /// `f(x)`, or `None` once the budget is spent. Repeated points are free.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if let Some((_, v)) = self.recent.iter().rev().find(|(p, _)| p == x) {
            return Some(*v);
        }
        if self.exhausted() {
            return None;
        }
        self.evals += 1;
        let v = self.f.value(x);
        self.record(x, v);
        Some(v)
    }

    /// `f(x)` and `∇f(x)` for one charged evaluation.
    pub(crate) fn eval_with_gradient(&mut self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
        if self.exhausted() {
            return None;
        }
        self.evals += 1;
        let v = self.f.value(x);
        self.record(x, v);
        Some((v, self.f.gradient(x)))
    }

    pub(crate) fn clamp(&self, x: &mut [f64]) {
        self.domain.clamp(x);
    }
}

/// Minimizes `f` over `domain` starting from `start`.
///
/// `start` is clamped into the box first. The returned point is the best
/// one evaluated, so `value <= f(start)` always holds.
pub fn minimize_local(
    f: &TestFunction,
    domain: &BoxDomain,
    start: &[f64],
    cfg: &LocalOptimizerConfig,
    ledger: &mut EffortLedger,
) -> Result<LocalResult> {
    run(f, domain, start, None, cfg, ledger)
}

/// Like [`minimize_local`] when `f(start)` is already known to the caller;
/// the start evaluation is not charged again.
pub fn minimize_local_from_known(
    f: &TestFunction,
    domain: &BoxDomain,
    start: &[f64],
    start_value: f64,
    cfg: &LocalOptimizerConfig,
    ledger: &mut EffortLedger,
) -> Result<LocalResult> {
    run(f, domain, start, Some(start_value), cfg, ledger)
}

fn run(
    f: &TestFunction,
    domain: &BoxDomain,
    start: &[f64],
    start_value: Option<f64>,
    cfg: &LocalOptimizerConfig,
    ledger: &mut EffortLedger,
) -> Result<LocalResult> {
    if start.len() != domain.dim() {
        return Err(Error::Dimension {
            expected: domain.dim(),
            got: start.len(),
        });
    }
    if !f.arity_range().contains(&domain.dim()) {
        return Err(Error::Arity {
            function: f.name(),
            n: domain.dim(),
        });
    }
    cfg.validate(domain.dim())?;
    let mut x0 = start.to_vec();
    domain.clamp(&mut x0);

    let mut ev = Evaluator::new(f, domain, cfg.max_evals);
    match start_value {
        Some(v) if x0 == start => ev.seed(&x0, v),
        _ => {
            ev.eval(&x0);
        }
    }
    let converged = match cfg.routine {
        Routine::NelderMead => nelder_mead::minimize(&mut ev, &x0, cfg.tolerance),
        Routine::Lbfgs => lbfgs::minimize(&mut ev, &x0, cfg.tolerance),
        Routine::QuadModel => qmodel::minimize(&mut ev, &x0, cfg.tolerance),
    };
    ledger.add_evaluations(ev.evals as u64);
    Ok(LocalResult {
        point: ev.best_point,
        value: ev.best_value,
        evaluations: ev.evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;
    use rand::Rng;

    fn cfg(routine: Routine, tolerance: f64, max_evals: usize) -> LocalOptimizerConfig {
        LocalOptimizerConfig::new(routine, tolerance, max_evals).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for r in Routine::ALL {
            assert_eq!(r.name().parse::<Routine>().unwrap(), r);
        }
        assert!("bobyqa".parse::<Routine>().is_err());
    }

    #[test]
    fn grid_defaults() {
        let f = TestFunction::Griewank;
        let g1 = GridSpec::new(f.domain_for(1).unwrap(), 2048).unwrap();
        let c = LocalOptimizerConfig::for_grid(Routine::QuadModel, &g1);
        assert_eq!(c.max_evals, 440);
        assert_eq!(c.tolerance, 80.0 / 2047.0);
        let g3 = GridSpec::new(f.domain_for(3).unwrap(), 64).unwrap();
        assert_eq!(LocalOptimizerConfig::for_grid(Routine::Lbfgs, &g3).max_evals, 5000);
        assert!(LocalOptimizerConfig::new(Routine::Lbfgs, 0.0, 10).is_err());
    }

    #[test]
    fn dejong_converges_to_origin() {
        let f = TestFunction::Dejong;
        let domain = f.domain_for(1).unwrap();
        let eps = 10.24 / 2047.0;
        for routine in Routine::ALL {
            let mut ledger = EffortLedger::new();
            let r = minimize_local(&f, &domain, &[2.0], &cfg(routine, eps, 440), &mut ledger).unwrap();
            assert!(r.point[0].abs() <= eps, "{routine}: {:?}", r.point);
            assert!(r.value <= 1e-6 + eps * eps, "{routine}: {}", r.value);
            assert_eq!(ledger.n2, r.evaluations as u64);
        }
    }

    #[test]
    fn rosenbrock_lbfgs_descends() {
        let f = TestFunction::Rosenbrock;
        let domain = f.domain_for(2).unwrap();
        let start = [-1.2, 1.0];
        let mut ledger = EffortLedger::new();
        let r = minimize_local(&f, &domain, &start, &cfg(Routine::Lbfgs, 1e-6, 2000), &mut ledger).unwrap();
        assert!(r.value < f.value(&start));
        assert!(r.value < 1e-3, "{}", r.value);
    }

    #[test]
    fn already_at_minimum() {
        let f = TestFunction::Dejong;
        let domain = f.domain_for(2).unwrap();
        for routine in Routine::ALL {
            let mut ledger = EffortLedger::new();
            let r = minimize_local(&f, &domain, &[0.0, 0.0], &cfg(routine, 0.01, 50), &mut ledger).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.evaluations <= 50);
        }
    }

    #[test]
    fn known_start_is_not_recharged() {
        let f = TestFunction::Dejong;
        let domain = f.domain_for(1).unwrap();
        let c = cfg(Routine::QuadModel, 0.01, 100);
        let mut a = EffortLedger::new();
        let ra = minimize_local(&f, &domain, &[1.0], &c, &mut a).unwrap();
        let mut b = EffortLedger::new();
        let rb = minimize_local_from_known(&f, &domain, &[1.0], 1.0, &c, &mut b).unwrap();
        assert_eq!(ra.point, rb.point);
        assert_eq!(ra.evaluations, rb.evaluations + 1);
    }

    #[test]
    fn start_on_boundary() {
        let f = TestFunction::Rastrigin;
        let domain = f.domain_for(2).unwrap();
        for routine in Routine::ALL {
            let mut ledger = EffortLedger::new();
            let start = [5.12, -5.12];
            let r = minimize_local(&f, &domain, &start, &cfg(routine, 1e-3, 300), &mut ledger).unwrap();
            assert!(domain.contains(&r.point));
            assert!(r.value <= f.value(&start));
        }
    }

    #[test]
    fn budget_is_respected() {
        let f = TestFunction::Michalewicz { steepness: 10 };
        let domain = f.domain_for(3).unwrap();
        let mut rng = run_rng(1, 0);
        for routine in Routine::ALL {
            for _ in 0..20 {
                let start: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..10.0)).collect();
                let mut ledger = EffortLedger::new();
                let r = minimize_local(&f, &domain, &start, &cfg(routine, 1e-9, 7), &mut ledger).unwrap();
                assert!(r.evaluations <= 7);
                assert_eq!(ledger.n2, r.evaluations as u64);
            }
        }
        let mut ledger = EffortLedger::new();
        assert!(minimize_local(&f, &domain, &[1.0; 3], &cfg(Routine::NelderMead, 0.1, 4), &mut ledger).is_err());
    }
}
