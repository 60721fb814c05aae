//! Exact simulation of Grover search measurements and the BBHT loop.
//!
//! With `m` of `N` indices marked and `sin²θ = m/N`, measuring after `r`
//! Grover iterations yields a marked index with probability
//! `sin²((2r+1)θ)`, and conditioned on that outcome (or its complement) the
//! index is uniform over the marked (unmarked) set. A measurement is
//! therefore simulated as one Bernoulli draw followed by a uniform draw,
//! without building a state vector.
//!
//! The single-marked-element angle often written as `sin(θ'/2) = 1/√N` is
//! `θ' = 2θ` in this convention.

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::{DiscretizedObjective, EffortLedger};

/// Probability that measuring after `r` iterations returns a marked index.
pub fn success_probability(r: u64, marked: u64, n: u64) -> f64 {
    if marked == 0 {
        return 0.0;
    }
    if marked >= n {
        return 1.0;
    }
    let theta = (marked as f64 / n as f64).sqrt().asin();
    let angle = (2.0 * r as f64 + 1.0) * theta;
    angle.sin().powi(2).clamp(0.0, 1.0)
}

/// The same probability computed by iterating the two-amplitude Grover map
/// from the uniform state. `O(r)`; meant as a cross-check.
pub fn amplitude_recurrence_probability(r: u64, marked: u64, n: u64) -> f64 {
    let (nf, mf) = (n as f64, marked as f64);
    let mut a = 1.0 / nf.sqrt();
    let mut b = a;
    let diag = (nf - 2.0 * mf) / nf;
    let up = 2.0 * (nf - mf) / nf;
    let down = -2.0 * mf / nf;
    for _ in 0..r {
        (a, b) = (diag * a + up * b, down * a + diag * b);
    }
    mf * a * a
}

/// Growth parameters of the BBHT loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BbhtParams {
    pub lambda: f64,
    pub m_cap: f64,
    pub initial_m: f64,
}

impl BbhtParams {
    /// Growth factor used by the original BBHT analysis.
    pub const LAMBDA_BBHT: f64 = 8.0 / 7.0;
    /// Growth factor from the improved BBW analysis.
    pub const LAMBDA_BBW: f64 = 1.34;

    /// `m` starts at 1 and is capped at `√N`; `lambda` must be in `(1, 1.34]`.
    pub fn new(lambda: f64, n: usize) -> Result<Self> {
        if !(lambda > 1.0 && lambda <= Self::LAMBDA_BBW) {
            return Err(Error::config("lambda", format!("{lambda} is outside (1, 1.34]")));
        }
        Ok(Self {
            lambda,
            m_cap: (n as f64).sqrt(),
            initial_m: 1.0,
        })
    }

    /// `m <- min(lambda * m, sqrt(N))`.
    pub fn grow(&self, m: f64) -> f64 {
        (self.lambda * m).min(self.m_cap)
    }
}

/// Draws a rotation count uniformly from `{0, ..., ceil(m) - 1}`.
pub fn draw_rotations<R: Rng + ?Sized>(m: f64, rng: &mut R) -> u64 {
    let upper = (m.ceil() as u64).max(1);
    rng.random_range(0..upper)
}

/// Simulates `r` Grover iterations marking `{i : values[i] < y}` followed by
/// a measurement. Charges `r` rotations and one measurement.
pub fn measure<R: Rng + ?Sized>(
    d: &DiscretizedObjective,
    y: f64,
    r: u64,
    rng: &mut R,
    ledger: &mut EffortLedger,
) -> usize {
    ledger.add_rotations(r);
    ledger.add_measurement();
    let marked = d.count_below(y);
    let hit = if marked == 0 {
        false
    } else if marked == d.len() {
        true
    } else {
        rng.random::<f64>() < success_probability(r, marked as u64, d.len() as u64)
    };
    let sample = if hit {
        d.sample_below(y, rng)
    } else {
        d.sample_geq(y, rng)
    };
    sample.expect("branch chosen so the sampled set is non-empty")
}

/// BBHT search for an index with value below `y`.
///
/// Each round draws `j` from `{0..ceil(m)-1}`, measures, and checks the
/// outcome with one charged evaluation. Returns `None` when the next round
/// would push this call's rotations past `rotation_budget`.
pub fn bbht_search<R: Rng + ?Sized>(
    d: &DiscretizedObjective,
    y: f64,
    params: &BbhtParams,
    rng: &mut R,
    ledger: &mut EffortLedger,
    rotation_budget: Option<u64>,
) -> Option<usize> {
    let mut m = params.initial_m;
    let mut spent = 0u64;
    loop {
        let j = draw_rotations(m, rng);
        if rotation_budget.is_some_and(|b| spent + j > b) {
            return None;
        }
        spent += j;
        let x = measure(d, y, j, rng, ledger);
        let v = d.value_at(x, ledger).expect("measured index is in range");
        if v < y {
            return Some(x);
        }
        m = params.grow(m);
    }
}
