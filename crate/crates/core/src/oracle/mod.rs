//! The discretized objective as a value table with a sorted index.
//!
//! Building a [`DiscretizedObjective`] evaluates the function on every grid
//! point once. Those evaluations model the existence of the oracle and are
//! not charged to any [`EffortLedger`]; only reads made by an algorithm
//! through [`DiscretizedObjective::value_at`] are.
//!
//! The marked set for threshold `y` is `{i : values[i] < y}` (strict). With
//! the permutation sorted by value, it is always a prefix of
//! `sorted_perm`, so counting is a binary search and uniform sampling from
//! the set or its complement is a single index draw.

pub mod cache;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::testbed::TestFunction;

/// Largest grid held in memory (about 1.6 GB of tables).
pub const MAX_POINTS: usize = 1 << 26;

/// Oracle-query counters for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EffortLedger {
    /// Grover rotations; each is one oracle query.
    pub n1: u64,
    /// Classical objective evaluations.
    pub n2: u64,
    pub measurements: u64,
}

impl EffortLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_rotations(&mut self, r: u64) {
        self.n1 += r;
    }

    pub fn add_evaluations(&mut self, k: u64) {
        self.n2 += k;
    }

    pub fn add_measurement(&mut self) {
        self.measurements += 1;
    }

    /// Objective evaluations, quantum and classical: `n1 + n2`.
    pub fn evaluations(&self) -> u64 {
        self.n1 + self.n2
    }

    /// Evaluations plus measurements.
    pub fn effort(&self) -> u64 {
        self.n1 + self.n2 + self.measurements
    }
}

#[derive(Debug, Clone)]
pub struct DiscretizedObjective {
    grid: GridSpec,
    values: Vec<f64>,
    sorted_perm: Vec<usize>,
    sorted_values: Vec<f64>,
}

impl DiscretizedObjective {
    pub fn build(f: &TestFunction, grid: GridSpec) -> Result<Self> {
        if !f.arity_range().contains(&grid.dim()) {
            return Err(Error::Arity {
                function: f.name(),
                n: grid.dim(),
            });
        }
        check_capacity(grid.len())?;
        let dim = grid.dim();
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(4096)
            .enumerate()
            .for_each(|(chunk, out)| {
                let mut point = vec![0.0; dim];
                for (offset, v) in out.iter_mut().enumerate() {
                    grid.write_point(chunk * 4096 + offset, &mut point);
                    *v = f.value(&point);
                }
            });
        Self::from_values(grid, values)
    }

    /// Wraps an arbitrary value list. Its length must equal `grid.len()`.
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        check_capacity(grid.len())?;
        if values.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::config("values", format!("NaN at index {i}")));
        }
        let mut sorted_perm: Vec<usize> = (0..values.len()).collect();
        sorted_perm.par_sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let sorted_values = sorted_perm.iter().map(|&i| values[i]).collect();
        Ok(Self {
            grid,
            values,
            sorted_perm,
            sorted_values,
        })
    }

    /// A value list over a trivial one-axis grid on `[0, len-1]`, for
    /// discrete minimum finding on plain lists.
    pub fn from_list(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        let grid = if len >= 2 {
            GridSpec::new(
                crate::testbed::BoxDomain::cube(1, 0.0, (len - 1) as f64)?,
                len,
            )?
        } else {
            return Self::singleton(values);
        };
        Self::from_values(grid, values)
    }

    fn singleton(values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 || values[0].is_nan() {
            return Err(Error::config("values", "need at least one non-NaN value"));
        }
        // Grids need P >= 2; a one-element list carries a nominal two-point
        // grid that list-based algorithms never decode.
        let grid = GridSpec::new(crate::testbed::BoxDomain::cube(1, 0.0, 1.0)?, 2)?;
        Ok(Self {
            grid,
            sorted_perm: vec![0],
            sorted_values: values.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of points `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted_perm(&self) -> &[usize] {
        &self.sorted_perm
    }

    /// Smallest value over the whole grid.
    pub fn min_value(&self) -> f64 {
        self.sorted_values[0]
    }

    /// Index of the smallest value, ties broken by smallest index.
    pub fn argmin(&self) -> usize {
        self.sorted_perm[0]
    }

    /// `|{i : values[i] < y}|`.
    pub fn count_below(&self, y: f64) -> usize {
        self.sorted_values.partition_point(|&v| v < y)
    }

    pub fn sample_below<R: Rng + ?Sized>(&self, y: f64, rng: &mut R) -> Result<usize> {
        let m = self.count_below(y);
        if m == 0 {
            return Err(Error::EmptySet);
        }
        Ok(self.sorted_perm[rng.random_range(0..m)])
    }

    pub fn sample_geq<R: Rng + ?Sized>(&self, y: f64, rng: &mut R) -> Result<usize> {
        let m = self.count_below(y);
        if m == self.len() {
            return Err(Error::EmptySet);
        }
        Ok(self.sorted_perm[rng.random_range(m..self.len())])
    }

    /// Uncharged read.
    pub fn value(&self, index: usize) -> Result<f64> {
        self.values.get(index).copied().ok_or(Error::Index {
            index,
            len: self.len(),
        })
    }

    /// Classical evaluation: returns `values[index]` and charges one `n2`.
    pub fn value_at(&self, index: usize, ledger: &mut EffortLedger) -> Result<f64> {
        let v = self.value(index)?;
        ledger.add_evaluations(1);
        Ok(v)
    }
}

fn check_capacity(len: usize) -> Result<()> {
    if len > MAX_POINTS {
        Err(Error::Capacity {
            requested: len as u128,
            limit: MAX_POINTS,
        })
    } else {
        Ok(())
    }
}
