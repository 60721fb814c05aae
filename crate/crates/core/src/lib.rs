//! Simulation and benchmarking of Grover-based global minimization.
//!
//! The crate provides exact classical simulation of Grover search
//! measurement statistics, the BBHT search loop, Dürr–Høyer minimum
//! finding, Grover adaptive search with the BBW schedule, and a hybrid
//! method that alternates classical local descent with quantum search to
//! escape local minima. All oracle queries are accounted in an
//! [`EffortLedger`](oracle::EffortLedger).
//!
//! Typical flow: pick a [`TestFunction`](testbed::TestFunction), discretize
//! its box with a [`GridSpec`](grid::GridSpec), materialize a
//! [`DiscretizedObjective`](oracle::DiscretizedObjective), then run one of
//! the minimizers in [`algorithms`] or a whole batch through [`bench`].

pub mod algorithms;
pub mod bench;
pub mod error;
pub mod grid;
pub mod localopt;
pub mod oracle;
pub mod qsearch;
pub mod rng;
pub mod testbed;

pub use error::{Error, Result};
