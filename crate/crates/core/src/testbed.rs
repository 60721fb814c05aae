//! Box-constrained test functions for global minimization.
//!
//! Each function is evaluated exactly as its closed form is written; no
//! sign flips or shifts are applied. A few consequences worth knowing:
//!
//! * `shekel` is the sum of positive terms, so its smallest value sits far
//!   from every `a_i` (on the box boundary), not at a well.
//! * `raydan` carries a leading minus and attains its minimum on the upper
//!   corner of the box.
//! * `rosenbrock` with a single variable is identically zero.

use std::f64::consts::{E, PI};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Relative slack accepted when checking that a point lies in a box.
const DOMAIN_SLACK: f64 = 1e-9;

/// Per-axis closed interval bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDomain("box needs at least one axis".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidDomain(format!(
                "{} lower bounds but {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidDomain(format!(
                    "axis {k}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lower, upper]^n`.
    pub fn cube(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Checks `x` against the box with a small relative slack.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        for (k, &v) in x.iter().enumerate() {
            let slack = DOMAIN_SLACK * self.width(k);
            if !(v >= self.lower[k] - slack && v <= self.upper[k] + slack) {
                return Err(Error::Domain {
                    axis: k,
                    value: v,
                    lower: self.lower[k],
                    upper: self.upper[k],
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.check(x).is_ok()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }
}

/// Coefficient table for the Shekel family: term `i` has centre `a[i]` and
/// offset `c[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShekelTable {
    pub a: Vec<[f64; 4]>,
    pub c: Vec<f64>,
}

impl ShekelTable {
    /// Shekel-5 coefficients mapped from `[0, 10]` onto `[-1, 1]` via
    /// `a' = (a - 5) / 5`; `c` is unchanged.
    pub fn shekel5_unit_box() -> Self {
        const A: [[f64; 4]; 5] = [
            [4.0, 4.0, 4.0, 4.0],
            [1.0, 1.0, 1.0, 1.0],
            [8.0, 8.0, 8.0, 8.0],
            [6.0, 6.0, 6.0, 6.0],
            [3.0, 7.0, 3.0, 7.0],
        ];
        const C: [f64; 5] = [0.1, 0.2, 0.2, 0.4, 0.4];
        Self {
            a: A.iter().map(|row| row.map(|v| (v - 5.0) / 5.0)).collect(),
            c: C.to_vec(),
        }
    }
}

/// Where a reference minimum comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Stationary point known in closed form.
    Analytic,
    /// The function is monotone towards a corner of the box on every axis.
    BoxCorner,
    /// The function is constant.
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMin {
    pub value: f64,
    pub site: Vec<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Neumaier,
    Griewank,
    Shekel(ShekelTable),
    Rosenbrock,
    /// `steepness` is the exponent parameter `m` of the `sin^(2m)` factor.
    Michalewicz { steepness: u32 },
    Dejong,
    Ackley,
    Schwefel,
    Rastrigin,
    Raydan,
}

impl TestFunction {
    /// Registry names, in table order.
    pub const NAMES: [&'static str; 10] = [
        "neumaier",
        "griewank",
        "shekel",
        "rosenbrock",
        "michalewicz",
        "dejong",
        "ackley",
        "schwefel",
        "rastrigin",
        "raydan",
    ];

    pub fn registry() -> Vec<TestFunction> {
        Self::NAMES
            .iter()
            .map(|name| name.parse().expect("registry names parse"))
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Neumaier => "neumaier",
            TestFunction::Griewank => "griewank",
            TestFunction::Shekel(_) => "shekel",
            TestFunction::Rosenbrock => "rosenbrock",
            TestFunction::Michalewicz { .. } => "michalewicz",
            TestFunction::Dejong => "dejong",
            TestFunction::Ackley => "ackley",
            TestFunction::Schwefel => "schwefel",
            TestFunction::Rastrigin => "rastrigin",
            TestFunction::Raydan => "raydan",
        }
    }

    pub fn arity_range(&self) -> RangeInclusive<usize> {
        match self {
            TestFunction::Shekel(_) => 1..=4,
            _ => 1..=usize::MAX,
        }
    }

    /// True when the function is constant at arity `n` and so useless as a
    /// benchmark.
    pub fn is_degenerate(&self, n: usize) -> bool {
        matches!(self, TestFunction::Rosenbrock) && n == 1
    }

    fn bounds(&self) -> (f64, f64) {
        match self {
            TestFunction::Neumaier => (0.0, 4.0),
            TestFunction::Griewank => (-40.0, 40.0),
            TestFunction::Shekel(_) => (-1.0, 1.0),
            TestFunction::Rosenbrock => (-30.0, 30.0),
            TestFunction::Michalewicz { .. } => (0.0, 10.0),
            TestFunction::Dejong | TestFunction::Rastrigin | TestFunction::Raydan => {
                (-5.12, 5.12)
            }
            TestFunction::Ackley => (-15.0, 20.0),
            TestFunction::Schwefel => (-20.0, 20.0),
        }
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        if self.arity_range().contains(&n) {
            Ok(())
        } else {
            Err(Error::Arity {
                function: self.name(),
                n,
            })
        }
    }

    pub fn domain_for(&self, n: usize) -> Result<BoxDomain> {
        self.check_arity(n)?;
        let (lo, hi) = self.bounds();
        BoxDomain::cube(n, lo, hi)
    }

    /// Checked evaluation: `x` must have a supported length and lie in the
    /// function's box.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_arity(x.len())?;
        self.domain_for(x.len())?.check(x)?;
        Ok(self.value(x))
    }

    /// Unchecked evaluation for hot loops. Panics on arities outside
    /// [`arity_range`](Self::arity_range) for Shekel.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Neumaier => {
                let sq: f64 = x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum();
                let cross: f64 = x.windows(2).map(|w| w[1] * w[0]).sum();
                sq - cross
            }
            TestFunction::Griewank => {
                let sq: f64 = x.iter().map(|v| v * v).sum();
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                sq / 4000.0 - prod + 1.0
            }
            TestFunction::Shekel(table) => table
                .a
                .iter()
                .zip(&table.c)
                .map(|(a, c)| {
                    let d: f64 = x.iter().zip(a).map(|(v, aj)| (v - aj) * (v - aj)).sum();
                    1.0 / (c + d)
                })
                .sum(),
            TestFunction::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let t = w[1] - w[0] * w[0];
                    (1.0 - w[0]) * (1.0 - w[0]) + 100.0 * t * t
                })
                .sum(),
            TestFunction::Michalewicz { steepness } => {
                let p = 2 * *steepness as i32;
                -x.iter()
                    .enumerate()
                    .map(|(i, v)| v.sin() * ((i + 1) as f64 * v * v / PI).sin().powi(p))
                    .sum::<f64>()
            }
            TestFunction::Dejong => x.iter().map(|v| v * v).sum(),
            TestFunction::Ackley => {
                let n = x.len() as f64;
                let sq: f64 = x.iter().map(|v| v * v).sum();
                let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
                -20.0 * (-0.2 * (sq / n).sqrt()).exp() - (cs / n).exp() + 20.0 + E
            }
            TestFunction::Schwefel => -x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>(),
            TestFunction::Rastrigin => x
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            TestFunction::Raydan => -x
                .iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 / 10.0 * (v.exp() - v))
                .sum::<f64>(),
        }
    }

    /// Analytic gradient. Ackley uses the zero subgradient at the origin.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self {
            TestFunction::Neumaier => (0..n)
                .map(|k| {
                    let mut g = 2.0 * (x[k] - 1.0);
                    if k > 0 {
                        g -= x[k - 1];
                    }
                    if k + 1 < n {
                        g -= x[k + 1];
                    }
                    g
                })
                .collect(),
            TestFunction::Griewank => {
                let scale: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sqrt()).collect();
                let cosines: Vec<f64> = x.iter().zip(&scale).map(|(v, s)| (v / s).cos()).collect();
                (0..n)
                    .map(|k| {
                        let others: f64 = cosines
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != k)
                            .map(|(_, c)| c)
                            .product();
                        x[k] / 2000.0 + (x[k] / scale[k]).sin() / scale[k] * others
                    })
                    .collect()
            }
            TestFunction::Shekel(table) => {
                let mut g = vec![0.0; n];
                for (a, c) in table.a.iter().zip(&table.c) {
                    let d: f64 = x.iter().zip(a).map(|(v, aj)| (v - aj) * (v - aj)).sum();
                    let denom = (c + d) * (c + d);
                    for k in 0..n {
                        g[k] -= 2.0 * (x[k] - a[k]) / denom;
                    }
                }
                g
            }
            TestFunction::Rosenbrock => {
                let mut g = vec![0.0; n];
                for i in 0..n.saturating_sub(1) {
                    let t = x[i + 1] - x[i] * x[i];
                    g[i] += -2.0 * (1.0 - x[i]) - 400.0 * x[i] * t;
                    g[i + 1] += 200.0 * t;
                }
                g
            }
            TestFunction::Michalewicz { steepness } => {
                let p = 2 * *steepness as i32;
                x.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let w = (i + 1) as f64 / PI;
                        let u = w * v * v;
                        let su = u.sin();
                        let term = v.cos() * su.powi(p)
                            + v.sin() * p as f64 * su.powi(p - 1) * u.cos() * 2.0 * w * v;
                        -term
                    })
                    .collect()
            }
            TestFunction::Dejong => x.iter().map(|v| 2.0 * v).collect(),
            TestFunction::Ackley => {
                let nf = n as f64;
                let sq: f64 = x.iter().map(|v| v * v).sum();
                let r = (sq / nf).sqrt();
                let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
                let ec = (cs / nf).exp();
                let er = (-0.2 * r).exp();
                x.iter()
                    .map(|v| {
                        let radial = if r > 0.0 { 4.0 * er * v / (nf * r) } else { 0.0 };
                        radial + 2.0 * PI / nf * (2.0 * PI * v).sin() * ec
                    })
                    .collect()
            }
            TestFunction::Schwefel => x
                .iter()
                .map(|v| {
                    let s = v.abs().sqrt();
                    -(s.sin() + 0.5 * s * s.cos())
                })
                .collect(),
            TestFunction::Rastrigin => x
                .iter()
                .map(|v| 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin())
                .collect(),
            TestFunction::Raydan => x
                .iter()
                .enumerate()
                .map(|(i, v)| -((i + 1) as f64) / 10.0 * (v.exp() - 1.0))
                .collect(),
        }
    }

    /// Known continuous global minimum on the box at arity `n`, where one is
    /// available in closed form.
    pub fn reference_min(&self, n: usize) -> Option<ReferenceMin> {
        self.check_arity(n).ok()?;
        let (lo, hi) = self.bounds();
        let (site, provenance) = match self {
            TestFunction::Dejong
            | TestFunction::Rastrigin
            | TestFunction::Ackley
            | TestFunction::Griewank => (vec![0.0; n], Provenance::Analytic),
            TestFunction::Rosenbrock if n == 1 => (vec![0.0], Provenance::Constant),
            TestFunction::Rosenbrock => (vec![1.0; n], Provenance::Analytic),
            // Stationary point x_i = (i+1)(n-i); inside [0, 4] only for n <= 3.
            TestFunction::Neumaier if n <= 3 => (
                (0..n).map(|i| ((i + 1) * (n - i)) as f64).collect(),
                Provenance::Analytic,
            ),
            // x sin(sqrt|x|) peaks at x = -20 on [-20, 20].
            TestFunction::Schwefel => (vec![lo; n], Provenance::BoxCorner),
            // e^x - x is increasing for x > 0 and e^5.12 - 5.12 > 5.12 + e^-5.12.
            TestFunction::Raydan => (vec![hi; n], Provenance::BoxCorner),
            _ => return None,
        };
        Some(ReferenceMin {
            value: self.value(&site),
            site,
            provenance,
        })
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "neumaier" => TestFunction::Neumaier,
            "griewank" => TestFunction::Griewank,
            "shekel" => TestFunction::Shekel(ShekelTable::shekel5_unit_box()),
            "rosenbrock" => TestFunction::Rosenbrock,
            "michalewicz" => TestFunction::Michalewicz { steepness: 10 },
            "dejong" => TestFunction::Dejong,
            "ackley" => TestFunction::Ackley,
            "schwefel" => TestFunction::Schwefel,
            "rastrigin" => TestFunction::Rastrigin,
            "raydan" => TestFunction::Raydan,
            other => {
                return Err(Error::UnknownName {
                    kind: "function",
                    name: other.to_string(),
                })
            }
        })
    }
}

/// Central differences with step `1e-6 * width` per axis, shrunk near the
/// box faces so every probe stays inside.
pub fn finite_difference_gradient(f: &TestFunction, domain: &BoxDomain, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            let h = 1e-6 * domain.width(k);
            let hi = (x[k] + h).min(domain.upper()[k]);
            let lo = (x[k] - h).max(domain.lower()[k]);
            probe[k] = hi;
            let fh = f.value(&probe);
            probe[k] = lo;
            let fl = f.value(&probe);
            probe[k] = x[k];
            (fh - fl) / (hi - lo)
        })
        .collect()
}

/// Exhaustive scan of every grid point; ties go to the smallest index.
pub fn reference_global_min(f: &TestFunction, grid: &GridSpec) -> Result<(usize, f64)> {
    f.check_arity(grid.dim())?;
    let mut point = vec![0.0; grid.dim()];
    let mut best = (0, f64::INFINITY);
    for i in 0..grid.len() {
        grid.write_point(i, &mut point);
        let v = f.value(&point);
        if v < best.1 {
            best = (i, v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn origin_values() {
        let dejong = TestFunction::Dejong;
        assert_eq!(dejong.evaluate(&[0.0, 0.0]).unwrap(), 0.0);
        let ackley = TestFunction::Ackley;
        assert!(ackley.evaluate(&[0.0, 0.0, 0.0]).unwrap().abs() < 1e-12);
        assert_eq!(TestFunction::Rastrigin.evaluate(&[0.0]).unwrap(), 0.0);
        for name in ["dejong", "rastrigin", "ackley", "griewank"] {
            let f: TestFunction = name.parse().unwrap();
            for n in 1..=3 {
                assert!(f.value(&vec![0.0; n]).abs() < 1e-9, "{name} n={n}");
            }
        }
    }

    #[test]
    fn griewank_matches_high_precision_value() {
        // 1/4000 - cos(1) + 1 evaluated with 40-digit arithmetic.
        let expected = 0.459_947_694_131_860_28;
        let got = TestFunction::Griewank.evaluate(&[1.0]).unwrap();
        assert!((got - expected).abs() < 1e-15, "{got}");
    }

    #[test]
    fn domain_and_arity_errors() {
        assert!(matches!(
            TestFunction::Dejong.evaluate(&[6.0]),
            Err(Error::Domain { axis: 0, .. })
        ));
        let shekel: TestFunction = "shekel".parse().unwrap();
        assert!(matches!(
            shekel.evaluate(&[0.0; 5]),
            Err(Error::Arity { n: 5, .. })
        ));
        assert!(matches!(
            TestFunction::Dejong.evaluate(&[]),
            Err(Error::Arity { n: 0, .. })
        ));
        assert!(matches!(
            "sphere".parse::<TestFunction>(),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn box_rejects_bad_bounds() {
        assert!(BoxDomain::new(vec![1.0], vec![1.0]).is_err());
        assert!(BoxDomain::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(BoxDomain::new(vec![], vec![]).is_err());
        assert!(BoxDomain::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn registry_names_round_trip() {
        let names: Vec<_> = TestFunction::registry().iter().map(|f| f.name()).collect();
        assert_eq!(names, TestFunction::NAMES);
    }

    #[test]
    fn shekel_coefficients_inside_box() {
        let t = ShekelTable::shekel5_unit_box();
        assert_eq!(t.a.len(), 5);
        assert!(t.a.iter().flatten().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(t.a[0], [-0.2; 4]);
        assert_eq!(t.a[4], [-0.4, 0.4, -0.4, 0.4]);
    }

    #[test]
    fn one_variable_rosenbrock_is_constant() {
        let f = TestFunction::Rosenbrock;
        assert!(f.is_degenerate(1));
        assert_eq!(f.value(&[-30.0]), 0.0);
        assert_eq!(f.value(&[17.3]), 0.0);
        assert_eq!(f.value(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn reference_minima_are_not_beaten_by_random_points() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for f in TestFunction::registry() {
            for n in 1..=3 {
                let Some(reference) = f.reference_min(n) else { continue };
                let domain = f.domain_for(n).unwrap();
                assert!(domain.contains(&reference.site));
                for _ in 0..2000 {
                    let x: Vec<f64> = (0..n)
                        .map(|k| rng.random_range(domain.lower()[k]..=domain.upper()[k]))
                        .collect();
                    assert!(
                        f.value(&x) >= reference.value - 1e-12,
                        "{} n={n} beaten at {x:?}",
                        f.name()
                    );
                }
            }
        }
    }

    #[test]
    fn gradients_agree_with_finite_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for f in TestFunction::registry() {
            for n in 1..=3 {
                let domain = f.domain_for(n).unwrap();
                for _ in 0..100 {
                    let x: Vec<f64> = (0..n)
                        .map(|k| {
                            let w = domain.width(k);
                            rng.random_range(domain.lower()[k] + 0.01 * w..domain.upper()[k] - 0.01 * w)
                        })
                        .collect();
                    let g = f.gradient(&x);
                    let fd = finite_difference_gradient(&f, &domain, &x);
                    for k in 0..n {
                        let scale = g[k].abs().max(fd[k].abs());
                        assert!(
                            (g[k] - fd[k]).abs() <= 1e-4 * scale + 1e-6,
                            "{} n={n} axis {k} at {x:?}: {} vs {}",
                            f.name(),
                            g[k],
                            fd[k]
                        );
                    }
                }
            }
        }
    }
}
