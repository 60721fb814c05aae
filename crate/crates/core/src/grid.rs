//! Uniform endpoint-inclusive grids over a box.
//!
//! Points are numbered in mixed radix base `P` with axis 0 as the least
//! significant digit, so index `i` decodes to digits
//! `(i mod P, (i / P) mod P, ...)` and coordinate `k` is
//! `lower[k] + digit_k * eps[k]` with `eps[k] = width[k] / (P - 1)`.

use crate::error::{Error, Result};
use crate::testbed::BoxDomain;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    domain: BoxDomain,
    points_per_axis: usize,
    len: usize,
    eps: Vec<f64>,
}

impl GridSpec {
    pub fn new(domain: BoxDomain, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::config(
                "points_per_axis",
                format!("need at least 2 points per axis, got {points_per_axis}"),
            ));
        }
        let n = domain.dim();
        let len = u32::try_from(n)
            .ok()
            .and_then(|n| points_per_axis.checked_pow(n))
            .ok_or(Error::Capacity {
                requested: (points_per_axis as u128).saturating_pow(n.min(u32::MAX as usize) as u32),
                limit: usize::MAX,
            })?;
        let eps = (0..n)
            .map(|k| domain.width(k) / (points_per_axis - 1) as f64)
            .collect();
        Ok(Self {
            domain,
            points_per_axis,
            len,
            eps,
        })
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Number of variables `n`.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total number of grid points `N = P^n`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn min_eps(&self) -> f64 {
        self.eps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn coordinate(&self, axis: usize, digit: usize) -> f64 {
        if digit == self.points_per_axis - 1 {
            self.domain.upper()[axis]
        } else {
            self.domain.lower()[axis] + digit as f64 * self.eps[axis]
        }
    }

    pub fn index_to_point(&self, index: usize) -> Result<Vec<f64>> {
        if index >= self.len {
            return Err(Error::Index {
                index,
                len: self.len,
            });
        }
        let mut point = vec![0.0; self.dim()];
        self.write_point(index, &mut point);
        Ok(point)
    }

    /// Decodes `index` into `out` without allocating. `index` must be in
    /// range and `out.len()` must equal [`dim`](Self::dim).
    pub fn write_point(&self, index: usize, out: &mut [f64]) {
        debug_assert!(index < self.len && out.len() == self.dim());
        let mut rest = index;
        for (axis, slot) in out.iter_mut().enumerate() {
            *slot = self.coordinate(axis, rest % self.points_per_axis);
            rest /= self.points_per_axis;
        }
    }

    /// Snaps `x` to the nearest grid point. Coordinates up to one cell
    /// outside the box are clamped; anything further is a domain error.
    pub fn point_to_index(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let max_digit = (self.points_per_axis - 1) as f64;
        let mut index = 0usize;
        for axis in (0..self.dim()).rev() {
            let (lo, hi) = (self.domain.lower()[axis], self.domain.upper()[axis]);
            let v = x[axis];
            if !(v >= lo - self.eps[axis] && v <= hi + self.eps[axis]) {
                return Err(Error::Domain {
                    axis,
                    value: v,
                    lower: lo,
                    upper: hi,
                });
            }
            // f64::round breaks ties away from zero.
            let digit = ((v - lo) / self.eps[axis]).round().clamp(0.0, max_digit) as usize;
            index = index * self.points_per_axis + digit;
        }
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, lo: f64, hi: f64, p: usize) -> GridSpec {
        GridSpec::new(BoxDomain::cube(n, lo, hi).unwrap(), p).unwrap()
    }

    #[test]
    fn mixed_radix_decode() {
        let g = grid(2, 0.0, 3.0, 4);
        assert_eq!(g.len(), 16);
        assert_eq!(g.index_to_point(5).unwrap(), vec![1.0, 1.0]);
        assert_eq!(g.index_to_point(1).unwrap(), vec![1.0, 0.0]);
        assert_eq!(g.index_to_point(4).unwrap(), vec![0.0, 1.0]);
        assert_eq!(g.index_to_point(0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(g.index_to_point(15).unwrap(), vec![3.0, 3.0]);
    }

    #[test]
    fn endpoints_are_exact() {
        let g = grid(1, -40.0, 40.0, 2048);
        assert_eq!(g.index_to_point(2047).unwrap(), vec![40.0]);
        assert_eq!(g.index_to_point(0).unwrap(), vec![-40.0]);
        let g = grid(3, -5.12, 5.12, 7);
        assert_eq!(g.index_to_point(g.len() - 1).unwrap(), vec![5.12; 3]);
    }

    #[test]
    fn snapping_rounds_to_nearest() {
        let g = grid(1, 0.0, 3.0, 4);
        assert_eq!(g.point_to_index(&[1.4]).unwrap(), 1);
        assert_eq!(g.point_to_index(&[1.6]).unwrap(), 2);
        assert_eq!(g.point_to_index(&[1.5]).unwrap(), 2);
        assert_eq!(g.point_to_index(&[3.0 + 1e-10]).unwrap(), 3);
        assert_eq!(g.point_to_index(&[-0.9]).unwrap(), 0);
        assert!(matches!(g.point_to_index(&[4.5]), Err(Error::Domain { .. })));
        assert!(matches!(g.point_to_index(&[f64::NAN]), Err(Error::Domain { .. })));
        assert!(matches!(
            g.point_to_index(&[1.0, 1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn rejects_bad_sizes() {
        let d = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        assert!(matches!(GridSpec::new(d, 1), Err(Error::Config { .. })));
        let d = BoxDomain::cube(8, 0.0, 1.0).unwrap();
        assert!(matches!(
            GridSpec::new(d, 1 << 16),
            Err(Error::Capacity { .. })
        ));
        let g = grid(1, 0.0, 1.0, 5);
        assert!(matches!(g.index_to_point(5), Err(Error::Index { .. })));
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..=3, p in 2usize..40, seed in any::<u64>()) {
            let g = grid(n, -7.5, 12.25, p);
            let i = (seed % g.len() as u64) as usize;
            let x = g.index_to_point(i).unwrap();
            prop_assert_eq!(g.point_to_index(&x).unwrap(), i);
        }

        #[test]
        fn snap_is_idempotent(p in 2usize..100, t in -0.05f64..1.05) {
            let g = grid(1, -3.0, 4.0, p);
            let x = -3.0 + 7.0 * t;
            if let Ok(i) = g.point_to_index(&[x]) {
                let again = g.point_to_index(&g.index_to_point(i).unwrap()).unwrap();
                prop_assert_eq!(again, i);
            }
        }
    }
}
