//! Derivative-free trust region on an interpolated separable quadratic.
//!
//! The model `q(c + d) = f0 + g·d + ½ Σ h_k d_k²` has `2n + 1` coefficients
//! and is interpolated through a set of `2n + 1` evaluated points, seeded
//! with the stencil `c ± Δ e_k`. Each iteration normally costs a single
//! evaluation: the trial point replaces the interpolation point farthest
//! from the incumbent. Work happens in box-normalized coordinates so one
//! radius `Δ` serves every axis.
//!
//! Radius control: halve on an unsuccessful step, double (up to four times
//! the initial radius) on a successful step that hit the boundary, and cut
//! by four when the model predicts no descent. The routine stops when the
//! proposed step is shorter than the tolerance on every axis, or once `Δ`
//! itself is that short.

use super::Evaluator;

const INITIAL_RADIUS: f64 = 0.01;
const MAX_RADIUS: f64 = 4.0 * INITIAL_RADIUS;
const PIVOT_EPS: f64 = 1e-9;

struct Frame {
    lower: Vec<f64>,
    width: Vec<f64>,
}

impl Frame {
    fn to_real(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.lower)
            .zip(&self.width)
            .map(|((u, l), w)| l + u.clamp(0.0, 1.0) * w)
            .collect()
    }

    fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.lower)
            .zip(&self.width)
            .map(|((x, l), w)| (x - l) / w)
            .collect()
    }
}

/// Gaussian elimination with partial pivoting on a dense square system.
/// Returns `None` when a pivot falls below [`PIVOT_EPS`].
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let size = b.len();
    for col in 0..size {
        let pivot = (col..size).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < PIVOT_EPS {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..size {
            let factor = a[row][col] / pivot_row[col];
            if factor != 0.0 {
                for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * p;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut z = vec![0.0; size];
    for row in (0..size).rev() {
        let tail: f64 = (row + 1..size).map(|k| a[row][k] * z[k]).sum();
        z[row] = (b[row] - tail) / a[row][row];
    }
    Some(z)
}

/// Fits `(g, h)` of the separable model around `base` with steps scaled by
/// `radius`, so the system stays well conditioned at every scale.
fn fit(points: &[(Vec<f64>, f64)], base: &[f64], radius: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = base.len();
    let rows = points
        .iter()
        .map(|(u, _)| {
            let mut row = Vec::with_capacity(2 * n + 1);
            row.push(1.0);
            let s: Vec<f64> = u.iter().zip(base).map(|(a, b)| (a - b) / radius).collect();
            row.extend(s.iter().copied());
            row.extend(s.iter().map(|v| 0.5 * v * v));
            row
        })
        .collect();
    let rhs = points.iter().map(|(_, f)| *f).collect();
    let z = solve(rows, rhs)?;
    let g = z[1..=n].iter().map(|v| v / radius).collect();
    let h = z[n + 1..].iter().map(|v| v / (radius * radius)).collect();
    Some((g, h))
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Evaluates the stencil `base ± radius e_k`, stepping to the interior side
/// when a probe would leave the unit box.
fn stencil(
    ev: &mut Evaluator<'_>,
    frame: &Frame,
    base: &[f64],
    f_base: f64,
    radius: f64,
) -> Option<Vec<(Vec<f64>, f64)>> {
    let mut points = vec![(base.to_vec(), f_base)];
    for k in 0..base.len() {
        let offsets = if base[k] + radius > 1.0 {
            [-radius, -2.0 * radius]
        } else if base[k] - radius < 0.0 {
            [radius, 2.0 * radius]
        } else {
            [radius, -radius]
        };
        for off in offsets {
            let mut u = base.to_vec();
            u[k] = (u[k] + off).clamp(0.0, 1.0);
            let v = ev.eval(&frame.to_real(&u))?;
            points.push((u, v));
        }
    }
    Some(points)
}

pub(super) fn minimize(ev: &mut Evaluator<'_>, x0: &[f64], tol: f64) -> bool {
    let n = x0.len();
    let frame = Frame {
        lower: ev.domain().lower().to_vec(),
        width: (0..n).map(|k| ev.domain().width(k)).collect(),
    };
    let max_width = frame.width.iter().copied().fold(0.0, f64::max);
    let min_radius = tol / max_width;

    let mut best = frame.to_unit(x0);
    let Some(mut f_best) = ev.eval(x0) else { return false };
    let mut radius = INITIAL_RADIUS;
    let Some(mut points) = stencil(ev, &frame, &best, f_best, radius) else { return false };
    for (u, v) in &points {
        if *v < f_best {
            best = u.clone();
            f_best = *v;
        }
    }

    loop {
        if radius < min_radius {
            return true;
        }
        let Some((g, h)) = fit(&points, &best, radius) else {
            let Some(fresh) = stencil(ev, &frame, &best, f_best, radius) else { return false };
            points = fresh;
            if let Some((u, v)) = points.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
                if *v < f_best {
                    best = u.clone();
                    f_best = *v;
                }
            }
            continue;
        };

        let step: Vec<f64> = (0..n)
            .map(|k| {
                let raw = if h[k] > 0.0 {
                    -g[k] / h[k]
                } else if g[k] != 0.0 {
                    -g[k].signum() * radius
                } else {
                    0.0
                };
                let lo = -best[k];
                let hi = 1.0 - best[k];
                raw.clamp(-radius, radius).clamp(lo, hi)
            })
            .collect();
        let predicted: f64 = (0..n)
            .map(|k| g[k] * step[k] + 0.5 * h[k] * step[k] * step[k])
            .sum();

        if predicted >= 0.0 {
            // The model sees no descent at this scale: refine the scale and
            // add one probe at the new radius along the most stretched axis.
            radius *= 0.25;
            if radius < min_radius {
                return true;
            }
            let far = farthest(&points, &best);
            let axis = (0..n)
                .max_by(|&a, &b| {
                    let da = (points[far].0[a] - best[a]).abs();
                    let db = (points[far].0[b] - best[b]).abs();
                    da.total_cmp(&db)
                })
                .unwrap_or(0);
            let mut u = best.clone();
            u[axis] = if u[axis] + radius <= 1.0 { u[axis] + radius } else { u[axis] - radius };
            let Some(v) = ev.eval(&frame.to_real(&u)) else { return false };
            points[far] = (u.clone(), v);
            if v < f_best {
                best = u;
                f_best = v;
            }
            continue;
        }

        if step.iter().zip(&frame.width).all(|(s, w)| (s * w).abs() < tol) {
            return true;
        }
        let trial: Vec<f64> = best.iter().zip(&step).map(|(b, s)| b + s).collect();
        let Some(f_trial) = ev.eval(&frame.to_real(&trial)) else { return false };
        let improved = f_trial < f_best;
        let at_boundary = step.iter().any(|s| s.abs() >= 0.99 * radius);
        if improved {
            best = trial.clone();
            f_best = f_trial;
            if at_boundary {
                radius = (2.0 * radius).min(MAX_RADIUS);
            }
        } else {
            radius *= 0.5;
        }
        let far = farthest(&points, &best);
        points[far] = (trial, f_trial);
    }
}

/// Index of the interpolation point farthest from `best`, never `best`
/// itself.
fn farthest(points: &[(Vec<f64>, f64)], best: &[f64]) -> usize {
    points
        .iter()
        .enumerate()
        .filter(|(_, (u, _))| u.as_slice() != best)
        .max_by(|a, b| distance(&a.1 .0, best).total_cmp(&distance(&b.1 .0, best)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_quadratic_is_fitted_exactly() {
        // f = 3 + 2 u0 - u1 + 2.5 u0^2 + 0.5 u1^2 around base (0.2, 0.3).
        let f = |u: &[f64]| 3.0 + 2.0 * u[0] - u[1] + 2.5 * u[0] * u[0] + 0.5 * u[1] * u[1];
        let pts: Vec<(Vec<f64>, f64)> = [
            [0.2, 0.3],
            [0.25, 0.3],
            [0.1, 0.31],
            [0.2, 0.4],
            [0.33, 0.21],
        ]
        .iter()
        .map(|u| (u.to_vec(), f(u)))
        .collect();
        let (g, h) = fit(&pts, &[0.2, 0.3], 0.05).unwrap();
        assert!((g[0] - (2.0 + 5.0 * 0.2)).abs() < 1e-9);
        assert!((g[1] - (-1.0 + 0.3)).abs() < 1e-9);
        assert!((h[0] - 5.0).abs() < 1e-8 && (h[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_geometry_is_detected() {
        // Every point shares u1, so the u1 coefficients are undetermined.
        let pts: Vec<(Vec<f64>, f64)> = (0..5).map(|i| (vec![0.1 * i as f64, 0.5], i as f64)).collect();
        assert!(fit(&pts, &[0.0, 0.5], 0.1).is_none());
    }
}
