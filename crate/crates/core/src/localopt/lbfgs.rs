use std::collections::VecDeque;

use super::Evaluator;

const HISTORY: usize = 5;
const ARMIJO_C1: f64 = 1e-4;
const FIRST_STEP: f64 = 0.05;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion: `-H g` from the stored `(s, y)` pairs.
fn direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y) in history.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push((a, rho));
    }
    if let Some((s, y)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y), (a, rho)) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Zeroes components that would push through an active bound.
fn project(d: &mut [f64], x: &[f64], lower: &[f64], upper: &[f64]) {
    for k in 0..d.len() {
        if (x[k] <= lower[k] && d[k] < 0.0) || (x[k] >= upper[k] && d[k] > 0.0) {
            d[k] = 0.0;
        }
    }
}

pub(super) fn minimize(ev: &mut Evaluator<'_>, x0: &[f64], tol: f64) -> bool {
    let (lower, upper) = (ev.domain().lower().to_vec(), ev.domain().upper().to_vec());
    let min_width = lower
        .iter()
        .zip(&upper)
        .map(|(l, u)| u - l)
        .fold(f64::INFINITY, f64::min);
    let mut x = x0.to_vec();
    let Some((mut fx, mut g)) = ev.eval_with_gradient(&x) else { return false };
    let mut history: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::with_capacity(HISTORY);

    loop {
        let mut d = direction(&g, &history);
        project(&mut d, &x, &lower, &upper);
        if dot(&g, &d) >= 0.0 {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            project(&mut d, &x, &lower, &upper);
        }
        let d_norm = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if d_norm == 0.0 {
            return true;
        }
        let mut alpha = if history.is_empty() {
            let hi = FIRST_STEP * min_width / d_norm;
            1.0f64.clamp((2.0 * tol / d_norm).min(hi), hi)
        } else {
            1.0
        };

        let (x_new, f_new, g_new) = loop {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            ev.clamp(&mut trial);
            let step: Vec<f64> = trial.iter().zip(&x).map(|(t, xi)| t - xi).collect();
            if step.iter().all(|s| s.abs() < tol) {
                return true;
            }
            let Some((ft, gt)) = ev.eval_with_gradient(&trial) else { return false };
            if ft <= fx + ARMIJO_C1 * dot(&g, &step) {
                break (trial, ft, gt);
            }
            alpha *= 0.5;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-12 {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s.clone(), y));
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        if s.iter().all(|v| v.abs() < tol) {
            return true;
        }
    }
}
