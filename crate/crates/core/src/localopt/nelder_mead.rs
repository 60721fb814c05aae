use super::Evaluator;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_EDGE: f64 = 0.05;

/// Returns `true` when the simplex collapsed below `tol` on every axis.
pub(super) fn minimize(ev: &mut Evaluator<'_>, x0: &[f64], tol: f64) -> bool {
    let n = x0.len();
    let (lower, upper) = (ev.domain().lower().to_vec(), ev.domain().upper().to_vec());

    let Some(f0) = ev.eval(x0) else { return false };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for k in 0..n {
        let edge = INITIAL_EDGE * (upper[k] - lower[k]);
        let mut v = x0.to_vec();
        // Step inward when the start sits near the upper face.
        v[k] = if x0[k] + edge <= upper[k] { x0[k] + edge } else { x0[k] - edge };
        ev.clamp(&mut v);
        let Some(fv) = ev.eval(&v) else { return false };
        simplex.push((v, fv));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let size = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&best).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size < tol {
            return true;
        }
        if ev.exhausted() {
            return false;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64)
            .collect();
        let (worst, f_worst) = simplex[n].clone();
        let along = |t: f64, ev: &Evaluator<'_>| {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            ev.clamp(&mut p);
            p
        };

        let xr = along(REFLECT, ev);
        let Some(fr) = ev.eval(&xr) else { return false };
        if fr < simplex[0].1 {
            let xe = along(REFLECT * EXPAND, ev);
            let Some(fe) = ev.eval(&xe) else { return false };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = along(REFLECT * CONTRACT, ev);
            let Some(fc) = ev.eval(&xc) else { return false };
            (xc, fc)
        } else {
            let xc = along(-CONTRACT, ev);
            let Some(fc) = ev.eval(&xc) else { return false };
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = vertex
                .0
                .iter()
                .zip(&best)
                .map(|(v, b)| b + SHRINK * (v - b))
                .collect();
            let Some(fv) = ev.eval(&v) else { return false };
            *vertex = (v, fv);
        }
    }
}
