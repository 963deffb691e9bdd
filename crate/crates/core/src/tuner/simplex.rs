//! Two-dimensional Nelder–Mead with an evaluation budget.
//!
//! The objective returns `None` for points where it is undefined (diverged
//! recursion); those rank below every finite value.

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub best: [f64; 2],
    pub value: f64,
    pub evaluations: usize,
    /// True when the simplex diameter fell below the tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Maximum number of objective evaluations.
    pub budget: usize,
    /// Stop when every vertex lies within this distance (max-norm) of the best.
    pub xtol: f64,
}

fn rank(v: Option<f64>) -> f64 {
    v.filter(|v| v.is_finite()).unwrap_or(f64::INFINITY)
}

/// Minimizes `f` from the simplex `start`, `start + (step[0], 0)`, `start + (0, step[1])`.
///
/// Every evaluation is reported to `record` in call order.
pub fn minimize(
    f: &(dyn Fn([f64; 2]) -> Option<f64> + Sync),
    start: [f64; 2],
    step: [f64; 2],
    opts: SimplexOptions,
    record: &mut dyn FnMut([f64; 2], Option<f64>),
) -> SimplexResult {
    let mut evals = 0usize;
    let mut eval = |p: [f64; 2], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(p);
        record(p, v);
        rank(v)
    };

    let mut pts = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = [0.0; 3];
    for i in 0..3 {
        vals[i] = eval(pts[i], &mut evals);
    }
    let mut converged = false;

    loop {
        // order best -> worst; stable so ties keep their earlier position
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);

        let diameter = pts[1..]
            .iter()
            .map(|p| (p[0] - pts[0][0]).abs().max((p[1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if diameter <= opts.xtol && vals[0].is_finite() {
            converged = true;
            break;
        }
        if evals + 2 > opts.budget {
            break;
        }

        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };

        let xr = along(-1.0);
        let fr = eval(xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(xe, &mut evals);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let xc = along(-0.5);
            (xc, eval(xc, &mut evals))
        } else {
            let xc = along(0.5);
            (xc, eval(xc, &mut evals))
        };
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        if evals + 2 > opts.budget {
            break;
        }
        for i in 1..3 {
            pts[i] = [
                pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
            ];
            vals[i] = eval(pts[i], &mut evals);
        }
    }

    let best = (0..3)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("three vertices");
    SimplexResult {
        best: pts[best],
        value: vals[best],
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: &(dyn Fn([f64; 2]) -> Option<f64> + Sync), start: [f64; 2]) -> SimplexResult {
        let opts = SimplexOptions {
            budget: 2000,
            xtol: 1e-10,
        };
        minimize(f, start, [0.1, 0.1], opts, &mut |_, _| {})
    }

    #[test]
    fn quadratic_bowl() {
        let f = |p: [f64; 2]| Some((p[0] + 1.0).powi(2) + 3.0 * (p[1] + 0.7).powi(2) + 0.5 * p[0] * p[1]);
        let r = run(&f, [-0.3, -0.3]);
        assert!(r.converged);
        // stationary point of the bowl
        let (a, b) = (-1.0f64, -0.7f64);
        let det = 2.0 * 6.0 - 0.25;
        let x = (2.0 * a * 6.0 - 0.5 * 6.0 * b) / det;
        let y = (6.0 * b * 2.0 - 0.5 * 2.0 * a) / det;
        assert!((r.best[0] - x).abs() < 1e-8 && (r.best[1] - y).abs() < 1e-8, "{:?}", r.best);
    }

    #[test]
    fn rosenbrock() {
        let f = |p: [f64; 2]| Some((1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2));
        let r = run(&f, [-1.2, 1.0]);
        assert!((r.best[0] - 1.0).abs() < 1e-6 && (r.best[1] - 1.0).abs() < 1e-6, "{:?}", r.best);
    }

    #[test]
    fn avoids_undefined_region() {
        let f = |p: [f64; 2]| if p[0] > -0.5 { None } else { Some((p[0] + 0.6).powi(2) + p[1] * p[1]) };
        let r = run(&f, [-0.9, 0.3]);
        assert!((r.best[0] + 0.6).abs() < 1e-6);
    }

    #[test]
    fn respects_budget() {
        let f = |p: [f64; 2]| Some((1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2));
        let mut count = 0;
        let opts = SimplexOptions { budget: 50, xtol: 1e-14 };
        let r = minimize(&f, [-1.2, 1.0], [0.1, 0.1], opts, &mut |_, _| count += 1);
        assert!(!r.converged);
        assert!(r.evaluations <= 50);
        assert_eq!(count, r.evaluations);
    }
}
