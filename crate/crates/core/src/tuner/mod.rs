//! Choice of the convergence-control parameters `(c10, c20)` and the
//! convergence diagnostics that go with them.
//!
//! `E_in` is the mean square, over `N` equispaced nodes, of a defect of the
//! order-`n` partial sum `phi_in`: either the integral-equation defect or the
//! differential-equation defect. Two readings of "optimal" are supported.
//!
//! - `Joint` minimizes `E_1n + E_2n` by a multistart simplex search: a
//!   coarse grid over the search box picks the starts, and Nelder–Mead refines
//!   the best few.
//! - `Partial` solves `dE_1n/dc10 = 0`, `dE_2n/dc20 = 0` by a
//!   Levenberg–Marquardt iteration started from the joint minimizer.
//!
//! The differential defect is taken from the recursion (see
//! [`HamSolver::operator_residual`]) so that it carries no differentiation
//! roundoff. A joint minimum at roundoff level is re-centered on its plateau
//! before the partial stage.
//!
//! The default (differential defect, partial stationarity, 11 nodes) is the
//! combination that reproduces the tabulated optima of the built-in examples.

mod simplex;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval_jet, ExprError, Jet};
use crate::green::bound_constant;
use crate::ham::{equispaced, HamError, HamSolver, Solution};

pub use simplex::{minimize, SimplexOptions, SimplexResult};

/// Rectangle of `(c10, c20)` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBox {
    pub c1: (f64, f64),
    pub c2: (f64, f64),
}

impl Default for SearchBox {
    fn default() -> Self {
        SearchBox {
            c1: (-1.5, -0.25),
            c2: (-1.5, -0.25),
        }
    }
}

impl SearchBox {
    fn validate(&self) -> Result<(), TuneError> {
        for (name, (lo, hi)) in [("c1", self.c1), ("c2", self.c2)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(TuneError::InvalidOptions(format!(
                    "search range for {name} must satisfy lo < hi"
                )));
            }
            if lo <= 0.0 && hi >= 0.0 {
                return Err(TuneError::InvalidOptions(format!(
                    "search range for {name} must not contain 0"
                )));
            }
        }
        Ok(())
    }
}

/// Defect whose mean square is `E_in`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Residual {
    /// `phi_i - c_i/a_i - A_i[f_i(., phi1, phi2)]`.
    Integral,
    /// `(1/p_i)(p_i phi_i')' - f_i(x, phi1, phi2)`.
    Differential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stationarity {
    /// Minimize `E_1n + E_2n`.
    Joint,
    /// `dE_1n/dc10 = 0` and `dE_2n/dc20 = 0`.
    Partial,
}

/// What the tuner optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Criterion {
    pub residual: Residual,
    pub stationarity: Stationarity,
    /// Number of equispaced nodes on `[0, 1]`, endpoints included.
    pub nodes: usize,
}

/// Node count of the default criterion.
pub const DEFAULT_TUNE_NODES: usize = 11;

impl Default for Criterion {
    fn default() -> Self {
        Criterion {
            residual: Residual::Differential,
            stationarity: Stationarity::Partial,
            nodes: DEFAULT_TUNE_NODES,
        }
    }
}

impl Criterion {
    /// Minimization of the summed integral defects over `nodes` points.
    pub fn integral_joint(nodes: usize) -> Criterion {
        Criterion {
            residual: Residual::Integral,
            stationarity: Stationarity::Joint,
            nodes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOptions {
    pub order: usize,
    pub search: SearchBox,
    pub criterion: Criterion,
    /// Total objective evaluations over all stages.
    pub budget: usize,
    /// Grid starts per axis.
    pub grid: usize,
    /// Number of best grid points refined by the simplex.
    pub refine: usize,
    pub xtol: f64,
    /// Step of the finite differences in `c`.
    pub fd_step: f64,
}

/// Smallest accepted budget.
pub const MIN_BUDGET: usize = 50;

/// The partial-stationarity stage stops when a step is shorter than this (max-norm).
const NEWTON_TOL: f64 = 1e-10;

impl TuneOptions {
    pub fn new(order: usize) -> TuneOptions {
        TuneOptions {
            order,
            search: SearchBox::default(),
            criterion: Criterion::default(),
            budget: 2000,
            grid: 5,
            refine: 3,
            xtol: 1e-10,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TuneError {
    #[error("invalid tuner options: {0}")]
    InvalidOptions(String),
    #[error("every start diverged or hit a domain error")]
    AllDiverged,
    #[error(transparent)]
    Ham(#[from] HamError),
    #[error("Lipschitz sampling: {0}")]
    Lipschitz(ExprError),
}

/// One objective evaluation; `value` is `E_1n + E_2n`, or `None` where the
/// recursion failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub c: [f64; 2],
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneReport {
    pub order: usize,
    pub criterion: Criterion,
    pub c_opt: [f64; 2],
    /// Minimizer of `E_1n + E_2n`; equals `c_opt` under joint stationarity.
    pub c_joint: [f64; 2],
    /// `(E_1n, E_2n)` at the optimum.
    pub residuals: [f64; 2],
    /// `E_1n + E_2n` at the optimum.
    pub objective: f64,
    #[serde(skip)]
    pub history: Vec<Evaluation>,
    /// The stage that produced `c_opt` met its tolerance.
    pub converged: bool,
    /// The joint minimum sat at roundoff level and was re-centered.
    pub centered: bool,
    pub evaluations: usize,
    /// Central-difference gradient of `E_1n + E_2n` at the optimum.
    pub gradient: [f64; 2],
    /// `(dE_1n/dc10, dE_2n/dc20)` at the optimum.
    pub partial_stationarity: [f64; 2],
}

/// `(E_1n, E_2n)` under `criterion` at `c`, or `None` when the recursion or
/// residual fails.
pub fn residuals_at(
    solver: &HamSolver,
    order: usize,
    c: [f64; 2],
    criterion: &Criterion,
) -> Option<[f64; 2]> {
    residuals_on(solver, order, c, criterion.residual, &equispaced(criterion.nodes))
}

/// Signed defects of both components at `xs`.
fn defects(
    solver: &HamSolver,
    order: usize,
    c: [f64; 2],
    residual: Residual,
    xs: &[f64],
) -> Option<[Vec<f64>; 2]> {
    if c.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return None;
    }
    let sol = solver.solve(order, c).ok()?;
    let d = match residual {
        Residual::Integral => {
            let [d1, d2] = solver.integral_defect(sol.phi(0), sol.phi(1)).ok()?;
            [d1.eval_many(xs).ok()?, d2.eval_many(xs).ok()?]
        }
        Residual::Differential => {
            let rows = solver.operator_residual(&sol, xs).ok()?;
            [rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| r[1]).collect()]
        }
    };
    d.iter().flatten().all(|v| v.is_finite()).then_some(d)
}

fn mean_square(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum::<f64>() / v.len() as f64
}

fn residuals_on(
    solver: &HamSolver,
    order: usize,
    c: [f64; 2],
    residual: Residual,
    xs: &[f64],
) -> Option<[f64; 2]> {
    defects(solver, order, c, residual, xs).map(|d| [mean_square(&d[0]), mean_square(&d[1])])
}

/// `E_1n + E_2n` under `criterion` at `c`.
pub fn objective(solver: &HamSolver, order: usize, c: [f64; 2], criterion: &Criterion) -> Option<f64> {
    residuals_at(solver, order, c, criterion).map(|[a, b]| a + b)
}

fn axis(range: (f64, f64), count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (range.0 + range.1)];
    }
    (0..count)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Finds `(c10, c20)` per `opts.criterion`.
pub fn optimize_c(solver: &HamSolver, opts: &TuneOptions) -> Result<TuneReport, TuneError> {
    opts.search.validate()?;
    if opts.order < 1 {
        return Err(TuneError::InvalidOptions("order must be at least 1".into()));
    }
    if opts.criterion.nodes < 2 {
        return Err(TuneError::InvalidOptions("need at least 2 residual nodes".into()));
    }
    if opts.budget < MIN_BUDGET {
        return Err(TuneError::InvalidOptions(format!(
            "budget must be at least {MIN_BUDGET}"
        )));
    }
    if opts.grid < 1 || opts.grid * opts.grid >= opts.budget {
        return Err(TuneError::InvalidOptions(
            "grid starts must leave part of the budget for refinement".into(),
        ));
    }
    let n = opts.order;
    let xs = equispaced(opts.criterion.nodes);
    let residual = opts.criterion.residual;
    let defect = |c: [f64; 2]| defects(solver, n, c, residual, &xs);
    let f = |c: [f64; 2]| residuals_on(solver, n, c, residual, &xs).map(|[a, b]| a + b);

    let a1 = axis(opts.search.c1, opts.grid);
    let a2 = axis(opts.search.c2, opts.grid);
    let starts: Vec<[f64; 2]> = a1
        .iter()
        .flat_map(|&u| a2.iter().map(move |&v| [u, v]))
        .collect();
    let grid_values: Vec<Option<f64>> = starts.par_iter().map(|&c| f(c)).collect();
    let mut history: Vec<Evaluation> = starts
        .iter()
        .zip(&grid_values)
        .map(|(&c, &value)| Evaluation { c, value })
        .collect();

    let mut ranked: Vec<(usize, f64)> = grid_values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();
    if ranked.is_empty() {
        return Err(TuneError::AllDiverged);
    }
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    ranked.truncate(opts.refine.max(1));

    let partial_budget = match opts.criterion.stationarity {
        Stationarity::Joint => 0,
        Stationarity::Partial => (opts.budget / 4).min(450),
    };
    let center_budget = (opts.budget / 10).min(200);
    let remaining = opts.budget - starts.len() - partial_budget - center_budget;
    let per_run = remaining / ranked.len();
    let step = [
        0.5 * (opts.search.c1.1 - opts.search.c1.0) / opts.grid as f64,
        0.5 * (opts.search.c2.1 - opts.search.c2.0) / opts.grid as f64,
    ];
    let simplex_opts = SimplexOptions {
        budget: per_run,
        xtol: opts.xtol,
    };
    let runs: Vec<(SimplexResult, Vec<Evaluation>)> = ranked
        .par_iter()
        .map(|&(i, _)| {
            let mut log = Vec::new();
            let r = minimize(&f, starts[i], step, simplex_opts, &mut |c, value| {
                log.push(Evaluation { c, value })
            });
            (r, log)
        })
        .collect();

    let mut best_c = starts[ranked[0].0];
    let mut best_v = ranked[0].1;
    let mut converged = false;
    for (r, log) in runs {
        history.extend(log);
        if r.value < best_v {
            best_v = r.value;
            best_c = r.best;
            converged = r.converged;
        } else if r.value == best_v && r.converged {
            converged = true;
        }
    }
    let mut centered = false;
    if let Some(c) = center_plateau(solver, n, &defect, best_c, best_v, opts.fd_step, center_budget, &mut |c, value| {
        history.push(Evaluation { c, value })
    }) {
        best_c = c;
        centered = true;
    }
    let c_joint = best_c;

    let c_opt = match opts.criterion.stationarity {
        Stationarity::Joint => c_joint,
        Stationarity::Partial => {
            let mut log = |c: [f64; 2], value: Option<f64>| history.push(Evaluation { c, value });
            match partial_stationary(&defect, c_joint, opts.fd_step, partial_budget, &mut log) {
                Some((c, ok)) => {
                    converged = ok;
                    c
                }
                None => {
                    converged = false;
                    c_joint
                }
            }
        }
    };

    let center = defect(c_opt).ok_or(TuneError::AllDiverged)?;
    let residuals = [mean_square(&center[0]), mean_square(&center[1])];
    let (gradient, partial_stationarity) = match stencil(&defect, c_opt, opts.fd_step, &mut |_, _| {}) {
        Some(s) => (s.gradient(), s.partial()),
        None => ([f64::NAN; 2], [f64::NAN; 2]),
    };
    Ok(TuneReport {
        order: n,
        criterion: opts.criterion,
        c_opt,
        c_joint,
        residuals,
        objective: residuals[0] + residuals[1],
        evaluations: history.len(),
        history,
        converged,
        centered,
        gradient,
        partial_stationarity,
    })
}

/// Defects and their first and second differences in `c` at one point.
struct Stencil {
    /// `r[i]`: defect of component `i` at the nodes.
    r: [Vec<f64>; 2],
    /// `d[i][j]`: derivative of `r[i]` in `c_j`.
    d: [[Vec<f64>; 2]; 2],
    /// `dd[i]`: second derivatives `[d11, d12, d22]` of `r[i]`.
    dd: [[Vec<f64>; 3]; 2],
}

impl Stencil {
    /// `dE_i/dc_j = (2/m) sum r_i dr_i/dc_j`.
    fn de(&self, i: usize, j: usize) -> f64 {
        let m = self.r[i].len() as f64;
        2.0 * self.r[i].iter().zip(&self.d[i][j]).map(|(a, b)| a * b).sum::<f64>() / m
    }

    fn gradient(&self) -> [f64; 2] {
        [self.de(0, 0) + self.de(1, 0), self.de(0, 1) + self.de(1, 1)]
    }

    fn partial(&self) -> [f64; 2] {
        [self.de(0, 0), self.de(1, 1)]
    }

    /// Hessian of `E_1 + E_2`.
    fn hessian(&self) -> [[f64; 2]; 2] {
        let mut hess = [[0.0; 2]; 2];
        for i in 0..2 {
            let m = self.r[i].len() as f64;
            for (j, row) in hess.iter_mut().enumerate() {
                for (l, out) in row.iter_mut().enumerate() {
                    let second = &self.dd[i][j + l];
                    *out += 2.0
                        * (0..self.r[i].len())
                            .map(|k| self.d[i][j][k] * self.d[i][l][k] + self.r[i][k] * second[k])
                            .sum::<f64>()
                        / m;
                }
            }
        }
        hess
    }

    /// Jacobian of [`Stencil::partial`]:
    /// `d/dc_j (dE_i/dc_i) = (2/m) sum (dr_i/dc_i dr_i/dc_j + r_i d2r_i/dc_i dc_j)`.
    fn partial_jacobian(&self) -> [[f64; 2]; 2] {
        let mut jac = [[0.0; 2]; 2];
        for (i, row) in jac.iter_mut().enumerate() {
            let m = self.r[i].len() as f64;
            for (j, out) in row.iter_mut().enumerate() {
                let second = &self.dd[i][i + j];
                *out = 2.0
                    * (0..self.r[i].len())
                        .map(|k| self.d[i][i][k] * self.d[i][j][k] + self.r[i][k] * second[k])
                        .sum::<f64>()
                    / m;
            }
        }
        jac
    }
}

/// Evaluates the defects on the 3x3 stencil `c + h (a, b)`, `a, b` in `{-1, 0, 1}`.
///
/// Differencing the defects rather than `E` keeps the derivatives of `E`
/// exactly zero wherever the defects vanish.
fn stencil(
    defect: &(dyn Fn([f64; 2]) -> Option<[Vec<f64>; 2]> + Sync),
    c: [f64; 2],
    h: f64,
    log: &mut dyn FnMut([f64; 2], Option<f64>),
) -> Option<Stencil> {
    let pts: Vec<[f64; 2]> = (-1..=1)
        .flat_map(|a| (-1..=1).map(move |b| [c[0] + a as f64 * h, c[1] + b as f64 * h]))
        .collect();
    let vals: Vec<Option<[Vec<f64>; 2]>> = pts.par_iter().map(|&p| defect(p)).collect();
    for (p, v) in pts.iter().zip(&vals) {
        log(*p, v.as_ref().map(|d| mean_square(&d[0]) + mean_square(&d[1])));
    }
    let at = |a: usize, b: usize| vals[a * 3 + b].as_ref();
    let (cc, pm, mm) = (at(1, 1)?, [at(2, 1)?, at(1, 2)?], [at(0, 1)?, at(1, 0)?]);
    let corners = [at(2, 2)?, at(2, 0)?, at(0, 2)?, at(0, 0)?];
    let len = cc[0].len();
    let comb = |f: &dyn Fn(usize, usize) -> f64| -> [Vec<f64>; 2] {
        [0, 1].map(|i| (0..len).map(|k| f(i, k)).collect())
    };
    let d = [0, 1].map(|i| {
        [0, 1].map(|j| (0..len).map(|k| (pm[j][i][k] - mm[j][i][k]) / (2.0 * h)).collect())
    });
    let d11 = comb(&|i, k| (pm[0][i][k] - 2.0 * cc[i][k] + mm[0][i][k]) / (h * h));
    let d22 = comb(&|i, k| (pm[1][i][k] - 2.0 * cc[i][k] + mm[1][i][k]) / (h * h));
    let d12 = comb(&|i, k| {
        (corners[0][i][k] - corners[1][i][k] - corners[2][i][k] + corners[3][i][k]) / (4.0 * h * h)
    });
    let [a11, b11] = d11;
    let [a12, b12] = d12;
    let [a22, b22] = d22;
    Some(Stencil {
        r: cc.clone(),
        d,
        dd: [[a11, a12, a22], [b11, b12, b22]],
    })
}

/// A joint minimum with `E <= (PLATEAU_REL * S)^2`, `S` the largest `|phi_i|`
/// at the nodes, is at roundoff level.
const PLATEAU_REL: f64 = 1e-12;

/// Re-centering level: `tau = (CENTER_REL * S)^2`.
const CENTER_REL: f64 = 1e-9;

/// Re-centers a joint minimum that sits at roundoff level.
///
/// Where `E` vanishes to high order (an exact solution reached at `c = -1`,
/// say) its computed minimizer wanders anywhere inside a roundoff plateau.
/// The midpoint of the sublevel set `{E <= tau}` along each eigendirection
/// of the Hessian is stable, since `E` is close to even about the true
/// minimizer at that level. Returns `None` when `c` is not on a plateau or
/// the budget runs out.
#[allow(clippy::too_many_arguments)]
fn center_plateau(
    solver: &HamSolver,
    order: usize,
    defect: &(dyn Fn([f64; 2]) -> Option<[Vec<f64>; 2]> + Sync),
    c: [f64; 2],
    value: f64,
    h: f64,
    budget: usize,
    log: &mut dyn FnMut([f64; 2], Option<f64>),
) -> Option<[f64; 2]> {
    let sol = solver.solve(order, c).ok()?;
    let scale = sol.phi(0).max_abs_nodes().max(sol.phi(1).max_abs_nodes());
    if budget < 9 || value > (PLATEAU_REL * scale).powi(2) {
        return None;
    }
    let hess = stencil(defect, c, h, log)?.hessian();
    let theta = 0.5 * (2.0 * hess[0][1]).atan2(hess[0][0] - hess[1][1]);
    let dirs = [[theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]];
    let tau = (CENTER_REL * scale).powi(2);
    let mut used = 9;
    let mut e = |p: [f64; 2], used: &mut usize| {
        *used += 1;
        let v = defect(p).map(|d| mean_square(&d[0]) + mean_square(&d[1]));
        log(p, v);
        v.is_some_and(|v| v <= tau)
    };
    let mut center = c;
    for v in dirs {
        let mut edges = [0.0; 2];
        for (side, sign) in [1.0, -1.0].into_iter().enumerate() {
            let at = |t: f64| [center[0] + sign * t * v[0], center[1] + sign * t * v[1]];
            let mut hi = 1e-9;
            while e(at(hi), &mut used) {
                hi *= 2.0;
                if hi > 1.0 || used >= budget {
                    return None;
                }
            }
            let mut lo = if hi > 1e-9 { hi / 2.0 } else { 0.0 };
            for _ in 0..12 {
                if used >= budget {
                    return None;
                }
                let mid = 0.5 * (lo + hi);
                if e(at(mid), &mut used) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            edges[side] = 0.5 * (lo + hi);
        }
        let shift = 0.5 * (edges[0] - edges[1]);
        center = [center[0] + shift * v[0], center[1] + shift * v[1]];
    }
    Some(center)
}

/// Levenberg–Marquardt iteration for `(dE_1/dc1, dE_2/dc2) = 0`, derivatives
/// from [`stencil`] with step `h`.
///
/// The Jacobian is close to singular when `E_1` and `E_2` depend mostly on
/// `c1 - c2`; damping keeps the iterate with the root nearest the start
/// instead of jumping along the near-null direction.
///
/// Returns the last iterate and whether the step tolerance was met, or `None`
/// if the stencil could not be evaluated at the start.
fn partial_stationary(
    defect: &(dyn Fn([f64; 2]) -> Option<[Vec<f64>; 2]> + Sync),
    start: [f64; 2],
    h: f64,
    budget: usize,
    log: &mut dyn FnMut([f64; 2], Option<f64>),
) -> Option<([f64; 2], bool)> {
    let mut used = 0;
    let mut eval = |c: [f64; 2], used: &mut usize| {
        *used += 9;
        stencil(defect, c, h, log).map(|s| (s.partial(), s.partial_jacobian()))
    };
    let norm = |g: [f64; 2]| g[0] * g[0] + g[1] * g[1];
    let mut c = start;
    let (mut g, mut jac) = eval(c, &mut used)?;
    let mut mu = 1e-3;
    while used + 9 <= budget {
        if norm(g) == 0.0 {
            return Some((c, true));
        }
        // (J^T J + mu diag(J^T J)) step = -J^T g
        let a11 = jac[0][0] * jac[0][0] + jac[1][0] * jac[1][0];
        let a22 = jac[0][1] * jac[0][1] + jac[1][1] * jac[1][1];
        let a12 = jac[0][0] * jac[0][1] + jac[1][0] * jac[1][1];
        let r1 = -(jac[0][0] * g[0] + jac[1][0] * g[1]);
        let r2 = -(jac[0][1] * g[0] + jac[1][1] * g[1]);
        let (m11, m22) = (a11 * (1.0 + mu), a22 * (1.0 + mu));
        let det = m11 * m22 - a12 * a12;
        if !(det.is_finite() && det > 0.0) {
            return Some((c, false));
        }
        let step = [(m22 * r1 - a12 * r2) / det, (m11 * r2 - a12 * r1) / det];
        let trial = [c[0] + step[0], c[1] + step[1]];
        let size = step[0].abs().max(step[1].abs());
        match eval(trial, &mut used) {
            Some((gt, jt)) if norm(gt) < norm(g) => {
                c = trial;
                g = gt;
                jac = jt;
                mu = (mu / 3.0).max(1e-12);
            }
            _ => mu *= 4.0,
        }
        if size < NEWTON_TOL {
            return Some((c, true));
        }
    }
    Some((c, false))
}

/// Objective values over a `(c10, c20)` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landscape {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// `values[i * c2.len() + j]` is `E_1n + E_2n` at `(c1[i], c2[j])`; `None` marks a failed cell.
    pub values: Vec<Option<f64>>,
}

impl Landscape {
    pub fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.c2.len() + j]
    }

    /// Indices and value of the smallest finite cell.
    pub fn argmin(&self) -> Option<(usize, usize, f64)> {
        let m = self.c2.len();
        self.values
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|v| (k / m, k % m, v)))
            .min_by(|a, b| a.2.total_cmp(&b.2))
    }
}

/// Largest landscape resolution per axis.
pub const MAX_LANDSCAPE: usize = 201;

/// `E_1n + E_2n` under `criterion` on a `res.0 x res.1` grid spanning
/// `search`, axes ascending.
pub fn landscape(
    solver: &HamSolver,
    order: usize,
    search: SearchBox,
    res: (usize, usize),
    criterion: &Criterion,
) -> Result<Landscape, TuneError> {
    if res.0 < 1 || res.1 < 1 || res.0 > MAX_LANDSCAPE || res.1 > MAX_LANDSCAPE {
        return Err(TuneError::InvalidOptions(format!(
            "landscape resolution must be between 1 and {MAX_LANDSCAPE} per axis"
        )));
    }
    if !(search.c1.0 <= search.c1.1 && search.c2.0 <= search.c2.1) {
        return Err(TuneError::InvalidOptions("landscape ranges must be ascending".into()));
    }
    if criterion.nodes < 2 {
        return Err(TuneError::InvalidOptions("need at least 2 residual nodes".into()));
    }
    let c1 = axis(search.c1, res.0);
    let c2 = axis(search.c2, res.1);
    let cells: Vec<[f64; 2]> = c1
        .iter()
        .flat_map(|&u| c2.iter().map(move |&v| [u, v]))
        .collect();
    let xs = equispaced(criterion.nodes);
    let values = cells
        .par_iter()
        .map(|&c| residuals_on(solver, order, c, criterion.residual, &xs).map(|[a, b]| a + b))
        .collect();
    Ok(Landscape { c1, c2, values })
}

/// Box of `(y1, y2)` values for the Lipschitz estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YBox {
    pub y1: (f64, f64),
    pub y2: (f64, f64),
}

impl YBox {
    /// Range spanned by every partial sum of `sol`, widened by `inflate` of its width
    /// on each side.
    pub fn from_solution(sol: &Solution, inflate: f64) -> YBox {
        let span = |i: usize| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for p in &sol.partials[i] {
                for x in dense(p.degree()) {
                    let v = p.eval(x).expect("point in [0, 1]");
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            widen((lo, hi), inflate)
        };
        YBox {
            y1: span(0),
            y2: span(1),
        }
    }

    /// Range spanned by `values` of each component, widened as in [`from_solution`](Self::from_solution).
    pub fn from_ranges(y1: (f64, f64), y2: (f64, f64), inflate: f64) -> YBox {
        YBox {
            y1: widen(y1, inflate),
            y2: widen(y2, inflate),
        }
    }
}

fn dense(degree: usize) -> impl Iterator<Item = f64> {
    let m = 4 * degree;
    (0..=m).map(move |i| i as f64 / m as f64)
}

fn widen((lo, hi): (f64, f64), inflate: f64) -> (f64, f64) {
    let w = hi - lo;
    let pad = if w > 0.0 { inflate * w } else { inflate * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lipschitz {
    /// `partials[i][j] = max |df_i/dy_j|` over the samples.
    pub partials: [[f64; 2]; 2],
    /// `l_j = max_i partials[i][j]`.
    pub l: [f64; 2],
    /// `L = max(l_1, l_2)`.
    pub big_l: f64,
}

/// Brute-force estimate of the Lipschitz constants of `(f1, f2)` on `ybox`
/// over `x` in `[0, 1]`, with `samples` points per axis.
///
/// Partial derivatives come from first-order jets and are exact up to rounding.
pub fn estimate_lipschitz(solver: &HamSolver, ybox: YBox, samples: usize) -> Result<Lipschitz, TuneError> {
    if samples < 2 {
        return Err(TuneError::InvalidOptions("need at least 2 samples per axis".into()));
    }
    let p = solver.problem();
    let xs = axis((0.0, 1.0), samples);
    let y1s = axis(ybox.y1, samples);
    let y2s = axis(ybox.y2, samples);
    let mut partials = [[0.0f64; 2]; 2];
    for &x in &xs {
        for &u in &y1s {
            for &v in &y2s {
                for (i, f) in p.rhs.iter().enumerate() {
                    let d1 = eval_jet(f, x, &Jet::new(vec![u, 1.0]), &Jet::new(vec![v, 0.0]), &p.params)
                        .map_err(TuneError::Lipschitz)?;
                    let d2 = eval_jet(f, x, &Jet::new(vec![u, 0.0]), &Jet::new(vec![v, 1.0]), &p.params)
                        .map_err(TuneError::Lipschitz)?;
                    partials[i][0] = partials[i][0].max(d1.coeffs()[1].abs());
                    partials[i][1] = partials[i][1].max(d2.coeffs()[1].abs());
                }
            }
        }
    }
    let l = [partials[0][0].max(partials[1][0]), partials[0][1].max(partials[1][1])];
    Ok(Lipschitz {
        partials,
        l,
        big_l: l[0].max(l[1]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub c0: [f64; 2],
    /// The bound constant `M`.
    pub m: f64,
    /// Lipschitz constant `L`.
    pub l: f64,
    /// `|1 + c_i0| + 2 L M |c_i0|` for each component.
    pub delta_per_component: [f64; 2],
    /// The same with `|1 + c0|` and `|c0|` taken as maxima over components.
    pub delta: f64,
    /// `max_i max_x |f_i(x, y_10, y_20)|`.
    pub f0_max: f64,
    /// Error bound for partial sums `m = 1..=n`; empty when `delta >= 1`.
    pub bound_per_order: Vec<f64>,
    pub admissible: bool,
    /// Whether each `c_i0` lies in `[-1, 0)`.
    pub c_in_unit_interval: [bool; 2],
}

/// Contraction constant and a-priori error bounds at `c0`.
///
/// When `lipschitz` is `None` it is estimated on the box spanned by the
/// order-`n` solve, inflated by 20 %.
pub fn convergence_report(
    solver: &HamSolver,
    c0: [f64; 2],
    order: usize,
    lipschitz: Option<f64>,
) -> Result<BoundReport, TuneError> {
    let l = match lipschitz {
        Some(l) => l,
        None => {
            let sol = solver.solve(order, c0)?;
            estimate_lipschitz(solver, YBox::from_solution(&sol, 0.2), 11)?.big_l
        }
    };
    let [k1, k2] = solver.kernels();
    let m = bound_constant(k1, k2);
    let delta_of = |c: f64, abs_c: f64| (1.0 + c).abs() + 2.0 * l * m * abs_c;
    let delta_per_component = [delta_of(c0[0], c0[0].abs()), delta_of(c0[1], c0[1].abs())];
    let one_plus = (1.0 + c0[0]).abs().max((1.0 + c0[1]).abs());
    let abs_c = c0[0].abs().max(c0[1].abs());
    let delta = one_plus + 2.0 * l * m * abs_c;

    let p = solver.problem();
    let y0 = [p.boundary[0].initial(), p.boundary[1].initial()];
    let mut f0_max: f64 = 0.0;
    for x in dense(solver.degree()) {
        for i in 0..2 {
            let v = p
                .rhs_at(i, x, y0[0], y0[1])
                .map_err(|e| TuneError::Ham(HamError::Residual(e)))?;
            f0_max = f0_max.max(v.abs());
        }
    }
    let admissible = delta < 1.0;
    let bound_per_order = if admissible {
        (1..=order)
            .map(|k| delta.powi(k as i32) * m * abs_c * f0_max / (1.0 - delta))
            .collect()
    } else {
        Vec::new()
    };
    Ok(BoundReport {
        c0,
        m,
        l,
        delta_per_component,
        delta,
        f0_max,
        bound_per_order,
        admissible,
        c_in_unit_interval: c0.map(|c| (-1.0..0.0).contains(&c)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Params};
    use crate::green::Weight;
    use crate::ham::{equispaced, Boundary, Problem};

    fn solver_for(rhs: [&str; 2]) -> HamSolver {
        let p = Problem {
            weights: [Weight::Power(2), Weight::Power(2)],
            boundary: [Boundary::new(1.0, 0.0, 1.0), Boundary::new(1.0, 0.0, 1.0)],
            rhs: rhs.map(|s| parse(s).unwrap()),
            params: Params::new(),
            exact: [None, None],
        };
        HamSolver::new(&p, 16, &equispaced(21)).unwrap()
    }

    #[test]
    fn delta_arithmetic() {
        let s = solver_for(["0", "0"]);
        let r = convergence_report(&s, [-1.0, -1.0], 3, Some(1.2)).unwrap();
        // M = 1/6 for k = 2, so L M = 0.2
        assert!((r.delta - 0.4).abs() < 1e-12);
        let r = convergence_report(&s, [-0.5, -0.5], 3, Some(1.8)).unwrap();
        assert!((r.delta - 0.8).abs() < 1e-12);
        assert!(r.admissible);
        assert_eq!(r.c_in_unit_interval, [true, true]);
    }

    #[test]
    fn lipschitz_of_product() {
        let s = solver_for(["y1*y2", "0"]);
        let l = estimate_lipschitz(&s, YBox { y1: (0.0, 1.0), y2: (0.0, 2.0) }, 11).unwrap();
        assert_eq!(l.l, [2.0, 1.0]);
        assert_eq!(l.big_l, 2.0);
        let z = solver_for(["0", "0"]);
        assert_eq!(estimate_lipschitz(&z, YBox { y1: (0.0, 1.0), y2: (0.0, 2.0) }, 11).unwrap().big_l, 0.0);
    }

    #[test]
    fn zero_source_landscape_is_flat() {
        let s = solver_for(["0", "0"]);
        let l = landscape(&s, 2, SearchBox::default(), (5, 4), &Criterion::default()).unwrap();
        assert_eq!(l.values.len(), 20);
        assert!(l.values.iter().all(|v| v.is_some_and(|v| v < 1e-20)));
        assert!(l.c1.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_options() {
        let s = solver_for(["0", "0"]);
        let mut o = TuneOptions::new(2);
        o.budget = 10;
        assert!(matches!(optimize_c(&s, &o), Err(TuneError::InvalidOptions(_))));
        let mut o = TuneOptions::new(2);
        o.search.c1 = (-1.0, 0.5);
        assert!(matches!(optimize_c(&s, &o), Err(TuneError::InvalidOptions(_))));
        assert!(landscape(&s, 2, SearchBox::default(), (202, 3), &Criterion::default()).is_err());
    }

    #[test]
    fn all_diverged() {
        let s = solver_for(["ln(y1 - 5)", "0"]);
        assert_eq!(optimize_c(&s, &TuneOptions::new(2)).unwrap_err(), TuneError::AllDiverged);
    }
}
