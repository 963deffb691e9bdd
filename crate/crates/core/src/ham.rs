//! The homotopy-analysis recursion for the coupled system
//!
//! ```text
//! (p_i y_i')' = p_i f_i(x, y1, y2),  y_i'(0) = 0,  a_i y_i(1) + b_i y_i'(1) = c_i
//! ```
//!
//! rewritten as `y_i = c_i / a_i + int_0^1 G_i(x, s) p_i(s) f_i ds`. Starting
//! from `y_i0 = c_i / a_i` the terms are
//!
//! ```text
//! y_i1 = -c_i0 A_i[H_i0]
//! y_ik = (1 + c_i0) y_i(k-1) - c_i0 A_i[H_i(k-1)]     (k >= 2)
//! ```
//!
//! where `A_i` is the kernel operator and `H_ik` is the k-th Taylor coefficient
//! in q of `f_i(x, sum_j y_1j q^j, sum_j y_2j q^j)`. Adomian decomposition is
//! the special case `c_i0 = -1`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval_grid, eval_scalar, eval_series, Expr, ExprError, Params, QSeries, Var};
use crate::funcspace::{FuncError, Grid, GridFn, DEFAULT_DEGREE};
use crate::green::{Kernel, GreenError, Weight};

/// A term whose node values exceed this is treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Smallest degree accepted by the solver.
pub const MIN_SOLVER_DEGREE: usize = 16;

/// Default number of equispaced nodes for the integral residual.
pub const DEFAULT_RESIDUAL_NODES: usize = 101;

/// Robin data `a y(1) + b y'(1) = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Boundary {
    pub fn new(a: f64, b: f64, c: f64) -> Boundary {
        Boundary { a, b, c }
    }

    /// The initial term `c / a`.
    pub fn initial(&self) -> f64 {
        self.c / self.a
    }
}

/// One coupled two-component problem. Index 0 is `y1`, index 1 is `y2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub weights: [Weight; 2],
    pub boundary: [Boundary; 2],
    pub rhs: [Expr; 2],
    pub params: Params,
    /// Exact solutions in `x`, when known.
    pub exact: [Option<Expr>; 2],
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error("f{} at stage {stage}: {source}", component + 1)]
    Expr {
        component: usize,
        stage: usize,
        source: ExprError,
    },
    #[error("y{}{stage} diverged (max |value| = {max:e})", component + 1)]
    Diverged {
        component: usize,
        stage: usize,
        max: f64,
    },
    #[error("residual evaluation: {0}")]
    Residual(ExprError),
    #[error("the differential residual is undefined at x = {0}")]
    ResidualPoint(f64),
    #[error("direct and homotopy Adomian terms differ by {0:e}")]
    AdmMismatch(f64),
}

impl Problem {
    /// Checks the invariants the solver relies on.
    pub fn validate(&self) -> Result<(), HamError> {
        for (i, bc) in self.boundary.iter().enumerate() {
            if bc.a == 0.0 {
                return Err(HamError::InvalidProblem(format!("a{} must be non-zero", i + 1)));
            }
            if ![bc.a, bc.b, bc.c].iter().all(|v| v.is_finite()) {
                return Err(HamError::InvalidProblem(format!(
                    "boundary data of component {} must be finite",
                    i + 1
                )));
            }
        }
        for (i, f) in self.rhs.iter().enumerate() {
            f.check_bound(&self.params).map_err(|e| {
                HamError::InvalidProblem(format!("f{}: {e}", i + 1))
            })?;
        }
        for (i, e) in self.exact.iter().enumerate() {
            if let Some(e) = e {
                if e.uses_var(Var::Y1) || e.uses_var(Var::Y2) {
                    return Err(HamError::InvalidProblem(format!(
                        "exact solution {} may only depend on x",
                        i + 1
                    )));
                }
                e.check_bound(&self.params).map_err(|err| {
                    HamError::InvalidProblem(format!("exact{}: {err}", i + 1))
                })?;
            }
        }
        Ok(())
    }

    /// Exact solution of component `i` at `x`, if one is known.
    pub fn exact_at(&self, i: usize, x: f64) -> Option<Result<f64, ExprError>> {
        self.exact[i]
            .as_ref()
            .map(|e| eval_scalar(e, x, 0.0, 0.0, &self.params))
    }

    /// `f_i(x, y1, y2)`.
    pub fn rhs_at(&self, i: usize, x: f64, y1: f64, y2: f64) -> Result<f64, ExprError> {
        eval_scalar(&self.rhs[i], x, y1, y2, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamConfig {
    /// Index of the last term kept.
    pub order: usize,
    /// Convergence-control parameters `(c10, c20)`.
    pub c0: [f64; 2],
    pub degree: usize,
    /// Points for the integral residual.
    pub residual_nodes: Vec<f64>,
}

/// `count` equispaced points covering `[0, 1]`.
pub fn equispaced(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

impl HamConfig {
    pub fn new(order: usize, c0: [f64; 2]) -> HamConfig {
        HamConfig {
            order,
            c0,
            degree: DEFAULT_DEGREE,
            residual_nodes: equispaced(DEFAULT_RESIDUAL_NODES),
        }
    }

    pub fn validate(&self) -> Result<(), HamError> {
        if self.order < 1 {
            return Err(HamError::InvalidConfig("order must be at least 1".into()));
        }
        if self.c0.iter().any(|c| *c == 0.0 || !c.is_finite()) {
            return Err(HamError::InvalidConfig(
                "convergence-control parameters must be finite and non-zero".into(),
            ));
        }
        if self.degree < MIN_SOLVER_DEGREE {
            return Err(HamError::InvalidConfig(format!(
                "degree must be at least {MIN_SOLVER_DEGREE}"
            )));
        }
        if self.residual_nodes.is_empty()
            || self.residual_nodes.iter().any(|x| !(0.0..=1.0).contains(x))
        {
            return Err(HamError::InvalidConfig(
                "residual nodes must be a non-empty subset of [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// `terms[i][k] = y_ik`.
    pub terms: [Vec<GridFn>; 2],
    /// `partials[i][m] = sum_{k <= m} y_ik`.
    pub partials: [Vec<GridFn>; 2],
    /// `(1/p_i)(p_i phi_i')'` of the highest partial sum, accumulated from the
    /// recursion without differentiating.
    pub operator: [GridFn; 2],
    pub config: HamConfig,
}

impl Solution {
    pub fn order(&self) -> usize {
        self.terms[0].len() - 1
    }

    /// The highest-order partial sum of component `i`.
    pub fn phi(&self, i: usize) -> &GridFn {
        self.partials[i].last().expect("at least one term")
    }
}

/// Kernels and interpolation data for one problem at one degree; reused
/// across many `(c10, c20)` candidates.
#[derive(Debug, Clone)]
pub struct HamSolver {
    problem: Problem,
    kernels: [Kernel; 2],
    grid: Arc<Grid>,
    x: GridFn,
    residual_nodes: Vec<f64>,
    /// Row-major interpolation from grid values to `residual_nodes`.
    residual_interp: Vec<f64>,
    /// Weights sampled on the grid, for the general-weight residual.
    p_grid: [Option<(GridFn, GridFn)>; 2],
}

impl HamSolver {
    pub fn new(problem: &Problem, degree: usize, residual_nodes: &[f64]) -> Result<HamSolver, HamError> {
        problem.validate()?;
        if degree < MIN_SOLVER_DEGREE {
            return Err(HamError::InvalidConfig(format!(
                "degree must be at least {MIN_SOLVER_DEGREE}"
            )));
        }
        if residual_nodes.is_empty() || residual_nodes.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(HamError::InvalidConfig(
                "residual nodes must be a non-empty subset of [0, 1]".into(),
            ));
        }
        let kernel = |i: usize| {
            let bc = problem.boundary[i];
            Kernel::new(problem.weights[i].clone(), bc.a, bc.b, degree, &problem.params)
        };
        let kernels = [kernel(0)?, kernel(1)?];
        let grid = kernels[0].grid().clone();
        let p_grid = [0, 1].map(|i| match &problem.weights[i] {
            Weight::Power(_) => None,
            Weight::General(_) => {
                let p = GridFn::from_raw(
                    &grid,
                    grid.nodes().iter().map(|&x| kernels[i].p(x)).collect(),
                );
                let dp = p.diff();
                Some((p, dp))
            }
        });
        Ok(HamSolver {
            problem: problem.clone(),
            x: GridFn::identity(&grid),
            residual_interp: grid.interpolation_matrix(residual_nodes),
            residual_nodes: residual_nodes.to_vec(),
            kernels,
            grid,
            p_grid,
        })
    }

    /// Solver for the degree and residual nodes of `cfg`.
    pub fn for_config(problem: &Problem, cfg: &HamConfig) -> Result<HamSolver, HamError> {
        HamSolver::new(problem, cfg.degree, &cfg.residual_nodes)
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn kernels(&self) -> &[Kernel; 2] {
        &self.kernels
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.grid.degree()
    }

    pub fn residual_nodes(&self) -> &[f64] {
        &self.residual_nodes
    }

    /// The recursion truncated after term `order`.
    pub fn solve(&self, order: usize, c0: [f64; 2]) -> Result<Solution, HamError> {
        let cfg = HamConfig {
            order,
            c0,
            degree: self.degree(),
            residual_nodes: self.residual_nodes.clone(),
        };
        cfg.validate()?;
        let mut terms: [Vec<GridFn>; 2] = [0, 1].map(|i| {
            vec![GridFn::constant(&self.grid, self.problem.boundary[i].initial())]
        });
        // L[y_i0] = 0 and L[A_i g] = g, so L[y_ik] follows the same recursion
        let mut ops: [GridFn; 2] = [0, 1].map(|_| GridFn::constant(&self.grid, 0.0));
        let mut operator = ops.clone();
        for k in 1..=order {
            let y1 = QSeries::new(terms[0].clone())?;
            let y2 = QSeries::new(terms[1].clone())?;
            let mut next = Vec::with_capacity(2);
            for i in 0..2 {
                let h = eval_series(&self.problem.rhs[i], &self.x, &y1, &y2, k - 1, &self.problem.params)
                    .map_err(|source| HamError::Expr {
                        component: i,
                        stage: k,
                        source,
                    })?;
                let source = h.coeff(k - 1);
                let applied = self.kernels[i].apply(source);
                let c = c0[i];
                let term = if k == 1 {
                    ops[i] = source.scale(-c);
                    applied.scale(-c)
                } else {
                    ops[i] = &ops[i].scale(1.0 + c) - &source.scale(c);
                    &terms[i][k - 1].scale(1.0 + c) - &applied.scale(c)
                };
                operator[i] = &operator[i] + &ops[i];
                let max = term.max_abs_nodes();
                if !term.is_finite() || max > DIVERGENCE_LIMIT {
                    return Err(HamError::Diverged {
                        component: i,
                        stage: k,
                        max: if term.is_finite() { max } else { f64::INFINITY },
                    });
                }
                next.push(term);
            }
            for (i, t) in next.into_iter().enumerate() {
                terms[i].push(t);
            }
        }
        let partials = [0, 1].map(|i| {
            let mut out: Vec<GridFn> = Vec::with_capacity(order + 1);
            for t in &terms[i] {
                let s = match out.last() {
                    Some(prev) => prev + t,
                    None => t.clone(),
                };
                out.push(s);
            }
            out
        });
        Ok(Solution {
            terms,
            partials,
            operator,
            config: cfg,
        })
    }

    /// Adomian decomposition: the recursion at `c10 = c20 = -1`, cross-checked
    /// against the direct form `y_ik = A_i[H_i(k-1)]`.
    pub fn solve_adm(&self, order: usize) -> Result<Solution, HamError> {
        let sol = self.solve(order, [-1.0, -1.0])?;
        let direct = self.adm_direct_terms(order)?;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for (a, b) in sol.terms[i].iter().zip(&direct[i]) {
                let d = (a - b).max_abs_nodes();
                worst = worst.max(d / b.max_abs_nodes().max(1.0));
            }
        }
        if worst > 1e-13 {
            return Err(HamError::AdmMismatch(worst));
        }
        Ok(sol)
    }

    /// Adomian terms from `y_ik = A_i[H_i(k-1)]` without the homotopy carry term.
    pub fn adm_direct_terms(&self, order: usize) -> Result<[Vec<GridFn>; 2], HamError> {
        let mut terms: [Vec<GridFn>; 2] = [0, 1].map(|i| {
            vec![GridFn::constant(&self.grid, self.problem.boundary[i].initial())]
        });
        for k in 1..=order {
            let y1 = QSeries::new(terms[0].clone())?;
            let y2 = QSeries::new(terms[1].clone())?;
            let mut next = Vec::with_capacity(2);
            for i in 0..2 {
                let h = eval_series(&self.problem.rhs[i], &self.x, &y1, &y2, k - 1, &self.problem.params)
                    .map_err(|source| HamError::Expr {
                        component: i,
                        stage: k,
                        source,
                    })?;
                next.push(self.kernels[i].apply(h.coeff(k - 1)));
            }
            for (i, t) in next.into_iter().enumerate() {
                terms[i].push(t);
            }
        }
        Ok(terms)
    }

    /// The defect `phi_i - c_i/a_i - A_i[f_i(., phi1, phi2)]` of the integral equation.
    pub fn integral_defect(&self, phi1: &GridFn, phi2: &GridFn) -> Result<[GridFn; 2], HamError> {
        let mut out = Vec::with_capacity(2);
        for i in 0..2 {
            let f = eval_grid(&self.problem.rhs[i], phi1, phi2, &self.problem.params)
                .map_err(HamError::Residual)?;
            let phi = if i == 0 { phi1 } else { phi2 };
            let applied = self.kernels[i].apply(&f);
            out.push(phi.sub(&applied).map(|v| v - self.problem.boundary[i].initial()));
        }
        let second = out.pop().expect("two components");
        let first = out.pop().expect("two components");
        Ok([first, second])
    }

    /// `E_i = mean over the residual nodes of the squared integral defect`.
    pub fn integral_residual(&self, phi1: &GridFn, phi2: &GridFn) -> Result<[f64; 2], HamError> {
        let defect = self.integral_defect(phi1, phi2)?;
        let m = self.grid.len();
        let count = self.residual_nodes.len();
        Ok(defect.map(|d| {
            let vals = d.values();
            let mut sum = 0.0;
            for r in 0..count {
                let row = &self.residual_interp[r * m..(r + 1) * m];
                let v: f64 = row.iter().zip(vals).map(|(a, b)| a * b).sum();
                sum += v * v;
            }
            sum / count as f64
        }))
    }

    /// The signed differential defect of `sol` at each point of `xs` in `[0, 1]`,
    /// with the operator taken from [`Solution::operator`] instead of
    /// differentiated. Agrees with [`HamSolver::differential_residual`] up to
    /// the roundoff of spectral differentiation, which this route avoids.
    pub fn operator_residual(&self, sol: &Solution, xs: &[f64]) -> Result<Vec<[f64; 2]>, HamError> {
        if let Some(&x) = xs.iter().find(|x| !(**x >= 0.0 && **x <= 1.0)) {
            return Err(HamError::ResidualPoint(x));
        }
        let (phi1, phi2) = (sol.phi(0), sol.phi(1));
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            let y1 = phi1.eval(x)?;
            let y2 = phi2.eval(x)?;
            let mut row = [0.0; 2];
            for i in 0..2 {
                let f = self
                    .problem
                    .rhs_at(i, x, y1, y2)
                    .map_err(HamError::Residual)?;
                row[i] = sol.operator[i].eval(x)? - f;
            }
            out.push(row);
        }
        Ok(out)
    }

    /// `|(1/p_i) (p_i phi_i')' - f_i(x, phi1, phi2)|` at each point of `xs`.
    ///
    /// At `x = 0` a power weight `x^k` uses the limit `(k + 1) phi_i''(0)` of
    /// the operator; a general weight must be positive there.
    pub fn differential_residual(
        &self,
        phi1: &GridFn,
        phi2: &GridFn,
        xs: &[f64],
    ) -> Result<Vec<[f64; 2]>, HamError> {
        if let Some(&x) = xs.iter().find(|x| !(**x >= 0.0 && **x <= 1.0)) {
            return Err(HamError::ResidualPoint(x));
        }
        let phis = [phi1, phi2];
        let d1 = phis.map(|p| p.diff());
        let d2 = phis.map(|p| p.diff2());
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            let y1 = phi1.eval(x)?;
            let y2 = phi2.eval(x)?;
            let mut row = [0.0; 2];
            for i in 0..2 {
                let dp = d1[i].eval(x)?;
                let ddp = d2[i].eval(x)?;
                let op = match (&self.problem.weights[i], &self.p_grid[i]) {
                    (Weight::Power(k), _) if x == 0.0 => (*k as f64 + 1.0) * ddp,
                    (Weight::Power(k), _) => ddp + *k as f64 / x * dp,
                    (_, Some((p, dpdx))) => {
                        let pv = p.eval(x)?;
                        if pv <= 0.0 {
                            return Err(HamError::ResidualPoint(x));
                        }
                        ddp + dpdx.eval(x)? / pv * dp
                    }
                    (_, None) => unreachable!("general weights are sampled at construction"),
                };
                let f = self
                    .problem
                    .rhs_at(i, x, y1, y2)
                    .map_err(HamError::Residual)?;
                row[i] = (op - f).abs();
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Exact solution of component `i` sampled on the grid.
    pub fn exact_grid(&self, i: usize) -> Option<Result<GridFn, HamError>> {
        let e = self.problem.exact[i].as_ref()?;
        let values: Result<Vec<f64>, ExprError> = self
            .grid
            .nodes()
            .iter()
            .map(|&x| eval_scalar(e, x, 0.0, 0.0, &self.problem.params))
            .collect();
        Some(
            values
                .map_err(HamError::Residual)
                .and_then(|v| Ok(GridFn::from_values(&self.grid, v)?)),
        )
    }
}

/// One-shot HAM solve.
pub fn ham_solve(problem: &Problem, cfg: &HamConfig) -> Result<Solution, HamError> {
    cfg.validate()?;
    HamSolver::for_config(problem, cfg)?.solve(cfg.order, cfg.c0)
}

/// One-shot Adomian solve.
pub fn adm_solve(problem: &Problem, order: usize, degree: usize) -> Result<Solution, HamError> {
    HamSolver::new(problem, degree, &equispaced(DEFAULT_RESIDUAL_NODES))?.solve_adm(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn ex3() -> Problem {
        Problem {
            weights: [Weight::Power(3), Weight::Power(4)],
            boundary: [Boundary::new(1.0, 0.0, 2.0), Boundary::new(1.0, 0.0, 0.0)],
            rhs: [
                parse("-(y1*y2 + 7 + (y1 - 1)^2)").unwrap(),
                parse("-(y1*y2 - 11 + (y2 - 1)^2)").unwrap(),
            ],
            params: Params::new(),
            exact: [Some(parse("3 - x^2").unwrap()), Some(parse("-1 + x^2").unwrap())],
        }
    }

    #[test]
    fn exact_recovery() {
        let p = ex3();
        let sol = ham_solve(&p, &HamConfig::new(3, [-1.0, -1.0])).unwrap();
        let solver = HamSolver::new(&p, DEFAULT_DEGREE, &equispaced(101)).unwrap();
        for i in 0..2 {
            let exact = solver.exact_grid(i).unwrap().unwrap();
            assert!((sol.phi(i) - &exact).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn zero_source_keeps_initial_guess() {
        let p = Problem {
            weights: [Weight::Power(1), Weight::Power(2)],
            boundary: [Boundary::new(2.0, 1.0, 3.0), Boundary::new(1.0, 0.0, -1.0)],
            rhs: [Expr::num(0.0), Expr::num(0.0)],
            params: Params::new(),
            exact: [None, None],
        };
        let sol = ham_solve(&p, &HamConfig::new(4, [-0.7, -1.2])).unwrap();
        for k in 1..=4 {
            assert_eq!(sol.terms[0][k].max_abs_nodes(), 0.0);
        }
        assert!(sol.phi(0).values().iter().all(|v| *v == 1.5));
        assert!(sol.phi(1).values().iter().all(|v| *v == -1.0));
    }

    #[test]
    fn initial_guess_residual() {
        let p = ex3();
        let solver = HamSolver::new(&p, DEFAULT_DEGREE, &equispaced(101)).unwrap();
        let phi1 = GridFn::constant(solver.grid(), 2.0);
        let phi2 = GridFn::constant(solver.grid(), 0.0);
        let [e1, _] = solver.integral_residual(&phi1, &phi2).unwrap();
        // apply(const -8) for k = 3 is -(x^2 - 1), so E1 = mean((x^2 - 1)^2)
        let want: f64 = equispaced(101).iter().map(|x| (x * x - 1.0).powi(2)).sum::<f64>() / 101.0;
        assert!((e1 - want).abs() < 1e-12, "{e1} vs {want}");
    }

    #[test]
    fn divergence_is_reported() {
        let p = Problem {
            weights: [Weight::Power(2), Weight::Power(2)],
            boundary: [Boundary::new(1.0, 0.0, 1.0), Boundary::new(1.0, 0.0, 1.0)],
            rhs: [parse("exp(10*y1)").unwrap(), parse("y2").unwrap()],
            params: Params::new(),
            exact: [None, None],
        };
        let err = ham_solve(&p, &HamConfig::new(12, [-3.0, -1.0])).unwrap_err();
        assert!(matches!(err, HamError::Diverged { component: 0, .. }), "{err}");
    }

    #[test]
    fn operator_residual_matches_differentiation() {
        let p = ex3();
        let solver = HamSolver::new(&p, DEFAULT_DEGREE, &equispaced(11)).unwrap();
        let sol = solver.solve(2, [-0.8, -0.9]).unwrap();
        let xs = equispaced(11);
        let direct = solver.differential_residual(sol.phi(0), sol.phi(1), &xs).unwrap();
        let via_recursion = solver.operator_residual(&sol, &xs).unwrap();
        for ((a, b), x) in direct.iter().zip(&via_recursion).zip(&xs) {
            // spectral second derivatives lose accuracy at the ends
            let tol = if *x == 0.0 || *x == 1.0 { 1e-6 } else { 1e-9 };
            for i in 0..2 {
                assert!(a[i] > 1e-3);
                assert!((a[i] - b[i].abs()).abs() < tol, "x = {x}: {} vs {}", a[i], b[i]);
            }
        }
        // exact at c = -1, where only roundoff is left
        let sol = solver.solve(3, [-1.0, -1.0]).unwrap();
        let r = solver.operator_residual(&sol, &xs).unwrap();
        assert!(r.iter().flatten().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn config_validation() {
        assert!(HamConfig::new(0, [-1.0, -1.0]).validate().is_err());
        assert!(HamConfig::new(2, [0.0, -1.0]).validate().is_err());
        let mut cfg = HamConfig::new(2, [-1.0, -1.0]);
        cfg.degree = 8;
        assert!(cfg.validate().is_err());
        let mut p = ex3();
        p.boundary[1].a = 0.0;
        assert!(matches!(p.validate(), Err(HamError::InvalidProblem(_))));
    }
}
