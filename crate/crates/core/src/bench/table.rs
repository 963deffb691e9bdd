//! Reproduction of a reference table: tune `c`, solve at the tabulated and the
//! tuned values, and compare cell by cell.

use serde::Serialize;

use super::catalog::Builtin;
use super::report::abs_rows;
use super::BenchError;
use crate::ham::{equispaced, HamSolver};
use crate::tuner::{optimize_c, SearchBox, TuneOptions, TuneReport};

/// Abscissae of the reference rows.
pub const TABLE_X: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Absolute tolerance on solution values.
pub const VALUE_TOL: f64 = 5e-4;

/// Allowed ratio between computed and tabulated residuals.
pub const RESIDUAL_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchOptions {
    pub degree: usize,
    pub residual_nodes: usize,
    pub budget: usize,
    pub search: SearchBox,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            degree: crate::funcspace::DEFAULT_DEGREE,
            residual_nodes: crate::ham::DEFAULT_RESIDUAL_NODES,
            budget: 2000,
            search: SearchBox::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// `|value - reference| <= VALUE_TOL`.
    Absolute,
    /// `reference / RESIDUAL_FACTOR <= value <= reference * RESIDUAL_FACTOR`.
    Ratio,
    /// Reported, not gated.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub x: f64,
    pub column: &'static str,
    pub value: f64,
    pub reference: f64,
    pub check: Check,
    pub pass: bool,
}

impl Cell {
    fn new(x: f64, column: &'static str, value: f64, reference: f64, check: Check) -> Cell {
        let pass = match check {
            Check::Absolute => (value - reference).abs() <= VALUE_TOL,
            Check::Ratio => {
                value <= reference * RESIDUAL_FACTOR && value * RESIDUAL_FACTOR >= reference
            }
            Check::Info => true,
        };
        Cell {
            x,
            column,
            value,
            reference,
            check,
            pass,
        }
    }
}

/// Computed values at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    /// Homotopy partial sums at the reference `c`.
    pub phi: [f64; 2],
    /// Adomian partial sums.
    pub psi: [f64; 2],
    pub res: [f64; 2],
    pub adm_res: [f64; 2],
    /// Homotopy partial sums at the tuned `c`.
    pub phi_tuned: [f64; 2],
    pub res_tuned: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub id: u32,
    pub variant: &'static str,
    pub order: usize,
    /// The `c` the comparison runs at: tabulated, or `(-1, -1)` against an exact solution.
    pub c_reference: [f64; 2],
    pub tune: TuneReport,
    pub rows: Vec<Row>,
    pub cells: Vec<Cell>,
    pub passed: bool,
}

impl TableReport {
    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

/// Runs the tuner and both methods for one built-in and grades the result.
///
/// Variants with a reference table are compared against it. Variants without
/// one but with an exact solution are compared against that at `c = (-1, -1)`.
pub fn reproduce(b: &Builtin, opts: &BenchOptions) -> Result<TableReport, BenchError> {
    let solver = HamSolver::new(&b.problem, opts.degree, &equispaced(opts.residual_nodes))?;
    let order = b.order;
    let c_reference = b.reference.as_ref().map_or([-1.0, -1.0], |t| t.c0);
    if b.reference.is_none() && b.problem.exact.iter().any(Option::is_none) {
        return Err(BenchError::NoReference {
            id: b.id,
            variant: b.variant.to_string(),
        });
    }

    let mut tune_opts = TuneOptions::new(order);
    tune_opts.budget = opts.budget;
    tune_opts.search = opts.search;
    let tune = optimize_c(&solver, &tune_opts)?;

    let ham = solver.solve(order, c_reference)?;
    let adm = solver.solve_adm(order)?;
    let tuned = solver.solve(order, tune.c_opt)?;
    let res = abs_rows(solver.operator_residual(&ham, &TABLE_X)?);
    let adm_res = abs_rows(solver.operator_residual(&adm, &TABLE_X)?);
    let res_tuned = abs_rows(solver.operator_residual(&tuned, &TABLE_X)?);

    let mut rows = Vec::with_capacity(TABLE_X.len());
    for (j, &x) in TABLE_X.iter().enumerate() {
        let at = |s: &crate::ham::Solution| -> Result<[f64; 2], BenchError> {
            Ok([s.phi(0).eval(x)?, s.phi(1).eval(x)?])
        };
        rows.push(Row {
            x,
            phi: at(&ham)?,
            psi: at(&adm)?,
            res: res[j],
            adm_res: adm_res[j],
            phi_tuned: at(&tuned)?,
            res_tuned: res_tuned[j],
        });
    }

    let mut cells = Vec::new();
    match &b.reference {
        Some(table) => {
            for (row, r) in rows.iter().zip(&table.rows) {
                let x = row.x;
                cells.push(Cell::new(x, "phi1", row.phi[0], r.phi[0], Check::Absolute));
                cells.push(Cell::new(x, "psi1", row.psi[0], r.psi[0], Check::Absolute));
                cells.push(Cell::new(x, "phi2", row.phi[1], r.phi[1], Check::Absolute));
                cells.push(Cell::new(x, "psi2", row.psi[1], r.psi[1], Check::Absolute));
                cells.push(Cell::new(x, "res1", row.res[0], r.res[0], Check::Ratio));
                cells.push(Cell::new(x, "adm_res1", row.adm_res[0], r.adm_res[0], Check::Info));
                cells.push(Cell::new(x, "res2", row.res[1], r.res[1], Check::Ratio));
                cells.push(Cell::new(x, "adm_res2", row.adm_res[1], r.adm_res[1], Check::Info));
            }
        }
        None => {
            for row in &rows {
                let x = row.x;
                let exact = [0, 1].map(|i| b.problem.exact_at(i, x));
                let mut ex = [0.0; 2];
                for i in 0..2 {
                    ex[i] = exact[i]
                        .clone()
                        .expect("exact solution checked above")
                        .map_err(crate::ham::HamError::Residual)?;
                }
                cells.push(Cell::new(x, "phi1", row.phi[0], ex[0], Check::Absolute));
                cells.push(Cell::new(x, "psi1", row.psi[0], ex[0], Check::Absolute));
                cells.push(Cell::new(x, "phi2", row.phi[1], ex[1], Check::Absolute));
                cells.push(Cell::new(x, "psi2", row.psi[1], ex[1], Check::Absolute));
            }
        }
    }
    let passed = cells.iter().all(|c| c.pass);
    Ok(TableReport {
        id: b.id,
        variant: b.variant,
        order,
        c_reference,
        tune,
        rows,
        cells,
        passed,
    })
}
