//! CSV, JSON and plain-text renderings. Every number is printed with nine
//! significant digits so that repeated runs give identical bytes.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::table::{Check, TableReport};
use super::BenchError;
use crate::ham::{HamConfig, HamSolver, Solution};
use crate::tuner::Landscape;

/// Formats `v` with nine significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), num)
}

/// Magnitudes of signed residual rows.
pub(crate) fn abs_rows(rows: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    rows.into_iter().map(|r| r.map(f64::abs)).collect()
}

/// Abscissae of a solve report: `0.1, 0.2, ..., 1.0`.
pub fn report_points() -> Vec<f64> {
    (1..=10).map(|j| j as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveRow {
    pub x: f64,
    pub phi: [f64; 2],
    /// Differential residuals.
    pub res: [f64; 2],
    pub exact: Option<[f64; 2]>,
    /// `|phi - exact|`.
    pub err: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub source: String,
    pub config: HamConfig,
    /// `(E_1, E_2)` over the residual nodes.
    pub integral_residual: [f64; 2],
    pub rows: Vec<SolveRow>,
    /// Largest `err` over `rows`, when an exact solution is known.
    pub max_err: Option<[f64; 2]>,
}

/// Tabulates `sol` at `xs` (ascending, in `(0, 1]`).
pub fn solve_report(
    source: &str,
    solver: &HamSolver,
    sol: &Solution,
    xs: &[f64],
) -> Result<SolveReport, BenchError> {
    let (phi1, phi2) = (sol.phi(0), sol.phi(1));
    let res = abs_rows(solver.operator_residual(sol, xs)?);
    let p = solver.problem();
    let has_exact = p.exact.iter().all(Option::is_some);
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, r) in xs.iter().zip(res) {
        let phi = [phi1.eval(x)?, phi2.eval(x)?];
        let exact = if has_exact {
            let mut e = [0.0; 2];
            for i in 0..2 {
                e[i] = p
                    .exact_at(i, x)
                    .expect("exact present")
                    .map_err(crate::ham::HamError::Residual)?;
            }
            Some(e)
        } else {
            None
        };
        rows.push(SolveRow {
            x,
            phi,
            res: r,
            exact,
            err: exact.map(|e| [(phi[0] - e[0]).abs(), (phi[1] - e[1]).abs()]),
        });
    }
    let max_err = has_exact.then(|| {
        rows.iter().fold([0.0f64; 2], |m, r| {
            let e = r.err.expect("exact present");
            [m[0].max(e[0]), m[1].max(e[1])]
        })
    });
    Ok(SolveReport {
        source: source.to_string(),
        config: sol.config.clone(),
        integral_residual: solver.integral_residual(phi1, phi2)?,
        rows,
        max_err,
    })
}

pub fn solve_csv(r: &SolveReport) -> String {
    let exact = r.max_err.is_some();
    let mut out = String::from("x,phi1,phi2,res1,res2");
    if exact {
        out.push_str(",exact1,exact2,err1,err2");
    }
    out.push('\n');
    for row in &r.rows {
        let mut cols = vec![num(row.x), num(row.phi[0]), num(row.phi[1]), num(row.res[0]), num(row.res[1])];
        if let (Some(e), Some(d)) = (row.exact, row.err) {
            cols.extend([num(e[0]), num(e[1]), num(d[0]), num(d[1])]);
        }
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn solve_table(r: &SolveReport) -> String {
    let n = r.config.order;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}  order {}  c = ({}, {})  N = {}",
        r.source, n, r.config.c0[0], r.config.c0[1], r.config.degree
    );
    let mut head = format!(
        "{:>5} {:>16} {:>16} {:>14} {:>14}",
        "x",
        format!("phi1{n}"),
        format!("phi2{n}"),
        format!("Res1{n}"),
        format!("Res2{n}")
    );
    if r.max_err.is_some() {
        head.push_str(&format!(" {:>14} {:>14}", "err1", "err2"));
    }
    out.push_str(&head);
    out.push('\n');
    for row in &r.rows {
        let _ = write!(
            out,
            "{:>5.2} {:>16.10} {:>16.10} {:>14.4e} {:>14.4e}",
            row.x, row.phi[0], row.phi[1], row.res[0], row.res[1]
        );
        if let Some(e) = row.err {
            let _ = write!(out, " {:>14.4e} {:>14.4e}", e[0], e[1]);
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "E1 = {}  E2 = {}",
        num(r.integral_residual[0]),
        num(r.integral_residual[1])
    );
    if let Some(m) = r.max_err {
        let _ = writeln!(out, "max error: {}  {}", num(m[0]), num(m[1]));
    }
    out
}

/// Rows `(c10, c20, E)` with `c10` outer and both axes ascending.
pub fn landscape_csv(l: &Landscape) -> String {
    let mut out = String::from("c10,c20,E\n");
    for (i, &u) in l.c1.iter().enumerate() {
        for (j, &v) in l.c2.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", num(u), num(v), opt(l.at(i, j)));
        }
    }
    out
}

fn check_name(c: Check) -> &'static str {
    match c {
        Check::Absolute => "abs",
        Check::Ratio => "ratio",
        Check::Info => "info",
    }
}

/// One line per compared cell.
pub fn bench_csv(reports: &[TableReport]) -> String {
    let mut out = String::from("example,variant,x,column,value,reference,check,pass\n");
    for r in reports {
        for c in &r.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.id,
                r.variant,
                num(c.x),
                c.column,
                num(c.value),
                num(c.reference),
                check_name(c.check),
                c.pass
            );
        }
    }
    out
}

/// Table layout mirroring the reference tables.
pub fn bench_table(r: &TableReport) -> String {
    let n = r.order;
    let mut out = String::new();
    let status = if r.passed { "PASS" } else { "FAIL" };
    let _ = writeln!(
        out,
        "example {}:{}  order {}  c = ({}, {})  tuned c = ({:.6}, {:.6})  {}",
        r.id, r.variant, n, r.c_reference[0], r.c_reference[1], r.tune.c_opt[0], r.tune.c_opt[1], status
    );
    let cols = [
        format!("phi1{n}"),
        format!("psi1{n}"),
        format!("phi2{n}"),
        format!("psi2{n}"),
        format!("Res1{n}"),
        format!("res1{n}"),
        format!("Res2{n}"),
        format!("res2{n}"),
    ];
    let _ = write!(out, "{:>5}", "x");
    for (k, c) in cols.iter().enumerate() {
        if k < 4 {
            let _ = write!(out, " {c:>13}");
        } else {
            let _ = write!(out, " {c:>10}");
        }
    }
    out.push('\n');
    for row in &r.rows {
        let _ = write!(out, "{:>5.1}", row.x);
        for v in [row.phi[0], row.psi[0], row.phi[1], row.psi[1]] {
            let _ = write!(out, " {v:>13.7}");
        }
        for v in [row.res[0], row.adm_res[0], row.res[1], row.adm_res[1]] {
            let _ = write!(out, " {v:>10.2e}");
        }
        out.push('\n');
    }
    for c in r.cells.iter().filter(|c| !c.pass) {
        let _ = writeln!(
            out,
            "  mismatch at x = {}: {} = {} vs {}",
            c.x,
            c.column,
            num(c.value),
            num(c.reference)
        );
    }
    out
}

/// Rounds every float in `v` to nine significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().expect("checked f64");
            let r: f64 = num(f).parse().expect("formatted float parses");
            if let Some(m) = serde_json::Number::from_f64(r) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with floats rounded by [`round_json`].
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::builtin;
    use crate::ham::{equispaced, HamSolver};

    #[test]
    fn nine_digits() {
        assert_eq!(num(1.0), "1.00000000e0");
        assert_eq!(num(-0.0001234567891), "-1.23456789e-4");
        let mut v = serde_json::json!({"a": [0.1234567891234, 3], "b": "s"});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.123456789,3],"b":"s"}"#);
    }

    #[test]
    fn trivial_solve_csv() {
        let mut p = builtin(3, None).unwrap().problem;
        p.rhs = [crate::expr::parse("0").unwrap(), crate::expr::parse("0").unwrap()];
        p.exact = [None, None];
        let solver = HamSolver::new(&p, 16, &equispaced(11)).unwrap();
        let sol = solver.solve(2, [-1.0, -1.0]).unwrap();
        let r = solve_report("trivial", &solver, &sol, &report_points()).unwrap();
        let csv = solve_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,phi1,phi2,res1,res2"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 10);
        for row in rows {
            assert_eq!(row.split(',').nth(1), Some("2.00000000e0"));
        }
    }
}
