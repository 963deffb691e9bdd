use std::sync::Arc;

use super::algebra::{as_integer, Arith, Fault, Jet};
use super::{BinOp, Expr, ExprError, Func, Params, Var};
use crate::funcspace::{FuncError, Grid, GridFn};

/// Power series in q whose coefficients are functions on one grid.
#[derive(Debug, Clone)]
pub struct QSeries {
    coeffs: Vec<GridFn>,
}

impl QSeries {
    /// Builds a series from its coefficients; all must share one degree.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<GridFn>) -> Result<QSeries, FuncError> {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let n = coeffs[0].values().len();
        if let Some(c) = coeffs.iter().find(|c| c.values().len() != n) {
            return Err(FuncError::LengthMismatch {
                expected: n,
                got: c.values().len(),
            });
        }
        Ok(QSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &GridFn {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[GridFn] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<GridFn> {
        self.coeffs
    }

    /// `sum_k coeffs[k] * q^k`.
    pub fn eval_at(&self, q: f64) -> GridFn {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * q) + c;
        }
        acc
    }
}

fn fault(e: &Expr, x: f64, f: Fault) -> ExprError {
    match f {
        Fault::Degenerate(value) => ExprError::Degenerate {
            expr: e.to_string(),
            x,
            value,
        },
        f => ExprError::Domain {
            expr: e.to_string(),
            x,
            reason: f.reason(),
        },
    }
}

fn walk<T: Arith>(e: &Expr, x: f64, y1: &T, y2: &T, params: &Params) -> Result<T, ExprError> {
    let at = |r: Result<T, Fault>| r.map_err(|f| fault(e, x, f));
    match e {
        Expr::Num(v) => Ok(y1.lift(*v)),
        Expr::Var(Var::X) => Ok(y1.lift(x)),
        Expr::Var(Var::Y1) => Ok(y1.clone()),
        Expr::Var(Var::Y2) => Ok(y2.clone()),
        Expr::Param(name) => params
            .get(name)
            .map(|v| y1.lift(*v))
            .ok_or_else(|| ExprError::UnboundParameter(name.clone())),
        Expr::Neg(a) => Ok(walk(a, x, y1, y2, params)?.neg()),
        Expr::Call(func, a) => {
            let u = walk(a, x, y1, y2, params)?;
            match func {
                Func::Exp => Ok(u.exp()),
                Func::Ln => at(u.ln()),
                Func::Sqrt => at(u.sqrt()),
            }
        }
        Expr::Bin(BinOp::Pow, base, expo) if !expo.uses_var(Var::Y1) && !expo.uses_var(Var::Y2) => {
            let u = walk(base, x, y1, y2, params)?;
            let alpha = walk(expo, x, &0.0, &0.0, params)?;
            match as_integer(alpha) {
                Some(n) => at(u.powi(n)),
                None => at(u.powf(alpha)),
            }
        }
        Expr::Bin(op, l, r) => {
            let a = walk(l, x, y1, y2, params)?;
            let b = walk(r, x, y1, y2, params)?;
            match op {
                BinOp::Add => Ok(a.add(&b)),
                BinOp::Sub => Ok(a.sub(&b)),
                BinOp::Mul => Ok(a.mul(&b)),
                BinOp::Div => at(a.div(&b)),
                BinOp::Pow => {
                    if a.lead() <= 0.0 {
                        return Err(fault(e, x, Fault::NegativeBase(a.lead())));
                    }
                    Ok(at(a.ln())?.mul(&b).exp())
                }
            }
        }
    }
}

/// Evaluates `e` at one point.
pub fn eval_scalar(e: &Expr, x: f64, y1: f64, y2: f64, params: &Params) -> Result<f64, ExprError> {
    walk(e, x, &y1, &y2, params)
}

/// Evaluates `e` on truncated series in q, with `x` held fixed.
///
/// Seeding `y1 = v + q` gives `df/dy1` as coefficient 1, and so on.
pub fn eval_jet(e: &Expr, x: f64, y1: &Jet, y2: &Jet, params: &Params) -> Result<Jet, ExprError> {
    assert_eq!(y1.order(), y2.order(), "jets of different order");
    walk(e, x, y1, y2, params)
}

/// Evaluates `e` at every node of the grid of `y1`.
pub fn eval_grid(
    e: &Expr,
    y1: &GridFn,
    y2: &GridFn,
    params: &Params,
) -> Result<GridFn, ExprError> {
    let grid = y1.grid();
    let y2 = aligned(y2, grid);
    let mut out = Vec::with_capacity(grid.len());
    for ((&x, &a), &b) in grid.nodes().iter().zip(y1.values()).zip(y2.values()) {
        let v = eval_scalar(e, x, a, b, params)?;
        if !v.is_finite() {
            return Err(ExprError::Domain {
                expr: e.to_string(),
                x,
                reason: format!("non-finite value {v}"),
            });
        }
        out.push(v);
    }
    Ok(GridFn::from_raw(grid, out))
}

fn aligned<'a>(f: &'a GridFn, grid: &Arc<Grid>) -> std::borrow::Cow<'a, GridFn> {
    if f.degree() == grid.degree() {
        std::borrow::Cow::Borrowed(f)
    } else {
        std::borrow::Cow::Owned(f.resample(grid.degree()).expect("degree already validated"))
    }
}

/// Truncation at order `m` of `f(x, Y1(q), Y2(q))` as a power series in q,
/// evaluated nodewise on the grid of `x`.
///
/// Coefficient `k` of the result is the k-th homotopy derivative `H_k`.
///
/// # Panics
/// If either input series has order below `m` or lives on a different grid.
pub fn eval_series(
    e: &Expr,
    x: &GridFn,
    y1: &QSeries,
    y2: &QSeries,
    m: usize,
    params: &Params,
) -> Result<QSeries, ExprError> {
    assert!(
        y1.order() >= m && y2.order() >= m,
        "input series of order {} and {} cannot give order {m}",
        y1.order(),
        y2.order()
    );
    let len = x.values().len();
    assert!(
        y1.coeffs[..=m].iter().chain(&y2.coeffs[..=m]).all(|c| c.values().len() == len),
        "series coefficients live on a different grid"
    );
    let mut out = vec![vec![0.0; len]; m + 1];
    for (node, &xv) in x.values().iter().enumerate() {
        let j1 = Jet::new(y1.coeffs[..=m].iter().map(|c| c.values()[node]).collect());
        let j2 = Jet::new(y2.coeffs[..=m].iter().map(|c| c.values()[node]).collect());
        let h = walk(e, xv, &j1, &j2, params)?;
        for (k, v) in h.into_coeffs().into_iter().enumerate() {
            out[k][node] = v;
        }
    }
    let grid = x.grid();
    Ok(QSeries {
        coeffs: out.into_iter().map(|v| GridFn::from_raw(grid, v)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn params(kv: &[(&str, f64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn scalar_examples() {
        let f1 = parse("a*y1^2 + b*y1*y2").unwrap();
        let p = params(&[("a", 1.0), ("b", 0.4)]);
        assert!((eval_scalar(&f1, 0.0, 1.0, 2.0, &p).unwrap() - 1.8).abs() < 1e-15);

        let f3 = parse("y1*y2 + 7 + (y1-1)^2").unwrap();
        assert_eq!(eval_scalar(&f3, 0.0, 2.0, 0.0, &Params::new()).unwrap(), 8.0);

        let lit = parse("3.5").unwrap();
        assert_eq!(eval_scalar(&lit, 0.3, 0.0, 0.0, &Params::new()).unwrap(), 3.5);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("1 + ln(y1 - 2)").unwrap();
        match eval_scalar(&e, 0.25, 1.0, 0.0, &Params::new()).unwrap_err() {
            ExprError::Domain { expr, x, .. } => {
                assert_eq!(expr, "ln(y1 - 2)");
                assert_eq!(x, 0.25);
            }
            other => panic!("{other}"),
        }
        let e = parse("y2/(y1 - 1)").unwrap();
        assert!(matches!(
            eval_scalar(&e, 0.0, 1.0, 1.0, &Params::new()),
            Err(ExprError::Domain { .. })
        ));
        let e = parse("y1^-2").unwrap();
        assert!(matches!(
            eval_scalar(&e, 0.0, 0.0, 1.0, &Params::new()),
            Err(ExprError::Domain { .. })
        ));
        let e = parse("k*y1").unwrap();
        assert_eq!(
            eval_scalar(&e, 0.0, 0.0, 1.0, &Params::new()).unwrap_err(),
            ExprError::UnboundParameter("k".into())
        );
    }

    #[test]
    fn series_examples() {
        let grid = Grid::new(16).unwrap();
        let x = GridFn::identity(&grid);
        let c = |v| GridFn::constant(&grid, v);
        let (u, v) = (0.3, -1.2);

        let y1 = QSeries::new(vec![c(1.0), c(u)]).unwrap();
        let y2 = QSeries::new(vec![c(2.0), c(v)]).unwrap();
        let h = eval_series(&parse("y1*y2").unwrap(), &x, &y1, &y2, 1, &Params::new()).unwrap();
        assert!(h.coeff(0).values().iter().all(|&w| w == 2.0));
        assert!(h.coeff(1).values().iter().all(|&w| (w - (v + 2.0 * u)).abs() < 1e-15));

        let y1 = QSeries::new(vec![c(0.0), x.mul(&x), c(0.0)]).unwrap();
        let h = eval_series(&parse("exp(y1)").unwrap(), &x, &y1, &y1, 2, &Params::new()).unwrap();
        for (i, &xv) in grid.nodes().iter().enumerate() {
            assert!((h.coeff(0).values()[i] - 1.0).abs() < 1e-15);
            assert!((h.coeff(1).values()[i] - xv * xv).abs() < 1e-15);
            assert!((h.coeff(2).values()[i] - xv.powi(4) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn series_degeneracy_is_reported() {
        let grid = Grid::new(16).unwrap();
        let x = GridFn::identity(&grid);
        // y1 = x vanishes at the left node
        let y1 = QSeries::new(vec![x.clone(), GridFn::constant(&grid, 1.0)]).unwrap();
        let err = eval_series(&parse("1/y1").unwrap(), &x, &y1, &y1, 1, &Params::new()).unwrap_err();
        assert!(matches!(err, ExprError::Degenerate { x, .. } if x == 0.0));
    }

    #[test]
    fn variable_exponent() {
        let e = parse("y1^y2").unwrap();
        let v = eval_scalar(&e, 0.0, 2.0, 3.0, &Params::new()).unwrap();
        assert!((v - 8.0).abs() < 1e-14);
    }
}
