//! Expression language for right-hand sides `f(x, y1, y2)` and weights `p(x)`.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* right associative *)
//! primary = number | ident | ident "(" expr ")" | "(" expr ")" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ident   = letter { letter | digit | "_" } ;
//! ```
//!
//! `x`, `y1` and `y2` are variables, `exp`, `ln` and `sqrt` are the available
//! functions, and every other identifier is a named parameter bound at
//! evaluation time.

mod algebra;
mod eval;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use algebra::Jet;
pub use algebra::DEGENERACY_EPS;
pub use eval::{eval_grid, eval_jet, eval_scalar, eval_series, QSeries};
pub use parser::parse;

/// Named parameter values.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y1,
    Y2,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y1 => "y1",
            Var::Y2 => "y2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        match s {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

const UNARY_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Param(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown function `{name}` at line {line}, column {column}")]
    UnknownFunction {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("domain error in `{expr}` at x = {x}: {reason}")]
    Domain { expr: String, x: f64, reason: String },
    #[error("degenerate leading coefficient in `{expr}` at x = {x} (|u0| = {value:e})")]
    Degenerate { expr: String, x: f64, value: f64 },
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    /// Negation of this expression.
    pub fn negated(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => UNARY_PRECEDENCE,
            Expr::Num(_) | Expr::Var(_) | Expr::Param(_) | Expr::Call(..) => ATOM_PRECEDENCE,
            Expr::Neg(_) => UNARY_PRECEDENCE,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }

    /// Names of all parameters referenced by the expression.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_params(out),
            Expr::Bin(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Expr::Num(_) | Expr::Var(_) => {}
        }
    }

    pub fn uses_var(&self, v: Var) -> bool {
        match self {
            Expr::Var(w) => *w == v,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses_var(v),
            Expr::Bin(_, l, r) => l.uses_var(v) || r.uses_var(v),
            Expr::Num(_) | Expr::Param(_) => false,
        }
    }

    /// True when the expression contains no variables.
    pub fn is_constant(&self) -> bool {
        !(self.uses_var(Var::X) || self.uses_var(Var::Y1) || self.uses_var(Var::Y2))
    }

    /// Fails with the first parameter not present in `params`.
    pub fn check_bound(&self, params: &Params) -> Result<(), ExprError> {
        match self.params().into_iter().find(|p| !params.contains_key(p)) {
            Some(p) => Err(ExprError::UnboundParameter(p)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{}", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Param(p) => f.write_str(p),
            Expr::Call(func, arg) => write!(f, "{}({})", func.name(), arg),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, e.precedence() < UNARY_PRECEDENCE)
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                let (left_paren, right_paren) = if *op == BinOp::Pow {
                    (l.precedence() <= p, r.precedence() < UNARY_PRECEDENCE)
                } else {
                    (l.precedence() < p, r.precedence() <= p)
                };
                write_operand(f, l, left_paren)?;
                if *op == BinOp::Pow {
                    f.write_str(op.symbol())?;
                } else {
                    write!(f, " {} ", op.symbol())?;
                }
                write_operand(f, r, right_paren)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_round_trips() {
        for src in [
            "a*y1^2 + b*y1*y2",
            "-8*exp(y1) - 16*exp(-y2/2)",
            "y1/(l1+y1)",
            "-x^2",
            "(-x)^2",
            "2^3^2",
            "(2^3)^2",
            "a - (b - c)",
            "a/(b*c)",
            "x^-1",
            "--y1",
            "1e-4 * y2",
            "(4*y1^-2 + 1)*y2^-3",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn parameter_collection() {
        let e = parse("a*y1^2 + b*y1*y2 - x").unwrap();
        let names: Vec<_> = e.params().into_iter().collect();
        assert_eq!(names, ["a", "b"]);
        assert!(e.uses_var(Var::X));
        assert!(!parse("2/5").unwrap().uses_var(Var::Y1));
        let mut params = Params::new();
        params.insert("a".into(), 1.0);
        assert_eq!(
            e.check_bound(&params).unwrap_err(),
            ExprError::UnboundParameter("b".into())
        );
    }
}
