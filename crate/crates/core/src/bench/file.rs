//! TOML problem files.
//!
//! ```toml
//! [meta]
//! name = "example-4"
//! description = "exponential nonlinearity"
//!
//! [weights]
//! k1 = 5              # p1(x) = x^5; or p1 = "x^2*(1 + x)"
//! k2 = 3
//!
//! [boundary]          # a_i y_i(1) + b_i y_i'(1) = c_i
//! a1 = 1
//! b1 = 0
//! c1 = "-2*ln(2)"     # numbers or constant expressions
//! a2 = 1
//! b2 = 0
//! c2 = "2*ln(2)"
//!
//! [rhs]
//! f1 = "-8*exp(y1) - 16*exp(-y2/2)"
//! f2 = "8*exp(-y2) + 8*exp(y1/2)"
//!
//! [params]            # optional named constants
//!
//! [exact]             # optional
//! y1 = "-2*ln(1 + x^2)"
//! y2 = "2*ln(1 + x^2)"
//!
//! [solver]            # optional
//! order = 4
//! degree = 64
//! residual_nodes = 101
//!
//! [tuner]             # optional
//! c1 = [-1.5, -0.25]
//! c2 = [-1.5, -0.25]
//! budget = 2000
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{eval_scalar, parse, Expr, ExprError, Params, Var};
use crate::green::Weight;
use crate::ham::{Boundary, HamError, Problem};
use crate::tuner::SearchBox;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Toml(String),
    #[error("{field}: {source}")]
    Expr { field: String, source: ExprError },
    #[error("{0}")]
    Invalid(String),
}

impl From<HamError> for FileError {
    fn from(e: HamError) -> Self {
        FileError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SolverSettings {
    pub order: Option<usize>,
    pub degree: Option<usize>,
    pub residual_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TunerSettings {
    pub c1: Option<(f64, f64)>,
    pub c2: Option<(f64, f64)>,
    pub budget: Option<usize>,
}

impl TunerSettings {
    /// The search box with unset ranges taken from `default`.
    pub fn search(&self, default: SearchBox) -> SearchBox {
        SearchBox {
            c1: self.c1.unwrap_or(default.c1),
            c2: self.c2.unwrap_or(default.c2),
        }
    }
}

/// A parsed problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub name: String,
    pub description: String,
    pub problem: Problem,
    pub solver: SolverSettings,
    pub tuner: TunerSettings,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k1: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p2: Option<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    a1: Scalar,
    b1: Scalar,
    c1: Scalar,
    a2: Scalar,
    b2: Scalar,
    c2: Scalar,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRhs {
    f1: String,
    f2: String,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawExact {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y2: Option<String>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residual_nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawTuner {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c1: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c2: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<usize>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    meta: RawMeta,
    weights: RawWeights,
    boundary: RawBoundary,
    rhs: RawRhs,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<RawExact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<RawSolver>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tuner: Option<RawTuner>,
}

fn expr_field(field: &str, text: &str) -> Result<Expr, FileError> {
    parse(text).map_err(|source| FileError::Expr {
        field: field.to_string(),
        source,
    })
}

fn constant(field: &str, v: &Scalar, params: &Params) -> Result<f64, FileError> {
    let value = match v {
        Scalar::Int(i) => *i as f64,
        Scalar::Float(f) => *f,
        Scalar::Text(s) => {
            let e = expr_field(field, s)?;
            if [Var::X, Var::Y1, Var::Y2].iter().any(|&v| e.uses_var(v)) {
                return Err(FileError::Invalid(format!(
                    "{field} must be a constant expression, got {s:?}"
                )));
            }
            eval_scalar(&e, 0.0, 0.0, 0.0, params).map_err(|source| FileError::Expr {
                field: field.to_string(),
                source,
            })?
        }
    };
    if !value.is_finite() {
        return Err(FileError::Invalid(format!("{field} is not finite")));
    }
    Ok(value)
}

fn weight(field: &str, k: Option<u32>, p: Option<&str>) -> Result<Weight, FileError> {
    match (k, p) {
        (Some(k), None) => Ok(Weight::Power(k)),
        (None, Some(p)) => Ok(Weight::General(expr_field(field, p)?)),
        (None, None) => Err(FileError::Invalid(format!(
            "weights: one of k{0} or p{0} is required",
            &field[1..]
        ))),
        (Some(_), Some(_)) => Err(FileError::Invalid(format!(
            "weights: k{0} and p{0} are mutually exclusive",
            &field[1..]
        ))),
    }
}

fn range(field: &str, r: Option<[f64; 2]>) -> Result<Option<(f64, f64)>, FileError> {
    match r {
        Some([lo, hi]) if !(lo < hi) => Err(FileError::Invalid(format!(
            "tuner.{field} must be an increasing pair"
        ))),
        other => Ok(other.map(|[lo, hi]| (lo, hi))),
    }
}

impl ProblemFile {
    pub fn from_toml(text: &str) -> Result<ProblemFile, FileError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| FileError::Toml(e.to_string()))?;
        let params: Params = raw.params;
        let weights = [
            weight("p1", raw.weights.k1, raw.weights.p1.as_deref())?,
            weight("p2", raw.weights.k2, raw.weights.p2.as_deref())?,
        ];
        let bc = &raw.boundary;
        let boundary = [
            Boundary::new(
                constant("a1", &bc.a1, &params)?,
                constant("b1", &bc.b1, &params)?,
                constant("c1", &bc.c1, &params)?,
            ),
            Boundary::new(
                constant("a2", &bc.a2, &params)?,
                constant("b2", &bc.b2, &params)?,
                constant("c2", &bc.c2, &params)?,
            ),
        ];
        let rhs = [expr_field("f1", &raw.rhs.f1)?, expr_field("f2", &raw.rhs.f2)?];
        let exact = match &raw.exact {
            Some(e) => [
                e.y1.as_deref().map(|s| expr_field("exact.y1", s)).transpose()?,
                e.y2.as_deref().map(|s| expr_field("exact.y2", s)).transpose()?,
            ],
            None => [None, None],
        };
        let problem = Problem {
            weights,
            boundary,
            rhs,
            params,
            exact,
        };
        problem.validate()?;

        let s = raw.solver.unwrap_or_default();
        let t = raw.tuner.unwrap_or_default();
        Ok(ProblemFile {
            name: raw.meta.name.unwrap_or_default(),
            description: raw.meta.description.unwrap_or_default(),
            problem,
            solver: SolverSettings {
                order: s.order,
                degree: s.degree,
                residual_nodes: s.residual_nodes,
            },
            tuner: TunerSettings {
                c1: range("c1", t.c1)?,
                c2: range("c2", t.c2)?,
                budget: t.budget,
            },
        })
    }

    pub fn load(path: &Path) -> Result<ProblemFile, FileError> {
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ProblemFile::from_toml(&text)
    }

    /// Wraps a problem with no settings.
    pub fn from_problem(name: &str, description: &str, problem: Problem) -> ProblemFile {
        ProblemFile {
            name: name.to_string(),
            description: description.to_string(),
            problem,
            solver: SolverSettings::default(),
            tuner: TunerSettings::default(),
        }
    }

    /// Serializes to TOML. Boundary constants are written as numbers.
    pub fn to_toml(&self) -> String {
        let p = &self.problem;
        let (k, e): (Vec<Option<u32>>, Vec<Option<String>>) = p
            .weights
            .iter()
            .map(|w| match w {
                Weight::Power(k) => (Some(*k), None),
                Weight::General(e) => (None, Some(e.to_string())),
            })
            .unzip();
        let num = Scalar::Float;
        let raw = RawFile {
            meta: RawMeta {
                name: Some(self.name.clone()).filter(|s| !s.is_empty()),
                description: Some(self.description.clone()).filter(|s| !s.is_empty()),
            },
            weights: RawWeights {
                k1: k[0],
                k2: k[1],
                p1: e[0].clone(),
                p2: e[1].clone(),
            },
            boundary: RawBoundary {
                a1: num(p.boundary[0].a),
                b1: num(p.boundary[0].b),
                c1: num(p.boundary[0].c),
                a2: num(p.boundary[1].a),
                b2: num(p.boundary[1].b),
                c2: num(p.boundary[1].c),
            },
            rhs: RawRhs {
                f1: p.rhs[0].to_string(),
                f2: p.rhs[1].to_string(),
            },
            params: p.params.clone(),
            exact: (p.exact[0].is_some() || p.exact[1].is_some()).then(|| RawExact {
                y1: p.exact[0].as_ref().map(Expr::to_string),
                y2: p.exact[1].as_ref().map(Expr::to_string),
            }),
            solver: (self.solver != SolverSettings::default()).then_some(RawSolver {
                order: self.solver.order,
                degree: self.solver.degree,
                residual_nodes: self.solver.residual_nodes,
            }),
            tuner: (self.tuner != TunerSettings::default()).then(|| RawTuner {
                c1: self.tuner.c1.map(|(a, b)| [a, b]),
                c2: self.tuner.c2.map(|(a, b)| [a, b]),
                budget: self.tuner.budget,
            }),
        };
        toml::to_string(&raw).expect("problem files always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX4: &str = r#"
[meta]
name = "four"

[weights]
k1 = 5
k2 = 3

[boundary]
a1 = 1
b1 = 0
c1 = "-2*ln(2)"
a2 = 1
b2 = 0.0
c2 = "2*ln(2)"

[rhs]
f1 = "-8*exp(y1) - 16*exp(-y2/2)"
f2 = "8*exp(-y2) + 8*exp(y1/2)"

[exact]
y1 = "-2*ln(1 + x^2)"
y2 = "2*ln(1 + x^2)"

[tuner]
c1 = [-1.2, -0.5]
budget = 500
"#;

    #[test]
    fn constant_expressions() {
        let f = ProblemFile::from_toml(EX4).unwrap();
        assert!((f.problem.boundary[0].c + 1.3862944).abs() < 1e-7);
        assert_eq!(f.problem.weights, [Weight::Power(5), Weight::Power(3)]);
        assert_eq!(f.tuner.c1, Some((-1.2, -0.5)));
        assert_eq!(f.tuner.c2, None);

        let seven = EX4.replace("\"-2*ln(2)\"", "\"1/sqrt(2)\"");
        let f = ProblemFile::from_toml(&seven).unwrap();
        assert!((f.problem.boundary[0].c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let f = ProblemFile::from_toml(EX4).unwrap();
        let again = ProblemFile::from_toml(&f.to_toml()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn rejections() {
        let zero_a = EX4.replace("a1 = 1", "a1 = 0");
        assert!(matches!(ProblemFile::from_toml(&zero_a), Err(FileError::Invalid(_))));

        let bad_expr = EX4.replace("-8*exp(y1)", "-8*exp(y1");
        match ProblemFile::from_toml(&bad_expr).unwrap_err() {
            FileError::Expr { field, .. } => assert_eq!(field, "f1"),
            other => panic!("{other}"),
        }

        let typo = EX4.replace("[rhs]", "[rhs]\nf3 = \"y1\"");
        assert!(matches!(ProblemFile::from_toml(&typo), Err(FileError::Toml(_))));

        let both = EX4.replace("k1 = 5", "k1 = 5\np1 = \"x\"");
        assert!(matches!(ProblemFile::from_toml(&both), Err(FileError::Invalid(_))));

        let varying = EX4.replace("\"-2*ln(2)\"", "\"x + 1\"");
        assert!(matches!(ProblemFile::from_toml(&varying), Err(FileError::Invalid(_))));

        let unbound = EX4.replace("-8*exp(y1)", "-k*exp(y1)");
        assert!(matches!(ProblemFile::from_toml(&unbound), Err(FileError::Invalid(_))));
    }
}
