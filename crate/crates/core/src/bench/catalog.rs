//! The seven built-in test problems and their reference tables.
//!
//! Examples 4 to 7 come in two variants. `exact` is the system whose stated
//! closed-form solution satisfies it; `table` flips the sign of both right-hand
//! sides, which is the system the reference tables were computed from.

use std::f64::consts::{LN_2, SQRT_2};

use thiserror::Error;

use crate::expr::{parse, Params};
use crate::green::Weight;
use crate::ham::{Boundary, Problem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("no built-in example {0} (expected 1 to 7)")]
    UnknownExample(u32),
    #[error("example {id} has no variant {variant:?} (available: {available})")]
    UnknownVariant {
        id: u32,
        variant: String,
        available: String,
    },
}

/// One row of a reference table at a single `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub x: f64,
    /// Homotopy partial sums at the tabulated `c`.
    pub phi: [f64; 2],
    /// Adomian partial sums.
    pub psi: [f64; 2],
    /// Differential residuals of `phi`.
    pub res: [f64; 2],
    /// Differential residuals of `psi`.
    pub adm_res: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    /// Index of the highest term in the tabulated partial sums.
    pub order: usize,
    /// Convergence-control values the table was computed at.
    pub c0: [f64; 2],
    pub rows: Vec<ReferenceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Builtin {
    pub id: u32,
    pub variant: &'static str,
    pub description: &'static str,
    pub problem: Problem,
    /// Order used when reproducing this variant.
    pub order: usize,
    pub reference: Option<ReferenceTable>,
    /// Remarks on how the system is encoded.
    pub notes: &'static [&'static str],
}

/// Variants of each example; the first is the default.
pub const VARIANTS: [&[&str]; 7] = [
    &["k1", "k2"],
    &["v1", "v2"],
    &["exact"],
    &["exact", "table"],
    &["exact", "table"],
    &["exact", "table"],
    &["exact", "table"],
];

/// Every `(id, variant)` pair in catalog order.
pub fn all() -> Vec<(u32, &'static str)> {
    VARIANTS
        .iter()
        .enumerate()
        .flat_map(|(i, vs)| vs.iter().map(move |v| (i as u32 + 1, *v)))
        .collect()
}

fn expr(s: &str) -> crate::expr::Expr {
    parse(s).expect("built-in expressions parse")
}

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn table(order: usize, c0: [f64; 2], rows: &[[f64; 9]]) -> Option<ReferenceTable> {
    let rows = rows
        .iter()
        .map(|r| ReferenceRow {
            x: r[0],
            phi: [r[1], r[3]],
            psi: [r[2], r[4]],
            res: [r[5], r[7]],
            adm_res: [r[6], r[8]],
        })
        .collect();
    Some(ReferenceTable { order, c0, rows })
}

fn negate(s: &str) -> String {
    format!("-({s})")
}

/// Looks up example `id`; `variant` defaults to the first listed.
pub fn builtin(id: u32, variant: Option<&str>) -> Result<Builtin, CatalogError> {
    let variants = *VARIANTS
        .get((id as usize).wrapping_sub(1))
        .ok_or(CatalogError::UnknownExample(id))?;
    let variant = match variant {
        None => variants[0],
        Some(v) => *variants.iter().find(|&&w| w == v).ok_or_else(|| {
            CatalogError::UnknownVariant {
                id,
                variant: v.to_string(),
                available: variants.join(", "),
            }
        })?,
    };
    let table_variant = variant == "table";
    let pick = |exact: &str| {
        if table_variant {
            expr(&negate(exact))
        } else {
            expr(exact)
        }
    };
    let exact_of = |a: &str, b: &str| {
        if table_variant {
            [None, None]
        } else {
            [Some(expr(a)), Some(expr(b))]
        }
    };

    let b = match id {
        1 => {
            let k = if variant == "k1" { 1 } else { 2 };
            let m1 = "y1*y2/((l1 + y1)*(m1 + y2))";
            let m2 = "y1*y2/((l2 + y1)*(m2 + y2))";
            let reference = if k == 1 {
                table(
                    2,
                    [-1.00010501, -1.0000443],
                    &[
                        [0.1, 1.9898484, 1.9898484, 1.0371204, 1.0371204, 2.46e-4, 2.46e-4, 7.40e-6, 7.40e-6],
                        [0.3, 1.9098583, 1.9098583, 1.0341207, 1.0341207, 2.17e-4, 2.17e-4, 6.51e-6, 6.51e-6],
                        [0.5, 1.7498793, 1.7498793, 1.0281213, 1.0281213, 1.61e-4, 1.60e-4, 4.83e-6, 4.82e-6],
                        [0.7, 1.5099140, 1.5099140, 1.0191224, 1.0191224, 8.62e-5, 8.62e-5, 2.58e-6, 2.58e-6],
                        [0.9, 1.1899659, 1.1899659, 1.0071239, 1.0071239, 1.51e-5, 1.51e-5, 4.55e-7, 4.55e-7],
                    ],
                )
            } else {
                table(
                    2,
                    [-0.995713, -0.996167],
                    &[
                        [0.1, 1.6598623, 1.6598747, 1.0247458, 1.0247462, 5.49e-5, 1.31e-4, 1.65e-6, 3.94e-6],
                        [0.3, 1.6065388, 1.6065503, 1.0227461, 1.0227465, 3.85e-5, 1.14e-4, 1.16e-6, 3.44e-6],
                        [0.5, 1.4998926, 1.4999020, 1.0187467, 1.0187470, 7.73e-6, 8.34e-5, 2.37e-7, 2.50e-6],
                        [0.7, 1.3399248, 1.3399312, 1.0127477, 1.0127479, 3.18e-5, 4.31e-5, 9.50e-7, 1.29e-6],
                        [0.9, 1.1266376, 1.1266400, 1.0047491, 1.0047492, 6.69e-5, 7.12e-6, 2.00e-6, 2.13e-7],
                    ],
                )
            };
            Builtin {
                id,
                variant,
                description: "coupled Michaelis-Menten uptake",
                problem: Problem {
                    weights: [Weight::Power(k), Weight::Power(k)],
                    boundary: [Boundary::new(1.0, 0.0, 1.0); 2],
                    rhs: [
                        expr(&negate(&format!("-b + a*{m1}"))),
                        expr(&negate(&format!("d*{m1} + e*{m2}"))),
                    ],
                    params: params(&[
                        ("a", 5.0),
                        ("b", 1.0),
                        ("c", 0.1),
                        ("d", 0.1),
                        ("e", 0.05),
                        ("l1", 1e-4),
                        ("l2", 1e-4),
                        ("m1", 1e-4),
                        ("m2", 1e-4),
                    ]),
                    exact: [None, None],
                },
                order: 2,
                reference,
                notes: &[
                    "sources carry an overall minus sign",
                    "f1 has no c*M2 term; the reference table is consistent only without it",
                ],
            }
        }
        2 => {
            let (p, reference) = if variant == "v1" {
                (
                    [1.0, 0.4, 0.5, 1.0],
                    table(
                        3,
                        [-0.767463, -0.789762],
                        &[
                            [0.1, 0.7826843, 0.7658317, 1.6923350, 1.6713156, 1.13e-2, 2.26e-1, 1.59e-2, 7.63e-1],
                            [0.3, 0.7982008, 0.7835530, 1.7144693, 1.6962143, 9.45e-3, 1.95e-1, 1.34e-2, 7.54e-1],
                            [0.5, 0.8302159, 0.8194185, 1.7600510, 1.7466228, 5.96e-3, 1.41e-1, 9.17e-3, 7.21e-1],
                            [0.7, 0.8808479, 0.8746115, 1.8319072, 1.8241881, 4.43e-4, 7.71e-2, 2.78e-3, 6.85e-1],
                            [0.9, 0.9536588, 0.9517495, 1.9347811, 1.9324416, 1.11e-2, 2.06e-2, 1.02e-2, 6.77e-1],
                        ],
                    ),
                )
            } else {
                (
                    [1.0; 4],
                    table(
                        3,
                        [-0.689796, -0.708697],
                        &[
                            [0.1, 0.6771397, 0.5967530, 1.6762408, 1.5967530, 4.27e-2, 1.143631, 4.62e-2, 1.1436],
                            [0.3, 0.6992063, 0.6293170, 1.6983544, 1.6293170, 3.57e-2, 0.99354, 3.94e-2, 0.9935],
                            [0.5, 0.7452053, 0.6936848, 1.7444538, 1.6936848, 2.26e-2, 0.72673, 2.71e-2, 0.7267],
                            [0.7, 0.8192784, 0.7895710, 1.8187051, 1.7895710, 1.36e-3, 0.40619, 8.10e-3, 0.4061],
                            [0.9, 0.9286631, 0.9196325, 1.9284103, 1.9196325, 4.41e-2, 0.11286, 3.25e-2, 0.1128],
                        ],
                    ),
                )
            };
            Builtin {
                id,
                variant,
                description: "quadratic coupling",
                problem: Problem {
                    weights: [Weight::Power(2), Weight::Power(2)],
                    boundary: [Boundary::new(1.0, 0.0, 1.0), Boundary::new(1.0, 0.0, 2.0)],
                    rhs: [expr("a*y1^2 + b*y1*y2"), expr("c*y1^2 + d*y1*y2")],
                    params: params(&[("a", p[0]), ("b", p[1]), ("c", p[2]), ("d", p[3])]),
                    exact: [None, None],
                },
                order: 3,
                reference,
                notes: &["the d*y1*y2 term of f2 enters with a plus sign"],
            }
        }
        3 => Builtin {
            id,
            variant,
            description: "polynomial source with exact solution (3 - x^2, x^2 - 1)",
            problem: Problem {
                weights: [Weight::Power(3), Weight::Power(4)],
                boundary: [Boundary::new(1.0, 0.0, 2.0), Boundary::new(1.0, 0.0, 0.0)],
                rhs: [
                    expr("-(y1*y2 + 7 + (y1 - 1)^2)"),
                    expr("-(y1*y2 - 11 + (y2 - 1)^2)"),
                ],
                params: Params::new(),
                exact: [Some(expr("3 - x^2")), Some(expr("-1 + x^2"))],
            },
            order: 3,
            reference: None,
            notes: &["sources carry an overall minus sign so that the closed form solves the system"],
        },
        4 => Builtin {
            id,
            variant,
            description: if table_variant {
                "exponential nonlinearity, sign convention of the reference table"
            } else {
                "exponential nonlinearity with exact solution -2 ln(1+x^2), 2 ln(1+x^2)"
            },
            problem: Problem {
                weights: [Weight::Power(5), Weight::Power(3)],
                boundary: [Boundary::new(1.0, 0.0, -2.0 * LN_2), Boundary::new(1.0, 0.0, 2.0 * LN_2)],
                rhs: [pick("-8*exp(y1) - 16*exp(-y2/2)"), pick("8*exp(-y2) + 8*exp(y1/2)")],
                params: Params::new(),
                exact: exact_of("-2*ln(1 + x^2)", "2*ln(1 + x^2)"),
            },
            order: if table_variant { 6 } else { 4 },
            reference: if table_variant {
                table(
                    6,
                    [-0.763735, -0.743226],
                    &[
                        [0.1, -2.0457870, -2.0358737, 1.9505604, 1.9379913, 2.20e-3, 0.398753, 1.65e-3, 0.290684],
                        [0.3, -1.9982891, -1.9904854, 1.9101010, 1.8999319, 1.51e-3, 0.302292, 1.17e-3, 0.219317],
                        [0.5, -1.9006122, -1.8958769, 1.8267970, 1.8202489, 7.51e-4, 0.168370, 6.34e-4, 0.120416],
                        [0.7, -1.7468574, -1.7447898, 1.6954112, 1.6922536, 3.74e-4, 6.38e-2, 3.94e-4, 4.39e-2],
                        [0.9, -1.5265642, -1.5261201, 1.5066963, 1.5059088, 6.69e-4, 1.18e-2, 7.42e-4, 7.51e-3],
                    ],
                )
            } else {
                None
            },
            notes: &["f2 is written in y2 throughout"],
        },
        5 => Builtin {
            id,
            variant,
            description: if table_variant {
                "exponential coupling, sign convention of the reference table"
            } else {
                "exponential coupling with exact solution ln(4+x^2), ln(5+x^2)"
            },
            problem: Problem {
                weights: [Weight::Power(2), Weight::Power(2)],
                boundary: if table_variant {
                    [Boundary::new(1.0, 0.0, 4f64.ln()), Boundary::new(1.0, 0.0, 5f64.ln())]
                } else {
                    [Boundary::new(1.0, 0.0, 5f64.ln()), Boundary::new(1.0, 0.0, 6f64.ln())]
                },
                rhs: [pick("2*(7 + exp(y2))*exp(-2*y1)"), pick("2*(11 + exp(y1))*exp(-2*y2)")],
                params: Params::new(),
                exact: exact_of("ln(4 + x^2)", "ln(5 + x^2)"),
            },
            order: 4,
            reference: if table_variant {
                table(
                    4,
                    [-0.766209, -0.800994],
                    &[
                        [0.1, 1.5828329, 1.5769131, 1.7727080, 1.7709758, 2.14e-3, 8.30e-2, 9.45e-4, 2.33e-2],
                        [0.3, 1.5682776, 1.5632335, 1.7604475, 1.7589804, 1.77e-3, 6.88e-2, 7.83e-4, 1.90e-2],
                        [0.5, 1.5385273, 1.5349546, 1.7354708, 1.7344446, 1.31e-3, 4.57e-2, 5.90e-4, 1.21e-2],
                        [0.7, 1.4922141, 1.4902763, 1.6968123, 1.6962663, 1.23e-3, 2.21e-2, 5.60e-4, 5.48e-3],
                        [0.9, 1.4270318, 1.4264972, 1.6428697, 1.6427234, 2.46e-3, 5.17e-3, 1.06e-3, 1.12e-3],
                    ],
                )
            } else {
                None
            },
            notes: &["the exact variant takes its boundary values from the exact solution, ln 5 and ln 6"],
        },
        6 => Builtin {
            id,
            variant,
            description: if table_variant {
                "antisymmetric pair, sign convention of the reference table"
            } else {
                "antisymmetric pair with exact solution -3 ln(2+x^2), 3 ln(2+x^2)"
            },
            problem: Problem {
                weights: [Weight::Power(2), Weight::Power(2)],
                boundary: [
                    Boundary::new(1.0, 0.0, -3.0 * 3f64.ln()),
                    Boundary::new(1.0, 0.0, 3.0 * 3f64.ln()),
                ],
                rhs: [
                    pick("-6*(exp(y2/3) + 4)*exp(2*y1/3)"),
                    pick("6*(exp(-y1/3) + 4)*exp(-2*y2/3)"),
                ],
                params: Params::new(),
                exact: exact_of("-3*ln(2 + x^2)", "3*ln(2 + x^2)"),
            },
            order: 4,
            reference: if table_variant {
                table(
                    4,
                    [-0.764679, -0.764679],
                    &[
                        [0.1, -3.9096075, -3.8933979, 3.9096075, 3.8933979, 6.39e-3, 0.225756, 6.39e-3, 2.25e-2],
                        [0.3, -3.8640780, -3.8502979, 3.8640780, 3.8502979, 5.34e-3, 0.186062, 5.34e-3, 5.58e-2],
                        [0.5, -3.7710561, -3.7613414, 3.7710561, 3.7613414, 4.11e-3, 0.122139, 4.11e-3, 6.10e-2],
                        [0.7, -3.6263470, -3.6211160, 3.6263470, 3.6211160, 4.05e-3, 5.78e-2, 4.05e-3, 4.04e-2],
                        [0.9, -3.4228817, -3.4214542, 3.4228817, 3.4214542, 8.02e-3, 1.30e-2, 8.02e-3, 1.17e-2],
                    ],
                )
            } else {
                None
            },
            notes: &[],
        },
        7 => Builtin {
            id,
            variant,
            description: if table_variant {
                "algebraic nonlinearity, sign convention of the reference table"
            } else {
                "algebraic nonlinearity with exact solution 1/sqrt(1+x^2), sqrt(1+x^2)"
            },
            problem: Problem {
                weights: [Weight::Power(3), Weight::Power(4)],
                boundary: [Boundary::new(1.0, 0.0, SQRT_2.recip()), Boundary::new(1.0, 0.0, SQRT_2)],
                rhs: [pick("-(3 + y2^2)*y1^5"), pick("(4*y1^-2 + 1)*y2^-3")],
                params: Params::new(),
                exact: exact_of("1/sqrt(1 + x^2)", "sqrt(1 + x^2)"),
            },
            order: 4,
            reference: if table_variant {
                table(
                    4,
                    [-0.718977, -0.726659],
                    &[
                        [0.1, 0.6267350, 0.6326026, 1.6726961, 1.6660461, 1.67e-3, 0.123810, 8.99e-3, 0.195077],
                        [0.3, 0.6323813, 0.6373236, 1.6535356, 1.6483411, 1.35e-3, 0.103217, 7.53e-3, 0.146187],
                        [0.5, 0.6440739, 0.6474853, 1.6144184, 1.6113861, 9.66e-4, 0.069423, 6.11e-3, 7.46e-2],
                        [0.7, 0.6626824, 0.6644484, 1.5535984, 1.5524363, 1.01e-3, 0.034154, 6.20e-3, 1.78e-2],
                        [0.9, 0.6897135, 0.6901626, 1.4679409, 1.4677736, 2.79e-3, 0.008057, 1.01e-2, 1.44e-3],
                    ],
                )
            } else {
                None
            },
            notes: &["f2 is written in y2 throughout"],
        },
        _ => unreachable!("id checked against VARIANTS"),
    };
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_variant_validates() {
        for (id, v) in all() {
            let b = builtin(id, Some(v)).unwrap();
            b.problem.validate().unwrap();
            assert_eq!(b.reference.is_some(), id <= 2 || v == "table", "{id}:{v}");
        }
        assert_eq!(all().len(), 13);
    }

    #[test]
    fn lookups() {
        assert_eq!(builtin(4, None).unwrap().variant, "exact");
        assert_eq!(builtin(1, None).unwrap().variant, "k1");
        assert!(matches!(builtin(8, None), Err(CatalogError::UnknownExample(8))));
        assert!(matches!(builtin(0, None), Err(CatalogError::UnknownExample(0))));
        assert!(matches!(builtin(3, Some("table")), Err(CatalogError::UnknownVariant { .. })));
    }

    #[test]
    fn exact_solutions_meet_the_boundary() {
        for id in 3..=7 {
            let b = builtin(id, None).unwrap();
            for i in 0..2 {
                let y1 = b.problem.exact_at(i, 1.0).unwrap().unwrap();
                assert!((y1 - b.problem.boundary[i].c).abs() < 1e-14, "example {id}");
            }
        }
        let six = builtin(6, None).unwrap();
        assert_eq!(six.problem.exact[0], Some(parse("-3*ln(2+x^2)").unwrap()));
    }
}
