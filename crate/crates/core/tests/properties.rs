use proptest::prelude::*;

use lanefowler::bench::{builtin, catalog, ProblemFile};
use lanefowler::expr::{eval_jet, eval_scalar, parse, Jet, Params};
use lanefowler::funcspace::{Grid, GridFn};
use lanefowler::green::{Kernel, Weight};
use lanefowler::ham::{equispaced, HamSolver};
use lanefowler::tuner::{landscape, objective, optimize_c, Criterion, SearchBox, TuneOptions};

fn horner(c: &[f64], q: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * q + v)
}

fn solver(id: u32, variant: &str, degree: usize) -> HamSolver {
    let b = builtin(id, Some(variant)).unwrap();
    HamSolver::new(&b.problem, degree, &equispaced(11)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_exp_ln_roundtrip(c in prop::collection::vec(-0.5f64..0.5, 5), base in 0.5f64..3.0) {
        let mut coeffs = c.clone();
        coeffs[0] = base;
        let u = Jet::new(coeffs.clone());
        let e = parse("exp(ln(y1))").unwrap();
        let z = Jet::constant(0.0, 4);
        let out = eval_jet(&e, 0.3, &u, &z, &Params::new()).unwrap();
        for (a, b) in out.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn jet_matches_scalar_taylor(
        c1 in prop::collection::vec(-0.3f64..0.3, 3),
        c2 in prop::collection::vec(-0.3f64..0.3, 3),
        x in 0.0f64..1.0,
    ) {
        // polynomial inputs; the jet of order 8 is exact to q^8
        let e = parse("y1*exp(y2) + sqrt(2 + y1^2) - x*y2^3").unwrap();
        let pad = |c: &[f64]| { let mut v = c.to_vec(); v.resize(9, 0.0); Jet::new(v) };
        let (j1, j2) = (pad(&c1), pad(&c2));
        let h = eval_jet(&e, x, &j1, &j2, &Params::new()).unwrap();
        for q in [0.01, 0.03, 0.05] {
            let full = eval_scalar(&e, x, horner(&c1, q), horner(&c2, q), &Params::new()).unwrap();
            prop_assert!((full - h.eval(q)).abs() < 1e-12, "q = {q}: {full} vs {}", h.eval(q));
        }
    }

    #[test]
    fn kernel_inverts_the_operator(
        k in 0u32..4,
        a in 0.5f64..3.0,
        b in -0.3f64..1.5,
        g in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        prop_assume!((a + b).abs() > 0.2);
        let kern = Kernel::new(Weight::Power(k), a, b, 40, &Params::new()).unwrap();
        let grid = kern.grid().clone();
        let gf = GridFn::sample(&grid, |x| horner(&g, x)).unwrap();
        let u = kern.apply(&gf);
        let (du, ddu) = (u.diff(), u.diff2());
        let scale = 1.0 + g.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!(du.eval(0.0).unwrap().abs() < 1e-9 * scale);
        let robin = a * u.eval(1.0).unwrap() + b * du.eval(1.0).unwrap();
        prop_assert!(robin.abs() < 1e-9 * scale, "robin {robin}");
        for x in [0.1, 0.37, 0.6, 0.95] {
            let lu = ddu.eval(x).unwrap() + k as f64 / x * du.eval(x).unwrap();
            prop_assert!((lu - horner(&g, x)).abs() < 1e-7 * scale, "x = {x}: {lu}");
        }
    }

    #[test]
    fn boundary_conditions_hold_for_any_c(c1 in -1.4f64..-0.3, c2 in -1.4f64..-0.3, pick in 0usize..13) {
        let (id, v) = catalog::all()[pick];
        let b = builtin(id, Some(v)).unwrap();
        let s = HamSolver::new(&b.problem, 48, &equispaced(11)).unwrap();
        let sol = s.solve(3, [c1, c2]).unwrap();
        for i in 0..2 {
            let phi = sol.phi(i);
            let d = phi.diff();
            let bc = &b.problem.boundary[i];
            let scale = 1.0 + phi.max_abs();
            prop_assert!(d.eval(0.0).unwrap().abs() < 1e-8 * scale);
            let robin = bc.a * phi.eval(1.0).unwrap() + bc.b * d.eval(1.0).unwrap() - bc.c;
            prop_assert!(robin.abs() < 1e-9 * scale, "{id}:{v} component {i}: {robin}");
        }
    }

    #[test]
    fn operator_and_differentiated_residuals_agree(c1 in -1.3f64..-0.5, c2 in -1.3f64..-0.5, pick in 0usize..13) {
        let (id, v) = catalog::all()[pick];
        let b = builtin(id, Some(v)).unwrap();
        let s = HamSolver::new(&b.problem, 64, &equispaced(11)).unwrap();
        let sol = s.solve(3, [c1, c2]).unwrap();
        let xs = [0.05, 0.2, 0.5, 0.8, 0.99];
        let op = s.operator_residual(&sol, &xs).unwrap();
        let dr = s.differential_residual(sol.phi(0), sol.phi(1), &xs).unwrap();
        let scale = 1.0 + sol.operator[0].max_abs().max(sol.operator[1].max_abs());
        for (o, d) in op.iter().zip(&dr) {
            for i in 0..2 {
                prop_assert!((o[i].abs() - d[i]).abs() < 1e-7 * scale, "{id}:{v} {} vs {}", o[i], d[i]);
            }
        }
    }
}

#[test]
fn builtins_survive_a_file_round_trip() {
    for (id, v) in catalog::all() {
        let b = builtin(id, Some(v)).unwrap();
        let file = ProblemFile::from_problem(&format!("ex{id}-{v}"), b.description, b.problem.clone());
        let back = ProblemFile::from_toml(&file.to_toml()).unwrap();
        let (p, q) = (&b.problem, &back.problem);
        assert_eq!(p.boundary, q.boundary, "{id}:{v}");
        assert_eq!(p.weights, q.weights, "{id}:{v}");
        assert_eq!(p.params, q.params, "{id}:{v}");
        for i in 0..2 {
            for &x in &[0.0, 0.25, 0.7, 1.0] {
                let (y1, y2) = (p.boundary[0].initial() + 0.1, p.boundary[1].initial() - 0.1);
                let want = eval_scalar(&p.rhs[i], x, y1, y2, &p.params).unwrap();
                let got = eval_scalar(&q.rhs[i], x, y1, y2, &q.params).unwrap();
                assert!((want - got).abs() <= 1e-14 * (1.0 + want.abs()), "{id}:{v} f{} at {x}", i + 1);
                match (&p.exact[i], &q.exact[i]) {
                    (Some(a), Some(b)) => {
                        let (a, b) = (
                            eval_scalar(a, x, 0.0, 0.0, &p.params).unwrap(),
                            eval_scalar(b, x, 0.0, 0.0, &q.params).unwrap(),
                        );
                        assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
                    }
                    (None, None) => {}
                    _ => panic!("{id}:{v} exact solution lost in round trip"),
                }
            }
        }
    }
}

#[test]
fn antisymmetric_example_has_symmetric_landscape() {
    let s = solver(6, "exact", 48);
    let search = SearchBox { c1: (-1.2, -0.5), c2: (-1.2, -0.5) };
    let crit = Criterion::default();
    let l = landscape(&s, 4, search, (9, 9), &crit).unwrap();
    for i in 0..9 {
        for j in 0..9 {
            let (a, b) = (l.at(i, j).unwrap(), l.at(j, i).unwrap());
            assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "({i}, {j}): {a} vs {b}");
        }
    }
    let mut opts = TuneOptions::new(4);
    opts.search = search;
    let r = optimize_c(&s, &opts).unwrap();
    assert!((r.c_opt[0] - r.c_opt[1]).abs() < 1e-6, "{:?}", r.c_opt);
}

#[test]
fn joint_tuning_never_worsens_the_grid_best() {
    for (id, v) in [(1, "k2"), (2, "v1"), (5, "exact")] {
        let s = solver(id, v, 48);
        let mut opts = TuneOptions::new(3);
        opts.criterion = Criterion::integral_joint(21);
        opts.budget = 400;
        let r = optimize_c(&s, &opts).unwrap();
        assert_eq!(r.c_opt, r.c_joint, "{id}:{v}");
        let best_start = r.history[..opts.grid * opts.grid]
            .iter()
            .filter_map(|e| e.value)
            .fold(f64::INFINITY, f64::min);
        assert!(r.objective <= best_start, "{id}:{v}");
        let again = objective(&s, 3, r.c_opt, &opts.criterion).unwrap();
        assert!((again - r.objective).abs() <= 1e-12 * (1.0 + r.objective), "{id}:{v}");
        assert!(r.evaluations <= opts.budget, "{id}:{v}");
    }
}

#[test]
fn grid_degree_is_validated() {
    assert!(Grid::new(0).is_err());
}
