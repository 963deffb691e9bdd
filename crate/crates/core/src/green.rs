//! Green's kernels for `(p u')' = p w` with `u'(0) = 0`, `a u(1) + b u'(1) = 0`.
//!
//! With `Q(t) = int_t^1 dr / p(r)` and `C = b / (a p(1))` the kernel is
//! `G(x, s) = -(Q(max(x, s)) + C)`, and [`Kernel::apply`] returns
//! `I(x) = int_0^1 G(x, s) p(s) w(s) ds`.
//!
//! `Q` blows up at the origin whenever `p(0) = 0`, so `apply` never touches it.
//! Writing `Phi(s) = int_0^s p w` and integrating by parts,
//!
//! ```text
//! I(x) = -(b / a) R(1) - int_x^1 R(s) ds,   R(s) = Phi(s) / p(s)
//!      = s int_0^1 (p(s t) / p(s)) w(s t) dt
//! ```
//!
//! and `R` is smooth with `R(0) = 0`. The inner integral is done with
//! Gauss–Legendre in `t` on the interpolant of `w`, the outer one with the
//! spectral cumulative integral, so `apply` is one precomputed matrix.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use thiserror::Error;

use crate::expr::{eval_scalar, Expr, ExprError, Params, Var};
use crate::funcspace::{FuncError, Grid, GridFn};

/// Weight `p` of the differential operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    /// `p(x) = x^k`.
    Power(u32),
    /// `p(x)` given as an expression in `x` (and bound parameters).
    General(Expr),
}

impl Weight {
    /// Shape factor `k` of a pure power weight.
    pub fn shape_factor(&self) -> Option<u32> {
        match self {
            Weight::Power(k) => Some(*k),
            Weight::General(_) => None,
        }
    }

    pub fn eval(&self, x: f64, params: &Params) -> Result<f64, ExprError> {
        match self {
            Weight::Power(k) => Ok(x.powi(*k as i32)),
            Weight::General(e) => eval_scalar(e, x, 0.0, 0.0, params),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error("Robin coefficient a must be non-zero")]
    ZeroRobinA,
    #[error("weight must be positive on (0, 1], found p({x}) = {value}")]
    NonPositiveWeight { x: f64, value: f64 },
    #[error("weight expression may only depend on x")]
    WeightDependsOnY,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Func(#[from] FuncError),
}

/// Gauss–Legendre points per geometric panel when integrating `1/p` for `Q(t)`.
const Q_PANEL_POINTS: usize = 24;

#[derive(Debug, Clone)]
pub struct Kernel {
    weight: Weight,
    params: Params,
    a: f64,
    b: f64,
    p1: f64,
    grid: Arc<Grid>,
    /// Row-major `(N + 1) x (N + 1)` matrix of `w -> apply(w)` at the nodes.
    apply: Vec<f64>,
}

impl Kernel {
    /// Builds the kernel for weight `p` and Robin data `(a, b)` at degree `degree`.
    pub fn new(
        weight: Weight,
        a: f64,
        b: f64,
        degree: usize,
        params: &Params,
    ) -> Result<Kernel, GreenError> {
        if a == 0.0 {
            return Err(GreenError::ZeroRobinA);
        }
        let grid = Grid::new(degree)?;
        if let Weight::General(e) = &weight {
            if e.uses_var(Var::Y1) || e.uses_var(Var::Y2) {
                return Err(GreenError::WeightDependsOnY);
            }
            e.check_bound(params)?;
            let dense = 10 * degree;
            for i in 1..=dense {
                let x = i as f64 / dense as f64;
                let value = weight.eval(x, params)?;
                if !(value > 0.0 && value.is_finite()) {
                    return Err(GreenError::NonPositiveWeight { x, value });
                }
            }
            for &x in &grid.nodes()[1..] {
                let value = weight.eval(x, params)?;
                if !(value > 0.0 && value.is_finite()) {
                    return Err(GreenError::NonPositiveWeight { x, value });
                }
            }
        }
        let p1 = weight.eval(1.0, params)?;
        let mut kernel = Kernel {
            weight,
            params: params.clone(),
            a,
            b,
            p1,
            grid,
            apply: Vec::new(),
        };
        kernel.apply = kernel.build_apply()?;
        Ok(kernel)
    }

    fn build_apply(&self) -> Result<Vec<f64>, GreenError> {
        let n = self.grid.degree();
        let m = n + 1;
        let nodes = self.grid.nodes();
        // w(s t) t^k has degree N + k in t, so this rule is exact for power weights
        let k = self.weight.shape_factor().unwrap_or(0) as usize;
        let points = (n + k + 2) / 2 + 8;
        let rule = GaussLegendre::new(NonZeroUsize::new(points).expect("non-zero"));
        let taus: Vec<(f64, f64)> = rule
            .iter()
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();

        // R = A w
        let mut a_mat = vec![0.0; m * m];
        for (i, &s) in nodes.iter().enumerate().skip(1) {
            let ps = self.weight.eval(s, &self.params)?;
            let row = &mut a_mat[i * m..(i + 1) * m];
            for &(tau, omega) in &taus {
                let ratio = match &self.weight {
                    Weight::Power(k) => tau.powi(*k as i32),
                    Weight::General(_) => self.weight.eval(s * tau, &self.params)? / ps,
                };
                let scale = s * omega * ratio;
                for (r, l) in row.iter_mut().zip(self.grid.lagrange_row(s * tau)) {
                    *r += scale * l;
                }
            }
        }

        // I = -(b/a) R(1) - (S R), S[i][j] = cumint[N][j] - cumint[i][j]
        let cum = cumint_matrix(&self.grid);
        let ratio = self.b / self.a;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for l in 0..m {
                let s_il = cum[n * m + l] - cum[i * m + l];
                let coef = ratio * if l == n { 1.0 } else { 0.0 } + s_il;
                if coef == 0.0 {
                    continue;
                }
                let a_row = &a_mat[l * m..(l + 1) * m];
                for (o, av) in out[i * m..(i + 1) * m].iter_mut().zip(a_row) {
                    *o -= coef * av;
                }
            }
        }
        Ok(out)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.grid.degree()
    }

    /// Robin data `(a, b)`.
    pub fn robin(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `C = b / (a p(1))`.
    pub fn robin_constant(&self) -> f64 {
        self.b / (self.a * self.p1)
    }

    /// `p(x)`.
    pub fn p(&self, x: f64) -> f64 {
        self.weight
            .eval(x, &self.params)
            .expect("weight validated at construction")
    }

    /// `Q(t) = int_t^1 dr / p(r)` for `t` in `(0, 1]`; infinite at `t = 0` when `p(0) = 0`.
    pub fn q(&self, t: f64) -> f64 {
        match self.weight {
            Weight::Power(1) => -t.ln(),
            Weight::Power(k) => {
                let e = 1.0 - k as f64;
                (1.0 - t.powf(e)) / e
            }
            Weight::General(_) => self.q_quadrature(t),
        }
    }

    /// Composite Gauss–Legendre on panels `[t 2^j, t 2^(j+1)]`, which keeps
    /// the relative resolution fixed as the integrand steepens toward 0.
    fn q_quadrature(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        if t <= 0.0 {
            return f64::INFINITY;
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(Q_PANEL_POINTS).expect("non-zero"));
        let mut total = 0.0;
        let mut lo = t;
        while lo < 1.0 {
            let hi = (2.0 * lo).min(1.0);
            total += rule.integrate(lo, hi, |r| 1.0 / self.p(r));
            lo = hi;
        }
        total
    }

    /// `G(x, s) = -(Q(max(x, s)) + C)`.
    pub fn green(&self, x: f64, s: f64) -> f64 {
        -(self.q(x.max(s)) + self.robin_constant())
    }

    /// `x -> int_0^1 G(x, s) p(s) w(s) ds`.
    pub fn apply(&self, w: &GridFn) -> GridFn {
        let w = if w.degree() == self.degree() {
            std::borrow::Cow::Borrowed(w)
        } else {
            std::borrow::Cow::Owned(w.resample(self.degree()).expect("valid degree"))
        };
        let m = self.grid.len();
        let values = w.values();
        let out = (0..m)
            .map(|i| {
                self.apply[i * m..(i + 1) * m]
                    .iter()
                    .zip(values)
                    .map(|(a, v)| a * v)
                    .sum()
            })
            .collect();
        GridFn::from_raw(&self.grid, out)
    }

    /// `max_x |apply(1)(x)|`.
    pub fn unit_response(&self) -> f64 {
        self.apply(&GridFn::constant(&self.grid, 1.0)).max_abs()
    }
}

/// Cumulative-integration matrix of `grid`, recovered column by column.
fn cumint_matrix(grid: &Arc<Grid>) -> Vec<f64> {
    let m = grid.len();
    let mut out = vec![0.0; m * m];
    let mut e = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        let col = GridFn::from_raw(grid, e.clone()).cumint();
        for (i, v) in col.values().iter().enumerate() {
            out[i * m + j] = *v;
        }
        e[j] = 0.0;
    }
    out
}

/// The bound constant `M = max_i max_x |int_0^1 G_i(x, s) p_i(s) ds|`.
pub fn bound_constant(k1: &Kernel, k2: &Kernel) -> f64 {
    k1.unit_response().max(k2.unit_response())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn power(k: u32, a: f64, b: f64) -> Kernel {
        Kernel::new(Weight::Power(k), a, b, 32, &Params::new()).unwrap()
    }

    #[test]
    fn closed_form_kernels() {
        let k2 = power(2, 1.0, 0.0);
        // s <= x: (x^(1-k) - 1) / (1 - k) = 1 - 1/x
        let x = 0.4;
        assert_abs_diff_eq!(k2.green(x, 0.2), 1.0 - 1.0 / x, epsilon = 1e-14);
        let k1 = power(1, 1.0, 0.0);
        // x <= s: ln s
        assert_abs_diff_eq!(k1.green(0.2, 0.7), 0.7f64.ln(), epsilon = 1e-14);
        let shifted = power(2, 2.0, 1.0);
        assert_eq!(shifted.robin_constant(), 0.5);
        assert_abs_diff_eq!(shifted.green(x, 0.2), k2.green(x, 0.2) - 0.5, epsilon = 1e-14);
    }

    #[test]
    fn constant_source() {
        for k in 1..=5u32 {
            let kern = power(k, 1.0, 0.0);
            let m = 1.7;
            let out = kern.apply(&GridFn::constant(kern.grid(), m));
            for (x, v) in kern.grid().nodes().iter().zip(out.values()) {
                let want = m * (x * x - 1.0) / (2.0 * (k as f64 + 1.0));
                assert_abs_diff_eq!(*v, want, epsilon = 1e-12);
            }
        }
        let kern = power(3, 1.0, 0.0);
        let zero = kern.apply(&GridFn::constant(kern.grid(), 0.0));
        assert!(zero.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn bound_constants() {
        assert_abs_diff_eq!(bound_constant(&power(2, 1.0, 0.0), &power(2, 1.0, 0.0)), 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bound_constant(&power(1, 1.0, 0.0), &power(1, 1.0, 0.0)), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(power(3, 1.0, 0.0).unit_response(), 0.125, epsilon = 1e-12);
    }

    #[test]
    fn robin_shift_for_constant_source() {
        // (x^2 u')' = x^2, u'(0) = 0, 2 u(1) + u'(1) = 0: u = (x^2 - 1)/6 - 1/6
        let kern = power(2, 2.0, 1.0);
        let out = kern.apply(&GridFn::constant(kern.grid(), 1.0));
        for (x, v) in kern.grid().nodes().iter().zip(out.values()) {
            assert_abs_diff_eq!(*v, (x * x - 1.0) / 6.0 - 1.0 / 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn q_profile() {
        let gen = Kernel::new(
            Weight::General(crate::expr::parse("x^2*(1 + x)").unwrap()),
            1.0,
            0.0,
            16,
            &Params::new(),
        )
        .unwrap();
        // int_t^1 dr / (r^2 (1 + r)) = 1/t - 1 + ln 2 + ln t - ln(1 + t)
        for t in [0.01, 0.1, 0.5, 0.9] {
            let want = 1.0 / t - 1.0 + 2f64.ln() + t.ln() - (1.0 + t).ln();
            assert_abs_diff_eq!(gen.q(t), want, epsilon = 1e-10 * want.abs().max(1.0));
        }
        assert_eq!(gen.q(1.0), 0.0);
        let k3 = power(3, 1.0, 0.0);
        assert_abs_diff_eq!(k3.q(0.5), (1.0 - 4.0) / -2.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_data() {
        assert_eq!(
            Kernel::new(Weight::Power(2), 0.0, 1.0, 16, &Params::new()).unwrap_err(),
            GreenError::ZeroRobinA
        );
        let neg = Weight::General(crate::expr::parse("x - 0.5").unwrap());
        assert!(matches!(
            Kernel::new(neg, 1.0, 0.0, 16, &Params::new()),
            Err(GreenError::NonPositiveWeight { .. })
        ));
        let bad = Weight::General(crate::expr::parse("x*y1").unwrap());
        assert_eq!(
            Kernel::new(bad, 1.0, 0.0, 16, &Params::new()).unwrap_err(),
            GreenError::WeightDependsOnY
        );
    }
}
