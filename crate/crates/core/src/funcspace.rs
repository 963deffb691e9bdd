//! Real functions on `[0, 1]` sampled at Chebyshev–Gauss–Lobatto points.
//!
//! A [`GridFn`] stores the values of a function at the `N + 1` Lobatto nodes
//! `x_j = (1 - cos(pi j / N)) / 2`, ordered so that node `0` sits at `x = 0`
//! and node `N` at `x = 1`. The degree-`N` interpolant through those values is
//! the function the rest of the crate works with: integration and
//! differentiation are exact for polynomials of degree at most `N`.
//!
//! Operators that act on every function of a given degree (cumulative
//! integration, differentiation, Chebyshev transform) are precomputed once per
//! degree and shared through [`Grid`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Smallest supported resolution.
pub const MIN_DEGREE: usize = 8;

/// Default resolution used throughout the solver.
pub const DEFAULT_DEGREE: usize = 64;

/// Largest degree for which monomial export is offered. Beyond this the
/// Chebyshev-to-monomial change of basis loses too many digits to be useful.
pub const MAX_MONOMIAL_DEGREE: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncError {
    #[error("degree {0} is below the minimum of {MIN_DEGREE}")]
    DegreeTooSmall(usize),
    #[error("expected {expected} node values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },
    #[error("evaluation point {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("monomial export is limited to degree {MAX_MONOMIAL_DEGREE}, requested {0}")]
    MonomialDegree(usize),
}

/// Node set and precomputed spectral operators for one degree.
pub struct Grid {
    degree: usize,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    /// Values -> Chebyshev coefficients (in `t = 2x - 1`).
    to_coeffs: Vec<f64>,
    /// Values -> values of `F(x) = int_0^x f`.
    cumint: Vec<f64>,
    /// Values -> values of `f'`.
    diff: Vec<f64>,
    /// Values -> values of `f''`.
    diff2: Vec<f64>,
    /// Clenshaw–Curtis weights for `int_0^1 f`.
    quad: Vec<f64>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("degree", &self.degree).finish()
    }
}

fn grid_cache() -> &'static Mutex<HashMap<usize, Arc<Grid>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Grid>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Grid {
    /// Shared grid of the given degree; built on first use.
    pub fn new(degree: usize) -> Result<Arc<Grid>, FuncError> {
        if degree < MIN_DEGREE {
            return Err(FuncError::DegreeTooSmall(degree));
        }
        let mut cache = grid_cache().lock().expect("grid cache poisoned");
        Ok(cache
            .entry(degree)
            .or_insert_with(|| Arc::new(Grid::build(degree)))
            .clone())
    }

    fn build(n: usize) -> Grid {
        let m = n + 1;
        let nodes: Vec<f64> = (0..m)
            .map(|j| {
                // sin form keeps the small nodes accurate near x = 0
                let s = (PI * j as f64 / (2 * n) as f64).sin();
                s * s
            })
            .collect();
        let bary: Vec<f64> = (0..m)
            .map(|j| {
                let w = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect();

        // T_k(t_j) with t_j = -cos(pi j / n)
        let cheb = |k: usize, j: usize| -> f64 {
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * (PI * ((j * k) % (2 * n)) as f64 / n as f64).cos()
        };

        let mut to_coeffs = vec![0.0; m * m];
        for k in 0..m {
            let ck = if k == 0 || k == n { 1.0 / n as f64 } else { 2.0 / n as f64 };
            for j in 0..m {
                let dj = if j == 0 || j == n { 0.5 } else { 1.0 };
                to_coeffs[k * m + j] = ck * dj * cheb(k, j);
            }
        }

        let mut cumint = vec![0.0; m * m];
        let mut quad = vec![0.0; m];
        let mut a = vec![0.0; m + 2];
        let mut b = vec![0.0; m + 2];
        for col in 0..m {
            a.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..m {
                a[k] = to_coeffs[k * m + col];
            }
            // antiderivative coefficients in t, then rescale by dx = dt / 2
            b.iter_mut().for_each(|v| *v = 0.0);
            for k in 1..=m {
                let prev = if k == 1 { 2.0 * a[0] } else { a[k - 1] };
                b[k] = (prev - a[k + 1]) / (2.0 * k as f64);
            }
            let mut at_left = 0.0;
            for (k, bk) in b.iter().enumerate().take(m + 1).skip(1) {
                at_left += if k % 2 == 0 { *bk } else { -*bk };
            }
            b[0] = -at_left;
            let total: f64 = b.iter().take(m + 1).sum();
            quad[col] = 0.5 * total;
            for j in 0..m {
                let mut s = 0.0;
                for (k, bk) in b.iter().enumerate().take(m + 1) {
                    s += bk * cheb_any(k, j, n);
                }
                cumint[j * m + col] = 0.5 * s;
            }

        }
        // the left endpoint integral is zero by construction
        for col in 0..m {
            cumint[col] = 0.0;
        }

        let (diff, diff2) = differentiation_matrices(n, &bary);

        Grid {
            degree: n,
            nodes,
            bary,
            to_coeffs,
            cumint,
            diff,
            diff2,
            quad,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinates in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lagrange basis values `L_j(x)` for all nodes.
    pub fn lagrange_row(&self, x: f64) -> Vec<f64> {
        let m = self.len();
        let mut row = vec![0.0; m];
        if let Some(j) = self.node_index(x) {
            row[j] = 1.0;
            return row;
        }
        let mut denom = 0.0;
        for j in 0..m {
            let t = self.bary[j] / (x - self.nodes[j]);
            row[j] = t;
            denom += t;
        }
        row.iter_mut().for_each(|v| *v /= denom);
        row
    }

    /// Interpolation matrix (row-major, `xs.len()` rows) from node values to `xs`.
    pub fn interpolation_matrix(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().flat_map(|&x| self.lagrange_row(x)).collect()
    }

    fn node_index(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&xj| xj == x)
    }

    fn barycentric(&self, values: &[f64], x: f64) -> f64 {
        if let Some(j) = self.node_index(x) {
            return values[j];
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.len() {
            let t = self.bary[j] / (x - self.nodes[j]);
            num += t * values[j];
            den += t;
        }
        num / den
    }
}

/// First and second differentiation matrices from the barycentric weights.
/// Node differences use the product form of `sin^2 a - sin^2 b` and the
/// diagonals are negative row sums, so constants differentiate to zero.
fn differentiation_matrices(n: usize, bary: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = n + 1;
    let angle = |j: usize| PI * j as f64 / (2 * n) as f64;
    let mut d1 = vec![0.0; m * m];
    let mut d2 = vec![0.0; m * m];
    for i in 0..m {
        let mut diag = 0.0;
        for j in (0..m).filter(|&j| j != i) {
            let dx = (angle(i) - angle(j)).sin() * (angle(i) + angle(j)).sin();
            let v = bary[j] / bary[i] / dx;
            d1[i * m + j] = v;
            diag -= v;
        }
        d1[i * m + i] = diag;
        let mut diag2 = 0.0;
        for j in (0..m).filter(|&j| j != i) {
            let dx = (angle(i) - angle(j)).sin() * (angle(i) + angle(j)).sin();
            let v = 2.0 * d1[i * m + j] * (diag - 1.0 / dx);
            d2[i * m + j] = v;
            diag2 -= v;
        }
        d2[i * m + i] = diag2;
    }
    (d1, d2)
}

/// `T_k(t_j)` for `k` possibly equal to `n + 1`.
fn cheb_any(k: usize, j: usize, n: usize) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (PI * ((j * k) % (2 * n)) as f64 / n as f64).cos()
}

fn matvec(mat: &[f64], v: &[f64]) -> Vec<f64> {
    let m = v.len();
    mat.chunks_exact(m)
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// A function on `[0, 1]`, stored as values at the Lobatto nodes of its grid.
#[derive(Clone)]
pub struct GridFn {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl fmt::Debug for GridFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFn")
            .field("degree", &self.grid.degree)
            .field("values", &self.values)
            .finish()
    }
}

impl GridFn {
    /// Wraps node values; every value must be finite.
    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self, FuncError> {
        if values.len() != grid.len() {
            return Err(FuncError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(FuncError::NonFinite { node, value });
        }
        Ok(GridFn {
            grid: grid.clone(),
            values,
        })
    }

    /// Like [`from_values`](Self::from_values) without the finiteness check.
    /// Callers that can produce overflow must check [`is_finite`](Self::is_finite).
    pub(crate) fn from_raw(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFn {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples `f` at the nodes.
    pub fn sample(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self, FuncError> {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: &Arc<Grid>, v: f64) -> Self {
        GridFn {
            grid: grid.clone(),
            values: vec![v; grid.len()],
        }
    }

    /// The identity function `x -> x`.
    pub fn identity(grid: &Arc<Grid>) -> Self {
        GridFn {
            grid: grid.clone(),
            values: grid.nodes.clone(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.grid.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest absolute node value.
    pub fn max_abs_nodes(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Interpolated value at `x`; exact at nodes.
    pub fn eval(&self, x: f64) -> Result<f64, FuncError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(FuncError::OutOfDomain(x));
        }
        Ok(self.grid.barycentric(&self.values, x))
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>, FuncError> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Sup-norm over a dense set of `10 N + 1` equispaced points plus the nodes.
    pub fn max_abs(&self) -> f64 {
        let dense = 10 * self.grid.degree;
        let mut m = self.max_abs_nodes();
        for i in 0..=dense {
            let x = i as f64 / dense as f64;
            m = m.max(self.grid.barycentric(&self.values, x).abs());
        }
        m
    }

    fn binary(&self, other: &GridFn, op: impl Fn(f64, f64) -> f64) -> GridFn {
        let (a, b) = align(self, other);
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| op(x, y))
            .collect();
        GridFn {
            grid: a.grid.clone(),
            values,
        }
    }

    pub fn add(&self, other: &GridFn) -> GridFn {
        self.binary(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFn) -> GridFn {
        self.binary(other, |a, b| a - b)
    }

    /// Pointwise product. No de-aliasing: the caller picks a degree large
    /// enough for the product to stay resolved.
    pub fn mul(&self, other: &GridFn) -> GridFn {
        self.binary(other, |a, b| a * b)
    }

    pub fn scale(&self, alpha: f64) -> GridFn {
        self.map(|v| alpha * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `F(x) = int_0^x f(s) ds`.
    pub fn cumint(&self) -> GridFn {
        GridFn {
            grid: self.grid.clone(),
            values: matvec(&self.grid.cumint, &self.values),
        }
    }

    /// `int_0^1 f(s) ds`.
    pub fn integral(&self) -> f64 {
        self.grid.quad.iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    pub fn diff(&self) -> GridFn {
        GridFn {
            grid: self.grid.clone(),
            values: matvec(&self.grid.diff, &self.values),
        }
    }

    pub fn diff2(&self) -> GridFn {
        GridFn {
            grid: self.grid.clone(),
            values: matvec(&self.grid.diff2, &self.values),
        }
    }

    /// Chebyshev coefficients of the interpolant in the variable `t = 2x - 1`.
    pub fn chebyshev_coeffs(&self) -> Vec<f64> {
        matvec(&self.grid.to_coeffs, &self.values)
    }

    /// Re-interpolates onto a grid of another degree.
    pub fn resample(&self, degree: usize) -> Result<GridFn, FuncError> {
        if degree == self.grid.degree {
            return Ok(self.clone());
        }
        let grid = Grid::new(degree)?;
        let values = grid
            .nodes
            .iter()
            .map(|&x| self.grid.barycentric(&self.values, x))
            .collect();
        Ok(GridFn { grid, values })
    }

    /// Monomial coefficients `c_0 + c_1 x + ... + c_d x^d` of the Chebyshev
    /// series truncated at degree `d`.
    ///
    /// Only offered up to [`MAX_MONOMIAL_DEGREE`]: the monomial basis is badly
    /// conditioned, so expect absolute errors around `1e-16 * 4^d` in the
    /// returned coefficients.
    pub fn to_monomial(&self, d: usize) -> Result<Vec<f64>, FuncError> {
        if d > MAX_MONOMIAL_DEGREE {
            return Err(FuncError::MonomialDegree(d));
        }
        let a = self.chebyshev_coeffs();
        let d = d.min(self.grid.degree);
        let mut out = vec![0.0; d + 1];
        // T_k(2x - 1) in the monomial basis
        let mut prev = vec![1.0];
        let mut cur = vec![-1.0, 2.0];
        for (k, &ak) in a.iter().enumerate().take(d + 1) {
            let poly = match k {
                0 => prev.clone(),
                1 => cur.clone(),
                _ => {
                    let mut next = vec![0.0; k + 1];
                    for (i, &c) in cur.iter().enumerate() {
                        next[i] -= 2.0 * c;
                        next[i + 1] += 4.0 * c;
                    }
                    for (i, &c) in prev.iter().enumerate() {
                        next[i] -= c;
                    }
                    prev = std::mem::replace(&mut cur, next);
                    cur.clone()
                }
            };
            for (i, &c) in poly.iter().enumerate() {
                out[i] += ak * c;
            }
        }
        Ok(out)
    }
}

fn align<'a>(a: &'a GridFn, b: &'a GridFn) -> (std::borrow::Cow<'a, GridFn>, std::borrow::Cow<'a, GridFn>) {
    use std::borrow::Cow;
    match a.grid.degree.cmp(&b.grid.degree) {
        std::cmp::Ordering::Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
        std::cmp::Ordering::Less => (
            Cow::Owned(a.resample(b.grid.degree).expect("valid degree")),
            Cow::Borrowed(b),
        ),
        std::cmp::Ordering::Greater => (
            Cow::Borrowed(a),
            Cow::Owned(b.resample(a.grid.degree).expect("valid degree")),
        ),
    }
}

impl Add for &GridFn {
    type Output = GridFn;
    fn add(self, rhs: &GridFn) -> GridFn {
        GridFn::add(self, rhs)
    }
}

impl Sub for &GridFn {
    type Output = GridFn;
    fn sub(self, rhs: &GridFn) -> GridFn {
        GridFn::sub(self, rhs)
    }
}

impl Mul for &GridFn {
    type Output = GridFn;
    fn mul(self, rhs: &GridFn) -> GridFn {
        GridFn::mul(self, rhs)
    }
}

impl Mul<f64> for &GridFn {
    type Output = GridFn;
    fn mul(self, rhs: f64) -> GridFn {
        self.scale(rhs)
    }
}

impl Neg for &GridFn {
    type Output = GridFn;
    fn neg(self) -> GridFn {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn g(n: usize) -> Arc<Grid> {
        Grid::new(n).unwrap()
    }

    #[test]
    fn nodes_run_from_zero_to_one() {
        let grid = g(16);
        assert_eq!(grid.nodes()[0], 0.0);
        assert_eq!(grid.nodes()[16], 1.0);
        assert!(grid.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_small_degree() {
        assert_eq!(Grid::new(4).unwrap_err(), FuncError::DegreeTooSmall(4));
    }

    #[test]
    fn constant_everywhere() {
        let f = GridFn::constant(&g(32), 1.0);
        assert_eq!(f.eval(0.37).unwrap(), 1.0);
        let z = GridFn::constant(&g(16), 0.0);
        assert_eq!(z.cumint().eval(1.0).unwrap(), 0.0);
        assert_eq!(z.integral(), 0.0);
    }

    #[test]
    fn pointwise_algebra() {
        let grid = g(32);
        let three = &GridFn::constant(&grid, 1.0) + &GridFn::constant(&grid, 2.0);
        assert!(three.values().iter().all(|&v| v == 3.0));
        let x2 = GridFn::sample(&grid, |x| x * x).unwrap();
        assert_abs_diff_eq!(x2.scale(-1.0).eval(0.5).unwrap(), -0.25, epsilon = 1e-14);
        let x = GridFn::identity(&grid);
        assert_abs_diff_eq!(x.mul(&x).eval(0.3).unwrap(), 0.09, epsilon = 1e-14);
    }

    #[test]
    fn mixed_degrees_resample_to_larger() {
        let a = GridFn::sample(&g(16), |x| x * x).unwrap();
        let b = GridFn::sample(&g(32), |x| 1.0 - x).unwrap();
        let c = a.add(&b);
        assert_eq!(c.degree(), 32);
        assert_abs_diff_eq!(c.eval(0.4).unwrap(), 0.16 + 0.6, epsilon = 1e-13);
    }

    #[test]
    fn eval_polynomial_and_nodes() {
        let grid = g(32);
        let f = GridFn::sample(&grid, |x| 3.0 - x * x).unwrap();
        assert_abs_diff_eq!(f.eval(0.5).unwrap(), 2.75, epsilon = 1e-12);
        for (j, &xj) in grid.nodes().iter().enumerate() {
            assert_eq!(f.eval(xj).unwrap(), f.values()[j]);
        }
        assert_eq!(f.eval(1.5).unwrap_err(), FuncError::OutOfDomain(1.5));
        assert!(f.eval(-0.1).is_err());
    }

    #[test]
    fn cumint_monomials() {
        let grid = g(32);
        let s2 = GridFn::sample(&grid, |x| x * x).unwrap();
        assert_abs_diff_eq!(s2.cumint().eval(1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s2.integral(), 1.0 / 3.0, epsilon = 1e-13);
        let s3 = GridFn::sample(&grid, |x| 8.0 * x.powi(3)).unwrap();
        // antiderivative 2 s^4
        assert_abs_diff_eq!(s3.cumint().eval(0.5).unwrap(), 0.125, epsilon = 1e-12);
        assert_eq!(s3.cumint().values()[0], 0.0);
    }

    #[test]
    fn derivatives() {
        let grid = g(32);
        let x2 = GridFn::sample(&grid, |x| x * x).unwrap();
        assert_abs_diff_eq!(x2.diff().eval(0.7).unwrap(), 1.4, epsilon = 1e-10);
        let f = GridFn::sample(&grid, |x| 3.0 - x * x).unwrap();
        for v in f.diff2().values() {
            assert_abs_diff_eq!(*v, -2.0, epsilon = 1e-9);
        }
        let c = GridFn::constant(&grid, 4.2);
        assert!(c.diff().values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn max_abs_cases() {
        let grid = g(32);
        let f = GridFn::sample(&grid, |x| x * x - 1.0).unwrap();
        assert_abs_diff_eq!(f.max_abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(GridFn::constant(&grid, -3.0).max_abs(), 3.0, epsilon = 1e-14);
        // interior peak that no node hits exactly
        let bump = GridFn::sample(&grid, |x| x * (1.0 - x)).unwrap();
        assert_abs_diff_eq!(bump.max_abs(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let grid = g(8);
        let mut v = vec![0.0; 9];
        v[3] = f64::NAN;
        assert!(matches!(
            GridFn::from_values(&grid, v),
            Err(FuncError::NonFinite { node: 3, .. })
        ));
        assert!(GridFn::from_values(&grid, vec![0.0; 4]).is_err());
    }

    #[test]
    fn monomial_export() {
        let grid = g(64);
        let f = GridFn::sample(&grid, |x| 1.5 - 0.25 * x * x + 0.125 * x.powi(4)).unwrap();
        let c = f.to_monomial(6).unwrap();
        let want = [1.5, 0.0, -0.25, 0.0, 0.125, 0.0, 0.0];
        for (a, b) in c.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-11);
        }
        assert_eq!(f.to_monomial(17).unwrap_err(), FuncError::MonomialDegree(17));
    }

    #[test]
    fn resample_round_trip() {
        let f = GridFn::sample(&g(24), |x| (1.0 + x * x).ln()).unwrap();
        let back = f.resample(48).unwrap().resample(24).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }
}
