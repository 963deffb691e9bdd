//! Scalar and truncated-power-series arithmetic behind the evaluators.

/// Below this magnitude a leading coefficient counts as zero.
pub const DEGENERACY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Fault {
    DivisionByZero,
    LnNonPositive(f64),
    SqrtNegative(f64),
    ZeroToNegative,
    NegativeBase(f64),
    Degenerate(f64),
}

impl Fault {
    pub(crate) fn reason(self) -> String {
        match self {
            Fault::DivisionByZero => "division by zero".into(),
            Fault::LnNonPositive(v) => format!("ln of non-positive value {v}"),
            Fault::SqrtNegative(v) => format!("sqrt of negative value {v}"),
            Fault::ZeroToNegative => "zero raised to a negative power".into(),
            Fault::NegativeBase(v) => format!("negative base {v} with non-integer exponent"),
            Fault::Degenerate(v) => format!("degenerate leading coefficient {v:e}"),
        }
    }
}

/// Operations shared by `f64` and [`Jet`] so one tree walker serves both.
pub(crate) trait Arith: Sized + Clone {
    /// A constant with the same shape as `self`.
    fn lift(&self, v: f64) -> Self;
    /// The value at q = 0.
    fn lead(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, Fault>;
    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self, Fault>;
    fn sqrt(&self) -> Result<Self, Fault>;
    /// `self^n` for integer `n`; negative `n` goes through the reciprocal.
    fn powi(&self, n: i64) -> Result<Self, Fault>;
    /// `self^alpha` for a non-integer constant exponent.
    fn powf(&self, alpha: f64) -> Result<Self, Fault>;
}

impl Arith for f64 {
    fn lift(&self, v: f64) -> f64 {
        v
    }

    fn lead(&self) -> f64 {
        *self
    }

    fn add(&self, o: &f64) -> f64 {
        self + o
    }

    fn sub(&self, o: &f64) -> f64 {
        self - o
    }

    fn mul(&self, o: &f64) -> f64 {
        self * o
    }

    fn neg(&self) -> f64 {
        -self
    }

    fn div(&self, o: &f64) -> Result<f64, Fault> {
        if *o == 0.0 {
            return Err(Fault::DivisionByZero);
        }
        Ok(self / o)
    }

    fn exp(&self) -> f64 {
        f64::exp(*self)
    }

    fn ln(&self) -> Result<f64, Fault> {
        if *self <= 0.0 {
            return Err(Fault::LnNonPositive(*self));
        }
        Ok(f64::ln(*self))
    }

    fn sqrt(&self) -> Result<f64, Fault> {
        if *self < 0.0 {
            return Err(Fault::SqrtNegative(*self));
        }
        Ok(f64::sqrt(*self))
    }

    fn powi(&self, n: i64) -> Result<f64, Fault> {
        if n < 0 && *self == 0.0 {
            return Err(Fault::ZeroToNegative);
        }
        Ok(match i32::try_from(n) {
            Ok(n) => f64::powi(*self, n),
            Err(_) => f64::powf(*self, n as f64),
        })
    }

    fn powf(&self, alpha: f64) -> Result<f64, Fault> {
        if *self < 0.0 {
            return Err(Fault::NegativeBase(*self));
        }
        if *self == 0.0 && alpha < 0.0 {
            return Err(Fault::ZeroToNegative);
        }
        Ok(f64::powf(*self, alpha))
    }
}

/// Power series in q truncated after `q^m`; `coeffs[k]` multiplies `q^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    /// Series from coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<f64>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { coeffs }
    }

    pub fn constant(v: f64, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Evaluates the truncated polynomial at `q` (Horner).
    pub fn eval(&self, q: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert_eq!(self.coeffs.len(), o.coeffs.len());
        Jet {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn check_lead(&self) -> Result<f64, Fault> {
        let u0 = self.coeffs[0];
        if u0.abs() < DEGENERACY_EPS {
            return Err(Fault::Degenerate(u0));
        }
        Ok(u0)
    }

    fn recip(&self) -> Result<Jet, Fault> {
        self.lift(1.0).div(self)
    }
}

impl Arith for Jet {
    fn lift(&self, v: f64) -> Jet {
        Jet::constant(v, self.order())
    }

    fn lead(&self) -> f64 {
        self.coeffs[0]
    }

    fn add(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }

    fn sub(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }

    fn mul(&self, o: &Jet) -> Jet {
        let n = self.coeffs.len();
        let (a, b) = (&self.coeffs, &o.coeffs);
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
            .collect();
        Jet { coeffs }
    }

    fn neg(&self) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn div(&self, o: &Jet) -> Result<Jet, Fault> {
        let v0 = o.check_lead()?;
        let n = self.coeffs.len();
        let mut w = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (0..k).map(|j| w[j] * o.coeffs[k - j]).sum();
            w[k] = (self.coeffs[k] - s) / v0;
        }
        Ok(Jet { coeffs: w })
    }

    fn exp(&self) -> Jet {
        let u = &self.coeffs;
        let n = u.len();
        let mut e = vec![0.0; n];
        e[0] = u[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * u[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { coeffs: e }
    }

    fn ln(&self) -> Result<Jet, Fault> {
        let u0 = self.check_lead()?;
        if u0 < 0.0 {
            return Err(Fault::LnNonPositive(u0));
        }
        let u = &self.coeffs;
        let n = u.len();
        let mut l = vec![0.0; n];
        l[0] = u0.ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * u[k - j]).sum();
            l[k] = (u[k] - s / k as f64) / u0;
        }
        Ok(Jet { coeffs: l })
    }

    fn sqrt(&self) -> Result<Jet, Fault> {
        let u0 = self.check_lead()?;
        if u0 < 0.0 {
            return Err(Fault::SqrtNegative(u0));
        }
        let u = &self.coeffs;
        let n = u.len();
        let mut s = vec![0.0; n];
        s[0] = u0.sqrt();
        for k in 1..n {
            let c: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (u[k] - c) / (2.0 * s[0]);
        }
        Ok(Jet { coeffs: s })
    }

    fn powi(&self, n: i64) -> Result<Jet, Fault> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = self.lift(1.0);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    fn powf(&self, alpha: f64) -> Result<Jet, Fault> {
        let u0 = self.check_lead()?;
        if u0 < 0.0 {
            return Err(Fault::NegativeBase(u0));
        }
        Ok(self.ln()?.mul(&self.lift(alpha)).exp())
    }
}

/// Integer value of `v` when it is one and fits comfortably in `i64`.
pub(crate) fn as_integer(v: f64) -> Option<i64> {
    (v.fract() == 0.0 && v.abs() < 1e15).then_some(v as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(c: &[f64]) -> Jet {
        Jet::new(c.to_vec())
    }

    fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn product_is_cauchy() {
        let u = 0.3;
        let v = -1.7;
        let p = jet(&[1.0, u]).mul(&jet(&[2.0, v]));
        assert_eq!(p.coeffs(), &[2.0, v + 2.0 * u]);
    }

    #[test]
    fn exp_of_quadratic_argument() {
        // exp(x^2 q) = 1 + x^2 q + x^4 q^2 / 2
        let x2 = 0.49;
        let e = jet(&[0.0, x2, 0.0]).exp();
        assert!(close(&e, &jet(&[1.0, x2, x2 * x2 / 2.0]), 1e-15));
    }

    #[test]
    fn exp_ln_and_quotient_identities() {
        let u = jet(&[1.3, -0.4, 0.25, 0.1, -0.05]);
        assert!(close(&u.ln().unwrap().exp(), &u, 1e-12));
        let sq = u.powi(2).unwrap();
        assert!(close(&sq.div(&u).unwrap(), &u, 1e-12));
        let s = u.sqrt().unwrap();
        assert!(close(&s.mul(&s), &u, 1e-12));
        let inv3 = u.powi(-3).unwrap();
        assert!(close(&inv3.mul(&u.powi(3).unwrap()), &u.lift(1.0), 1e-12));
        let half = u.powf(0.5).unwrap();
        assert!(close(&half, &s, 1e-12));
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let u = jet(&[1e-13, 1.0]);
        assert!(matches!(u.lift(1.0).div(&u), Err(Fault::Degenerate(_))));
        assert!(matches!(u.ln(), Err(Fault::Degenerate(_))));
        assert!(matches!(u.powi(-2), Err(Fault::Degenerate(_))));
        assert!(u.powi(2).is_ok());
    }

    #[test]
    fn scalar_domain_faults() {
        assert_eq!(1.0.div(&0.0), Err(Fault::DivisionByZero));
        assert_eq!(Arith::ln(&0.0), Err(Fault::LnNonPositive(0.0)));
        assert_eq!(0.0.powi(-1), Err(Fault::ZeroToNegative));
        assert_eq!((-2.0).powf(0.5), Err(Fault::NegativeBase(-2.0)));
        assert_eq!((-2.0).powi(3), Ok(-8.0));
    }
}
