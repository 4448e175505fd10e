//! Double (split-complex) numbers `a + jb` with `j² = 1`.
//!
//! Besides the Cartesian form every value has a null-coordinate view
//! `z = p·e₊ + q·e₋` with `e₊ = (1+j)/2`, `e₋ = (1−j)/2`, `p = a+b`, `q = a−b`.
//! In that basis multiplication is componentwise, which is what makes
//! holomorphic functions of a double variable split into two independent
//! real functions.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Threshold on `min(|p|, |q|) / max(1, |z|)` below which a value is
/// treated as lying on the null cone (a zero divisor).
pub const NULL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AlgebraError {
    #[error("zero divisor: {0} lies on a null line")]
    ZeroDivisor(SplitComplex),
    #[error("{0} has no square root with non-negative null components")]
    NoSquareRoot(SplitComplex),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid double-number literal {text:?}")]
pub struct LiteralError {
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitComplex {
    pub re: f64,
    pub im: f64,
}

impl SplitComplex {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };
    pub const ONE: Self = Self { re: 1.0, im: 0.0 };
    pub const J: Self = Self { re: 0.0, im: 1.0 };
    /// Idempotent `(1+j)/2`.
    pub const E_PLUS: Self = Self { re: 0.5, im: 0.5 };
    /// Idempotent `(1−j)/2`.
    pub const E_MINUS: Self = Self { re: 0.5, im: -0.5 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn from_null(p: f64, q: f64) -> Self {
        Self {
            re: 0.5 * (p + q),
            im: 0.5 * (p - q),
        }
    }

    /// Null coordinates `(p, q) = (re + im, re − im)`.
    pub fn to_null(self) -> (f64, f64) {
        (self.re + self.im, self.re - self.im)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// `|z|² = z·z̄ = re² − im²`; may be negative or zero.
    pub fn norm_sqr(self) -> f64 {
        let (p, q) = self.to_null();
        p * q
    }

    /// Euclidean size of the coefficient pair, used only for scaling thresholds.
    pub fn magnitude(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// True when `z` is within [`NULL_EPS`] of the null cone.
    pub fn is_null(self) -> bool {
        let (p, q) = self.to_null();
        p.abs().min(q.abs()) <= NULL_EPS * self.magnitude().max(1.0)
    }

    pub fn inv(self) -> Result<Self, AlgebraError> {
        if self.is_null() {
            return Err(AlgebraError::ZeroDivisor(self));
        }
        let (p, q) = self.to_null();
        Ok(Self::from_null(1.0 / p, 1.0 / q))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, AlgebraError> {
        if rhs.is_null() {
            return Err(AlgebraError::ZeroDivisor(rhs));
        }
        let (a, b) = self.to_null();
        let (c, d) = rhs.to_null();
        Ok(Self::from_null(a / c, b / d))
    }

    pub fn exp(self) -> Self {
        let (p, q) = self.to_null();
        Self::from_null(p.exp(), q.exp())
    }

    /// Principal square root: both null components non-negative.
    pub fn sqrt(self) -> Result<Self, AlgebraError> {
        let (p, q) = self.to_null();
        if p < 0.0 || q < 0.0 {
            return Err(AlgebraError::NoSquareRoot(self));
        }
        Ok(Self::from_null(p.sqrt(), q.sqrt()))
    }

    /// All square roots `±√p·e₊ ± √q·e₋` (deduplicated when a component is zero).
    pub fn sqrt_all(self) -> Vec<Self> {
        let (p, q) = self.to_null();
        if p < 0.0 || q < 0.0 {
            return Vec::new();
        }
        let (sp, sq) = (p.sqrt(), q.sqrt());
        let mut roots: Vec<Self> = Vec::with_capacity(4);
        for (a, b) in [(sp, sq), (sp, -sq), (-sp, sq), (-sp, -sq)] {
            let r = Self::from_null(a, b);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots
    }

    pub fn powi(self, n: i32) -> Result<Self, AlgebraError> {
        let base = if n < 0 { self.inv()? } else { self };
        let (p, q) = base.to_null();
        let k = n.unsigned_abs() as i32;
        Ok(Self::from_null(p.powi(k), q.powi(k)))
    }

    /// `e^{φj} = cosh φ + j sinh φ`.
    pub fn hyperbolic_unit(phi: f64) -> Self {
        Self::new(phi.cosh(), phi.sinh())
    }
}

impl From<f64> for SplitComplex {
    fn from(x: f64) -> Self {
        Self::real(x)
    }
}

impl Add for SplitComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for SplitComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for SplitComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.re * rhs.re + self.im * rhs.im, self.re * rhs.im + self.im * rhs.re)
    }
}

impl Mul<f64> for SplitComplex {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<SplitComplex> for f64 {
    type Output = SplitComplex;
    fn mul(self, rhs: SplitComplex) -> SplitComplex {
        rhs.scale(self)
    }
}

impl Neg for SplitComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl AddAssign for SplitComplex {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for SplitComplex {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for SplitComplex {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for SplitComplex {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for SplitComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0.0) => write!(f, "{re}"),
            (0.0, im) => write!(f, "{im}J"),
            (re, im) if im < 0.0 => write!(f, "{re}-{}J", -im),
            (re, im) => write!(f, "{re}+{im}J"),
        }
    }
}

impl FromStr for SplitComplex {
    type Err = LiteralError;

    /// Accepts `a`, `a+bJ`, `a-bJ` and `bJ` (the unit may be `j` or `J`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LiteralError { text: s.to_string() };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let Some(body) = t.strip_suffix(['j', 'J']) else {
            return t.parse::<f64>().map(Self::real).map_err(|_| err());
        };
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        match split {
            Some(i) => {
                let re = body[..i].parse::<f64>().map_err(|_| err())?;
                let im = body[i..].parse::<f64>().map_err(|_| err())?;
                Ok(Self::new(re, im))
            }
            None => body.parse::<f64>().map(|im| Self::new(0.0, im)).map_err(|_| err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: SplitComplex, b: SplitComplex, tol: f64) -> bool {
        (a.re - b.re).abs() <= tol && (a.im - b.im).abs() <= tol
    }

    #[test]
    fn multiplication_examples() {
        let one_plus_j = SplitComplex::new(1.0, 1.0);
        assert_eq!(one_plus_j * one_plus_j.conj(), SplitComplex::ZERO);
        assert_eq!(SplitComplex::J * SplitComplex::J, SplitComplex::ONE);
        // null-coordinate oracle: p = 3·5, q = 1·1
        let prod = SplitComplex::new(2.0, 1.0) * SplitComplex::new(3.0, 2.0);
        assert_eq!(prod, SplitComplex::from_null(15.0, 1.0));
        assert_eq!(prod, SplitComplex::new(8.0, 7.0));
    }

    #[test]
    fn division_examples() {
        assert!(matches!(
            SplitComplex::ONE.checked_div(SplitComplex::new(1.0, 1.0)),
            Err(AlgebraError::ZeroDivisor(_))
        ));
        let q = SplitComplex::new(8.0, 7.0)
            .checked_div(SplitComplex::new(3.0, 2.0))
            .unwrap();
        assert!(close(q, SplitComplex::new(2.0, 1.0), 1e-15));
        let z = SplitComplex::new(-0.25, 3.5);
        assert_eq!(z.checked_div(SplitComplex::ONE).unwrap(), z);
    }

    #[test]
    fn exp_examples() {
        assert_eq!(SplitComplex::ZERO.exp(), SplitComplex::ONE);
        let e = SplitComplex::J.exp();
        let oracle = SplitComplex::E_PLUS.scale(1f64.exp()) + SplitComplex::E_MINUS.scale((-1f64).exp());
        assert!(close(e, oracle, 1e-15));
        assert!(close(e, SplitComplex::new(1.54308, 1.17520), 1e-5));
        for phi in [-3.0, -0.4, 0.0, 1.7] {
            let u = SplitComplex::new(0.0, phi).exp();
            assert!((u.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(close(u, SplitComplex::hyperbolic_unit(phi), 1e-15));
        }
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(SplitComplex::real(4.0).sqrt().unwrap(), SplitComplex::real(2.0));
        let r = SplitComplex::new(1.0, 1.0).sqrt().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(r, SplitComplex::new(h, h), 1e-15));
        assert!(matches!(
            SplitComplex::real(-1.0).sqrt(),
            Err(AlgebraError::NoSquareRoot(_))
        ));
        let roots = SplitComplex::new(3.0, 1.0).sqrt_all();
        assert_eq!(roots.len(), 4);
        for root in roots {
            assert!(close(root * root, SplitComplex::new(3.0, 1.0), 1e-14));
        }
        assert_eq!(SplitComplex::new(1.0, 1.0).sqrt_all().len(), 2);
    }

    #[test]
    fn null_coordinates() {
        assert_eq!(SplitComplex::new(3.0, 2.0).to_null(), (5.0, 1.0));
        assert_eq!(SplitComplex::J.to_null(), (1.0, -1.0));
        assert_eq!(SplitComplex::from_null(1.0, 1.0), SplitComplex::ONE);
        let ep = SplitComplex::E_PLUS;
        let em = SplitComplex::E_MINUS;
        assert_eq!(ep * ep, ep);
        assert_eq!(em * em, em);
        assert_eq!(ep * em, SplitComplex::ZERO);
    }

    #[test]
    fn literal_round_trip() {
        for (text, value) in [
            ("2", SplitComplex::real(2.0)),
            ("1.5+2J", SplitComplex::new(1.5, 2.0)),
            ("1.5-2j", SplitComplex::new(1.5, -2.0)),
            ("-3J", SplitComplex::new(0.0, -3.0)),
            ("1e-3+2.5e2J", SplitComplex::new(1e-3, 250.0)),
            ("-1e+2-1E-2j", SplitComplex::new(-100.0, -0.01)),
        ] {
            let parsed: SplitComplex = text.parse().unwrap();
            assert_eq!(parsed, value, "{text}");
            assert_eq!(parsed.to_string().parse::<SplitComplex>().unwrap(), value);
        }
        assert!("".parse::<SplitComplex>().is_err());
        assert!("1+J".parse::<SplitComplex>().is_err());
        assert!("abc".parse::<SplitComplex>().is_err());
    }

    #[test]
    fn integer_powers() {
        let z = SplitComplex::new(2.0, 0.5);
        assert!(close(z.powi(3).unwrap(), z * z * z, 1e-14));
        assert!(close(z.powi(-2).unwrap() * z * z, SplitComplex::ONE, 1e-14));
        assert!(SplitComplex::new(1.0, -1.0).powi(-1).is_err());
    }
}
