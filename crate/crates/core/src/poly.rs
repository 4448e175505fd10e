//! Univariate polynomials over the double numbers and over the reals.
//!
//! Division and gcd over 𝔻 are carried out in null coordinates, where a
//! polynomial splits into two real polynomials and the ring becomes a
//! product of two copies of ℝ[x].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::SplitComplex;

/// Real polynomial, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealPoly(pub Vec<f64>);

impl RealPoly {
    pub fn constant(c: f64) -> Self {
        Self(vec![c]).trimmed(0.0)
    }

    /// Degree after trimming; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn leading(&self) -> f64 {
        self.degree().map_or(0.0, |d| self.0[d])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops coefficients with `|c| <= tol` (absolute) and trailing zeros.
    pub fn trimmed(mut self, tol: f64) -> Self {
        for c in &mut self.0 {
            if c.abs() <= tol {
                *c = 0.0;
            }
        }
        while self.0.last() == Some(&0.0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|c| c * k).collect())
    }

    /// Euclidean division; remainder coefficients below `tol` are zeroed.
    pub fn div_rem(&self, divisor: &Self, tol: f64) -> (Self, Self) {
        let Some(dd) = divisor.degree() else {
            panic!("division by the zero polynomial");
        };
        let lead = divisor.0[dd];
        let mut rem = self.0.clone();
        let n = self.degree().map_or(0, |d| d + 1);
        rem.truncate(n);
        if n <= dd {
            return (Self::default(), Self(rem).trimmed(tol));
        }
        let mut quot = vec![0.0; n - dd];
        for k in (0..n - dd).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, &dc) in divisor.0[..=dd].iter().enumerate() {
                rem[k + j] -= c * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        (Self(quot), Self(rem).trimmed(tol))
    }

    /// Monic gcd by the Euclidean algorithm. A remainder counts as zero when
    /// its coefficients are below `rel_tol` times the dividend's scale.
    pub fn gcd(&self, other: &Self, rel_tol: f64) -> Self {
        let mut a = self.clone().trimmed(rel_tol * self.max_abs());
        let mut b = other.clone().trimmed(rel_tol * other.max_abs());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let b_monic = b.scale(1.0 / b.leading());
            let a_monic = a.scale(1.0 / a.leading());
            let (_, r) = a_monic.div_rem(&b_monic, rel_tol * a_monic.max_abs().max(b_monic.max_abs()));
            a = b_monic;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        a.scale(1.0 / a.leading())
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, rhs: &RealPoly) -> RealPoly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return RealPoly::default();
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly(out)
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, rhs: &RealPoly) -> RealPoly {
        let n = self.0.len().max(rhs.0.len());
        RealPoly(
            (0..n)
                .map(|k| self.0.get(k).copied().unwrap_or(0.0) - rhs.0.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

/// Polynomial in one double variable, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DPoly(pub Vec<SplitComplex>);

impl DPoly {
    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn constant(c: SplitComplex) -> Self {
        Self(vec![c]).trimmed(0.0)
    }

    /// `a·z + b`.
    pub fn linear(a: SplitComplex, b: SplitComplex) -> Self {
        Self(vec![b, a]).trimmed(0.0)
    }

    pub fn monomial(c: SplitComplex, k: usize) -> Self {
        let mut v = vec![SplitComplex::ZERO; k + 1];
        v[k] = c;
        Self(v).trimmed(0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| *c != SplitComplex::ZERO)
    }

    pub fn coeff(&self, k: usize) -> SplitComplex {
        self.0.get(k).copied().unwrap_or(SplitComplex::ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.re.abs()).max(c.im.abs()))
    }

    /// Zeroes real and imaginary parts with magnitude `<= tol`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        for c in &mut self.0 {
            if c.re.abs() <= tol {
                c.re = 0.0;
            }
            if c.im.abs() <= tol {
                c.im = 0.0;
            }
        }
        while self.0.last() == Some(&SplitComplex::ZERO) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn eval(&self, z: SplitComplex) -> SplitComplex {
        self.0.iter().rev().fold(SplitComplex::ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c.scale(k as f64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at `z = 0`.
    pub fn integral(&self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(SplitComplex::ZERO);
        out.extend(self.0.iter().enumerate().map(|(k, &c)| c.scale(1.0 / (k + 1) as f64)));
        Self(out).trimmed(0.0)
    }

    pub fn scale(&self, c: SplitComplex) -> Self {
        Self(self.0.iter().map(|&a| a * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(DPoly::constant(SplitComplex::ONE), |acc, _| &acc * self)
    }

    /// Composition `self(inner(z))`.
    pub fn compose(&self, inner: &DPoly) -> Self {
        self.0
            .iter()
            .rev()
            .fold(DPoly::zero(), |acc, &c| &(&acc * inner) + &DPoly::constant(c))
    }

    /// Null components `(P₊, P₋)`: real polynomials in `p` and `q`.
    pub fn to_null(&self) -> (RealPoly, RealPoly) {
        let (plus, minus) = self.0.iter().map(|c| c.to_null()).unzip();
        (RealPoly(plus), RealPoly(minus))
    }

    pub fn from_null(plus: &RealPoly, minus: &RealPoly) -> Self {
        let n = plus.0.len().max(minus.0.len());
        Self(
            (0..n)
                .map(|k| {
                    SplitComplex::from_null(
                        plus.0.get(k).copied().unwrap_or(0.0),
                        minus.0.get(k).copied().unwrap_or(0.0),
                    )
                })
                .collect(),
        )
        .trimmed(0.0)
    }
}

impl Add for &DPoly {
    type Output = DPoly;
    fn add(self, rhs: &DPoly) -> DPoly {
        let n = self.0.len().max(rhs.0.len());
        DPoly((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect()).trimmed(0.0)
    }
}

impl Sub for &DPoly {
    type Output = DPoly;
    fn sub(self, rhs: &DPoly) -> DPoly {
        let n = self.0.len().max(rhs.0.len());
        DPoly((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect()).trimmed(0.0)
    }
}

impl Mul for &DPoly {
    type Output = DPoly;
    fn mul(self, rhs: &DPoly) -> DPoly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return DPoly::zero();
        }
        let mut out = vec![SplitComplex::ZERO; self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DPoly(out).trimmed(0.0)
    }
}

impl Neg for &DPoly {
    type Output = DPoly;
    fn neg(self) -> DPoly {
        DPoly(self.0.iter().map(|&c| -c).collect())
    }
}

impl fmt::Display for DPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != SplitComplex::ZERO)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*z"),
                _ => format!("({c})*z^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}
