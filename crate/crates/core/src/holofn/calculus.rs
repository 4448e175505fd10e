//! Symbolic derivatives and the exponential-polynomial normal form used for
//! closed-form antiderivatives.

use super::Expr;
use crate::algebra::SplitComplex;
use crate::poly::DPoly;

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

pub(super) fn derivative(e: &Expr) -> Expr {
    use Expr::*;
    match e {
        Const(_) => Const(SplitComplex::ZERO),
        Var => Const(SplitComplex::ONE),
        Neg(a) => Neg(b(derivative(a))),
        Add(x, y) => Add(b(derivative(x)), b(derivative(y))),
        Sub(x, y) => Sub(b(derivative(x)), b(derivative(y))),
        Mul(x, y) => Add(b(Mul(b(derivative(x)), y.clone())), b(Mul(x.clone(), b(derivative(y))))),
        Div(x, y) => Div(
            b(Sub(
                b(Mul(b(derivative(x)), y.clone())),
                b(Mul(x.clone(), b(derivative(y)))),
            )),
            b(Pow(y.clone(), 2)),
        ),
        Pow(a, n) => Mul(
            b(Mul(b(Const(SplitComplex::real(*n as f64))), b(Pow(a.clone(), n - 1)))),
            b(derivative(a)),
        ),
        Exp(a) => Mul(b(e.clone()), b(derivative(a))),
        Sqrt(a) => Div(
            b(derivative(a)),
            b(Mul(b(Const(SplitComplex::real(2.0))), b(e.clone()))),
        ),
    }
}

/// `Σ Pₖ(z)·exp(aₖ z)` with distinct rates `aₖ`.
///
/// Closed under sums, products, division by a single invertible term, and
/// integration when every nonzero rate is invertible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    terms: Vec<(SplitComplex, DPoly)>,
}

impl ExpPoly {
    pub fn polynomial(p: DPoly) -> Self {
        Self::single(SplitComplex::ZERO, p)
    }

    pub fn single(rate: SplitComplex, p: DPoly) -> Self {
        let mut out = Self::default();
        out.push(rate, p);
        out
    }

    pub fn terms(&self) -> &[(SplitComplex, DPoly)] {
        &self.terms
    }

    fn push(&mut self, rate: SplitComplex, p: DPoly) {
        if let Some(slot) = self.terms.iter_mut().find(|(r, _)| *r == rate) {
            slot.1 = &slot.1 + &p;
        } else {
            self.terms.push((rate, p));
        }
        self.terms.retain(|(_, p)| !p.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, p) in &other.terms {
            out.push(*r, p.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(r, p)| (*r, -p)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (r1, p1) in &self.terms {
            for (r2, p2) in &other.terms {
                out.push(*r1 + *r2, p1 * p2);
            }
        }
        out
    }

    /// Reciprocal of `c·exp(a z)` with `c` invertible; `None` otherwise.
    fn reciprocal(&self) -> Option<Self> {
        match self.terms.as_slice() {
            [(rate, p)] if p.degree() == Some(0) => {
                let c = p.coeff(0).inv().ok()?;
                Some(Self::single(-*rate, DPoly::constant(c)))
            }
            _ => None,
        }
    }

    fn powi(&self, n: i32) -> Option<Self> {
        let base = if n < 0 { self.reciprocal()? } else { self.clone() };
        let one = Self::polynomial(DPoly::constant(SplitComplex::ONE));
        Some((0..n.unsigned_abs()).fold(one, |acc, _| acc.mul(&base)))
    }

    pub fn from_expr(e: &Expr) -> Option<Self> {
        Some(match e {
            Expr::Const(c) => Self::polynomial(DPoly::constant(*c)),
            Expr::Var => Self::polynomial(DPoly::monomial(SplitComplex::ONE, 1)),
            Expr::Neg(a) => Self::from_expr(a)?.neg(),
            Expr::Add(x, y) => Self::from_expr(x)?.add(&Self::from_expr(y)?),
            Expr::Sub(x, y) => Self::from_expr(x)?.add(&Self::from_expr(y)?.neg()),
            Expr::Mul(x, y) => Self::from_expr(x)?.mul(&Self::from_expr(y)?),
            Expr::Div(x, y) => Self::from_expr(x)?.mul(&Self::from_expr(y)?.reciprocal()?),
            Expr::Pow(a, n) => Self::from_expr(a)?.powi(*n)?,
            Expr::Exp(a) => {
                // only affine arguments α z + β
                let arg = Self::from_expr(a)?.as_polynomial()?;
                if arg.degree().unwrap_or(0) > 1 {
                    return None;
                }
                Self::single(arg.coeff(1), DPoly::constant(arg.coeff(0).exp()))
            }
            Expr::Sqrt(a) => {
                // √(c·exp(a z)) = √c·exp(a z / 2) on the principal branch
                let inner = Self::from_expr(a)?;
                match inner.terms.as_slice() {
                    [] => Self::default(),
                    [(rate, p)] if p.degree() == Some(0) => {
                        let root = p.coeff(0).sqrt().ok()?;
                        Self::single(rate.scale(0.5), DPoly::constant(root))
                    }
                    _ => return None,
                }
            }
        })
    }

    pub fn as_polynomial(&self) -> Option<DPoly> {
        match self.terms.as_slice() {
            [] => Some(DPoly::zero()),
            [(rate, p)] if *rate == SplitComplex::ZERO => Some(p.clone()),
            _ => None,
        }
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::default();
        for (r, p) in &self.terms {
            out.push(*r, &p.derivative() + &p.scale(*r));
        }
        out
    }

    /// Antiderivative; `None` when some nonzero rate is a zero divisor.
    pub fn integral(&self) -> Option<Self> {
        let mut out = Self::default();
        for (rate, p) in &self.terms {
            if *rate == SplitComplex::ZERO {
                out.push(*rate, p.integral());
                continue;
            }
            // Q = Σ (−1)ⁱ P⁽ⁱ⁾ / aⁱ⁺¹ solves Q' + aQ = P
            let inv = rate.inv().ok()?;
            let mut q = DPoly::zero();
            let mut term = p.scale(inv);
            let mut sign = 1.0;
            while !term.is_zero() {
                q = &q + &term.scale(SplitComplex::real(sign));
                term = term.derivative().scale(inv);
                sign = -sign;
            }
            out.push(*rate, q);
        }
        Some(out)
    }

    pub fn eval(&self, z: SplitComplex) -> SplitComplex {
        self.terms.iter().map(|(r, p)| p.eval(z) * (*r * z).exp()).sum()
    }

    pub fn to_expr(&self) -> Expr {
        let mut sum: Option<Expr> = None;
        for (rate, p) in &self.terms {
            for (k, &c) in p.0.iter().enumerate() {
                if c == SplitComplex::ZERO {
                    continue;
                }
                let mut term = match k {
                    0 => Expr::Const(c),
                    1 => Expr::Mul(b(Expr::Const(c)), b(Expr::Var)),
                    _ => Expr::Mul(b(Expr::Const(c)), b(Expr::Pow(b(Expr::Var), k as i32))),
                };
                if *rate != SplitComplex::ZERO {
                    let arg = Expr::Mul(b(Expr::Const(*rate)), b(Expr::Var));
                    term = Expr::Mul(b(term), b(Expr::Exp(b(arg))));
                }
                sum = Some(match sum {
                    None => term,
                    Some(s) => Expr::Add(b(s), b(term)),
                });
            }
        }
        sum.unwrap_or(Expr::Const(SplitComplex::ZERO)).simplify()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holofn::HoloExpr;

    fn d(re: f64, im: f64) -> SplitComplex {
        SplitComplex::new(re, im)
    }

    fn h(text: &str) -> HoloExpr {
        HoloExpr::parse(text).unwrap()
    }

    fn close(a: SplitComplex, b: SplitComplex, tol: f64) -> bool {
        (a - b).magnitude() <= tol * b.magnitude().max(1.0)
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(h("z^2").derivative().to_string(), "2*z");
        let de = h("exp(3*z)").derivative();
        let z = d(0.2, -0.1);
        assert!(close(de.eval(z).unwrap(), h("3*exp(3*z)").eval(z).unwrap(), 1e-15));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let f = h("(z+1)/(z-1)");
        // at 2+J the denominator 1+J is a zero divisor, so neither side exists
        assert!(f.eval(d(2.0, 1.0)).is_err());
        assert!(f.derivative().eval(d(2.0, 1.0)).is_err());
        let z = d(2.0, 0.5);
        let step = d(1e-5, 0.0);
        let fd = (f.eval(z + step).unwrap() - f.eval(z - step).unwrap()).scale(0.5e5);
        assert!(close(f.derivative().eval(z).unwrap(), fd, 1e-8));
    }

    #[test]
    fn antiderivative_examples() {
        let z = d(0.7, 0.3);
        let a = h("z^2").antiderivative().unwrap();
        assert!(close(a.eval(z).unwrap(), (z * z * z).scale(1.0 / 3.0), 1e-15));
        let a = h("exp(2*z)").antiderivative().unwrap();
        assert!(close(a.eval(z).unwrap(), (z * d(2.0, 0.0)).exp().scale(0.5), 1e-15));
        assert!(h("1/(z^2 - 1)").antiderivative().is_none());
        assert!(h("sqrt(z)").antiderivative().is_none());
        // the rate 1+J is a zero divisor
        assert!(h("exp((1+1J)*z)").antiderivative().is_none());
    }

    #[test]
    fn antiderivative_round_trip() {
        let exprs = [
            "-(1 + exp(z)^2)*exp(z)/2",
            "z^3*exp(-0.5*z) + 2J*z",
            "sqrt(4*exp(2*z))*(z - 1)",
            "(z + 2)^2*(z + 1)/2",
            "exp(z + 1)/exp(0.25J*z)",
        ];
        for text in exprs {
            let f = h(text);
            let back = f.antiderivative().unwrap().derivative();
            for z in [d(0.1, 0.2), d(-0.8, 0.5), d(1.3, -0.9)] {
                assert!(close(back.eval(z).unwrap(), f.eval(z).unwrap(), 1e-10), "{text}");
            }
        }
    }

    #[test]
    fn polynomial_detection() {
        let p = h("(z + 1)^2 - z*z").as_polynomial().unwrap();
        assert_eq!(p, DPoly::linear(d(2.0, 0.0), d(1.0, 0.0)));
        assert!(h("exp(z)").as_polynomial().is_none());
        assert!(h("1/z").as_polynomial().is_none());
        assert_eq!(h("z/2").as_polynomial().unwrap(), DPoly::monomial(d(0.5, 0.0), 1));
    }
}
