//! Holomorphic functions of one double variable, given as expression text.
//!
//! The grammar covers constants, the variable `z`, the four arithmetic
//! operations, integer powers, `exp` and `sqrt`. Every function built this
//! way is 𝔻-holomorphic wherever it is defined: it acts on the null
//! coordinates `p`, `q` of its argument separately.

mod calculus;
mod parse;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, SplitComplex};
use crate::domain::Rect;

pub use calculus::ExpPoly;
pub use parse::SyntaxError;
pub use quadrature::{integrate_path, integrate_segment, QuadratureError, QuadratureOptions};

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(SplitComplex),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{source} while evaluating `{subexpr}`")]
pub struct EvalError {
    pub source: AlgebraError,
    pub subexpr: String,
}

impl Expr {
    pub fn constant(c: impl Into<SplitComplex>) -> Self {
        Expr::Const(c.into())
    }

    pub fn eval(&self, z: SplitComplex) -> Result<SplitComplex, EvalError> {
        let wrap = |source: AlgebraError, node: &Expr| EvalError {
            source,
            subexpr: node.to_string(),
        };
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let num = a.eval(z)?;
                num.checked_div(b.eval(z)?).map_err(|e| wrap(e, self))?
            }
            Expr::Pow(a, n) => a.eval(z)?.powi(*n).map_err(|e| wrap(e, self))?,
            Expr::Exp(a) => a.eval(z)?.exp(),
            Expr::Sqrt(a) => a.eval(z)?.sqrt().map_err(|e| wrap(e, self))?,
        })
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Sqrt(a) => a.contains_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    /// Replaces every occurrence of `z` with `inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(inner));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var => inner.clone(),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Pow(a, n) => Expr::Pow(sub(a), *n),
            Expr::Exp(a) => Expr::Exp(sub(a)),
            Expr::Sqrt(a) => Expr::Sqrt(sub(a)),
        }
    }

    /// Local algebraic clean-up: constant folding and the identities
    /// `x+0`, `x·1`, `x·0`, `x/1`, `−(−x)`, `x^0`, `x^1`. Not a CAS.
    pub fn simplify(&self) -> Expr {
        use Expr::*;
        let zero = SplitComplex::ZERO;
        let one = SplitComplex::ONE;
        match self {
            Const(_) | Var => self.clone(),
            Neg(a) => match a.simplify() {
                Const(c) => Const(-c),
                Neg(inner) => *inner,
                e => Neg(Box::new(e)),
            },
            Add(a, b) => match (a.simplify(), b.simplify()) {
                (Const(x), Const(y)) => Const(x + y),
                (Const(x), e) | (e, Const(x)) if x == zero => e,
                (x, Neg(y)) => Sub(Box::new(x), y).simplify_shallow(),
                (x, y) => Add(Box::new(x), Box::new(y)),
            },
            Sub(a, b) => match (a.simplify(), b.simplify()) {
                (Const(x), Const(y)) => Const(x - y),
                (e, Const(x)) if x == zero => e,
                (Const(x), e) if x == zero => Neg(Box::new(e)),
                (x, Neg(y)) => Add(Box::new(x), y),
                (x, y) => Sub(Box::new(x), Box::new(y)),
            },
            Mul(a, b) => match (a.simplify(), b.simplify()) {
                (Const(x), Const(y)) => Const(x * y),
                (Const(x), _) | (_, Const(x)) if x == zero => Const(zero),
                (Const(x), e) | (e, Const(x)) if x == one => e,
                (Const(x), e) | (e, Const(x)) if x == -one => Neg(Box::new(e)),
                (Const(x), Mul(inner_a, inner_b)) => match *inner_a {
                    Const(y) => Mul(Box::new(Const(x * y)), inner_b),
                    other => Mul(Box::new(Const(x)), Box::new(Mul(Box::new(other), inner_b))),
                },
                (e, Const(x)) => Mul(Box::new(Const(x)), Box::new(e)),
                (Neg(x), Neg(y)) => Mul(x, y),
                (x, y) => Mul(Box::new(x), Box::new(y)),
            },
            Div(a, b) => match (a.simplify(), b.simplify()) {
                (Const(x), Const(y)) => match x.checked_div(y) {
                    Ok(q) => Const(q),
                    Err(_) => Div(Box::new(Const(x)), Box::new(Const(y))),
                },
                (Const(x), _) if x == zero => Const(zero),
                (e, Const(x)) if x == one => e,
                (e, Const(x)) => match x.inv() {
                    Ok(inv) => Mul(Box::new(Const(inv)), Box::new(e)).simplify_shallow(),
                    Err(_) => Div(Box::new(e), Box::new(Const(x))),
                },
                (x, y) => Div(Box::new(x), Box::new(y)),
            },
            Pow(a, n) => match (a.simplify(), *n) {
                (_, 0) => Const(one),
                (e, 1) => e,
                (Const(x), n) => match x.powi(n) {
                    Ok(v) => Const(v),
                    Err(_) => Pow(Box::new(Const(x)), n),
                },
                (Pow(inner, m), n) if m > 0 && n > 0 => Pow(inner, m * n),
                (e, n) => Pow(Box::new(e), n),
            },
            Exp(a) => match a.simplify() {
                Const(x) => Const(x.exp()),
                e => Exp(Box::new(e)),
            },
            Sqrt(a) => match a.simplify() {
                Const(x) => match x.sqrt() {
                    Ok(r) => Const(r),
                    Err(_) => Sqrt(Box::new(Const(x))),
                },
                e => Sqrt(Box::new(e)),
            },
        }
    }

    // one more pass over a freshly built node whose children are already simple
    fn simplify_shallow(self) -> Expr {
        self.simplify()
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if !is_plain_literal(*c) => 1,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                b.fmt_prec(f, 3)
            }
            Expr::Pow(a, n) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Exp(a) | Expr::Sqrt(a) => {
                write!(f, "{}(", if matches!(self, Expr::Exp(_)) { "exp" } else { "sqrt" })?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

/// Literals the parser produces as a single atom: non-negative reals and
/// non-negative multiples of `J`.
fn is_plain_literal(c: SplitComplex) -> bool {
    (c.im == 0.0 && c.re >= 0.0 && !c.re.is_sign_negative()) || (c.re == 0.0 && c.im > 0.0)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A parsed holomorphic function of one double variable.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloExpr {
    expr: Arc<Expr>,
    pub domain_hint: Option<Rect>,
}

impl HoloExpr {
    pub fn new(expr: Expr) -> Self {
        Self {
            expr: Arc::new(expr),
            domain_hint: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        parse::parse(text).map(Self::new)
    }

    pub fn var() -> Self {
        Self::new(Expr::Var)
    }

    pub fn constant(c: impl Into<SplitComplex>) -> Self {
        Self::new(Expr::Const(c.into()))
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain_hint = Some(domain);
        self
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, z: SplitComplex) -> Result<SplitComplex, EvalError> {
        self.expr.eval(z)
    }

    pub fn is_constant(&self) -> bool {
        !self.expr.simplify().contains_var()
    }

    pub fn simplify(&self) -> Self {
        Self {
            expr: Arc::new(self.expr.simplify()),
            domain_hint: self.domain_hint,
        }
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &HoloExpr) -> Self {
        Self::new(self.expr.substitute(&inner.expr).simplify())
    }

    pub fn derivative(&self) -> Self {
        Self::new(calculus::derivative(&self.expr).simplify())
    }

    /// Closed-form antiderivative on the fragment spanned by polynomials
    /// times exponentials of affine arguments; `None` outside it.
    pub fn antiderivative(&self) -> Option<Self> {
        let normal = ExpPoly::from_expr(&self.expr)?;
        Some(Self::new(normal.integral()?.to_expr()))
    }

    /// The function as a polynomial in `z`, when it is one.
    pub fn as_polynomial(&self) -> Option<crate::poly::DPoly> {
        ExpPoly::from_expr(&self.expr)?.as_polynomial()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(Expr::Add(Box::new(self.expr().clone()), Box::new(other.expr().clone())))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(Expr::Sub(Box::new(self.expr().clone()), Box::new(other.expr().clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(Expr::Mul(Box::new(self.expr().clone()), Box::new(other.expr().clone())))
    }

    pub fn div(&self, other: &Self) -> Self {
        Self::new(Expr::Div(Box::new(self.expr().clone()), Box::new(other.expr().clone())))
    }

    pub fn neg(&self) -> Self {
        Self::new(Expr::Neg(Box::new(self.expr().clone())))
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::new(Expr::Pow(Box::new(self.expr().clone()), n))
    }

    pub fn scale(&self, c: SplitComplex) -> Self {
        Self::constant(c).mul(self)
    }
}

impl From<Expr> for HoloExpr {
    fn from(expr: Expr) -> Self {
        Self::new(expr)
    }
}

impl FromStr for HoloExpr {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for HoloExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(re: f64, im: f64) -> SplitComplex {
        SplitComplex::new(re, im)
    }

    fn h(text: &str) -> HoloExpr {
        HoloExpr::parse(text).unwrap()
    }

    /// Independent evaluator: every node acts on the null pair `(p, q)`.
    fn eval_null(e: &Expr, p: f64, q: f64) -> Option<(f64, f64)> {
        Some(match e {
            Expr::Const(c) => c.to_null(),
            Expr::Var => (p, q),
            Expr::Neg(a) => {
                let (x, y) = eval_null(a, p, q)?;
                (-x, -y)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (x1, y1) = eval_null(a, p, q)?;
                let (x2, y2) = eval_null(b, p, q)?;
                match e {
                    Expr::Add(..) => (x1 + x2, y1 + y2),
                    Expr::Sub(..) => (x1 - x2, y1 - y2),
                    Expr::Mul(..) => (x1 * x2, y1 * y2),
                    _ => (x1 / x2, y1 / y2),
                }
            }
            Expr::Pow(a, n) => {
                let (x, y) = eval_null(a, p, q)?;
                (x.powi(*n), y.powi(*n))
            }
            Expr::Exp(a) => {
                let (x, y) = eval_null(a, p, q)?;
                (x.exp(), y.exp())
            }
            Expr::Sqrt(a) => {
                let (x, y) = eval_null(a, p, q)?;
                (x.sqrt(), y.sqrt())
            }
        })
    }

    #[test]
    fn eval_examples() {
        assert_eq!(h("z^2").eval(d(1.0, 1.0)).unwrap(), d(2.0, 2.0));
        assert_eq!(h("exp(z)").eval(SplitComplex::ZERO).unwrap(), SplitComplex::ONE);
        let err = h("1/z").eval(d(1.0, 1.0)).unwrap_err();
        assert!(matches!(err.source, AlgebraError::ZeroDivisor(_)));
        assert_eq!(err.subexpr, "1/z");
        let err = h("2 + sqrt(z - 3)").eval(SplitComplex::ZERO).unwrap_err();
        assert!(matches!(err.source, AlgebraError::NoSquareRoot(_)));
        assert_eq!(err.subexpr, "sqrt(z - 3)");
    }

    #[test]
    fn eval_agrees_with_null_coordinates() {
        let exprs = [
            "(2J)*z^2 + exp(z)",
            "(z+1)/(z-1)",
            "sqrt(z + 3)*exp(-z)/(1 + 0.5J*z)^3",
            "-z^-2 + 4",
        ];
        for text in exprs {
            let e = h(text);
            for z in [d(0.3, 0.2), d(-0.7, 0.1), d(1.9, -0.4)] {
                let (p, q) = z.to_null();
                let v = e.eval(z).unwrap();
                let (np, nq) = eval_null(e.expr(), p, q).unwrap();
                let w = SplitComplex::from_null(np, nq);
                assert!((v - w).magnitude() <= 1e-12 * w.magnitude().max(1.0), "{text} at {z}");
            }
        }
    }

    #[test]
    fn simplify_folds_constants() {
        assert_eq!(h("2*3 + z*1 - 0").simplify().to_string(), "6 + z");
        assert_eq!(h("0*exp(z) + z^1").simplify().to_string(), "z");
        assert_eq!(h("--z").simplify().to_string(), "z");
        assert!(h("2*(1 + 0*z)").is_constant());
        assert!(!h("z - z*1").is_constant()); // no cancellation, by design of a non-CAS
    }

    #[test]
    fn compose_substitutes() {
        let g = h("z + 1");
        let inner = h("2*z");
        let c = g.compose(&inner);
        assert_eq!(c.eval(d(0.5, 0.25)).unwrap(), d(2.0, 0.5));
    }
}
