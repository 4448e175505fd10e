//! Cubic polynomial parametrizations: minimality and the Enneper test.
//!
//! A polynomial isothermal parametrization of degree 3 that is minimal is,
//! up to position and homothety, a piece of the Enneper surface of negative
//! curvature. The check lifts `x(u, v)` to the holomorphic curve
//! `Ψ(z) = 2x(z/2, jz/2)`, reads off `f = −φ₁ + jφ₂`, `f g² = −φ₁ − jφ₂`,
//! `f g = φ₃` from `Ψ′ = (φ₁, φ₂, φ₃)`, and matches the normal forms
//! `f = ±(az + b)²`, `g = (cz + d)/(az + b)` with `bc − ad ≠ 0`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::SplitComplex;
use crate::holofn::HoloExpr;
use crate::poly::{DPoly, RealPoly};
use crate::weierstrass::{Point3, SurfacePatch};

/// Coefficients at or below this fraction of the largest one count as zero.
pub const COEFF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid coefficient JSON: {0}")]
    Json(String),
    #[error("bad monomial key {0:?}; expected \"(i,j)\"")]
    BadKey(String),
    #[error("monomial u^{i} v^{j} exceeds total degree 3")]
    DegreeTooHigh { i: usize, j: usize },
    #[error("need at least 10 regular samples to fit a cubic, got {0}")]
    TooFewSamples(usize),
}

/// Real polynomial in `(u, v)`, keyed by exponent pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BiPoly(pub BTreeMap<(usize, usize), f64>);

impl BiPoly {
    pub fn monomial(c: f64, i: usize, j: usize) -> Self {
        let mut out = Self::default();
        out.add_term(c, i, j);
        out
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.0.get(&(i, j)).copied().unwrap_or(0.0)
    }

    fn add_term(&mut self, c: f64, i: usize, j: usize) {
        if c != 0.0 {
            *self.0.entry((i, j)).or_insert(0.0) += c;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.0.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().filter(|(_, c)| **c != 0.0).map(|((i, j), _)| i + j).max()
    }

    pub fn trimmed(&self, tol: f64) -> Self {
        Self(
            self.0
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(k, c)| (*k, *c))
                .collect(),
        )
    }

    /// Zero up to `COEFF_TOL` relative to `scale`.
    pub fn vanishes(&self, scale: f64) -> bool {
        self.max_abs() <= COEFF_TOL * scale.max(f64::MIN_POSITIVE)
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.0
            .iter()
            .map(|((i, j), c)| c * u.powi(*i as i32) * v.powi(*j as i32))
            .sum()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|(e, c)| (*e, c * k)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in &other.0 {
            out.add_term(*c, *i, *j);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for ((i, j), a) in &self.0 {
            for ((k, l), b) in &other.0 {
                out.add_term(a * b, i + k, j + l);
            }
        }
        out
    }

    pub fn du(&self) -> Self {
        let mut out = Self::default();
        for ((i, j), c) in &self.0 {
            if *i > 0 {
                out.add_term(*i as f64 * c, i - 1, *j);
            }
        }
        out
    }

    pub fn dv(&self) -> Self {
        let mut out = Self::default();
        for ((i, j), c) in &self.0 {
            if *j > 0 {
                out.add_term(*j as f64 * c, *i, j - 1);
            }
        }
        out
    }

    /// `Σ c·u^i v^k` with `u = z/2`, `v = jz/2`, as a polynomial in `z`.
    fn substitute_null(&self) -> DPoly {
        let mut coeffs = vec![SplitComplex::ZERO; self.degree().map_or(1, |d| d + 1)];
        for ((i, k), c) in &self.0 {
            let jk = if k % 2 == 0 { SplitComplex::ONE } else { SplitComplex::J };
            coeffs[i + k] += jk.scale(c / 2f64.powi((i + k) as i32));
        }
        DPoly(coeffs).trimmed(0.0)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.0.iter().map(|((i, j), c)| format!("{c}*u^{i}*v^{j}")).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn inner(a: &[BiPoly; 3], b: &[BiPoly; 3]) -> BiPoly {
    a[0].mul(&b[0]).scale(-1.0).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

fn lorentz_cross(a: &[BiPoly; 3], b: &[BiPoly; 3]) -> [BiPoly; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])).scale(-1.0),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

/// Three real polynomials of total degree at most 3.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CubicParametrization {
    pub x: [BiPoly; 3],
}

fn parse_key(key: &str) -> Result<(usize, usize), ClassifyError> {
    let bad = || ClassifyError::BadKey(key.to_string());
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (i, j) = inner.split_once(',').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    if i + j > 3 {
        return Err(ClassifyError::DegreeTooHigh { i, j });
    }
    Ok((i, j))
}

impl CubicParametrization {
    pub fn new(x: [BiPoly; 3]) -> Self {
        Self { x }
    }

    /// `{"x1": {"(i,j)": c, ...}, "x2": {...}, "x3": {...}}`; missing
    /// components are zero.
    pub fn from_json(text: &str) -> Result<Self, ClassifyError> {
        let raw: BTreeMap<String, BTreeMap<String, f64>> =
            serde_json::from_str(text).map_err(|e| ClassifyError::Json(e.to_string()))?;
        let mut out = Self::default();
        for (name, terms) in raw {
            let slot = match name.as_str() {
                "x1" => 0,
                "x2" => 1,
                "x3" => 2,
                other => return Err(ClassifyError::Json(format!("unknown component {other:?}"))),
            };
            for (key, c) in terms {
                let (i, j) = parse_key(&key)?;
                out.x[slot].add_term(c, i, j);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, BTreeMap<String, f64>> = (0..3)
            .map(|c| {
                let terms = self.x[c]
                    .0
                    .iter()
                    .map(|((i, j), v)| (format!("({i},{j})"), *v))
                    .collect();
                (format!("x{}", c + 1), terms)
            })
            .collect();
        serde_json::to_string_pretty(&map).expect("plain map serializes")
    }

    /// The Enneper surface of negative curvature.
    pub fn enneper() -> Self {
        let t = |c: f64, i, j| BiPoly::monomial(c, i, j);
        let sixth = 1.0 / 6.0;
        Self::new([
            t(-sixth, 3, 0).add(&t(-0.5, 1, 2)).add(&t(-0.5, 1, 0)),
            t(-0.5, 2, 1).add(&t(-sixth, 0, 3)).add(&t(0.5, 0, 1)),
            t(0.5, 2, 0).add(&t(0.5, 0, 2)),
        ])
    }

    pub fn eval(&self, u: f64, v: f64) -> Point3 {
        [self.x[0].eval(u, v), self.x[1].eval(u, v), self.x[2].eval(u, v)]
    }

    pub fn degree(&self) -> Option<usize> {
        self.x.iter().filter_map(|p| p.degree()).max()
    }

    fn max_abs(&self) -> f64 {
        self.x.iter().map(|p| p.max_abs()).fold(0.0, f64::max)
    }

    /// `scale·(M·x) + t`, coefficientwise.
    pub fn transformed(&self, linear: &Matrix3<f64>, t: Point3, scale: f64) -> Self {
        let mut out: [BiPoly; 3] = Default::default();
        for (r, slot) in out.iter_mut().enumerate() {
            let mut p = BiPoly::monomial(t[r], 0, 0);
            for c in 0..3 {
                p = p.add(&self.x[c].scale(scale * linear[(r, c)]));
            }
            *slot = p;
        }
        Self::new(out)
    }

    /// Least-squares cubic through the regular samples of a patch.
    pub fn fit(patch: &SurfacePatch) -> Result<Self, ClassifyError> {
        let monomials: Vec<(usize, usize)> = (0..=3).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect();
        let grid = patch.grid();
        let rows: Vec<(f64, f64, Point3)> = grid
            .nodes()
            .filter(|&(i, k)| patch.is_regular(i, k))
            .filter_map(|(i, k)| {
                let z = grid.node(i, k);
                patch.point(i, k).map(|p| (z.re, z.im, p))
            })
            .collect();
        if rows.len() < monomials.len() {
            return Err(ClassifyError::TooFewSamples(rows.len()));
        }
        let a = DMatrix::from_fn(rows.len(), monomials.len(), |r, c| {
            let (i, j) = monomials[c];
            rows[r].0.powi(i as i32) * rows[r].1.powi(j as i32)
        });
        let b = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r].2[c]);
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|e| ClassifyError::Json(e.to_string()))?;
        let mut out = Self::default();
        for (c, slot) in out.x.iter_mut().enumerate() {
            for (m, &(i, j)) in monomials.iter().enumerate() {
                slot.add_term(sol[(m, c)], i, j);
            }
        }
        let scale = out.max_abs();
        for slot in &mut out.x {
            *slot = slot.trimmed(COEFF_TOL * scale);
        }
        Ok(out)
    }
}

/// `Ψ(z) = 2·(x(z/2, jz/2) − x(0, 0))`, whose real part on `z = u + jv` is
/// `x(u, v) − x(0, 0)`.
pub fn lift_to_curve(x: &CubicParametrization) -> [DPoly; 3] {
    std::array::from_fn(|c| {
        let mut p = x.x[c].clone();
        p.0.remove(&(0, 0));
        p.substitute_null().scale(SplitComplex::real(2.0))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtractError {
    /// `(−φ₁ + jφ₂)(−φ₁ − jφ₂) ≠ φ₃²`.
    NotMinimal { defect: f64 },
    /// `f ≡ 0`.
    Degenerate,
}

/// Rational function over 𝔻 in lowest terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: DPoly,
    pub den: DPoly,
}

impl Rational {
    pub fn to_expr(&self) -> HoloExpr {
        let num = HoloExpr::new(crate::holofn::ExpPoly::polynomial(self.num.clone()).to_expr());
        if self.den.degree() == Some(0) {
            if let Ok(inv) = self.den.coeff(0).inv() {
                return HoloExpr::new(crate::holofn::ExpPoly::polynomial(self.num.scale(inv)).to_expr());
            }
        }
        let den = HoloExpr::new(crate::holofn::ExpPoly::polynomial(self.den.clone()).to_expr());
        num.div(&den)
    }
}

fn split_tol(p: &RealPoly, scale: f64) -> RealPoly {
    p.clone().trimmed(COEFF_TOL * scale)
}

/// `f = −φ₁ + jφ₂`, `g = φ₃/f` in lowest terms.
pub fn extract_pair(phi: &[DPoly; 3]) -> Result<(DPoly, Rational), ExtractError> {
    let j = SplitComplex::J;
    let f = &phi[0].scale(-SplitComplex::ONE) + &phi[1].scale(j);
    let h = &phi[0].scale(-SplitComplex::ONE) - &phi[1].scale(j);
    let scale = phi.iter().map(|p| p.max_abs()).fold(0.0, f64::max);
    let defect = (&(&f * &h) - &(&phi[2] * &phi[2])).max_abs();
    if defect > COEFF_TOL * scale.powi(2).max(f64::MIN_POSITIVE) {
        return Err(ExtractError::NotMinimal { defect });
    }
    let f = f.trimmed(COEFF_TOL * scale);
    if f.is_zero() {
        return Err(ExtractError::Degenerate);
    }
    let (f_plus, f_minus) = f.to_null();
    let (n_plus, n_minus) = phi[2].to_null();
    if f_plus.clone().trimmed(COEFF_TOL * scale).is_zero() || f_minus.clone().trimmed(COEFF_TOL * scale).is_zero() {
        return Err(ExtractError::Degenerate);
    }
    let reduce = |num: &RealPoly, den: &RealPoly| -> (RealPoly, RealPoly) {
        let (num, den) = (split_tol(num, scale), split_tol(den, scale));
        if num.is_zero() {
            return (num, RealPoly::constant(1.0));
        }
        let common = num.gcd(&den, COEFF_TOL);
        let (qn, _) = num.div_rem(&common, COEFF_TOL * scale);
        let (qd, _) = den.div_rem(&common, COEFF_TOL * scale);
        (qn, qd)
    };
    let (np, dp) = reduce(&n_plus, &f_plus);
    let (nm, dm) = reduce(&n_minus, &f_minus);
    Ok((
        f,
        Rational {
            num: DPoly::from_null(&np, &nm),
            den: DPoly::from_null(&dp, &dm),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    EnneperNegative,
    /// Minimal, normal form matched, but `K > 0` (the imaginary-part analogue).
    PositiveCurvature,
    NotMinimal,
    NotIsothermal,
    Degenerate,
}

/// `f = s·(az + b)²`, `g = (cz + d)/(az + b)`, per null component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub a: SplitComplex,
    pub b: SplitComplex,
    pub c: SplitComplex,
    pub d: SplitComplex,
    /// Sign of `f` in each null component.
    pub sign: (f64, f64),
}

impl NormalForm {
    pub fn determinant(&self) -> SplitComplex {
        self.b * self.c - self.a * self.d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationVerdict {
    pub verdict: Verdict,
    pub f: Option<HoloExpr>,
    pub g: Option<HoloExpr>,
    pub normal_form: Option<NormalForm>,
    pub scale: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub f: Option<String>,
    pub g: Option<String>,
    pub scale: Option<f64>,
    pub notes: Vec<String>,
}

impl ClassificationVerdict {
    fn bare(verdict: Verdict, note: impl Into<String>) -> Self {
        Self {
            verdict,
            f: None,
            g: None,
            normal_form: None,
            scale: None,
            notes: vec![note.into()],
        }
    }

    pub fn report(&self) -> ClassificationReport {
        ClassificationReport {
            verdict: self.verdict,
            f: self.f.as_ref().map(|e| e.to_string()),
            g: self.g.as_ref().map(|e| e.to_string()),
            scale: self.scale,
            notes: self.notes.clone(),
        }
    }
}

/// Matches one null component: `f = s(ax + b)²`, `n = s(ax + b)(cx + d)`.
fn match_null(f: &RealPoly, n: &RealPoly, scale: f64) -> Option<(f64, f64, f64, f64, f64)> {
    let tol = COEFF_TOL * scale;
    let f = f.clone().trimmed(tol);
    let n = n.clone().trimmed(tol);
    if f.degree()? > 2 || n.degree().unwrap_or(0) > 2 {
        return None;
    }
    let (c0, c1, c2) = (
        f.0[0],
        f.0.get(1).copied().unwrap_or(0.0),
        f.0.get(2).copied().unwrap_or(0.0),
    );
    // take the root from the larger end coefficient so that a null component
    // with a tiny leading term stays well conditioned
    let (s, a, b) = if c0.abs() >= c2.abs() {
        let (s, b) = (c0.signum(), c0.abs().sqrt());
        (s, c1 / (2.0 * s * b), b)
    } else {
        let (s, a) = (c2.signum(), c2.abs().sqrt());
        (s, a, c1 / (2.0 * s * a))
    };
    let f_fit = RealPoly(vec![s * b * b, 2.0 * s * a * b, s * a * a]);
    if (0..3).any(|k| (f_fit.0[k] - f.0.get(k).copied().unwrap_or(0.0)).abs() > tol) {
        return None;
    }
    // n = s(ax + b)(cx + d) is linear in (c, d)
    let m = nalgebra::Matrix3x2::new(0.0, s * b, s * b, s * a, s * a, 0.0);
    let rhs = nalgebra::Vector3::from_fn(|k, _| n.0.get(k).copied().unwrap_or(0.0));
    let cd = m.svd(true, true).solve(&rhs, 1e-14).ok()?;
    if (m * cd - rhs).amax() > tol {
        return None;
    }
    Some((s, a, b, cd[0], cd[1]))
}

/// Homothety factor relative to the unit Enneper surface, from the
/// invariant `4/(√−K·(1 − σ)²)` with `σ = |∇ ln√−K|²/(4K)`, evaluated at `z`.
fn homothety_scale(f: &DPoly, g_num: &DPoly, g_den: &DPoly, z: SplitComplex) -> Option<f64> {
    let inv = g_den.eval(z).inv().ok()?;
    let g = g_num.eval(z) * inv;
    let gp = (g_num.derivative().eval(z) - g * g_den.derivative().eval(z)) * inv;
    // g″ from (g·den)″ = num″
    let gpp = (g_num.derivative().derivative().eval(z)
        - g * g_den.derivative().derivative().eval(z)
        - (gp * g_den.derivative().eval(z)).scale(2.0))
        * inv;
    let (fz, fp) = (f.eval(z), f.derivative().eval(z));
    let big_g = fz.norm_sqr() * (1.0 - g.norm_sqr()).powi(2) / 4.0;
    let minus_k = 16.0 * gp.norm_sqr() / (fz.norm_sqr() * (1.0 - g.norm_sqr()).powi(4));
    if minus_k.is_nan() || minus_k <= 0.0 || big_g == 0.0 {
        return None;
    }
    // ∂ ln|h|² = 2 Re(h′/h) along u and 2 Im(h′/h) along v
    let dlog = |h: SplitComplex, hp: SplitComplex| -> Option<(f64, f64)> {
        let r = hp * h.inv().ok()?;
        Some((2.0 * r.re, 2.0 * r.im))
    };
    let (gpu, gpv) = dlog(gp, gpp)?;
    let (fu, fv) = dlog(fz, fp)?;
    let w = g.conj() * gp;
    let one_minus = 1.0 - g.norm_sqr();
    let (mu, mv) = (-2.0 * w.re / one_minus, -2.0 * w.im / one_minus);
    // ℓ = ½ ln(−K) = ½(ln 16 + ln|g′|² − ln|f|² − 4 ln|1 − |g|²|)
    let lu = 0.5 * (gpu - fu - 4.0 * mu);
    let lv = 0.5 * (gpv - fv - 4.0 * mv);
    let grad = (lv * lv - lu * lu) / big_g;
    let sigma = grad / (-4.0 * minus_k);
    Some(4.0 / (minus_k.sqrt() * (1.0 - sigma).powi(2)))
}

/// Decides minimality and the Enneper normal form for a cubic.
pub fn classify_cubic(x: &CubicParametrization) -> ClassificationVerdict {
    let scale = x.max_abs();
    if scale == 0.0 {
        return ClassificationVerdict::bare(Verdict::Degenerate, "constant parametrization");
    }
    let xu: [BiPoly; 3] = std::array::from_fn(|c| x.x[c].du());
    let xv: [BiPoly; 3] = std::array::from_fn(|c| x.x[c].dv());
    let (e, f, g) = (inner(&xu, &xu), inner(&xu, &xv), inner(&xv, &xv));
    let form_scale = e.max_abs().max(f.max_abs()).max(g.max_abs()).max(scale * scale);
    let isothermal = e.add(&g).vanishes(form_scale) && f.vanishes(form_scale);
    let wave: [BiPoly; 3] = std::array::from_fn(|c| x.x[c].du().du().sub(&x.x[c].dv().dv()));
    let harmonic = wave.iter().all(|w| w.vanishes(scale));

    if !isothermal {
        if harmonic {
            // H ∝ EN − 2FM + GL with the unnormalized normal
            let n = lorentz_cross(&xu, &xv);
            let second = |p: &[BiPoly; 3]| inner(&n, p);
            let xuu = std::array::from_fn(|c| x.x[c].du().du());
            let xuv = std::array::from_fn(|c| x.x[c].du().dv());
            let xvv = std::array::from_fn(|c| x.x[c].dv().dv());
            let h = e
                .mul(&second(&xvv))
                .sub(&f.mul(&second(&xuv)).scale(2.0))
                .add(&g.mul(&second(&xuu)));
            if !h.vanishes(form_scale * scale * scale) {
                return ClassificationVerdict::bare(
                    Verdict::NotMinimal,
                    "harmonic but not isothermal: the lifted curve is not isotropic",
                );
            }
        }
        return ClassificationVerdict::bare(Verdict::NotIsothermal, "E + G or F does not vanish identically");
    }
    if e.mul(&g).sub(&f.mul(&f)).vanishes(form_scale * form_scale) {
        return ClassificationVerdict::bare(Verdict::Degenerate, "induced metric vanishes identically");
    }
    if !harmonic {
        return ClassificationVerdict::bare(Verdict::NotMinimal, "x_uu − x_vv does not vanish");
    }
    if x.degree().unwrap_or(0) < 3 {
        return ClassificationVerdict::bare(Verdict::Degenerate, "degree below 3 (planar piece)");
    }

    let psi = lift_to_curve(x);
    let phi: [DPoly; 3] = std::array::from_fn(|c| psi[c].derivative());
    let (f_poly, g_rat) = match extract_pair(&phi) {
        Ok(pair) => pair,
        Err(ExtractError::NotMinimal { defect }) => {
            return ClassificationVerdict::bare(Verdict::NotMinimal, format!("isotropy defect {defect:e}"));
        }
        Err(ExtractError::Degenerate) => {
            return ClassificationVerdict::bare(Verdict::Degenerate, "f vanishes in a null component");
        }
    };
    let f_expr = HoloExpr::new(crate::holofn::ExpPoly::polynomial(f_poly.clone()).to_expr());
    let g_expr = g_rat.to_expr();
    let mut out = ClassificationVerdict {
        verdict: Verdict::Degenerate,
        f: Some(f_expr),
        g: Some(g_expr),
        normal_form: None,
        scale: None,
        notes: Vec::new(),
    };

    let (fp, fm) = f_poly.to_null();
    let (np, nm) = phi[2].to_null();
    let phi_scale = phi.iter().map(|p| p.max_abs()).fold(0.0, f64::max);
    let (Some(plus), Some(minus)) = (match_null(&fp, &np, phi_scale), match_null(&fm, &nm, phi_scale)) else {
        out.notes
            .push("extracted pair is not of the form f = ±(az+b)², g = (cz+d)/(az+b)".into());
        return out;
    };
    let pair = |x: f64, y: f64| SplitComplex::from_null(x, y);
    let nf = NormalForm {
        a: pair(plus.1, minus.1),
        b: pair(plus.2, minus.2),
        c: pair(plus.3, minus.3),
        d: pair(plus.4, minus.4),
        sign: (plus.0, minus.0),
    };
    out.normal_form = Some(nf);
    let (dp, dm) = nf.determinant().to_null();
    let det_tol = COEFF_TOL * phi_scale;
    if dp.abs() <= det_tol || dm.abs() <= det_tol {
        out.notes.push("bc − ad vanishes in a null component: planar".into());
        return out;
    }
    // sign of −K is that of s₊s₋·D₊D₋
    if plus.0 * minus.0 * dp * dm > 0.0 {
        out.verdict = Verdict::EnneperNegative;
        let den = DPoly::from_null(&RealPoly(vec![plus.2, plus.1]), &RealPoly(vec![minus.2, minus.1]));
        let num = DPoly::from_null(&RealPoly(vec![plus.4, plus.3]), &RealPoly(vec![minus.4, minus.3]));
        out.scale = [0.0, 0.1, -0.1, 0.2]
            .iter()
            .find_map(|&t| homothety_scale(&f_poly, &num, &den, SplitComplex::new(t, 0.5 * t)));
    } else {
        out.verdict = Verdict::PositiveCurvature;
        out.notes
            .push("K > 0: the positive-curvature analogue (imaginary part)".into());
    }
    out
}
