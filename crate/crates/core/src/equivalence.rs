//! When two sets of generating data give the same surface.
//!
//! Weierstrass pairs are related by a change of isothermal parameter,
//! `(f, g) ↦ (f(w)·w′, g(w))`. Canonical functions are related by the
//! fractional maps `g ↦ ±e^{φj}(α + g)/(1 + ᾱg)` and the inversion
//! `g ↦ ±e^{φj}/g`; each fractional map is realized on the surface by an
//! explicit pair of Lorentz matrices.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::SplitComplex;
use crate::canonical::{
    canonicalize, compare_curvature_fields, CanonicalError, CanonicalizeOptions, CompareOptions, FieldMatch, Sign,
};
use crate::domain::{Grid, Rect};
use crate::geometry::SampledField;
use crate::holofn::HoloExpr;
use crate::weierstrass::{Curve3, GeneratingData, Point3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquivalenceError {
    #[error("invalid transform parameters: {0}")]
    InvalidParams(String),
    #[error("denominator is a zero divisor at {at}")]
    ZeroDivisor { at: SplitComplex },
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
}

/// `(f(w(z))·w′(z), g(w(z)))`: the pair describing the same surface in the
/// parameter `z`, where `w` is the old parameter.
pub fn reparametrize_pair(f: &HoloExpr, g: &HoloExpr, w: &HoloExpr) -> (HoloExpr, HoloExpr) {
    let f_new = f.compose(w).mul(&w.derivative()).simplify();
    let g_new = g.compose(w).simplify();
    (f_new, g_new)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoebiusForm {
    /// `±e^{φj}(α + g)/(1 + ᾱg)`.
    Fractional,
    /// `±e^{φj}/g`.
    Inversion,
    /// `±e^{φj}/f` with `f = 1/g′` read literally, i.e. `±e^{φj}·g′`.
    InversionLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusParams {
    pub phi: f64,
    pub alpha: SplitComplex,
    pub sign: Sign,
    pub form: MoebiusForm,
}

/// Smallest admissible `|1 − |α|²|`.
pub const DENOMINATOR_GUARD: f64 = 1e-9;

impl MoebiusParams {
    pub fn fractional(phi: f64, alpha: SplitComplex, sign: Sign) -> Result<Self, EquivalenceError> {
        let m = Self {
            phi,
            alpha,
            sign,
            form: MoebiusForm::Fractional,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn inversion(phi: f64, sign: Sign) -> Self {
        Self {
            phi,
            alpha: SplitComplex::ZERO,
            sign,
            form: MoebiusForm::Inversion,
        }
    }

    pub fn identity() -> Self {
        Self {
            phi: 0.0,
            alpha: SplitComplex::ZERO,
            sign: Sign::Plus,
            form: MoebiusForm::Fractional,
        }
    }

    pub fn validate(&self) -> Result<(), EquivalenceError> {
        if !self.phi.is_finite() || !self.alpha.is_finite() {
            return Err(EquivalenceError::InvalidParams("non-finite parameter".into()));
        }
        if self.form == MoebiusForm::Fractional && (1.0 - self.alpha.norm_sqr()).abs() < DENOMINATOR_GUARD {
            return Err(EquivalenceError::InvalidParams(format!(
                "|α|² = {} is too close to 1",
                self.alpha.norm_sqr()
            )));
        }
        Ok(())
    }

    /// `±e^{φj}`.
    pub fn rotation(&self) -> SplitComplex {
        SplitComplex::hyperbolic_unit(self.phi).scale(self.sign.value())
    }

    /// `[[±e^{φj}, ±e^{φj}α], [ᾱ, 1]]`, acting by fractional maps.
    fn matrix(&self) -> [[SplitComplex; 2]; 2] {
        let e = self.rotation();
        [[e, e * self.alpha], [self.alpha.conj(), SplitComplex::ONE]]
    }

    /// The fractional map `g ↦ self(inner(g))`.
    pub fn compose(&self, inner: &Self) -> Result<Self, EquivalenceError> {
        if self.form != MoebiusForm::Fractional || inner.form != MoebiusForm::Fractional {
            return Err(EquivalenceError::InvalidParams("only fractional maps compose".into()));
        }
        let (x, y) = (self.matrix(), inner.matrix());
        let m = |i: usize, k: usize| x[i][0] * y[0][k] + x[i][1] * y[1][k];
        let t = m(1, 1);
        let inv = t.inv().map_err(|_| EquivalenceError::ZeroDivisor { at: t })?;
        let e = m(0, 0) * inv;
        let alpha = (m(1, 0) * inv).conj();
        if (e.norm_sqr() - 1.0).abs() > 1e-9 || e.re.abs() <= e.im.abs() {
            return Err(EquivalenceError::InvalidParams(format!(
                "composite rotation {e} is not ±e^(φj)"
            )));
        }
        let sign = if e.re > 0.0 { Sign::Plus } else { Sign::Minus };
        let e = e.scale(sign.value());
        Self::fractional((e.im / e.re).atanh(), alpha, sign)
    }
}

/// The transformed canonical function.
pub fn moebius_transform(g: &HoloExpr, m: &MoebiusParams) -> Result<HoloExpr, EquivalenceError> {
    m.validate()?;
    let e = HoloExpr::constant(m.rotation());
    let out = match m.form {
        MoebiusForm::Fractional => {
            let num = e.mul(&HoloExpr::constant(m.alpha).add(g));
            let den = HoloExpr::constant(SplitComplex::ONE).add(&g.scale(m.alpha.conj()));
            num.div(&den)
        }
        MoebiusForm::Inversion => e.div(g),
        MoebiusForm::InversionLiteral => e.mul(&g.derivative()),
    };
    Ok(out.simplify())
}

/// First lattice node where the transform's denominator is a zero divisor.
pub fn check_denominator(g: &HoloExpr, m: &MoebiusParams, grid: &Grid) -> Result<(), EquivalenceError> {
    for (i, k) in grid.nodes() {
        let z = grid.node(i, k);
        let Ok(gz) = g.eval(z) else { continue };
        let den = match m.form {
            MoebiusForm::Fractional => SplitComplex::ONE + m.alpha.conj() * gz,
            MoebiusForm::Inversion => gz,
            MoebiusForm::InversionLiteral => continue,
        };
        if den.is_null() {
            return Err(EquivalenceError::ZeroDivisor { at: z });
        }
    }
    Ok(())
}

pub fn minkowski_metric() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, 1.0, 1.0))
}

/// `max |Mᵀ η M − η|`.
pub fn lorentz_defect(m: &Matrix3<f64>) -> f64 {
    let eta = minkowski_metric();
    (m.transpose() * eta * m - eta).abs().max()
}

/// The motion realizing a fractional map: `x̃ = S·A·B·x + t`, where `S`
/// is `diag(−1, −1, 1)` for the minus sign and the identity otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionWitness {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub s: Matrix3<f64>,
    pub translation: Point3,
}

impl MotionWitness {
    pub fn linear(&self) -> Matrix3<f64> {
        self.s * self.a * self.b
    }

    pub fn apply_point(&self, x: Point3) -> Point3 {
        let y = self.linear() * nalgebra::Vector3::from(x);
        [
            y[0] + self.translation[0],
            y[1] + self.translation[1],
            y[2] + self.translation[2],
        ]
    }

    pub fn apply_curve(&self, c: &Curve3) -> Curve3 {
        let m = self.linear();
        std::array::from_fn(|i| (0..3).map(|k| c[k].scale(m[(i, k)])).sum())
    }

    pub fn with_translation(mut self, t: Point3) -> Self {
        self.translation = t;
        self
    }
}

/// The Lorentz matrices `A(φ)` and `B(a, b)` for a fractional map.
pub fn motion_witness(m: &MoebiusParams) -> Result<MotionWitness, EquivalenceError> {
    if m.form != MoebiusForm::Fractional {
        return Err(EquivalenceError::InvalidParams(
            "witness matrices exist for the fractional form".into(),
        ));
    }
    m.validate()?;
    let (ch, sh) = (m.phi.cosh(), m.phi.sinh());
    #[rustfmt::skip]
    let a = Matrix3::new(
        ch, sh, 0.0,
        sh, ch, 0.0,
        0.0, 0.0, 1.0,
    );
    let (x, y) = (m.alpha.re, m.alpha.im);
    let d = 1.0 - x * x + y * y;
    #[rustfmt::skip]
    let b = Matrix3::new(
        1.0 + x * x + y * y, -2.0 * x * y, -2.0 * x,
        2.0 * x * y, 1.0 - x * x - y * y, -2.0 * y,
        -2.0 * x, 2.0 * y, 1.0 + x * x - y * y,
    ) / d;
    let s = match m.sign {
        Sign::Plus => Matrix3::identity(),
        Sign::Minus => Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, -1.0, 1.0)),
    };
    Ok(MotionWitness {
        a,
        b,
        s,
        translation: [0.0; 3],
    })
}

/// `max |W·Ψ′ − Ψ̃′|` (largest null component) over the lattice, with
/// `Ψ̃′` built from `moebius_transform(g, m)`. Nodes where either side is
/// undefined are skipped; returns the count of compared nodes as well.
pub fn witness_discrepancy(g: &HoloExpr, m: &MoebiusParams, grid: &Grid) -> Result<(f64, usize), EquivalenceError> {
    let witness = motion_witness(m)?;
    let before = GeneratingData::canonical(g.clone());
    let after = GeneratingData::canonical(moebius_transform(g, m)?);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (i, k) in grid.nodes() {
        let z = grid.node(i, k);
        let (Ok(d0), Ok(d1)) = (before.curve_derivative(z), after.curve_derivative(z)) else {
            continue;
        };
        let mapped = witness.apply_curve(&d0);
        for c in 0..3 {
            let (p, q) = (mapped[c] - d1[c]).to_null();
            worst = worst.max(p.abs().max(q.abs()));
        }
        count += 1;
    }
    Ok((worst, count))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincideOptions {
    pub compare: CompareOptions,
    /// Lattice step of the reference window.
    pub step: f64,
    pub fit_motion: bool,
}

impl Default for CoincideOptions {
    fn default() -> Self {
        Self {
            compare: CompareOptions::default(),
            step: 0.05,
            fit_motion: true,
        }
    }
}

/// Least-squares affine map `x₂ ≈ M·x₁ + t` between matched points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedMotion {
    pub linear: [[f64; 3]; 3],
    pub translation: Point3,
    pub residual: f64,
    pub lorentz_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coincidence {
    pub coincide: bool,
    pub field_match: FieldMatch,
    pub motion: Option<FittedMotion>,
}

fn fit_motion(pairs: &[(Point3, Point3)]) -> Option<FittedMotion> {
    if pairs.len() < 4 {
        return None;
    }
    let n = pairs.len();
    let x = DMatrix::from_fn(n, 4, |r, c| if c < 3 { pairs[r].0[c] } else { 1.0 });
    let y = DMatrix::from_fn(n, 3, |r, c| pairs[r].1[c]);
    let sol = x.clone().svd(true, true).solve(&y, 1e-12).ok()?;
    let linear = Matrix3::from_fn(|i, k| sol[(k, i)]);
    let residual = (x * &sol - y).abs().max();
    Some(FittedMotion {
        linear: std::array::from_fn(|i| std::array::from_fn(|k| linear[(i, k)])),
        translation: [sol[(3, 0)], sol[(3, 1)], sol[(3, 2)]],
        residual,
        lorentz_defect: lorentz_defect(&linear),
    })
}

/// Canonicalizes both data sets at their base points and searches for a
/// gauge matching the curvature fields. `window` is the reference window in
/// canonical parameters (centered at `w₀ = 0`).
///
/// A parametrization may cover only part of the other surface, so when the
/// first field is not found inside the second the roles are swapped; the
/// reported gauge always maps the first surface's canonical parameters to
/// the second's.
pub fn surfaces_coincide(
    first: &GeneratingData,
    second: &GeneratingData,
    window: Rect,
    opts: &CoincideOptions,
) -> Result<Coincidence, EquivalenceError> {
    let forward = coincide_one_way(first, second, window, opts);
    if matches!(&forward, Ok(c) if c.coincide) {
        return forward;
    }
    match coincide_one_way(second, first, window, opts) {
        Ok(mut back) if back.coincide => {
            back.field_match.gauge = back.field_match.gauge.inverse();
            back.motion = back.motion.and_then(|m| invert_motion(&m));
            Ok(back)
        }
        _ => forward,
    }
}

fn invert_motion(m: &FittedMotion) -> Option<FittedMotion> {
    let linear = Matrix3::from_fn(|i, k| m.linear[i][k]).try_inverse()?;
    let t = -(linear * nalgebra::Vector3::from(m.translation));
    Some(FittedMotion {
        linear: std::array::from_fn(|i| std::array::from_fn(|k| linear[(i, k)])),
        translation: [t[0], t[1], t[2]],
        residual: m.residual,
        lorentz_defect: lorentz_defect(&linear),
    })
}

fn coincide_one_way(
    first: &GeneratingData,
    second: &GeneratingData,
    window: Rect,
    opts: &CoincideOptions,
) -> Result<Coincidence, EquivalenceError> {
    let r = opts.compare.search_radius;
    let wide = Rect::new(window.u_min - r, window.u_max + r, window.v_min - r, window.v_max + r)
        .map_err(|e| EquivalenceError::InvalidParams(e.to_string()))?;
    let lenient = CanonicalizeOptions::lenient();
    let w0 = SplitComplex::ZERO;
    let (one, two) = rayon::join(
        || {
            canonicalize(
                &first.f(),
                first.g(),
                w0,
                first.base_point(),
                window,
                Sign::Plus,
                &lenient,
            )
        },
        || {
            canonicalize(
                &second.f(),
                second.g(),
                w0,
                second.base_point(),
                wide,
                Sign::Plus,
                &lenient,
            )
        },
    );
    let (one, two) = (one?, two?);
    let grid = Grid::with_step(window, opts.step).map_err(|e| EquivalenceError::InvalidParams(e.to_string()))?;
    let reference = SampledField::sample(grid, &one.curvature_field(first.part()));
    let field_match = compare_curvature_fields(&reference, &two.curvature_field(second.part()), &opts.compare)?;

    let motion = if field_match.matched && opts.fit_motion {
        let (x1, x2) = (one.point_map(first.part()), two.point_map(second.part()));
        let pairs: Vec<(Point3, Point3)> = grid
            .nodes()
            .filter_map(|(i, k)| {
                let w = grid.node(i, k);
                let (u, v) = field_match.gauge.map(w.re, w.im);
                Some((x1(w)?, x2(SplitComplex::new(u, v))?))
            })
            .collect();
        fit_motion(&pairs)
    } else {
        None
    };
    Ok(Coincidence {
        coincide: field_match.matched,
        field_match,
        motion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::Part;

    fn d(re: f64, im: f64) -> SplitComplex {
        SplitComplex::new(re, im)
    }

    fn h(text: &str) -> HoloExpr {
        HoloExpr::parse(text).unwrap()
    }

    fn grid(r: f64, n: usize) -> Grid {
        Grid::new(Rect::new(-r, r, -r, r).unwrap(), n, n).unwrap()
    }

    fn same(a: &HoloExpr, b: &HoloExpr, at: &[SplitComplex]) -> bool {
        at.iter()
            .all(|&z| (a.eval(z).unwrap() - b.eval(z).unwrap()).magnitude() < 1e-12)
    }

    const PTS: [SplitComplex; 3] = [
        SplitComplex::new(0.1, 0.2),
        SplitComplex::new(-0.3, 0.05),
        SplitComplex::new(0.25, -0.4),
    ];

    #[test]
    fn reparametrize_examples() {
        let (f, g) = reparametrize_pair(&h("1"), &h("z"), &h("exp(z)"));
        assert!(same(&f, &h("exp(z)"), &PTS) && same(&g, &h("exp(z)"), &PTS));
        let (f, g) = reparametrize_pair(&h("exp(z)"), &h("z^2"), &h("z"));
        assert!(same(&f, &h("exp(z)"), &PTS) && same(&g, &h("z^2"), &PTS));
        let (f, g) = reparametrize_pair(&h("1"), &h("z"), &h("2*z + 1"));
        assert!(same(&f, &h("2"), &PTS) && same(&g, &h("2*z + 1"), &PTS));
    }

    #[test]
    fn moebius_examples() {
        let g = h("z");
        assert!(same(
            &moebius_transform(&g, &MoebiusParams::identity()).unwrap(),
            &g,
            &PTS
        ));
        let m = MoebiusParams::fractional(0.0, d(0.5, 0.0), Sign::Plus).unwrap();
        assert!(same(
            &moebius_transform(&g, &m).unwrap(),
            &h("(0.5 + z)/(1 + 0.5*z)"),
            &PTS
        ));
        assert!(matches!(
            MoebiusParams::fractional(0.0, d(1.0, 0.0), Sign::Plus),
            Err(EquivalenceError::InvalidParams(_))
        ));
        // |α|² = a² − b² can reach 1 with b ≠ 0
        assert!(MoebiusParams::fractional(0.0, d(1.25, 0.75), Sign::Plus).is_err());
        let on_cone = MoebiusParams::fractional(0.0, d(0.5, 0.0), Sign::Plus).unwrap();
        assert!(matches!(
            check_denominator(&h("-2 + z - z"), &on_cone, &grid(0.5, 3)),
            Err(EquivalenceError::ZeroDivisor { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        let w = motion_witness(&MoebiusParams::identity()).unwrap();
        assert_eq!(w.a, Matrix3::identity());
        assert_eq!(w.b, Matrix3::identity());
        let boost = motion_witness(&MoebiusParams::fractional(0.7, SplitComplex::ZERO, Sign::Plus).unwrap()).unwrap();
        assert!(lorentz_defect(&boost.a) < 1e-15);
        let m = MoebiusParams::fractional(0.3, d(0.2, 0.1), Sign::Plus).unwrap();
        let w = motion_witness(&m).unwrap();
        assert!((w.b[(0, 0)] - 1.05 / 0.97).abs() < 1e-15);
        assert!(lorentz_defect(&w.b) < 1e-12 && (w.b.determinant() - 1.0).abs() < 1e-12);
        let (err, count) = witness_discrepancy(&h("z"), &m, &grid(0.4, 5)).unwrap();
        assert_eq!(count, 25);
        assert!(err < 1e-9, "{err}");
        let minus = MoebiusParams { sign: Sign::Minus, ..m };
        assert!(witness_discrepancy(&h("z"), &minus, &grid(0.4, 5)).unwrap().0 < 1e-9);
        assert!(motion_witness(&MoebiusParams::inversion(0.1, Sign::Plus)).is_err());
    }

    #[test]
    fn curvature_invariance_by_form() {
        let g = h("z + 0.3*z^2");
        let base = GeneratingData::canonical(g.clone());
        let k_err = |m: &MoebiusParams| {
            let moved = GeneratingData::canonical(moebius_transform(&g, m).unwrap());
            PTS.iter()
                .map(|&z| {
                    let (a, b) = (base.gauss_curvature(z).unwrap(), moved.gauss_curvature(z).unwrap());
                    (a - b).abs() / a.abs().max(1.0)
                })
                .fold(0.0, f64::max)
        };
        assert!(k_err(&MoebiusParams::fractional(-0.4, d(0.3, -0.2), Sign::Minus).unwrap()) < 1e-9);
        assert!(k_err(&MoebiusParams::inversion(0.6, Sign::Plus)) < 1e-9);
        let literal = MoebiusParams {
            form: MoebiusForm::InversionLiteral,
            ..MoebiusParams::inversion(0.6, Sign::Plus)
        };
        assert!(k_err(&literal) > 1e-3);
    }

    #[test]
    fn composition_closes() {
        let outer = MoebiusParams::fractional(0.4, d(0.1, 0.3), Sign::Minus).unwrap();
        let inner = MoebiusParams::fractional(-0.2, d(-0.25, 0.05), Sign::Plus).unwrap();
        let both = outer.compose(&inner).unwrap();
        let g = h("z");
        let two_step = moebius_transform(&moebius_transform(&g, &inner).unwrap(), &outer).unwrap();
        assert!(same(&moebius_transform(&g, &both).unwrap(), &two_step, &PTS));
    }

    #[test]
    fn enneper_pairs_coincide() {
        let window = Rect::new(-0.4, 0.4, -0.4, 0.4).unwrap();
        let enneper = GeneratingData::general(h("1"), h("z"));
        let exp = GeneratingData::general(h("exp(z)"), h("exp(z)"));
        let c = surfaces_coincide(&enneper, &exp, window, &CoincideOptions::default()).unwrap();
        assert!(c.coincide && c.field_match.discrepancy < 1e-4, "{c:?}");
        assert!((c.field_match.gauge.a + 1.0).abs() < 1e-6, "{c:?}");
        let motion = c.motion.unwrap();
        assert!(motion.residual < 1e-6 && motion.lorentz_defect < 1e-6, "{motion:?}");

        let itself = surfaces_coincide(&enneper, &enneper, window, &CoincideOptions::default()).unwrap();
        assert!(itself.coincide && itself.field_match.gauge == crate::canonical::CanonicalGauge::IDENTITY);

        let scaled = GeneratingData::general(h("1"), h("3*z"));
        assert!(
            !surfaces_coincide(&enneper, &scaled, window, &CoincideOptions::default())
                .unwrap()
                .coincide
        );
        let imag = enneper.clone().with_part(Part::Imaginary);
        assert!(
            !surfaces_coincide(&enneper, &imag, window, &CoincideOptions::default())
                .unwrap()
                .coincide
        );
    }
}
