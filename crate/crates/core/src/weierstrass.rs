//! Minimal timelike surfaces as real or imaginary parts of a curve in 𝔻³.
//!
//! General data `(f, g)` gives the curve with derivative
//! `Ψ′ = (−½f(1+g²), (j/2)f(1−g²), fg)`; canonical data is the special case
//! `f = 1/g′`. The real part of `Ψ` has Gauss curvature `K < 0` and the
//! imaginary part `−K`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{SplitComplex, NULL_EPS};
use crate::domain::Grid;
use crate::holofn::{integrate_segment, EvalError, HoloExpr, QuadratureError, QuadratureOptions};

pub type Point3 = [f64; 3];
pub type Curve3 = [SplitComplex; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("generating data undefined at {at}: {source}")]
    Eval { at: SplitComplex, source: EvalError },
    #[error("g′({at}) = {value} is not invertible")]
    SingularDerivative { at: SplitComplex, value: SplitComplex },
    #[error("integration failed: {0}")]
    Domain(#[from] QuadratureError),
    #[error("tangent plane not timelike at ({u}, {v}): EG − F² = {det:e}")]
    TimelikeViolation { u: f64, v: f64, det: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Real,
    #[serde(alias = "imag")]
    Imaginary,
}

impl Part {
    pub fn select(self, z: SplitComplex) -> f64 {
        match self {
            Part::Real => z.re,
            Part::Imaginary => z.im,
        }
    }

    fn select3(self, c: &Curve3) -> Point3 {
        [self.select(c[0]), self.select(c[1]), self.select(c[2])]
    }

    /// `(x_u, x_v)` from the curve derivative, using `∂_v = j·∂_z`.
    pub fn tangents(self, d: &Curve3) -> (Point3, Point3) {
        let jd = d.map(|c| c * SplitComplex::J);
        (self.select3(d), self.select3(&jd))
    }

    /// `(x_uu, x_uv, x_vv)` from the second derivative (`x_vv = x_uu`).
    pub fn hessian(self, dd: &Curve3) -> (Point3, Point3, Point3) {
        let jdd = dd.map(|c| c * SplitComplex::J);
        let uu = self.select3(dd);
        (uu, self.select3(&jdd), uu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Weierstrass pair `(f, g)`.
    General { f: HoloExpr, g: HoloExpr },
    /// Single function `g` with `f = 1/g′`.
    Canonical { g: HoloExpr },
}

/// Generating data plus everything derived from it symbolically.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingData {
    kind: Generator,
    base_point: SplitComplex,
    part: Part,
    g_prime: HoloExpr,
    integrand: [HoloExpr; 3],
    second: [HoloExpr; 3],
    primitive: Option<[HoloExpr; 3]>,
}

impl GeneratingData {
    pub fn general(f: HoloExpr, g: HoloExpr) -> Self {
        Self::build(Generator::General { f, g })
    }

    pub fn canonical(g: HoloExpr) -> Self {
        Self::build(Generator::Canonical { g })
    }

    /// Parses both expressions; `f = None` selects canonical data.
    pub fn parse(f: Option<&str>, g: &str) -> Result<Self, crate::holofn::SyntaxError> {
        let g = HoloExpr::parse(g)?;
        Ok(match f {
            Some(f) => Self::general(HoloExpr::parse(f)?, g),
            None => Self::canonical(g),
        })
    }

    fn build(kind: Generator) -> Self {
        let half = |c: SplitComplex| HoloExpr::constant(c.scale(0.5));
        let one = HoloExpr::constant(1.0);
        let (g, g_prime, weight) = match &kind {
            Generator::General { f, g } => (g.clone(), g.derivative(), f.clone()),
            Generator::Canonical { g } => {
                let gp = g.derivative();
                (g.clone(), gp.clone(), one.div(&gp))
            }
        };
        let g2 = g.powi(2);
        let integrand = [
            half(SplitComplex::real(-1.0)).mul(&weight).mul(&one.add(&g2)),
            half(SplitComplex::J).mul(&weight).mul(&one.sub(&g2)),
            weight.mul(&g),
        ]
        .map(|e| e.simplify());
        let second = integrand.clone().map(|e| e.derivative());
        let primitive = integrand
            .iter()
            .map(HoloExpr::antiderivative)
            .collect::<Option<Vec<_>>>()
            .map(|v| [v[0].clone(), v[1].clone(), v[2].clone()]);
        Self {
            kind,
            base_point: SplitComplex::ZERO,
            part: Part::Real,
            g_prime,
            integrand,
            second,
            primitive,
        }
    }

    pub fn with_base_point(mut self, z0: SplitComplex) -> Self {
        self.base_point = z0;
        self
    }

    pub fn with_part(mut self, part: Part) -> Self {
        self.part = part;
        self
    }

    pub fn kind(&self) -> &Generator {
        &self.kind
    }

    pub fn base_point(&self) -> SplitComplex {
        self.base_point
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn g(&self) -> &HoloExpr {
        match &self.kind {
            Generator::General { g, .. } | Generator::Canonical { g } => g,
        }
    }

    pub fn g_prime(&self) -> &HoloExpr {
        &self.g_prime
    }

    /// The Weierstrass weight `f`; for canonical data this is `1/g′`.
    pub fn f(&self) -> HoloExpr {
        match &self.kind {
            Generator::General { f, .. } => f.clone(),
            Generator::Canonical { .. } => HoloExpr::constant(1.0).div(&self.g_prime),
        }
    }

    /// Symbolic components of `Ψ′`.
    pub fn integrand(&self) -> &[HoloExpr; 3] {
        &self.integrand
    }

    /// Closed-form `Ψ` (up to a constant) when every component has one.
    pub fn primitive(&self) -> Option<&[HoloExpr; 3]> {
        self.primitive.as_ref()
    }

    fn eval_at(e: &HoloExpr, z: SplitComplex) -> Result<SplitComplex, WeierstrassError> {
        e.eval(z).map_err(|source| WeierstrassError::Eval { at: z, source })
    }

    /// `Ψ′(z)`.
    pub fn curve_derivative(&self, z: SplitComplex) -> Result<Curve3, WeierstrassError> {
        let (f, g) = match &self.kind {
            Generator::General { f, g } => (Self::eval_at(f, z)?, Self::eval_at(g, z)?),
            Generator::Canonical { g } => {
                let gp = Self::eval_at(&self.g_prime, z)?;
                let f = gp
                    .inv()
                    .map_err(|_| WeierstrassError::SingularDerivative { at: z, value: gp })?;
                (f, Self::eval_at(g, z)?)
            }
        };
        let g2 = g * g;
        Ok([
            (f * (SplitComplex::ONE + g2)).scale(-0.5),
            SplitComplex::J * (f * (SplitComplex::ONE - g2)).scale(0.5),
            f * g,
        ])
    }

    /// `Ψ″(z)`.
    pub fn curve_second_derivative(&self, z: SplitComplex) -> Result<Curve3, WeierstrassError> {
        if let Generator::Canonical { .. } = self.kind {
            // surface the typed error before the symbolic division fails
            let gp = Self::eval_at(&self.g_prime, z)?;
            gp.inv()
                .map_err(|_| WeierstrassError::SingularDerivative { at: z, value: gp })?;
        }
        Ok([
            Self::eval_at(&self.second[0], z)?,
            Self::eval_at(&self.second[1], z)?,
            Self::eval_at(&self.second[2], z)?,
        ])
    }
}

impl GeneratingData {
    /// Closed-form Gauss curvature of the selected part,
    /// `K = ∓16|g′|²/(|f|²(1 − |g|²)⁴)` (upper sign for the real part).
    pub fn gauss_curvature(&self, z: SplitComplex) -> Result<f64, WeierstrassError> {
        let g = Self::eval_at(self.g(), z)?;
        let gp = Self::eval_at(&self.g_prime, z)?;
        let f_sqr = match &self.kind {
            Generator::General { f, .. } => Self::eval_at(f, z)?.norm_sqr(),
            Generator::Canonical { .. } => {
                if gp.is_null() {
                    return Err(WeierstrassError::SingularDerivative { at: z, value: gp });
                }
                1.0 / gp.norm_sqr()
            }
        };
        let k = -16.0 * gp.norm_sqr() / (f_sqr * (1.0 - g.norm_sqr()).powi(4));
        Ok(match self.part {
            Part::Real => k,
            Part::Imaginary => -k,
        })
    }

    /// Surface point at `z`, relative to the base point. Uses the closed-form
    /// primitive when there is one, otherwise a straight segment from `z₀`.
    pub fn point_at(&self, z: SplitComplex) -> Result<Point3, WeierstrassError> {
        let curve = match self.primitive() {
            Some(prim) => {
                let at = |z: SplitComplex| -> Result<Curve3, WeierstrassError> {
                    Ok([
                        Self::eval_at(&prim[0], z)?,
                        Self::eval_at(&prim[1], z)?,
                        Self::eval_at(&prim[2], z)?,
                    ])
                };
                sub3(at(z)?, at(self.base_point)?)
            }
            None => integrate_segment(
                |w| self.curve_derivative(w),
                self.base_point,
                z,
                QuadratureOptions::default(),
            )
            .map_err(WeierstrassError::Domain)?,
        };
        Ok(self.part.select3(&curve))
    }
}

/// Minkowski sum of squares `−φ₁² + φ₂² + φ₃²`, as a double number.
pub fn isotropy_defect(phi: &Curve3) -> SplitComplex {
    -(phi[0] * phi[0]) + phi[1] * phi[1] + phi[2] * phi[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationMethod {
    Antiderivative,
    Quadrature,
    /// Points supplied from outside (e.g. a CSV file).
    Imported,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceOptions {
    pub quadrature: QuadratureOptions,
    /// Use the closed-form primitive when it exists.
    pub prefer_antiderivative: bool,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            prefer_antiderivative: true,
        }
    }
}

/// Sampled surface on a rectangular lattice. Samples that could not be
/// computed are `None`; computed samples on the lightlike locus (degenerate
/// metric) are kept but flagged as not regular.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    grid: Grid,
    points: Vec<Option<Point3>>,
    regular: Vec<bool>,
    provenance: Option<GeneratingData>,
    method: IntegrationMethod,
}

impl SurfacePatch {
    /// Patch from externally supplied samples (row-major, rows of constant v).
    pub fn from_points(grid: Grid, points: Vec<Option<Point3>>) -> Self {
        assert_eq!(points.len(), grid.len(), "one sample per grid node");
        Self {
            grid,
            regular: points.iter().map(Option::is_some).collect(),
            points,
            provenance: None,
            method: IntegrationMethod::Imported,
        }
    }

    /// Samples an explicit parametrization `x(u, v)`.
    pub fn from_fn(grid: Grid, x: impl Fn(f64, f64) -> Point3) -> Self {
        let points = grid.nodes().map(|(i, k)| Some(x(grid.u.at(i), grid.v.at(k)))).collect();
        Self::from_points(grid, points)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn point(&self, i: usize, k: usize) -> Option<Point3> {
        self.points[self.grid.index(i, k)]
    }

    pub fn points(&self) -> &[Option<Point3>] {
        &self.points
    }

    /// Sample exists and the induced metric is non-degenerate there.
    pub fn is_regular(&self, i: usize, k: usize) -> bool {
        self.regular[self.grid.index(i, k)]
    }

    pub fn regular_mask(&self) -> &[bool] {
        &self.regular
    }

    pub fn provenance(&self) -> Option<&GeneratingData> {
        self.provenance.as_ref()
    }

    pub fn method(&self) -> IntegrationMethod {
        self.method
    }

    pub fn steps(&self) -> (f64, f64) {
        (self.grid.u.step(), self.grid.v.step())
    }

    /// Samples that are missing or not regular.
    pub fn invalid_count(&self) -> usize {
        self.regular.iter().filter(|r| !**r).count()
    }

    /// Same samples on a relabelled grid (used by gauge changes).
    /// Same samples on new coordinates. The generating data no longer
    /// describes the lattice, so the result counts as imported.
    pub(crate) fn relabel(&self, grid: Grid, points: Vec<Option<Point3>>, regular: Vec<bool>) -> Self {
        Self {
            grid,
            points,
            regular,
            provenance: None,
            method: IntegrationMethod::Imported,
        }
    }
}

fn add3(a: Curve3, b: Curve3) -> Curve3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: Curve3, b: Curve3) -> Curve3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Whether `z` is a regular point: `Ψ′` defined and the induced metric
/// non-degenerate. Returns `Err` on a spacelike or degenerate-positive metric.
fn regular(data: &GeneratingData, z: SplitComplex) -> Result<bool, WeierstrassError> {
    let Ok(d) = data.curve_derivative(z) else {
        return Ok(false);
    };
    if d.iter().any(|c| !c.is_finite()) {
        return Ok(false);
    }
    let (xu, xv) = data.part.tangents(&d);
    let ip = |a: Point3, b: Point3| -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (e, f, g) = (ip(xu, xu), ip(xu, xv), ip(xv, xv));
    let det = e * g - f * f;
    let scale = (e.abs() + f.abs() + g.abs()).powi(2).max(1e-300);
    if det.abs() <= NULL_EPS * scale.max(1.0) {
        return Ok(false);
    }
    if det > 0.0 {
        return Err(WeierstrassError::TimelikeViolation { u: z.re, v: z.im, det });
    }
    Ok(true)
}

/// Integrates the curve derivative over the lattice and keeps the selected part.
pub fn evaluate_surface(
    data: &GeneratingData,
    grid: Grid,
    opts: &SurfaceOptions,
) -> Result<SurfacePatch, WeierstrassError> {
    let z0 = data.base_point;
    let node = |i: usize, k: usize| grid.node(i, k);
    let valid: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|idx| regular(data, node(idx % grid.u.n, idx / grid.u.n)))
        .collect::<Result<_, _>>()?;

    let (curve, method): (Vec<Option<Curve3>>, _) = match (data.primitive(), opts.prefer_antiderivative) {
        (Some(prim), true) => {
            let at = |z: SplitComplex| -> Result<Curve3, EvalError> {
                Ok([prim[0].eval(z)?, prim[1].eval(z)?, prim[2].eval(z)?])
            };
            let origin = at(z0).map_err(|source| WeierstrassError::Eval { at: z0, source })?;
            let values = (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    let z = node(idx % grid.u.n, idx / grid.u.n);
                    at(z).ok().map(|c| sub3(c, origin))
                })
                .collect();
            (values, IntegrationMethod::Antiderivative)
        }
        _ => (
            continuation(data, &grid, opts.quadrature),
            IntegrationMethod::Quadrature,
        ),
    };

    let points: Vec<Option<Point3>> = curve.into_iter().map(|c| c.map(|c| data.part.select3(&c))).collect();
    let regular = points.iter().zip(valid).map(|(p, ok)| ok && p.is_some()).collect();
    Ok(SurfacePatch {
        grid,
        points,
        regular,
        provenance: Some(data.clone()),
        method,
    })
}

/// Path continuation: `z₀` to the first node, down the first column, then
/// along each row (rows in parallel). A failed segment falls back to a
/// direct segment from `z₀`; if that fails too the node stays empty.
fn continuation(data: &GeneratingData, grid: &Grid, opts: QuadratureOptions) -> Vec<Option<Curve3>> {
    let z0 = data.base_point;
    let integrand = |z: SplitComplex| data.curve_derivative(z);
    let segment = |a: SplitComplex, b: SplitComplex| integrate_segment(integrand, a, b, opts).ok();
    let step = |anchor: Option<(SplitComplex, Curve3)>, z: SplitComplex| -> Option<Curve3> {
        anchor
            .and_then(|(za, va)| segment(za, z).map(|d| add3(va, d)))
            .or_else(|| segment(z0, z))
    };

    let mut column = Vec::with_capacity(grid.v.n);
    let mut anchor = None;
    for k in 0..grid.v.n {
        let z = grid.node(0, k);
        let value = step(anchor.or(Some((z0, [SplitComplex::ZERO; 3]))), z);
        anchor = value.map(|v| (z, v));
        column.push(value);
    }

    let rows: Vec<Vec<Option<Curve3>>> = (0..grid.v.n)
        .into_par_iter()
        .map(|k| {
            let mut row = Vec::with_capacity(grid.u.n);
            let mut anchor = column[k].map(|v| (grid.node(0, k), v));
            row.push(column[k]);
            for i in 1..grid.u.n {
                let z = grid.node(i, k);
                let value = step(anchor, z);
                anchor = value.map(|v| (z, v));
                row.push(value);
            }
            row
        })
        .collect();
    rows.into_iter().flatten().collect()
}
