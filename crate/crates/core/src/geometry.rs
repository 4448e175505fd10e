//! Surface geometry in Minkowski 3-space `R³₁` with `⟨x,y⟩ = −x₁y₁ + x₂y₂ + x₃y₃`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Grid;
use crate::weierstrass::{IntegrationMethod, Point3, SurfacePatch, WeierstrassError};

pub fn minkowski_inner(x: Point3, y: Point3) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// The vector `c` with `⟨c, w⟩ = det[x; y; w]` for every `w`.
pub fn lorentz_cross(x: Point3, y: Point3) -> Point3 {
    [
        -(x[1] * y[2] - x[2] * y[1]),
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

pub fn det3(x: Point3, y: Point3, w: Point3) -> f64 {
    x[0] * (y[1] * w[2] - y[2] * w[1]) - x[1] * (y[0] * w[2] - y[2] * w[0]) + x[2] * (y[0] * w[1] - y[1] * w[0])
}

fn euclid_sqr(x: Point3) -> f64 {
    x.iter().map(|c| c * c).sum()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate normal: ⟨n, n⟩ = {norm_sqr:e}")]
    DegenerateNormal { norm_sqr: f64 },
    #[error("node ({0}, {1}) lacks the samples its stencil needs")]
    Stencil(usize, usize),
    #[error("analytic derivatives need generating data")]
    NoProvenance,
    #[error(transparent)]
    Generating(#[from] WeierstrassError),
}

/// Position derivatives at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub xu: Point3,
    pub xv: Point3,
    pub xuu: Point3,
    pub xuv: Point3,
    pub xvv: Point3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    /// Unit spacelike normal.
    pub normal: Point3,
}

impl FundamentalForms {
    pub fn from_derivatives(d: &Derivatives) -> Result<Self, GeometryError> {
        let c = lorentz_cross(d.xu, d.xv);
        let norm_sqr = minkowski_inner(c, c);
        if norm_sqr <= 1e-12 * euclid_sqr(d.xu) * euclid_sqr(d.xv) || norm_sqr <= 0.0 {
            return Err(GeometryError::DegenerateNormal { norm_sqr });
        }
        let s = norm_sqr.sqrt();
        let normal = c.map(|x| x / s);
        Ok(Self {
            e: minkowski_inner(d.xu, d.xu),
            f: minkowski_inner(d.xu, d.xv),
            g: minkowski_inner(d.xv, d.xv),
            l: minkowski_inner(normal, d.xuu),
            m: minkowski_inner(normal, d.xuv),
            n: minkowski_inner(normal, d.xvv),
            normal,
        })
    }

    pub fn metric_det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// `(K, H)`.
    pub fn curvatures(&self) -> (f64, f64) {
        curvatures(self)
    }
}

/// `K = (LN − M²)/(EG − F²)`, `H = (EN − 2FM + GL)/(2(EG − F²))`.
pub fn curvatures(ff: &FundamentalForms) -> (f64, f64) {
    let det = ff.metric_det();
    let k = (ff.l * ff.n - ff.m * ff.m) / det;
    let h = (ff.e * ff.n - 2.0 * ff.f * ff.m + ff.g * ff.l) / (2.0 * det);
    (k, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormMethod {
    /// Derivatives of the generating data.
    Analytic,
    /// Three-point central differences, `O(h²)`.
    Central,
    /// Central differences at `h`, `2h`, `4h` with two Richardson levels, `O(h⁶)`.
    Richardson,
    /// `Analytic` when the patch came from a closed-form primitive, else `Richardson`.
    Auto,
}

impl FormMethod {
    pub fn resolve(self, patch: &SurfacePatch) -> FormMethod {
        match self {
            FormMethod::Auto if patch.method() == IntegrationMethod::Antiderivative => FormMethod::Analytic,
            FormMethod::Auto => FormMethod::Richardson,
            m => m,
        }
    }

    /// Stencil half-width in grid steps.
    pub fn reach(self) -> usize {
        match self {
            FormMethod::Analytic => 0,
            FormMethod::Central => 1,
            FormMethod::Richardson | FormMethod::Auto => 4,
        }
    }
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn lin(terms: &[(f64, Point3)]) -> Point3 {
    let mut out = [0.0; 3];
    for (c, p) in terms {
        for j in 0..3 {
            out[j] += c * p[j];
        }
    }
    out
}

fn central(patch: &SurfacePatch, i: usize, k: usize, s: usize) -> Option<Derivatives> {
    let (hu, hv) = patch.steps();
    let (hu, hv) = (hu * s as f64, hv * s as f64);
    let p = |di: isize, dk: isize| {
        patch.point(
            (i as isize + di * s as isize) as usize,
            (k as isize + dk * s as isize) as usize,
        )
    };
    let c = p(0, 0)?;
    let (e, w, n, so) = (p(1, 0)?, p(-1, 0)?, p(0, 1)?, p(0, -1)?);
    let (ne, nw, se, sw) = (p(1, 1)?, p(-1, 1)?, p(1, -1)?, p(-1, -1)?);
    Some(Derivatives {
        xu: lin(&[(0.5 / hu, sub(e, w))]),
        xv: lin(&[(0.5 / hv, sub(n, so))]),
        xuu: lin(&[(1.0 / (hu * hu), e), (-2.0 / (hu * hu), c), (1.0 / (hu * hu), w)]),
        xvv: lin(&[(1.0 / (hv * hv), n), (-2.0 / (hv * hv), c), (1.0 / (hv * hv), so)]),
        xuv: lin(&[(0.25 / (hu * hv), sub(sub(ne, nw), sub(se, sw)))]),
    })
}

fn richardson(d1: Point3, d2: Point3, d4: Point3) -> Point3 {
    lin(&[(64.0 / 45.0, d1), (-20.0 / 45.0, d2), (1.0 / 45.0, d4)])
}

/// Derivatives at grid node `(i, k)`.
pub fn derivatives_at(
    patch: &SurfacePatch,
    i: usize,
    k: usize,
    method: FormMethod,
) -> Result<Derivatives, GeometryError> {
    let method = method.resolve(patch);
    let grid = patch.grid();
    let r = method.reach();
    let interior = i >= r && k >= r && i + r < grid.u.n && k + r < grid.v.n;
    if !interior || !patch.is_regular(i, k) {
        return Err(GeometryError::Stencil(i, k));
    }
    match method {
        FormMethod::Analytic => {
            let data = patch.provenance().ok_or(GeometryError::NoProvenance)?;
            let z = grid.node(i, k);
            let (xu, xv) = data.part().tangents(&data.curve_derivative(z)?);
            let (xuu, xuv, xvv) = data.part().hessian(&data.curve_second_derivative(z)?);
            Ok(Derivatives { xu, xv, xuu, xuv, xvv })
        }
        FormMethod::Central => central(patch, i, k, 1).ok_or(GeometryError::Stencil(i, k)),
        _ => {
            let [d1, d2, d4] = [1, 2, 4].map(|s| central(patch, i, k, s));
            let (d1, d2, d4) = match (d1, d2, d4) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => return Err(GeometryError::Stencil(i, k)),
            };
            Ok(Derivatives {
                xu: richardson(d1.xu, d2.xu, d4.xu),
                xv: richardson(d1.xv, d2.xv, d4.xv),
                xuu: richardson(d1.xuu, d2.xuu, d4.xuu),
                xuv: richardson(d1.xuv, d2.xuv, d4.xuv),
                xvv: richardson(d1.xvv, d2.xvv, d4.xvv),
            })
        }
    }
}

pub fn fundamental_forms(
    patch: &SurfacePatch,
    i: usize,
    k: usize,
    method: FormMethod,
) -> Result<FundamentalForms, GeometryError> {
    FundamentalForms::from_derivatives(&derivatives_at(patch, i, k, method)?)
}

/// Forms at every node where they exist.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    pub grid: Grid,
    pub method: FormMethod,
    pub forms: Vec<Option<FundamentalForms>>,
}

impl FormField {
    pub fn compute(patch: &SurfacePatch, method: FormMethod) -> Self {
        let grid = *patch.grid();
        let method = method.resolve(patch);
        let forms = (0..grid.len())
            .into_par_iter()
            .map(|idx| fundamental_forms(patch, idx % grid.u.n, idx / grid.u.n, method).ok())
            .collect();
        Self { grid, method, forms }
    }

    pub fn at(&self, i: usize, k: usize) -> Option<&FundamentalForms> {
        self.forms[self.grid.index(i, k)].as_ref()
    }

    pub fn curvature_field(&self) -> SampledField {
        SampledField {
            grid: self.grid,
            values: self.forms.iter().map(|f| f.map(|f| f.curvatures().0)).collect(),
        }
    }

    pub fn mean_curvature_field(&self) -> SampledField {
        SampledField {
            grid: self.grid,
            values: self.forms.iter().map(|f| f.map(|f| f.curvatures().1)).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.forms.iter().flatten().count()
    }
}

/// Scalar function of `(u, v)`, possibly undefined at some points.
pub trait ScalarField: Sync {
    fn value(&self, u: f64, v: f64) -> Option<f64>;
}

impl<F: Fn(f64, f64) -> Option<f64> + Sync> ScalarField for F {
    fn value(&self, u: f64, v: f64) -> Option<f64> {
        self(u, v)
    }
}

/// Scalar samples on a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub grid: Grid,
    pub values: Vec<Option<f64>>,
}

impl SampledField {
    pub fn sample(grid: Grid, field: &impl ScalarField) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let z = grid.node(idx % grid.u.n, idx / grid.u.n);
                field.value(z.re, z.im).filter(|x| x.is_finite())
            })
            .collect();
        Self { grid, values }
    }

    pub fn at(&self, i: usize, k: usize) -> Option<f64> {
        self.values[self.grid.index(i, k)]
    }

    pub fn defined(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.grid.nodes().filter_map(|(i, k)| self.at(i, k).map(|x| (i, k, x)))
    }

    pub fn max_abs(&self) -> Option<f64> {
        self.values.iter().flatten().map(|x| x.abs()).reduce(f64::max)
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().flatten();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x))))
    }

    /// Keeps values where `keep(u, v, value)` holds.
    pub fn masked(&self, keep: impl Fn(f64, f64, f64) -> bool) -> Self {
        let values = self
            .grid
            .nodes()
            .map(|(i, k)| {
                let z = self.grid.node(i, k);
                self.at(i, k).filter(|&x| keep(z.re, z.im, x))
            })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Exact value at lattice nodes, bilinear in between.
impl ScalarField for SampledField {
    fn value(&self, u: f64, v: f64) -> Option<f64> {
        let fi = self.grid.u.locate(u)?;
        let fk = self.grid.v.locate(v)?;
        let (i0, k0) = (fi.floor() as usize, fk.floor() as usize);
        let (ti, tk) = (fi - i0 as f64, fk - k0 as f64);
        let snap = |t: f64| t.abs() < 1e-9;
        let i1 = if snap(ti) { i0 } else { (i0 + 1).min(self.grid.u.n - 1) };
        let k1 = if snap(tk) { k0 } else { (k0 + 1).min(self.grid.v.n - 1) };
        let (a, b) = (self.at(i0, k0)?, self.at(i1, k0)?);
        let (c, d) = (self.at(i0, k1)?, self.at(i1, k1)?);
        let bottom = a + (b - a) * ti;
        let top = c + (d - c) * ti;
        Some(bottom + (top - bottom) * tk)
    }
}
