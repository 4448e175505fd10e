//! Canonical parameters.
//!
//! In canonical parameters the fundamental forms of a minimal timelike
//! surface with `K < 0` are fixed by the curvature alone:
//! `−E = G = 1/√−K`, `F = 0`, `L = N = −1`, `M = 0`
//! (and `E = −G = 1/√K`, `L = N = 0`, `M = 1` when `K > 0`).
//! Isothermal parameters `z` are carried to canonical ones `w` by any solution
//! of `(z′(w))²·f(z)·g′(z) = 1`, and the canonical function is `g(z(w))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::SplitComplex;
use crate::domain::{Axis, Grid, Rect};
use crate::geometry::{FormField, FormMethod, SampledField, ScalarField};
use crate::holofn::{EvalError, ExpPoly, HoloExpr};
use crate::ode::{self, DenseSolution, OdeError, OdeOptions};
use crate::weierstrass::{GeneratingData, Part, Point3, SurfacePatch};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CanonicalError {
    #[error("f·g′ = {value} at {at} has no square root on the chosen branch")]
    Branch { at: SplitComplex, value: SplitComplex },
    #[error("canonical ODE failed: {0}")]
    StepFailure(#[from] OdeError),
    #[error("generating data undefined at {at}: {source}")]
    Eval { at: SplitComplex, source: EvalError },
    #[error("fields share {nodes} nodes ({fraction:.2} of the reference); too few to decide")]
    InconclusiveOverlap { nodes: usize, fraction: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `u = εū + A`, `v = εv̄ + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalGauge {
    pub epsilon: i8,
    pub a: f64,
    pub b: f64,
}

impl Default for CanonicalGauge {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl CanonicalGauge {
    pub const IDENTITY: Self = Self {
        epsilon: 1,
        a: 0.0,
        b: 0.0,
    };

    pub fn new(epsilon: i8, a: f64, b: f64) -> Self {
        assert!(epsilon == 1 || epsilon == -1, "ε must be ±1");
        Self { epsilon, a, b }
    }

    pub fn translation(a: f64, b: f64) -> Self {
        Self::new(1, a, b)
    }

    /// `(ū, v̄) ↦ (u, v)`.
    pub fn map(&self, u_bar: f64, v_bar: f64) -> (f64, f64) {
        let e = self.epsilon as f64;
        (e * u_bar + self.a, e * v_bar + self.b)
    }

    pub fn inverse(&self) -> Self {
        let e = self.epsilon as f64;
        Self::new(self.epsilon, -e * self.a, -e * self.b)
    }

    /// The gauge `G` with `apply(G, X) = apply(self, apply(inner, X))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let e = inner.epsilon as f64;
        Self::new(self.epsilon * inner.epsilon, e * self.a + inner.a, e * self.b + inner.b)
    }

    fn reindex_axis(&self, axis: &Axis, shift: f64) -> Axis {
        if self.epsilon == 1 {
            Axis::new(axis.min - shift, axis.max - shift, axis.n)
        } else {
            Axis::new(shift - axis.max, shift - axis.min, axis.n)
        }
    }

    /// The lattice of `(ū, v̄)` values that map onto `grid`, and the index map.
    fn reindex(&self, grid: &Grid) -> (Grid, impl Fn(usize, usize) -> usize + '_) {
        let new = Grid {
            u: self.reindex_axis(&grid.u, self.a),
            v: self.reindex_axis(&grid.v, self.b),
        };
        let flip = self.epsilon == -1;
        let (nu, nv) = (grid.u.n, grid.v.n);
        let old = *grid;
        (new, move |i: usize, k: usize| {
            let (oi, ok) = if flip { (nu - 1 - i, nv - 1 - k) } else { (i, k) };
            old.index(oi, ok)
        })
    }
}

/// Reparametrizes by a gauge: the result at `(ū, v̄)` is the input at `(u, v)`.
pub trait ApplyGauge: Sized {
    fn apply_gauge(&self, gauge: &CanonicalGauge) -> Self;
}

impl ApplyGauge for SampledField {
    fn apply_gauge(&self, gauge: &CanonicalGauge) -> Self {
        let (grid, from) = gauge.reindex(&self.grid);
        let values = grid.nodes().map(|(i, k)| self.values[from(i, k)]).collect();
        SampledField { grid, values }
    }
}

impl ApplyGauge for SurfacePatch {
    fn apply_gauge(&self, gauge: &CanonicalGauge) -> Self {
        let (grid, from) = gauge.reindex(self.grid());
        let points: Vec<Option<Point3>> = grid.nodes().map(|(i, k)| self.points()[from(i, k)]).collect();
        let regular = grid.nodes().map(|(i, k)| self.regular_mask()[from(i, k)]).collect();
        self.relabel(grid, points, regular)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureSign {
    /// `K < 0`, principal canonical parameters.
    Negative,
    /// `K > 0`, asymptotic canonical parameters.
    Positive,
}

impl CurvatureSign {
    fn orient(self) -> f64 {
        match self {
            CurvatureSign::Negative => -1.0,
            CurvatureSign::Positive => 1.0,
        }
    }
}

/// Five-point central second difference from samples at `x + jh`, `j = −2..=2`.
fn second_difference(f: [f64; 5], h: f64) -> f64 {
    (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
}

/// `(ln√∓K)_uu − (ln√∓K)_vv − 2√∓K` by fourth-order central differences
/// with step `h`, on the nodes of `grid`. Nodes where `∓K ≤ 0` or `K` is
/// undefined on the stencil are empty.
pub fn curvature_pde_residual(k_field: &impl ScalarField, sign: CurvatureSign, grid: Grid, h: f64) -> SampledField {
    let s = sign.orient();
    let phi = |u: f64, v: f64| {
        let k = s * k_field.value(u, v)?;
        (k > 0.0).then(|| 0.5 * k.ln())
    };
    let stencil = |at: &dyn Fn(f64) -> Option<f64>| -> Option<[f64; 5]> {
        Some([at(-2.0)?, at(-1.0)?, at(0.0)?, at(1.0)?, at(2.0)?])
    };
    let residual = move |u: f64, v: f64| -> Option<f64> {
        let uu = second_difference(stencil(&|j| phi(u + j * h, v))?, h);
        let vv = second_difference(stencil(&|j| phi(u, v + j * h))?, h);
        let root = (s * k_field.value(u, v)?).sqrt();
        Some(uu - vv - 2.0 * root)
    };
    SampledField::sample(grid, &residual)
}

/// Same residual on a sampled field, with the lattice spacing as step.
/// Nodes within two of the edge are empty.
pub fn curvature_pde_residual_sampled(field: &SampledField, sign: CurvatureSign) -> SampledField {
    let s = sign.orient();
    let grid = field.grid;
    let (hu, hv) = (grid.u.step(), grid.v.step());
    let phi = |i: usize, k: usize| {
        let x = s * field.at(i, k)?;
        (x > 0.0).then(|| 0.5 * x.ln())
    };
    let values = grid
        .nodes()
        .map(|(i, k)| {
            if i < 2 || k < 2 || i + 2 >= grid.u.n || k + 2 >= grid.v.n {
                return None;
            }
            let uu = second_difference(
                [
                    phi(i - 2, k)?,
                    phi(i - 1, k)?,
                    phi(i, k)?,
                    phi(i + 1, k)?,
                    phi(i + 2, k)?,
                ],
                hu,
            );
            let vv = second_difference(
                [
                    phi(i, k - 2)?,
                    phi(i, k - 1)?,
                    phi(i, k)?,
                    phi(i, k + 1)?,
                    phi(i, k + 2)?,
                ],
                hv,
            );
            Some(uu - vv - 2.0 * (s * field.at(i, k)?).sqrt())
        })
        .collect();
    SampledField { grid, values }
}

pub const COEFFICIENT_NAMES: [&str; 6] = ["E+G", "F", "E-scale", "L", "M", "N"];

/// Residuals at one node against the branch selected by the sign of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeResidual {
    pub u: f64,
    pub v: f64,
    pub k: f64,
    pub branch: CurvatureSign,
    /// `|E+G|, |F|, |∓E − 1/√∓K|, |L − l|, |M − m|, |N − n|` with
    /// `(l, m, n) = (−1, 0, −1)` for `K < 0` and `(0, 1, 0)` for `K > 0`.
    pub residuals: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub method: FormMethod,
    pub nodes: Vec<NodeResidual>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub count: usize,
    pub negative: usize,
    pub positive: usize,
    pub max: [f64; 6],
    pub mean: [f64; 6],
    pub max_overall: f64,
}

impl CoefficientReport {
    pub fn restrict(&self, keep: impl Fn(f64, f64) -> bool) -> Self {
        Self {
            method: self.method,
            nodes: self.nodes.iter().filter(|n| keep(n.u, n.v)).copied().collect(),
        }
    }

    pub fn summary(&self) -> CoefficientSummary {
        let mut max = [0.0f64; 6];
        let mut sum = [0.0f64; 6];
        for n in &self.nodes {
            for j in 0..6 {
                max[j] = max[j].max(n.residuals[j]);
                sum[j] += n.residuals[j];
            }
        }
        let count = self.nodes.len();
        let negative = self
            .nodes
            .iter()
            .filter(|n| n.branch == CurvatureSign::Negative)
            .count();
        CoefficientSummary {
            count,
            negative,
            positive: count - negative,
            max,
            mean: sum.map(|s| if count > 0 { s / count as f64 } else { 0.0 }),
            max_overall: max.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Compares the measured forms of `patch` with the canonical shape.
pub fn verify_canonical_coefficients(patch: &SurfacePatch, method: FormMethod) -> CoefficientReport {
    let field = FormField::compute(patch, method);
    let grid = field.grid;
    let nodes = grid
        .nodes()
        .filter_map(|(i, k)| {
            let ff = field.at(i, k)?;
            let (kk, _) = ff.curvatures();
            if !kk.is_finite() || kk == 0.0 {
                return None;
            }
            let z = grid.node(i, k);
            let (branch, residuals) = if kk < 0.0 {
                let scale = 1.0 / (-kk).sqrt();
                (
                    CurvatureSign::Negative,
                    [
                        (ff.e + ff.g).abs(),
                        ff.f.abs(),
                        (-ff.e - scale).abs(),
                        (ff.l + 1.0).abs(),
                        ff.m.abs(),
                        (ff.n + 1.0).abs(),
                    ],
                )
            } else {
                let scale = 1.0 / kk.sqrt();
                (
                    CurvatureSign::Positive,
                    [
                        (ff.e + ff.g).abs(),
                        ff.f.abs(),
                        (ff.e - scale).abs(),
                        ff.l.abs(),
                        (ff.m - 1.0).abs(),
                        ff.n.abs(),
                    ],
                )
            };
            Some(NodeResidual {
                u: z.re,
                v: z.im,
                k: kk,
                branch,
                residuals,
            })
        })
        .collect();
    CoefficientReport {
        method: field.method,
        nodes,
    }
}

/// Isothermal parameter as a function of the canonical one.
#[derive(Debug, Clone, PartialEq)]
pub enum ZMap {
    /// `z = z₀ + slope·(w − w₀)`.
    Affine {
        z0: SplitComplex,
        w0: SplitComplex,
        slope: SplitComplex,
    },
    /// Per null coordinate: `p(s)` and `q(t)` with `w = s e₊ + t e₋`.
    Dense { p: DenseSolution, q: DenseSolution },
}

impl ZMap {
    /// `(z(w), z′(w))`, or `None` outside the solved range.
    pub fn eval(&self, w: SplitComplex) -> Option<(SplitComplex, SplitComplex)> {
        match self {
            ZMap::Affine { z0, w0, slope } => Some((*z0 + *slope * (w - *w0), *slope)),
            ZMap::Dense { p, q } => {
                let (s, t) = w.to_null();
                let (pv, dp) = p.eval(s)?;
                let (qv, dq) = q.eval(t)?;
                Some((SplitComplex::from_null(pv, qv), SplitComplex::from_null(dp, dq)))
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, ZMap::Affine { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalizationResult {
    pub z_of_w: ZMap,
    /// `g(z(w))` in closed form when `z(w)` is affine.
    pub g_tilde_symbolic: Option<HoloExpr>,
    pub sign: Sign,
    pub w0: SplitComplex,
    pub z0: SplitComplex,
    f: HoloExpr,
    g: HoloExpr,
    phi: HoloExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub count: usize,
    pub max: f64,
    pub mean: f64,
}

impl CanonicalizationResult {
    pub fn f(&self) -> &HoloExpr {
        &self.f
    }

    pub fn g(&self) -> &HoloExpr {
        &self.g
    }

    /// `g̃(w) = g(z(w))`.
    pub fn g_tilde(&self, w: SplitComplex) -> Option<SplitComplex> {
        let (z, _) = self.z_of_w.eval(w)?;
        self.g.eval(z).ok()
    }

    /// Samples `z(w)` on a lattice of canonical parameters.
    pub fn sample(&self, grid: &Grid) -> Vec<Option<SplitComplex>> {
        grid.nodes()
            .map(|(i, k)| self.z_of_w.eval(grid.node(i, k)).map(|(z, _)| z))
            .collect()
    }

    /// `|(z′)²·f·g′ − 1|` over the lattice (largest null component), with
    /// `z′` from the dense output.
    pub fn residual(&self, grid: &Grid) -> ResidualStats {
        let values: Vec<f64> = grid
            .nodes()
            .filter_map(|(i, k)| {
                let (z, dz) = self.z_of_w.eval(grid.node(i, k))?;
                let phi = self.phi.eval(z).ok()?;
                let (a, b) = (dz * dz * phi - SplitComplex::ONE).to_null();
                Some(a.abs().max(b.abs()))
            })
            .collect();
        ResidualStats {
            count: values.len(),
            max: values.iter().copied().fold(0.0, f64::max),
            mean: if values.is_empty() {
                0.0
            } else {
                values.iter().sum::<f64>() / values.len() as f64
            },
        }
    }

    /// `|(z′)²·f·g′ − 1|` at the ODE output samples, per null coordinate.
    /// The affine map has no samples of its own; the lattice of `grid` is used.
    pub fn knot_residual(&self, grid: &Grid) -> ResidualStats {
        let ZMap::Dense { p, q } = &self.z_of_w else {
            return self.residual(grid);
        };
        let (p0, q0) = self.z0.to_null();
        let null = |plus: bool, y: f64| {
            let z = if plus {
                SplitComplex::from_null(y, q0)
            } else {
                SplitComplex::from_null(p0, y)
            };
            let (a, b) = self.phi.eval(z).ok()?.to_null();
            Some(if plus { a } else { b })
        };
        let values: Vec<f64> = p
            .knots()
            .map(|(_, y, dy)| null(true, y).map(|c| (dy * dy * c - 1.0).abs()))
            .chain(
                q.knots()
                    .map(|(_, y, dy)| null(false, y).map(|c| (dy * dy * c - 1.0).abs())),
            )
            .map(|r| r.unwrap_or(f64::INFINITY))
            .collect();
        ResidualStats {
            count: values.len(),
            max: values.iter().copied().fold(0.0, f64::max),
            mean: values.iter().sum::<f64>() / values.len().max(1) as f64,
        }
    }

    /// Gauss curvature in canonical parameters, `K(z(w))`.
    pub fn curvature_field(&self, part: Part) -> impl ScalarField + '_ {
        let data = GeneratingData::general(self.f.clone(), self.g.clone()).with_part(part);
        move |u: f64, v: f64| {
            let (z, _) = self.z_of_w.eval(SplitComplex::new(u, v))?;
            data.gauss_curvature(z).ok().filter(|k| k.is_finite())
        }
    }

    /// The surface in canonical parameters, `w ↦ x(z(w)) − x(z₀)`.
    pub fn point_map(&self, part: Part) -> impl Fn(SplitComplex) -> Option<Point3> + Sync + '_ {
        let data = GeneratingData::general(self.f.clone(), self.g.clone())
            .with_part(part)
            .with_base_point(self.z0);
        move |w| {
            let (z, _) = self.z_of_w.eval(w)?;
            data.point_at(z).ok()
        }
    }

    /// Surface points on a lattice of canonical parameters.
    pub fn canonical_patch(&self, part: Part, grid: Grid) -> SurfacePatch {
        let x = self.point_map(part);
        let points: Vec<Option<Point3>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| x(grid.node(idx % grid.u.n, idx / grid.u.n)))
            .collect();
        SurfacePatch::from_points(grid, points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CanonicalizeOptions {
    pub ode: OdeOptions,
}

impl CanonicalizeOptions {
    /// Keeps the part of the domain that can be reached instead of failing.
    pub fn lenient() -> Self {
        Self {
            ode: OdeOptions {
                truncate_on_failure: true,
                ..OdeOptions::default()
            },
        }
    }
}

/// Solves `z′(w) = sign/√(f(z)·g′(z))`, `z(w₀) = z₀` over the canonical
/// domain `domain`.
pub fn canonicalize(
    f: &HoloExpr,
    g: &HoloExpr,
    w0: SplitComplex,
    z0: SplitComplex,
    domain: Rect,
    sign: Sign,
    opts: &CanonicalizeOptions,
) -> Result<CanonicalizationResult, CanonicalError> {
    let phi = f.mul(&g.derivative()).simplify();
    let phi0 = phi.eval(z0).map_err(|source| CanonicalError::Eval { at: z0, source })?;
    let branch = |at: SplitComplex, value: SplitComplex| CanonicalError::Branch { at, value };
    let root0 = phi0.sqrt().map_err(|_| branch(z0, phi0))?;
    if root0.is_null() {
        return Err(branch(z0, phi0));
    }

    let constant = ExpPoly::from_expr(phi.expr())
        .and_then(|e| e.as_polynomial())
        .filter(|p| p.degree().unwrap_or(0) == 0);
    let (z_of_w, g_tilde_symbolic) = if constant.is_some() {
        let slope = root0.inv().map_err(|_| branch(z0, phi0))?.scale(sign.value());
        // z(w) = slope·w + (z₀ − slope·w₀)
        let inner = HoloExpr::var().scale(slope).add(&HoloExpr::constant(z0 - slope * w0));
        let composed = g.compose(&inner);
        let g_tilde = match composed.as_polynomial() {
            Some(p) => HoloExpr::new(ExpPoly::polynomial(p).to_expr()),
            None => composed,
        };
        (ZMap::Affine { z0, w0, slope }, Some(g_tilde))
    } else {
        let (p0, q0) = z0.to_null();
        let (s0, t0) = w0.to_null();
        let sigma = sign.value();
        let null_rhs = |plus: bool| {
            let phi = &phi;
            move |_: f64, y: f64| -> Result<f64, String> {
                let z = if plus {
                    SplitComplex::from_null(y, q0)
                } else {
                    SplitComplex::from_null(p0, y)
                };
                let value = phi.eval(z).map_err(|e| e.to_string())?;
                let (a, b) = value.to_null();
                let c = if plus { a } else { b };
                if c > 0.0 && c.is_finite() {
                    Ok(sigma / c.sqrt())
                } else {
                    Err(format!("f·g′ = {value} leaves the admissible cone at {z}"))
                }
            }
        };
        let widen = |(lo, hi): (f64, f64), x: f64| (lo.min(x), hi.max(x));
        let (p, q) = rayon::join(
            || ode::solve(null_rhs(true), s0, p0, widen(domain.p_range(), s0), &opts.ode),
            || ode::solve(null_rhs(false), t0, q0, widen(domain.q_range(), t0), &opts.ode),
        );
        let map_err = |e: OdeError| match e {
            OdeError::Rhs { y, .. } => {
                let at = SplitComplex::from_null(y, q0);
                CanonicalError::Branch {
                    at,
                    value: phi.eval(at).unwrap_or(SplitComplex::ZERO),
                }
            }
            other => CanonicalError::StepFailure(other),
        };
        (
            ZMap::Dense {
                p: p.map_err(map_err)?,
                q: q.map_err(map_err)?,
            },
            None,
        )
    };

    Ok(CanonicalizationResult {
        z_of_w,
        g_tilde_symbolic,
        sign,
        w0,
        z0,
        f: f.clone(),
        g: g.clone(),
        phi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    /// Largest relative discrepancy `|K₁ − K₂|/max(1, |K₁|)` accepted as a match.
    pub tolerance: f64,
    /// Translations are searched in `[−R, R]²`.
    pub search_radius: f64,
    /// Coarse lattice step for the translation search.
    pub lattice_step: f64,
    pub min_overlap_fraction: f64,
    pub min_overlap_nodes: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            search_radius: 2.0,
            lattice_step: 0.05,
            min_overlap_fraction: 0.25,
            min_overlap_nodes: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldMatch {
    pub matched: bool,
    pub gauge: CanonicalGauge,
    pub discrepancy: f64,
    pub overlap_nodes: usize,
    pub overlap_fraction: f64,
}

struct Score {
    discrepancy: f64,
    nodes: usize,
}

fn score(
    reference: &[(f64, f64, f64)],
    candidate: &impl ScalarField,
    gauge: &CanonicalGauge,
    opts: &CompareOptions,
) -> Score {
    let mut worst = 0.0f64;
    let mut nodes = 0;
    for &(u, v, k1) in reference {
        let (uu, vv) = gauge.map(u, v);
        if let Some(k2) = candidate.value(uu, vv).filter(|x| x.is_finite()) {
            worst = worst.max((k1 - k2).abs() / k1.abs().max(1.0));
            nodes += 1;
        }
    }
    let enough = nodes >= opts.min_overlap_nodes && nodes as f64 >= opts.min_overlap_fraction * reference.len() as f64;
    Score {
        discrepancy: if enough { worst } else { f64::INFINITY },
        nodes,
    }
}

/// Searches for a gauge `(ε, A, B)` with `K_ref(ū, v̄) ≈ K_cand(εū + A, εv̄ + B)`.
pub fn compare_curvature_fields(
    reference: &SampledField,
    candidate: &impl ScalarField,
    opts: &CompareOptions,
) -> Result<FieldMatch, CanonicalError> {
    let nodes: Vec<(f64, f64, f64)> = reference
        .defined()
        .map(|(i, k, x)| {
            let z = reference.grid.node(i, k);
            (z.re, z.im, x)
        })
        .collect();
    let coarse_nodes: Vec<_> = if nodes.len() > 400 {
        nodes.iter().step_by(nodes.len() / 200).copied().collect()
    } else {
        nodes.clone()
    };
    let steps = (opts.search_radius / opts.lattice_step).round() as i64;
    let lattice: Vec<CanonicalGauge> = [1i8, -1]
        .iter()
        .flat_map(|&e| {
            (-steps..=steps).flat_map(move |ia| {
                (-steps..=steps)
                    .map(move |ib| CanonicalGauge::new(e, ia as f64 * opts.lattice_step, ib as f64 * opts.lattice_step))
            })
        })
        .collect();
    let coarse_opts = CompareOptions {
        min_overlap_nodes: opts.min_overlap_nodes.min(coarse_nodes.len()),
        ..*opts
    };
    let mut coarse: Vec<(CanonicalGauge, f64)> = lattice
        .par_iter()
        .map(|g| (*g, score(&coarse_nodes, candidate, g, &coarse_opts).discrepancy))
        .filter(|(_, d)| d.is_finite())
        .collect();
    if coarse.is_empty() {
        let s = score(&nodes, candidate, &CanonicalGauge::IDENTITY, opts);
        return Err(CanonicalError::InconclusiveOverlap {
            nodes: s.nodes,
            fraction: s.nodes as f64 / nodes.len().max(1) as f64,
        });
    }
    coarse.sort_by(|a, b| a.1.total_cmp(&b.1));

    // refine the best few starting points of each orientation
    let mut seeds = Vec::new();
    for e in [1i8, -1] {
        seeds.extend(coarse.iter().filter(|(g, _)| g.epsilon == e).take(4).map(|(g, _)| *g));
    }
    let refined: Vec<(CanonicalGauge, Score)> = seeds
        .par_iter()
        .map(|seed| {
            let mut best = *seed;
            let mut best_score = score(&nodes, candidate, &best, opts);
            let mut step = opts.lattice_step;
            while step > 1e-12 {
                let mut improved = false;
                for (da, db) in [
                    (1.0, 0.0),
                    (-1.0, 0.0),
                    (0.0, 1.0),
                    (0.0, -1.0),
                    (1.0, 1.0),
                    (-1.0, -1.0),
                    (1.0, -1.0),
                    (-1.0, 1.0),
                ] {
                    let trial = CanonicalGauge::new(best.epsilon, best.a + da * step, best.b + db * step);
                    let s = score(&nodes, candidate, &trial, opts);
                    if s.discrepancy < best_score.discrepancy {
                        best = trial;
                        best_score = s;
                        improved = true;
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            (best, best_score)
        })
        .collect();

    let total = nodes.len().max(1) as f64;
    let to_match = |(g, s): &(CanonicalGauge, Score)| FieldMatch {
        matched: s.discrepancy < opts.tolerance,
        gauge: *g,
        discrepancy: s.discrepancy,
        overlap_nodes: s.nodes,
        overlap_fraction: s.nodes as f64 / total,
    };
    let mut matches: Vec<FieldMatch> = refined.iter().map(to_match).collect();
    let weight = |m: &FieldMatch| m.gauge.a.abs() + m.gauge.b.abs();
    let winners: Vec<&FieldMatch> = matches.iter().filter(|m| m.matched).collect();
    let best = if winners.is_empty() {
        matches.sort_by(|a, b| a.discrepancy.total_cmp(&b.discrepancy));
        matches[0]
    } else {
        **winners
            .iter()
            .min_by(|a, b| {
                // ties: smallest |A| + |B| (to rounding), then ε = +1
                let (wa, wb) = (weight(a), weight(b));
                if (wa - wb).abs() > 1e-6 {
                    wa.total_cmp(&wb)
                } else {
                    b.gauge.epsilon.cmp(&a.gauge.epsilon)
                }
            })
            .expect("non-empty")
    };
    if !best.discrepancy.is_finite() {
        return Err(CanonicalError::InconclusiveOverlap {
            nodes: best.overlap_nodes,
            fraction: best.overlap_fraction,
        });
    }
    Ok(best)
}
