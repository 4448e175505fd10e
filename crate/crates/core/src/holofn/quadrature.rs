//! Adaptive Gauss–Kronrod quadrature along straight segments in 𝔻.
//!
//! On the segment `z(t) = z₀ + t·(z₁ − z₀)` the integral splits into two
//! real integrals, one per null coordinate. Both are carried through the same
//! bisection tree but the error of each is controlled separately.

use std::fmt;

use thiserror::Error;

use super::HoloExpr;
use crate::algebra::SplitComplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand undefined at {at}: {reason}")]
    Undefined { at: SplitComplex, reason: String },
    #[error("integrand not finite at {at}")]
    NonFinite { at: SplitComplex },
    #[error("no convergence on [{from}, {to}] after {subdivisions} subdivisions (error estimate {estimate:e})")]
    NoConvergence {
        from: SplitComplex,
        to: SplitComplex,
        subdivisions: usize,
        estimate: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute tolerance per null component.
    pub tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

// 15-point Kronrod nodes and weights with the embedded 7-point Gauss weights,
// kept at the precision of the published tables.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [SplitComplex; N],
    // per component, per null coordinate
    error: [[f64; 2]; N],
}

fn panel<const N: usize, F, E>(
    f: &F,
    z0: SplitComplex,
    dz: SplitComplex,
    a: f64,
    b: f64,
) -> Result<Panel<N>, QuadratureError>
where
    F: Fn(SplitComplex) -> Result<[SplitComplex; N], E>,
    E: fmt::Display,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = [SplitComplex::ZERO; N];
    let mut gauss = [SplitComplex::ZERO; N];
    let mut sample = |t: f64, wk: f64, wg: Option<f64>| -> Result<(), QuadratureError> {
        let z = z0 + dz.scale(t);
        let values = f(z).map_err(|e| QuadratureError::Undefined {
            at: z,
            reason: e.to_string(),
        })?;
        for (c, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { at: z });
            }
            kronrod[c] += v.scale(wk);
            if let Some(w) = wg {
                gauss[c] += v.scale(w);
            }
        }
        Ok(())
    };
    for k in 0..7 {
        let wg = (k % 2 == 1).then(|| WG[k / 2]);
        sample(center - half * XGK[k], WGK[k], wg)?;
        sample(center + half * XGK[k], WGK[k], wg)?;
    }
    sample(center, WGK[7], Some(WG[3]))?;

    let scale = dz.scale(half);
    let mut value = [SplitComplex::ZERO; N];
    let mut error = [[0.0; 2]; N];
    for c in 0..N {
        value[c] = kronrod[c] * scale;
        let (ep, eq) = ((kronrod[c] - gauss[c]) * scale).to_null();
        error[c] = [ep.abs(), eq.abs()];
    }
    Ok(Panel { a, b, value, error })
}

/// `∫_{z₀}^{z₁} f(z) dz` along the straight segment, for a vector of `N`
/// integrands evaluated together.
pub fn integrate_segment<const N: usize, F, E>(
    f: F,
    z0: SplitComplex,
    z1: SplitComplex,
    opts: QuadratureOptions,
) -> Result<[SplitComplex; N], QuadratureError>
where
    F: Fn(SplitComplex) -> Result<[SplitComplex; N], E>,
    E: fmt::Display,
{
    let dz = z1 - z0;
    if dz == SplitComplex::ZERO {
        return Ok([SplitComplex::ZERO; N]);
    }
    let mut panels = vec![panel(&f, z0, dz, 0.0, 1.0)?];
    let mut subdivisions = 0;
    loop {
        // total error per component and null coordinate
        let mut total = [[0.0f64; 2]; N];
        for p in &panels {
            for (t, e) in total.iter_mut().zip(&p.error) {
                t[0] += e[0];
                t[1] += e[1];
            }
        }
        let worst = total.iter().flatten().fold(0.0f64, |m, &e| m.max(e));
        if worst <= opts.tol {
            let mut out = [SplitComplex::ZERO; N];
            for p in &panels {
                for (o, v) in out.iter_mut().zip(&p.value) {
                    *o += *v;
                }
            }
            return Ok(out);
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(QuadratureError::NoConvergence {
                from: z0,
                to: z1,
                subdivisions,
                estimate: worst,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.error.iter().flatten().fold(0.0f64, |m, &e| m.max(e))))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let old = panels.swap_remove(idx);
        let mid = 0.5 * (old.a + old.b);
        if !(old.a < mid && mid < old.b) {
            // interval exhausted at machine precision
            return Err(QuadratureError::NoConvergence {
                from: z0,
                to: z1,
                subdivisions,
                estimate: worst,
            });
        }
        panels.push(panel(&f, z0, dz, old.a, mid)?);
        panels.push(panel(&f, z0, dz, mid, old.b)?);
        subdivisions += 1;
    }
}

/// `∫_{z₀}^{z₁} F(z) dz` along the straight segment. Uses the closed-form
/// antiderivative when there is one, adaptive quadrature otherwise.
pub fn integrate_path(
    f: &HoloExpr,
    z0: SplitComplex,
    z1: SplitComplex,
    tol: f64,
) -> Result<SplitComplex, QuadratureError> {
    if let Some(anti) = f.antiderivative() {
        let at = |z: SplitComplex| {
            anti.eval(z).map_err(|e| QuadratureError::Undefined {
                at: z,
                reason: e.to_string(),
            })
        };
        return Ok(at(z1)? - at(z0)?);
    }
    let [v] = integrate_segment(|z| f.eval(z).map(|v| [v]), z0, z1, QuadratureOptions::with_tol(tol))?;
    Ok(v)
}
