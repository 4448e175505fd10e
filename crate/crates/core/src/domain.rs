//! Parameter rectangles and the regular lattices sampled on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::SplitComplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainSpecError {
    #[error("expected umin:umax:vmin:vmax, got {0:?}")]
    BadRect(String),
    #[error("expected NxM, got {0:?}")]
    BadGrid(String),
    #[error("empty or inverted interval [{0}, {1}]")]
    Inverted(f64, f64),
    #[error("grid needs at least 3 samples per axis, got {0}")]
    TooCoarse(usize),
}

/// Closed rectangle `[u_min, u_max] × [v_min, v_max]` in the `(u, v)` plane,
/// i.e. the set of double numbers `u + jv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Rect {
    // negated comparisons so that NaN bounds are rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self, DomainSpecError> {
        if !(u_min < u_max) {
            return Err(DomainSpecError::Inverted(u_min, u_max));
        }
        if !(v_min < v_max) {
            return Err(DomainSpecError::Inverted(v_min, v_max));
        }
        Ok(Self {
            u_min,
            u_max,
            v_min,
            v_max,
        })
    }

    /// Square `[c.re − r, c.re + r] × [c.im − r, c.im + r]`.
    pub fn centered(center: SplitComplex, half_width: f64) -> Self {
        Self {
            u_min: center.re - half_width,
            u_max: center.re + half_width,
            v_min: center.im - half_width,
            v_max: center.im + half_width,
        }
    }

    pub fn contains(&self, z: SplitComplex) -> bool {
        (self.u_min..=self.u_max).contains(&z.re) && (self.v_min..=self.v_max).contains(&z.im)
    }

    pub fn corners(&self) -> [SplitComplex; 4] {
        [
            SplitComplex::new(self.u_min, self.v_min),
            SplitComplex::new(self.u_max, self.v_min),
            SplitComplex::new(self.u_min, self.v_max),
            SplitComplex::new(self.u_max, self.v_max),
        ]
    }

    /// Range of the null coordinate `p = u + v` over the rectangle.
    pub fn p_range(&self) -> (f64, f64) {
        (self.u_min + self.v_min, self.u_max + self.v_max)
    }

    /// Range of the null coordinate `q = u − v` over the rectangle.
    pub fn q_range(&self) -> (f64, f64) {
        (self.u_min - self.v_max, self.u_max - self.v_min)
    }
}

impl FromStr for Rect {
    type Err = DomainSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DomainSpecError::BadRect(s.to_string());
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match parts.as_slice() {
            &[a, b, c, d] => Rect::new(a, b, c, d),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.u_min, self.u_max, self.v_min, self.v_max)
    }
}

/// Uniform samples `min + i·step`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.at(i))
    }

    /// Fractional index of `x`, if it lies inside the axis range.
    pub fn locate(&self, x: f64) -> Option<f64> {
        let tol = 1e-9 * self.step();
        if x < self.min - tol || x > self.max + tol {
            return None;
        }
        Some(((x - self.min) / self.step()).clamp(0.0, (self.n - 1) as f64))
    }
}

/// Rectangular lattice; node `(i, k)` sits at `(u.at(i), v.at(k))`.
/// Storage order is row-major with rows of constant `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub u: Axis,
    pub v: Axis,
}

impl Grid {
    pub fn new(domain: Rect, nu: usize, nv: usize) -> Result<Self, DomainSpecError> {
        if nu < 3 {
            return Err(DomainSpecError::TooCoarse(nu));
        }
        if nv < 3 {
            return Err(DomainSpecError::TooCoarse(nv));
        }
        Ok(Self {
            u: Axis::new(domain.u_min, domain.u_max, nu),
            v: Axis::new(domain.v_min, domain.v_max, nv),
        })
    }

    /// Lattice over `domain` whose spacing is as close to `step` as the
    /// rectangle allows.
    pub fn with_step(domain: Rect, step: f64) -> Result<Self, DomainSpecError> {
        let nu = ((domain.u_max - domain.u_min) / step).round() as usize + 1;
        let nv = ((domain.v_max - domain.v_min) / step).round() as usize + 1;
        Self::new(domain, nu.max(3), nv.max(3))
    }

    pub fn rect(&self) -> Rect {
        Rect {
            u_min: self.u.min,
            u_max: self.u.max,
            v_min: self.v.min,
            v_max: self.v.max,
        }
    }

    pub fn len(&self) -> usize {
        self.u.n * self.v.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, k: usize) -> usize {
        k * self.u.n + i
    }

    pub fn node(&self, i: usize, k: usize) -> SplitComplex {
        SplitComplex::new(self.u.at(i), self.v.at(k))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.v.n).flat_map(move |k| (0..self.u.n).map(move |i| (i, k)))
    }
}

/// Parses `NxM` (also accepts `N×M`).
pub fn parse_grid_dims(s: &str) -> Result<(usize, usize), DomainSpecError> {
    let bad = || DomainSpecError::BadGrid(s.to_string());
    let (a, b) = s.split_once(['x', 'X', '×']).ok_or_else(bad)?;
    let nu = a.trim().parse::<usize>().map_err(|_| bad())?;
    let nv = b.trim().parse::<usize>().map_err(|_| bad())?;
    if nu < 3 {
        return Err(DomainSpecError::TooCoarse(nu));
    }
    if nv < 3 {
        return Err(DomainSpecError::TooCoarse(nv));
    }
    Ok((nu, nv))
}
