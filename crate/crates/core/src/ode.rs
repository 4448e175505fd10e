//! Scalar initial value problems with the Dormand–Prince 5(4) pair.
//!
//! Canonical parameters reduce to two independent scalar ODEs, one per null
//! coordinate, so a scalar solver is all that is needed. Dense output is by
//! cubic Hermite interpolation between accepted steps.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("right-hand side undefined at t = {t}, y = {y}: {reason}")]
    Rhs { t: f64, y: f64, reason: String },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step; keeps the Hermite interpolant's derivative accurate.
    pub h_max: f64,
    pub max_steps: usize,
    /// Stop at the last good point instead of failing when the right-hand side
    /// becomes undefined.
    pub truncate_on_failure: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 0.005,
            max_steps: 1_000_000,
            truncate_on_failure: false,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// difference between the 5th and 4th order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Accepted steps `(t, y, y')`, ordered by increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution {
    t: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl DenseSolution {
    pub fn t_range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.t.len()).map(|i| (self.t[i], self.y[i], self.dy[i]))
    }

    /// `(y(t), y'(t))` from the Hermite interpolant; `None` outside the range.
    pub fn eval(&self, t: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.t_range();
        if !(lo..=hi).contains(&t) {
            return None;
        }
        if self.t.len() == 1 {
            return Some((self.y[0], self.dy[0]));
        }
        let i = match self.t.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= self.t.len() => self.t.len() - 2,
            k => k - 1,
        };
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.dy[i] * h, self.dy[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let y =
            (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1;
        let dy = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        Some((y, dy))
    }
}

struct Branch {
    t: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

fn integrate_one_way<F, E2>(
    rhs: &F,
    t0: f64,
    y0: f64,
    dy0: f64,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Branch, OdeError>
where
    F: Fn(f64, f64) -> Result<f64, E2>,
    E2: fmt::Display,
{
    let dir = (t_end - t0).signum();
    let mut out = Branch {
        t: vec![t0],
        y: vec![y0],
        dy: vec![dy0],
    };
    if t_end == t0 {
        return Ok(out);
    }
    let call = |t: f64, y: f64| {
        rhs(t, y)
            .map_err(|e| OdeError::Rhs {
                t,
                y,
                reason: e.to_string(),
            })
            .and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(OdeError::Rhs {
                        t,
                        y,
                        reason: "non-finite value".into(),
                    })
                }
            })
    };

    let span = (t_end - t0).abs();
    let h_min = 1e-13 * span.max(t0.abs()).max(1.0);
    let (mut t, mut y, mut k1) = (t0, y0, dy0);
    // initial step from the local scale of the solution
    let scale = opts.atol + opts.rtol * y.abs();
    let mut h = (0.01 * scale / k1.abs().max(1e-300))
        .sqrt()
        .clamp(h_min, opts.h_max)
        .min(span);
    let mut steps = 0;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        h = h.min((t_end - t).abs());
        let hs = h * dir;
        let mut k = [k1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut failed = None;
        for s in 1..7 {
            let ys = y + hs * (0..s).map(|r| A[s][r] * k[r]).sum::<f64>();
            match call(t + C[s] * hs, ys) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            if h <= h_min {
                if opts.truncate_on_failure {
                    return Ok(out);
                }
                return Err(e);
            }
            h = (0.25 * h).max(h_min);
            continue;
        }
        // stage 7 evaluates the 5th order solution (FSAL)
        let y_new = y + hs * (0..6).map(|r| A[6][r] * k[r]).sum::<f64>();
        let err_est = hs * (0..7).map(|r| E[r] * k[r]).sum::<f64>();
        let tol = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let err = (err_est / tol).abs();
        if err <= 1.0 {
            t += hs;
            if (t_end - t) * dir < h_min {
                t = t_end;
            }
            y = y_new;
            k1 = k[6];
            out.t.push(t);
            out.y.push(y);
            out.dy.push(k1);
        } else if h <= h_min {
            if opts.truncate_on_failure {
                return Ok(out);
            }
            return Err(OdeError::StepFailure { t, h });
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).clamp(h_min, opts.h_max);
    }
    Ok(out)
}

/// Solves `y' = rhs(t, y)`, `y(t0) = y0` on `[t_lo, t_hi] ∋ t0`, marching
/// both ways from `t0`. With `truncate_on_failure` the returned range may be
/// shorter than requested.
pub fn solve<F, E2>(
    rhs: F,
    t0: f64,
    y0: f64,
    (t_lo, t_hi): (f64, f64),
    opts: &OdeOptions,
) -> Result<DenseSolution, OdeError>
where
    F: Fn(f64, f64) -> Result<f64, E2>,
    E2: fmt::Display,
{
    let dy0 = rhs(t0, y0).map_err(|e| OdeError::Rhs {
        t: t0,
        y: y0,
        reason: e.to_string(),
    })?;
    let back = integrate_one_way(&rhs, t0, y0, dy0, t_lo.min(t0), opts)?;
    let fwd = integrate_one_way(&rhs, t0, y0, dy0, t_hi.max(t0), opts)?;
    let mut sol = DenseSolution {
        t: back.t.into_iter().rev().collect(),
        y: back.y.into_iter().rev().collect(),
        dy: back.dy.into_iter().rev().collect(),
    };
    sol.t.extend(fwd.t.into_iter().skip(1));
    sol.y.extend(fwd.y.into_iter().skip(1));
    sol.dy.extend(fwd.dy.into_iter().skip(1));
    Ok(sol)
}
