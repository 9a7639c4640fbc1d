//! Numerical kernels shared by the transport and phase code: adaptive
//! Simpson quadrature, bisection root finding and angle unwrapping.
//!
//! Everything here is stateless and reentrant.

use std::f64::consts::PI;

use thiserror::Error;

/// Failures of the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    /// Adaptive quadrature hit its depth limit. Carries the subinterval with
    /// the largest remaining error estimate.
    #[error(
        "quadrature did not converge: worst subinterval [{lo}, {hi}] with error estimate {error:e}"
    )]
    QuadratureNonConvergence { lo: f64, hi: f64, error: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("no sign change on bracket [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("bisection exhausted {iterations} iterations, bracket width {width:e}")]
    RootIterationLimit { iterations: usize, width: f64 },
    #[error("angle sequence undersampled at index {index}: step {step} rad")]
    Undersampled { index: usize, step: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Bracket and stopping rule for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub lo: f64,
    pub hi: f64,
    pub x_tol: f64,
    pub max_iter: usize,
}

impl RootSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            x_tol: 1e-10,
            max_iter: 200,
        }
    }

    pub fn with_tol(mut self, x_tol: f64) -> Self {
        self.x_tol = x_tol;
        self
    }
}

// Subdivision levels applied unconditionally before the error test, so a
// coincidentally small first estimate cannot end the recursion early.
const MIN_DEPTH: u32 = 3;
// A panel is accepted only if its parent's estimate is within this factor of
// the panel tolerance. For smooth integrands the parent difference is about
// 32 times the child's, so a much larger ratio means the child's estimate
// vanished by accident (a sign change of the fourth derivative).
const PARENT_RATIO: f64 = 1000.0;

struct Worst {
    lo: f64,
    hi: f64,
    error: f64,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// The absolute tolerance is split between the two halves at every level and
/// accepted panels get the Richardson correction. Integrating with `b < a`
/// returns the negated integral.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64, NumericError>
where
    F: Fn(f64) -> f64,
{
    if !(spec.abs_tol > 0.0) {
        return Err(NumericError::InvalidTolerance(spec.abs_tol));
    }
    if a == b {
        return Ok(0.0);
    }
    let eval = |x: f64| -> Result<f64, NumericError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericError::NonFiniteIntegrand { x })
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut worst: Option<Worst> = None;
    let value = simpson_step(
        &eval,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        f64::INFINITY,
        spec.abs_tol,
        0,
        spec.max_depth,
        &mut worst,
    )?;
    match worst {
        Some(w) => Err(NumericError::QuadratureNonConvergence {
            lo: w.lo,
            hi: w.hi,
            error: w.error,
        }),
        None => Ok(value),
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<E>(
    eval: &E,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    parent_delta: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
    worst: &mut Option<Worst>,
) -> Result<f64, NumericError>
where
    E: Fn(f64) -> Result<f64, NumericError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= MIN_DEPTH
        && delta.abs() <= 15.0 * tol
        && parent_delta.abs() <= PARENT_RATIO * 15.0 * tol
    {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= max_depth {
        let err = delta.abs() / 15.0;
        if worst.as_ref().is_none_or(|w| err > w.error) {
            *worst = Some(Worst {
                lo: a,
                hi: b,
                error: err,
            });
        }
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_step(
        eval,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        delta,
        0.5 * tol,
        depth + 1,
        max_depth,
        worst,
    )?;
    let r = simpson_step(
        eval,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        delta,
        0.5 * tol,
        depth + 1,
        max_depth,
        worst,
    )?;
    Ok(l + r)
}

/// Bisection on a sign-changing bracket.
///
/// Stops when the bracket is narrower than `x_tol` or an exact zero is hit,
/// and returns the bracket midpoint.
pub fn find_root<F>(f: F, spec: &RootSpec) -> Result<f64, NumericError>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (spec.lo, spec.hi);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericError::InvalidBracket { lo, hi });
    }
    if !(spec.x_tol > 0.0) {
        return Err(NumericError::InvalidTolerance(spec.x_tol));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(NumericError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    for _ in 0..spec.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= spec.x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= spec.x_tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(NumericError::RootIterationLimit {
            iterations: spec.max_iter,
            width: hi - lo,
        })
    }
}

/// Removes 2π jumps from a sequence of angles.
///
/// Each step is reduced to `[-π, π]`; a reduced step of magnitude π is
/// ambiguous and reported as undersampling.
pub fn unwrap(angles: &[f64]) -> Result<Vec<f64>, NumericError> {
    unwrap_with_limit(angles, PI)
}

/// As [`unwrap`], rejecting any reduced step whose magnitude reaches `max_step`.
pub fn unwrap_with_limit(angles: &[f64], max_step: f64) -> Result<Vec<f64>, NumericError> {
    let mut out = Vec::with_capacity(angles.len());
    let Some(&first) = angles.first() else {
        return Ok(out);
    };
    out.push(first);
    let mut acc = first;
    for (i, w) in angles.windows(2).enumerate() {
        let step = wrap_to_pi(w[1] - w[0]);
        if step.abs() >= max_step {
            return Err(NumericError::Undersampled { index: i + 1, step });
        }
        acc += step;
        out.push(acc);
    }
    Ok(out)
}

/// Reduces an angle to `[-π, π]`.
pub fn wrap_to_pi(angle: f64) -> f64 {
    angle - 2.0 * PI * (angle / (2.0 * PI)).round()
}

/// Reduces an angle to `(-π, π]`.
pub fn principal_angle(angle: f64) -> f64 {
    let w = wrap_to_pi(angle);
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// `n + 1` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n > 0, "linspace needs at least one interval");
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| if i == n { b } else { a + i as f64 * h })
        .collect()
}

/// `n + 1` logarithmically spaced points from `a` to `b` inclusive (both > 0).
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            if i == 0 {
                a
            } else if i == n {
                b
            } else {
                t.exp()
            }
        })
        .collect()
}

/// Hyperbolic secant, zero once `cosh` overflows.
pub fn sech(z: f64) -> f64 {
    1.0 / z.cosh()
}

/// `1 - sech(z)` without cancellation for small `z`.
pub fn one_minus_sech(z: f64) -> f64 {
    let s = (0.5 * z).sinh();
    let c = z.cosh();
    if c.is_infinite() {
        1.0
    } else {
        2.0 * s * s / c
    }
}
