//! The Kitaev chain in momentum space, rotated so its Bloch vectors lie in
//! the equatorial plane:
//!
//! `H_k = -(Δ_k/2) n_k·σ`, `n_k ∝ (m + w cos k, M sin k, 0)`,
//! `Δ_k = 2√((m + w cos k)² + (M sin k)²)`,
//!
//! with `m = μ/2`, hopping `w` and pairing `M`. The thermal state at
//! temperature `T` (k_B = 1) is `ρ(k) = ½(𝟙 + tanh(Δ_k/2T) n_k·σ)`.

use std::f64::consts::PI;

use crate::bloch::{BlochVector, QubitState};
use crate::error::{Error, Result};
use crate::numerics;

/// Band gaps below this count as closed.
pub const GAP_TOL: f64 = 1e-12;

/// Default `m` values of the spectrum and Bloch-curve sweeps.
pub const DEFAULT_M_GRID: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25];
/// Default temperatures of the Bloch-curve sweep.
pub const DEFAULT_T_GRID: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

/// Physical parameters of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Half the chemical potential.
    pub m: f64,
    /// Temperature; zero selects the pure ground-state curve.
    pub temperature: f64,
    pub hopping: f64,
    pub pairing: f64,
}

impl ChainParams {
    /// Parameters with `w = M = 1`.
    pub fn new(m: f64, temperature: f64) -> Result<Self> {
        Self::with_couplings(m, temperature, 1.0, 1.0)
    }

    pub fn with_couplings(m: f64, temperature: f64, hopping: f64, pairing: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidParams(format!("m = {m} is not finite")));
        }
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidParams(format!(
                "temperature {temperature} must be finite and >= 0"
            )));
        }
        if !(hopping > 0.0 && pairing > 0.0) || !hopping.is_finite() || !pairing.is_finite() {
            return Err(Error::InvalidParams(format!(
                "hopping {hopping} and pairing {pairing} must be positive"
            )));
        }
        Ok(Self {
            m,
            temperature,
            hopping,
            pairing,
        })
    }

    pub fn at_temperature(&self, temperature: f64) -> Result<Self> {
        Self::with_couplings(self.m, temperature, self.hopping, self.pairing)
    }

    fn components(&self, k: f64) -> (f64, f64) {
        (self.m + self.hopping * k.cos(), self.pairing * k.sin())
    }

    /// Whether the gap closes somewhere in the Brillouin zone (`|m| = w`).
    pub fn is_gapless(&self) -> bool {
        (self.m.abs() - self.hopping).abs() < GAP_TOL
    }
}

/// A fully evaluated point of the Brillouin zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSample {
    pub k: f64,
    pub delta_k: f64,
    pub n_k: BlochVector,
    pub phi: f64,
}

/// `Δ_k`, the separation of the two bands.
pub fn band_gap(params: &ChainParams, k: f64) -> f64 {
    let (x, y) = params.components(k);
    2.0 * x.hypot(y)
}

/// Unit Bloch vector `n_k` of the lower band.
pub fn bloch_direction(params: &ChainParams, k: f64) -> Result<BlochVector> {
    let (x, y) = params.components(k);
    let r = x.hypot(y);
    if 2.0 * r < GAP_TOL {
        return Err(Error::GapClosed { k });
    }
    Ok(BlochVector::new(x / r, y / r, 0.0))
}

/// Bloch vector of the thermal state, `tanh(Δ_k/2T) n_k`.
pub fn gibbs_bloch(params: &ChainParams, k: f64) -> Result<BlochVector> {
    let t = params.temperature;
    if !(t > 0.0) {
        return Err(Error::InvalidParams(
            "thermal state needs T > 0; use pure_state for T = 0".into(),
        ));
    }
    let (x, y) = params.components(k);
    let half_gap = x.hypot(y);
    // tanh(Δ/2T)·n = tanh(h/T)/h · (x, y) with h = Δ/2, finite as h → 0
    let z = half_gap / t;
    let factor = if z < 1e-8 {
        1.0 / t
    } else {
        z.tanh() / half_gap
    };
    Ok(BlochVector::new(factor * x, factor * y, 0.0))
}

/// Thermal (Gibbs) state at wave number `k`.
pub fn gibbs_state(params: &ChainParams, k: f64) -> Result<QubitState> {
    QubitState::from_bloch(gibbs_bloch(params, k)?)
}

/// Ground-state projector at wave number `k`, the `T = 0` curve.
pub fn pure_state(params: &ChainParams, k: f64) -> Result<QubitState> {
    QubitState::from_bloch(bloch_direction(params, k)?)
}

/// `ρ(k)` for either regime: Gibbs state for `T > 0`, ground state for `T = 0`.
pub fn state(params: &ChainParams, k: f64) -> Result<QubitState> {
    if params.temperature > 0.0 {
        gibbs_state(params, k)
    } else {
        pure_state(params, k)
    }
}

/// Winding of `n_k` around the origin per Brillouin-zone traversal.
fn degree(params: &ChainParams) -> i64 {
    if params.m.abs() < params.hopping {
        1
    } else {
        0
    }
}

fn check_angle_domain(params: &ChainParams) -> Result<()> {
    if params.m <= -params.hopping {
        return Err(Error::InvalidParams(format!(
            "polar angle continuation needs m > -w (m = {}, w = {})",
            params.m, params.hopping
        )));
    }
    Ok(())
}

/// Continuous polar angle `φ(k)` of `n_k` with `φ(0) = 0`.
///
/// Uses the principal `atan2` value and adds 2π for every crossing of the
/// negative real axis passed so far. For `m > -w` the only crossings are at
/// `k = π (mod 2π)` when `m < w`, always counter-clockwise.
pub fn polar_angle(params: &ChainParams, k: f64) -> Result<f64> {
    check_angle_domain(params)?;
    let (x, y) = params.components(k);
    if 2.0 * x.hypot(y) < GAP_TOL {
        return Err(Error::UndefinedAngle { k });
    }
    let turns = (k / (2.0 * PI)).floor();
    let s = k - 2.0 * PI * turns;
    let mut angle = y.atan2(x);
    let d = degree(params);
    // past the crossing at s = π the principal value is negative
    if d == 1 && angle < 0.0 && s > 0.5 * PI {
        angle += 2.0 * PI;
    }
    Ok(angle + 2.0 * PI * turns * d as f64)
}

/// `φ(k) = k/2 + arctan(((1-m)/(1+m)) tan(k/2))` with the arctan branch
/// continued through `k = π (mod 2π)`. Valid for `w = M = 1`, `m > -1`.
///
/// The continued branch is the angle of `(cos(k/2), c sin(k/2))`, which
/// stays within a quarter turn of `sign(c)·k/2`.
pub fn polar_angle_closed_form(params: &ChainParams, k: f64) -> Result<f64> {
    if params.hopping != 1.0 || params.pairing != 1.0 {
        return Err(Error::InvalidParams(
            "closed-form polar angle assumes w = M = 1".into(),
        ));
    }
    check_angle_domain(params)?;
    if band_gap(params, k) < GAP_TOL {
        return Err(Error::UndefinedAngle { k });
    }
    let c = (1.0 - params.m) / (1.0 + params.m);
    let half = 0.5 * k;
    let a = (c * half.sin()).atan2(half.cos());
    let branch = if c == 0.0 {
        0.0
    } else {
        let target = c.signum() * half;
        a + 2.0 * PI * ((target - a) / (2.0 * PI)).round()
    };
    Ok(half + branch)
}

/// Polar angles on a grid of wave numbers by unwrapping sampled `atan2`
/// values, shifted so the first sample matches [`polar_angle`].
pub fn polar_angle_samples(params: &ChainParams, ks: &[f64]) -> Result<Vec<f64>> {
    check_angle_domain(params)?;
    let raw = ks
        .iter()
        .map(|&k| {
            let (x, y) = params.components(k);
            if 2.0 * x.hypot(y) < GAP_TOL {
                Err(Error::UndefinedAngle { k })
            } else {
                Ok(y.atan2(x))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = numerics::unwrap(&raw)?;
    if let Some(&k0) = ks.first() {
        let shift = polar_angle(params, k0)? - out[0];
        out.iter_mut().for_each(|v| *v += shift);
    }
    Ok(out)
}

/// `dφ/dk = M(w + m cos k) / ((m + w cos k)² + (M sin k)²)`.
///
/// At an exact gap closure the rate is `0/0`; it is reported as zero there,
/// since every consumer weights it by a factor that vanishes with the gap.
pub fn polar_angle_rate(params: &ChainParams, k: f64) -> f64 {
    let (x, y) = params.components(k);
    let num = params.pairing * (params.hopping + params.m * k.cos());
    let den = x * x + y * y;
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Degree of `k ↦ n_k`: 1 for `|m| < w`, 0 for `|m| > w`.
pub fn winding_number(params: &ChainParams) -> Result<i64> {
    if params.is_gapless() {
        return Err(Error::GapClosed {
            k: if params.m > 0.0 { PI } else { 0.0 },
        });
    }
    check_angle_domain(params)?;
    let total = polar_angle(params, 2.0 * PI)? - polar_angle(params, 0.0)?;
    Ok((total / (2.0 * PI)).round() as i64)
}

pub fn momentum_sample(params: &ChainParams, k: f64) -> Result<MomentumSample> {
    Ok(MomentumSample {
        k,
        delta_k: band_gap(params, k),
        n_k: bloch_direction(params, k)?,
        phi: polar_angle(params, k)?,
    })
}
