//! Parameter sweeps behind the exported data tables.
//!
//! Each sweep maps independent grid cells through an [`Execution`] and
//! returns rows in grid order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::interferometric::{self, ClosedCurve};
use crate::kitaev::{self, ChainParams};
use crate::numerics;
use crate::uhlmann::{self, CriticalTemperature, NodeRecord};
use crate::verdict::{Invariant, PhaseVerdict};

/// Mixedness grid used for the flat-band node diagram.
pub fn default_node_x_grid() -> Vec<f64> {
    (1..200).map(|i| i as f64 * 0.005).collect()
}

/// `m` grid for the critical-temperature diagram, `0, 0.01, …, 1.5`.
pub fn default_critical_m_grid() -> Vec<f64> {
    (0..=150).map(|i| i as f64 * 0.01).collect()
}

/// Temperature at which the flat band (`Δ = 2`) has mixedness `x`.
pub fn flat_band_temperature(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParams(format!(
            "mixedness x = {x} must lie in (0, 1)"
        )));
    }
    Ok(1.0 / (1.0 / x).acosh())
}

fn collect<R>(rows: Vec<Result<Vec<R>>>) -> Result<Vec<R>> {
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub m: f64,
    pub k: f64,
    pub gap: f64,
}

/// `Δ_k` on `density + 1` points of `[0, 2π]` for each `m`.
pub fn spectrum(ms: &[f64], density: usize, exec: Execution) -> Result<Vec<SpectrumRow>> {
    let ks = numerics::linspace(0.0, 2.0 * PI, density);
    collect(exec.map(ms, |&m| {
        let params = ChainParams::new(m, 0.0)?;
        Ok(ks
            .iter()
            .map(|&k| SpectrumRow {
                m,
                k,
                gap: kitaev::band_gap(&params, k),
            })
            .collect())
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochRow {
    pub m: f64,
    pub temperature: f64,
    pub k: f64,
    pub rx: f64,
    pub ry: f64,
}

/// Equatorial Bloch components of `ρ(k)` for every `(m, T)`.
pub fn bloch_curves(
    ms: &[f64],
    ts: &[f64],
    density: usize,
    exec: Execution,
) -> Result<Vec<BlochRow>> {
    let cells: Vec<(f64, f64)> = ms
        .iter()
        .flat_map(|&m| ts.iter().map(move |&t| (m, t)))
        .collect();
    let ks = numerics::linspace(0.0, 2.0 * PI, density);
    collect(exec.map(&cells, |&(m, t)| {
        let params = ChainParams::new(m, t)?;
        ks.iter()
            .map(|&k| {
                let r = if t > 0.0 {
                    kitaev::gibbs_bloch(&params, k)?
                } else {
                    kitaev::bloch_direction(&params, k)?
                };
                Ok(BlochRow {
                    m,
                    temperature: t,
                    k,
                    rx: r.x,
                    ry: r.y,
                })
            })
            .collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRow {
    pub m: f64,
    pub temperature: f64,
    pub node: NodeRecord,
}

/// Nodes of the holonomy trace over `turns` turns for every `(m, T)`.
pub fn nodes(
    ms: &[f64],
    ts: &[f64],
    turns: u32,
    density: usize,
    exec: Execution,
) -> Result<Vec<NodeRow>> {
    let cells: Vec<(f64, f64)> = ms
        .iter()
        .flat_map(|&m| ts.iter().map(move |&t| (m, t)))
        .collect();
    collect(exec.map(&cells, |&(m, t)| {
        let params = ChainParams::new(m, t)?;
        Ok(uhlmann::find_nodes(&params, turns, density)?
            .into_iter()
            .map(|node| NodeRow {
                m,
                temperature: t,
                node,
            })
            .collect())
    }))
}

/// Closed-curve nodes of the flat band: one row per branch `(n1, n2)` with
/// `n1 ≤ max_turns`.
pub fn closed_curve_nodes(max_turns: u32) -> Result<Vec<CriticalTemperature>> {
    uhlmann::critical_temperatures_for_m(0.0, max_turns)
}

/// Critical temperatures of every branch up to `max_turns` turns for each `m`.
pub fn critical_temperatures(
    ms: &[f64],
    max_turns: u32,
    exec: Execution,
) -> Result<Vec<CriticalTemperature>> {
    collect(exec.map(ms, |&m| uhlmann::critical_temperatures_for_m(m, max_turns)))
}

/// Both phases of the closed curve at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub m: f64,
    pub temperature: f64,
    pub turns: u32,
    pub uhlmann: PhaseVerdict,
    pub interferometric: PhaseVerdict,
}

/// Geometric conditions (critical endpoints, centre passages, zero
/// temperature for the Uhlmann bundle) give undefined verdicts; numerical
/// failures are errors.
pub fn phase_point(params: &ChainParams, turns: u32, density: usize) -> Result<PhasePoint> {
    let uhlmann = match uhlmann::uhlmann_phase_factor_with_density(params, turns, density) {
        Ok(sign) => PhaseVerdict::from_sign(Invariant::Uhlmann, sign),
        Err(
            e @ (Error::BundleUndefined { .. }
            | Error::CriticalEndpoint { .. }
            | Error::DegenerateNode { .. }),
        ) => PhaseVerdict::undefined(Invariant::Uhlmann, e.to_string()),
        Err(e) => return Err(e),
    };
    let kind = if params.temperature > 0.0 {
        Invariant::Interferometric
    } else {
        Invariant::Berry
    };
    let interferometric = match ClosedCurve::from_chain(params, turns, density)
        .and_then(|c| interferometric::interferometric_phase(&c))
    {
        Ok(r) => PhaseVerdict::defined(kind, r.gamma),
        Err(e @ Error::PhaseUndefined(_)) => PhaseVerdict::undefined(kind, e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(PhasePoint {
        m: params.m,
        temperature: params.temperature,
        turns,
        uhlmann,
        interferometric,
    })
}

/// `phase_point` over a grid of `(m, T)`.
pub fn phase_grid(
    ms: &[f64],
    ts: &[f64],
    turns: u32,
    density: usize,
    exec: Execution,
) -> Result<Vec<PhasePoint>> {
    let cells: Vec<(f64, f64)> = ms
        .iter()
        .flat_map(|&m| ts.iter().map(move |&t| (m, t)))
        .collect();
    exec.map(&cells, |&(m, t)| {
        phase_point(&ChainParams::new(m, t)?, turns, density)
    })
    .into_iter()
    .collect()
}
