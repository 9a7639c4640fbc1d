//! Uhlmann parallel transport along the equatorial Gibbs curves.
//!
//! For equatorial qubit states the Uhlmann connection evaluated on the
//! square-root lift is abelian, `𝒜 = (i/2) φ' (√p₁ - √p₂)² diag(-1, 1)`, so
//! the transported lift is `ψ∥(k) = √ρ(k) U(k)` with
//! `U(k) = diag(e^{iA}, e^{-iA})` and
//!
//! `A(k) = ½ ∫₀ᵏ φ'(1 - x) dk`, `x = sech(Δ_k/2T)`.
//!
//! The sign of the real holonomy trace `Tr(ψ∥(0)† ψ∥(k))` is the Uhlmann
//! phase factor; it flips at every simple zero (node) of the trace.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::bloch::{ComplexMat2, Ket, Purification};
use crate::error::{Error, Result};
use crate::kitaev::{self, ChainParams};
use crate::numerics::{self, QuadratureSpec, RootSpec};

/// Grid points per Brillouin-zone turn used to bracket nodes.
pub const NODE_GRID_DENSITY: usize = 4096;
/// `|trace|` below which the closing point of the curve counts as a node.
pub const ENDPOINT_TOL: f64 = 1e-9;
/// Node positions are refined to this width in `k`.
pub const NODE_K_TOL: f64 = 1e-10;
/// Grid minima of `|trace|` below this are examined as possible double roots.
const DOUBLE_ROOT_SCAN: f64 = 1e-5;
/// A refined minimum of `|trace|` below this is reported as a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-9;
/// Distance in `k` within which a node is identified with a turn boundary.
const TURN_END_TOL: f64 = 1e-7;

/// Temperature window searched for critical temperatures.
pub const T_SEARCH_MIN: f64 = 1e-3;
pub const T_SEARCH_MAX: f64 = 1e3;
/// Log-spaced scan points over the search window.
const T_SCAN_POINTS: usize = 240;

fn require_mixed(params: &ChainParams) -> Result<()> {
    if params.temperature > 0.0 {
        Ok(())
    } else {
        Err(Error::BundleUndefined { p_min: 0.0 })
    }
}

/// Purity data of `ρ(k)`: `x = sech(Δ_k/2T) = 2√(p₁p₂)` together with
/// `√p₁ ± √p₂ = √(1 ± x)`.
#[derive(Debug, Clone, Copy)]
struct Purity {
    x: f64,
    s_plus: f64,
    s_minus: f64,
}

fn purity(params: &ChainParams, k: f64) -> Purity {
    let z = kitaev::band_gap(params, k) / (2.0 * params.temperature);
    let x = numerics::sech(z);
    Purity {
        x,
        s_plus: (1.0 + x).sqrt(),
        s_minus: numerics::one_minus_sech(z).sqrt(),
    }
}

/// `x = sech(Δ_k/2T)`.
pub fn mixedness(params: &ChainParams, k: f64) -> Result<f64> {
    require_mixed(params)?;
    Ok(purity(params, k).x)
}

/// `dA/dk = ½ φ'(k) (√p₁ - √p₂)² = ½ φ'(k) (1 - x)`.
pub fn connection_angle_rate(params: &ChainParams, k: f64) -> Result<f64> {
    require_mixed(params)?;
    Ok(rate(params, k))
}

fn rate(params: &ChainParams, k: f64) -> f64 {
    let z = kitaev::band_gap(params, k) / (2.0 * params.temperature);
    0.5 * kitaev::polar_angle_rate(params, k) * numerics::one_minus_sech(z)
}

/// `A(k_end) = ∫₀^{k_end} dA/dk`, by adaptive Simpson split at multiples of
/// π (where the integrand steepens as `m → 1`).
pub fn accumulate_angle(params: &ChainParams, k_end: f64, spec: &QuadratureSpec) -> Result<f64> {
    require_mixed(params)?;
    if !(k_end >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "k_end = {k_end} must be >= 0"
        )));
    }
    if k_end == 0.0 {
        return Ok(0.0);
    }
    let pieces = (k_end / PI).ceil() as usize;
    let mut total = 0.0;
    for j in 0..pieces {
        let a = j as f64 * PI;
        let b = ((j + 1) as f64 * PI).min(k_end);
        if b <= a {
            continue;
        }
        let tol = spec.abs_tol * (b - a) / k_end;
        total += numerics::integrate(
            |k| rate(params, k),
            a,
            b,
            &QuadratureSpec {
                abs_tol: tol,
                ..*spec
            },
        )?;
    }
    Ok(total)
}

fn lift_matrix(pk: &Purity, phi: f64, angle: f64) -> ComplexMat2 {
    let half = 0.5;
    ComplexMat2::new(
        C64::from_polar(half * pk.s_plus, angle),
        C64::from_polar(half * pk.s_minus, -(phi + angle)),
        C64::from_polar(half * pk.s_minus, phi + angle),
        C64::from_polar(half * pk.s_plus, -angle),
    )
}

fn trace_value(p0: &Purity, pk: &Purity, phi: f64, angle: f64) -> f64 {
    0.5 * (p0.s_plus * pk.s_plus * angle.cos() + p0.s_minus * pk.s_minus * (phi + angle).cos())
}

// φ only enters through the (√p₁ - √p₂) coefficient, which vanishes where
// the gap closes and φ is undefined.
fn angle_or_zero(params: &ChainParams, pk: &Purity, k: f64) -> Result<f64> {
    match kitaev::polar_angle(params, k) {
        Ok(phi) => Ok(phi),
        Err(Error::UndefinedAngle { .. }) if pk.s_minus < 1e-6 => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// The parallel lift `ψ∥(k) = √ρ(k) U(k)`.
pub fn parallel_lift(params: &ChainParams, k: f64) -> Result<Purification> {
    let angle = accumulate_angle(params, k, &QuadratureSpec::default())?;
    let pk = purity(params, k);
    let phi = angle_or_zero(params, &pk, k)?;
    Ok(Purification::new(lift_matrix(&pk, phi, angle)))
}

/// `Tr(ψ∥(0)† ψ∥(k))`, real for equatorial curves:
///
/// `½[(√p₁⁰+√p₂⁰)(√p₁+√p₂) cos A + (√p₁⁰-√p₂⁰)(√p₁-√p₂) cos(φ + A)]`.
pub fn holonomy_trace(params: &ChainParams, k: f64) -> Result<f64> {
    let angle = accumulate_angle(params, k, &QuadratureSpec::default())?;
    let pk = purity(params, k);
    let phi = angle_or_zero(params, &pk, k)?;
    Ok(trace_value(&purity(params, 0.0), &pk, phi, angle))
}

/// The qubit form of the Uhlmann connection on the square-root lift,
/// `(√p₁ - √p₂)² (|u₁⟩⟨u₁|u̇₂⟩⟨u₂| + |u₂⟩⟨u₂|u̇₁⟩⟨u₁|)`, from an eigenbasis and
/// its derivative along the curve.
pub fn qubit_connection(p1: f64, p2: f64, u1: &Ket, u2: &Ket, du1: &Ket, du2: &Ket) -> ComplexMat2 {
    let w = (p1.sqrt() - p2.sqrt()).powi(2);
    let a = ComplexMat2::outer(u1, u2).scale(u1.inner(du2));
    let b = ComplexMat2::outer(u2, u1).scale(u2.inner(du1));
    (a + b).scale(C64::from(w))
}

/// Transport along `[0, k_max]` with `A` tabulated on a uniform grid, so
/// that repeated evaluation of `A`, the trace or the lift only integrates
/// within one cell.
#[derive(Debug, Clone)]
pub struct Transport {
    params: ChainParams,
    k_max: f64,
    step: f64,
    angles: Vec<f64>,
    cell_spec: QuadratureSpec,
    start: Purity,
}

/// Value of the transport at one wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportState {
    pub k: f64,
    /// Accumulated angle `A(k)`.
    pub angle: f64,
    pub trace_value: f64,
    /// Sign of the trace, `0` at a node.
    pub sign: i8,
}

impl Transport {
    /// Tabulates `A` on `cells` intervals of `[0, k_max]`. The quadrature
    /// tolerance is shared between cells so the accumulated angle stays
    /// within `spec.abs_tol` overall.
    pub fn new(
        params: &ChainParams,
        k_max: f64,
        cells: usize,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        require_mixed(params)?;
        if !(k_max > 0.0) || cells == 0 {
            return Err(Error::InvalidParams(format!(
                "transport needs k_max > 0 and cells > 0 (got {k_max}, {cells})"
            )));
        }
        let step = k_max / cells as f64;
        let cell_spec = QuadratureSpec {
            abs_tol: spec.abs_tol / cells as f64,
            ..*spec
        };
        let mut angles = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        angles.push(acc);
        for i in 0..cells {
            let a = i as f64 * step;
            let b = if i + 1 == cells {
                k_max
            } else {
                (i + 1) as f64 * step
            };
            acc += numerics::integrate(|k| rate(params, k), a, b, &cell_spec)?;
            angles.push(acc);
        }
        Ok(Self {
            params: *params,
            k_max,
            step,
            angles,
            cell_spec,
            start: purity(params, 0.0),
        })
    }

    /// Transport over `n_turns` Brillouin zones with `density` cells per turn.
    pub fn turns(params: &ChainParams, n_turns: u32, density: usize) -> Result<Self> {
        if n_turns == 0 {
            return Err(Error::InvalidParams("n_turns must be >= 1".into()));
        }
        Self::new(
            params,
            2.0 * PI * n_turns as f64,
            density * n_turns as usize,
            &QuadratureSpec::default(),
        )
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn cells(&self) -> usize {
        self.angles.len() - 1
    }

    /// Grid abscissa `i`.
    pub fn grid_k(&self, i: usize) -> f64 {
        if i == self.cells() {
            self.k_max
        } else {
            i as f64 * self.step
        }
    }

    fn check_range(&self, k: f64) -> Result<()> {
        if k < 0.0 || k > self.k_max * (1.0 + 1e-15) {
            return Err(Error::InvalidParams(format!(
                "k = {k} outside [0, {}]",
                self.k_max
            )));
        }
        Ok(())
    }

    /// `A(k)`.
    pub fn angle(&self, k: f64) -> Result<f64> {
        self.check_range(k)?;
        let i = ((k / self.step).floor() as usize).min(self.cells() - 1);
        let k0 = self.grid_k(i);
        if k == k0 {
            return Ok(self.angles[i]);
        }
        let extra = numerics::integrate(|q| rate(&self.params, q), k0, k, &self.cell_spec)?;
        Ok(self.angles[i] + extra)
    }

    fn angle_on_grid(&self, i: usize) -> f64 {
        self.angles[i]
    }

    fn trace_with_angle(&self, k: f64, angle: f64) -> Result<f64> {
        let pk = purity(&self.params, k);
        let phi = angle_or_zero(&self.params, &pk, k)?;
        Ok(trace_value(&self.start, &pk, phi, angle))
    }

    pub fn trace(&self, k: f64) -> Result<f64> {
        self.trace_with_angle(k, self.angle(k)?)
    }

    pub fn lift(&self, k: f64) -> Result<Purification> {
        let angle = self.angle(k)?;
        let pk = purity(&self.params, k);
        let phi = angle_or_zero(&self.params, &pk, k)?;
        Ok(Purification::new(lift_matrix(&pk, phi, angle)))
    }

    pub fn state(&self, k: f64) -> Result<TransportState> {
        let angle = self.angle(k)?;
        let trace_value = self.trace_with_angle(k, angle)?;
        Ok(TransportState {
            k,
            angle,
            trace_value,
            sign: sign(trace_value),
        })
    }

    /// Trace on every grid point.
    pub fn grid_traces(&self) -> Result<Vec<f64>> {
        (0..=self.cells())
            .map(|i| self.trace_with_angle(self.grid_k(i), self.angle_on_grid(i)))
            .collect()
    }

    /// All nodes of the trace on `(0, k_max]`.
    pub fn nodes(&self) -> Result<Vec<NodeRecord>> {
        let tr = self.grid_traces()?;
        let n = self.cells();
        let f = |k: f64| self.trace(k);
        let mut found: Vec<(f64, bool)> = Vec::new();
        for i in 0..n {
            let (a, b) = (tr[i], tr[i + 1]);
            if sign(a) * sign(b) < 0 {
                found.push((self.refine(i, &f)?, false));
            } else if sign(b) == 0 && i + 1 < n {
                let simple = sign(a) * sign(tr[i + 2]) < 0;
                found.push((self.grid_k(i + 1), !simple));
            }
        }
        for i in 1..n {
            let (l, c, r) = (tr[i - 1], tr[i], tr[i + 1]);
            let same = sign(l) == sign(c) && sign(c) == sign(r) && sign(c) != 0;
            if same && c.abs() < DOUBLE_ROOT_SCAN && c.abs() < l.abs() && c.abs() <= r.abs() {
                let (k_min, v_min) = self.minimize_abs(self.grid_k(i - 1), self.grid_k(i + 1))?;
                if v_min < DOUBLE_ROOT_TOL {
                    found.push((k_min, true));
                }
            }
        }
        let end_taken = found
            .iter()
            .any(|(k, _)| (self.k_max - k).abs() < TURN_END_TOL);
        if !end_taken && tr[n].abs() < ENDPOINT_TOL {
            found.push((self.k_max, false));
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        found
            .into_iter()
            .map(|(k, degenerate)| self.node_record(k, degenerate))
            .collect()
    }

    fn refine<F>(&self, cell: usize, f: &F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        // evaluation errors inside the bracket surface after the search
        let failure = std::cell::Cell::new(None);
        let g = |k: f64| match f(k) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        };
        let spec = RootSpec::new(self.grid_k(cell), self.grid_k(cell + 1)).with_tol(NODE_K_TOL);
        let root = numerics::find_root(g, &spec)?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(root),
        }
    }

    fn minimize_abs(&self, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let g = |k: f64| self.trace(k).map(f64::abs);
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        let (mut gc, mut gd) = (g(c)?, g(d)?);
        while hi - lo > NODE_K_TOL {
            if gc < gd {
                hi = d;
                d = c;
                gd = gc;
                c = hi - inv_phi * (hi - lo);
                gc = g(c)?;
            } else {
                lo = c;
                c = d;
                gc = gd;
                d = lo + inv_phi * (hi - lo);
                gd = g(d)?;
            }
        }
        let k = 0.5 * (lo + hi);
        Ok((k, g(k)?))
    }

    fn node_record(&self, k: f64, degenerate: bool) -> Result<NodeRecord> {
        let turns = k / (2.0 * PI);
        let nearest = turns.round();
        let at_turn_end = nearest >= 1.0 && (k - 2.0 * PI * nearest).abs() < TURN_END_TOL;
        let turn = if at_turn_end {
            nearest as u32
        } else {
            turns.ceil().max(1.0) as u32
        };
        let pk = purity(&self.params, k);
        Ok(NodeRecord {
            k_node: k,
            turn,
            x_at_node: pk.x,
            phi_at_node: angle_or_zero(&self.params, &pk, k)?,
            closed_curve: at_turn_end,
            degenerate,
        })
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// A zero of the holonomy trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRecord {
    pub k_node: f64,
    /// Brillouin-zone turn containing the node, counting from 1; a node on
    /// `k = 2πn` belongs to turn `n`.
    pub turn: u32,
    /// `sech(Δ_k/2T)` at the node.
    pub x_at_node: f64,
    pub phi_at_node: f64,
    /// The node sits on a turn boundary `k = 2πn`, where the curve closes.
    pub closed_curve: bool,
    /// The trace touches zero without changing sign.
    pub degenerate: bool,
}

/// Nodes of the holonomy trace on `(0, 2π n_turns]`, bracketed on
/// `grid_density` points per turn.
pub fn find_nodes(
    params: &ChainParams,
    n_turns: u32,
    grid_density: usize,
) -> Result<Vec<NodeRecord>> {
    Transport::turns(params, n_turns, grid_density)?.nodes()
}

/// The Uhlmann phase factor `±1` after `n_turns` turns: `(-1)^(nodes)`.
///
/// A node on the closing point of the curve (the curve sits exactly at a
/// critical temperature) or a double root makes the factor undefined.
pub fn uhlmann_phase_factor(params: &ChainParams, n_turns: u32) -> Result<i8> {
    uhlmann_phase_factor_with_density(params, n_turns, NODE_GRID_DENSITY)
}

pub fn uhlmann_phase_factor_with_density(
    params: &ChainParams,
    n_turns: u32,
    density: usize,
) -> Result<i8> {
    let transport = Transport::turns(params, n_turns, density)?;
    let nodes = transport.nodes()?;
    if let Some(n) = nodes.iter().find(|n| n.degenerate) {
        return Err(Error::DegenerateNode { k: n.k_node });
    }
    if let Some(n) = nodes
        .iter()
        .find(|n| (transport.k_max() - n.k_node).abs() < TURN_END_TOL)
    {
        return Err(Error::CriticalEndpoint { k: n.k_node });
    }
    Ok(if nodes.len() % 2 == 0 { 1 } else { -1 })
}

/// A temperature at which the closed curve traversed `n1` times has a node
/// exactly at its end, on branch `n2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalTemperature {
    pub n1: u32,
    pub n2: u32,
    pub m: f64,
    pub temperature: f64,
}

impl CriticalTemperature {
    /// Flat-band mixedness at this temperature, `sech(1/T)`.
    pub fn flat_band_x(&self) -> f64 {
        numerics::sech(1.0 / self.temperature)
    }
}

/// `A(2π)` for one closed turn at temperature `t`.
pub fn closed_curve_angle(m: f64, t: f64) -> Result<f64> {
    accumulate_angle(
        &ChainParams::new(m, t)?,
        2.0 * PI,
        &QuadratureSpec::default(),
    )
}

// labelled so that the flat band closes branch (n1, n2) at
// x = (2(n1 - n2) - 1)/(2 n1)
fn branch_target(n2: u32) -> f64 {
    (2.0 * n2 as f64 + 1.0) * 0.5 * PI
}

fn check_branch(m: f64, n1: u32, n2: u32) -> Result<()> {
    if n1 == 0 || n2 >= n1 {
        return Err(Error::InvalidParams(format!(
            "need n1 >= 1 and 0 <= n2 < n1 (got n1 = {n1}, n2 = {n2})"
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "critical temperatures need m >= 0 (got {m})"
        )));
    }
    Ok(())
}

struct AngleScan {
    temps: Vec<f64>,
    angles: Vec<f64>,
}

fn scan_angles(m: f64) -> Result<AngleScan> {
    let temps = numerics::logspace(T_SEARCH_MIN, T_SEARCH_MAX, T_SCAN_POINTS);
    let angles = temps
        .iter()
        .map(|&t| closed_curve_angle(m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(AngleScan { temps, angles })
}

fn solve_branch(m: f64, n1: u32, n2: u32, scan: &AngleScan) -> Result<Vec<CriticalTemperature>> {
    let target = branch_target(n2);
    let g: Vec<f64> = scan.angles.iter().map(|a| n1 as f64 * a - target).collect();
    let mut out = Vec::new();
    for i in 0..g.len() - 1 {
        if g[i] == 0.0 {
            out.push(scan.temps[i]);
        } else if g[i] * g[i + 1] < 0.0 {
            let failure = std::cell::Cell::new(None);
            let f = |t: f64| match closed_curve_angle(m, t) {
                Ok(a) => n1 as f64 * a - target,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            };
            let t = numerics::find_root(f, &RootSpec::new(scan.temps[i], scan.temps[i + 1]))?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            out.push(t);
        }
    }
    Ok(out
        .into_iter()
        .map(|temperature| CriticalTemperature {
            n1,
            n2,
            m,
            temperature,
        })
        .collect())
}

/// Every temperature in `(T_SEARCH_MIN, T_SEARCH_MAX)` solving
/// `n1·A(2π; T) = (2 n2 + 1)π/2`, ascending. On the flat band branch
/// `(n1, n2)` sits at `sech(1/T) = (2(n1 - n2) - 1)/(2 n1)`.
///
/// For `m > 1` the closed-turn angle rises from and returns to zero, so a
/// branch can be crossed twice.
pub fn critical_temperatures(m: f64, n1: u32, n2: u32) -> Result<Vec<CriticalTemperature>> {
    check_branch(m, n1, n2)?;
    solve_branch(m, n1, n2, &scan_angles(m)?)
}

/// The lowest critical temperature of branch `(n1, n2)`, or `None` when the
/// branch is not reached inside the search window.
pub fn critical_temperature(m: f64, n1: u32, n2: u32) -> Result<Option<CriticalTemperature>> {
    Ok(critical_temperatures(m, n1, n2)?.into_iter().next())
}

/// All branches `n1 = 1..=max_turns`, `n2 = 0..n1` at one `m`, sharing one
/// temperature scan.
pub fn critical_temperatures_for_m(m: f64, max_turns: u32) -> Result<Vec<CriticalTemperature>> {
    check_branch(m, max_turns.max(1), 0)?;
    let scan = scan_angles(m)?;
    let mut out = Vec::new();
    for n1 in 1..=max_turns {
        for n2 in 0..n1 {
            out.extend(solve_branch(m, n1, n2, &scan)?);
        }
    }
    Ok(out)
}
