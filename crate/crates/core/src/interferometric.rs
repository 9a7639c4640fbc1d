//! The interferometric mixed-state phase of closed qubit curves.
//!
//! Along a curve with non-degenerate spectrum the eigenvectors are shifted
//! so that they develop in parallel, `⟨u_i|u̇_i⟩ = 0`, and the phase is
//!
//! `γ = arg Σ_i √(p_i(0) p_i(κ)) ⟨u_i(0)|ũ_i(κ)⟩`.
//!
//! For a closed qubit curve the parallel eigenvectors return with phases
//! `e^{±iθ₁}`, `θ₁` half the solid angle enclosed by `r/|r|`, giving
//! `γ = arg(cos θ₁ + i R₀ sin θ₁)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::bloch::{BlochVector, Ket, QubitState};
use crate::error::{Error, Result};
use crate::kitaev::{self, ChainParams};
use crate::numerics;

/// Samples per Brillouin-zone turn for curves built from the chain.
pub const CURVE_DENSITY: usize = 4096;
/// Curves closer than this to the centre of the Bloch ball are rejected.
pub const CENTER_MARGIN: f64 = 1e-6;
/// Closed curves must end on their starting state to this accuracy.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Angular width of the node ray.
pub const NODE_ANGLE_TOL: f64 = 1e-9;
/// `|r_z|/|r|` below which a sample counts as equatorial.
const EQUATORIAL_TOL: f64 = 1e-12;
/// Overlap sums smaller than this have no phase.
const OVERLAP_FLOOR: f64 = 1e-12;

/// One point of a sampled curve of density operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub k: f64,
    pub state: QubitState,
}

/// A sampled curve `k ↦ ρ(k)` on `[0, κ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    samples: Vec<CurveSample>,
    closed: bool,
}

impl ClosedCurve {
    /// At least two samples with strictly increasing `k`. When `closed` is
    /// set the last state must equal the first.
    pub fn new(samples: Vec<CurveSample>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParams(
                "a curve needs at least two samples".into(),
            ));
        }
        if samples.windows(2).any(|w| !(w[1].k > w[0].k)) {
            return Err(Error::InvalidParams(
                "curve parameter must increase strictly".into(),
            ));
        }
        if closed {
            let gap = samples[0]
                .state
                .to_bloch()
                .distance(&samples[samples.len() - 1].state.to_bloch());
            if gap > CLOSURE_TOL {
                return Err(Error::InvalidParams(format!(
                    "curve flagged closed but ends {gap:e} away from its start"
                )));
            }
        }
        Ok(Self { samples, closed })
    }

    /// Closed curve through the given Bloch vectors, parametrised by index.
    pub fn from_bloch_points(points: &[BlochVector]) -> Result<Self> {
        let samples = points
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                Ok(CurveSample {
                    k: i as f64,
                    state: QubitState::from_bloch(v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, true)
    }

    /// The chain's state over `n_turns` Brillouin zones, `density` samples
    /// per turn. A pure-state curve through the gap closing has no phase.
    pub fn from_chain(params: &ChainParams, n_turns: u32, density: usize) -> Result<Self> {
        if n_turns == 0 || density < 3 {
            return Err(Error::InvalidParams(
                "need n_turns >= 1 and density >= 3".into(),
            ));
        }
        let ks = numerics::linspace(0.0, 2.0 * PI * n_turns as f64, density * n_turns as usize);
        let samples = ks
            .into_iter()
            .map(|k| match kitaev::state(params, k) {
                Ok(state) => Ok(CurveSample { k, state }),
                Err(Error::GapClosed { k }) => Err(Error::PhaseUndefined(format!(
                    "curve passes the maximally mixed state at k = {k}"
                ))),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, true)
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn bloch_points(&self) -> Vec<BlochVector> {
        self.samples.iter().map(|s| s.state.to_bloch()).collect()
    }

    /// Bloch norm at the start.
    pub fn start_radius(&self) -> f64 {
        self.samples[0].state.to_bloch().norm()
    }

    /// All samples (and hence the whole polygon) lie in the `xy` plane.
    pub fn is_equatorial(&self) -> bool {
        self.bloch_points()
            .iter()
            .all(|r| r.z.abs() <= EQUATORIAL_TOL * r.norm())
    }

    /// Refuses curves that come within `CENTER_MARGIN` of the maximally
    /// mixed state, at a sample or between two samples.
    pub fn check_admissible(&self) -> Result<()> {
        let pts = self.bloch_points();
        for (s, r) in self.samples.iter().zip(&pts) {
            if r.norm() < CENTER_MARGIN {
                return Err(Error::PhaseUndefined(format!(
                    "curve passes the maximally mixed state at k = {} (|r| = {:e})",
                    s.k,
                    r.norm()
                )));
            }
        }
        for (i, w) in pts.windows(2).enumerate() {
            let d = segment_distance_to_origin(&w[0], &w[1]);
            if d < CENTER_MARGIN {
                return Err(Error::PhaseUndefined(format!(
                    "curve passes the maximally mixed state between k = {} and k = {}",
                    self.samples[i].k,
                    self.samples[i + 1].k
                )));
            }
        }
        Ok(())
    }

    fn require_closed(&self) -> Result<()> {
        if self.closed {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "operation needs a closed curve".into(),
            ))
        }
    }
}

fn segment_distance_to_origin(a: &BlochVector, b: &BlochVector) -> f64 {
    let d = BlochVector::new(b.x - a.x, b.y - a.y, b.z - a.z);
    let dd = d.dot(&d);
    if dd == 0.0 {
        return a.norm();
    }
    let t = (-a.dot(&d) / dd).clamp(0.0, 1.0);
    BlochVector::new(a.x + t * d.x, a.y + t * d.y, a.z + t * d.z).norm()
}

/// Winding of an equatorial curve about the `z` axis, from its unwrapped
/// azimuth.
fn equatorial_winding(points: &[BlochVector]) -> Result<i64> {
    let mut total = 0.0;
    for (i, w) in points.windows(2).enumerate() {
        let step = numerics::principal_angle(w[1].y.atan2(w[1].x) - w[0].y.atan2(w[0].x));
        if step.abs() > 0.9 * PI {
            return Err(numerics::NumericError::Undersampled { index: i, step }.into());
        }
        total += step;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Signed solid angle (counter-clockwise positive about the outward normal)
/// of the geodesic polygon through the unit vectors `dirs`, closed back to
/// its start, by summing triangles against a fixed apex.
fn polygon_solid_angle(dirs: &[BlochVector]) -> f64 {
    let apex = reference_direction(dirs);
    let mut total = 0.0;
    let n = dirs.len();
    for i in 0..n {
        let a = &dirs[i];
        let b = &dirs[(i + 1) % n];
        let num = apex.dot(&a.cross(b));
        let den = 1.0 + apex.dot(a) + a.dot(b) + b.dot(&apex);
        total += 2.0 * num.atan2(den);
    }
    total
}

// the triangle formula is singular when the apex is antipodal to a vertex
fn reference_direction(dirs: &[BlochVector]) -> BlochVector {
    let mut candidates = vec![
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
    ];
    let sum = dirs.iter().fold(BlochVector::ORIGIN, |acc, d| {
        BlochVector::new(acc.x + d.x, acc.y + d.y, acc.z + d.z)
    });
    if let Some(mean) = sum.unit() {
        candidates.push(mean);
    }
    let clearance = |c: &BlochVector| {
        dirs.iter()
            .map(|d| BlochVector::new(c.x + d.x, c.y + d.y, c.z + d.z).norm())
            .fold(f64::INFINITY, f64::min)
    };
    candidates
        .into_iter()
        .map(|c| (clearance(&c), c))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
        .expect("candidate list is non-empty")
}

fn unit_directions(curve: &ClosedCurve) -> Vec<BlochVector> {
    let mut dirs: Vec<BlochVector> = curve
        .bloch_points()
        .iter()
        .filter_map(BlochVector::unit)
        .collect();
    // the closing sample repeats the first
    dirs.pop();
    dirs
}

/// `θ₁`, the phase returned by the parallel-transported leading eigenvector,
/// `e^{iθ₁} = ⟨u₁(0)|ũ₁(κ)⟩`. Its magnitude is half the solid angle enclosed
/// by `r/|r|`; for equatorial curves it is `π·d` with `d` the winding number.
pub fn solid_angle_phase(curve: &ClosedCurve) -> Result<f64> {
    curve.require_closed()?;
    curve.check_admissible()?;
    if curve.is_equatorial() {
        return Ok(PI * equatorial_winding(&curve.bloch_points())? as f64);
    }
    Ok(-0.5 * polygon_solid_angle(&unit_directions(curve)))
}

/// Closed-curve interferometric phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometricResult {
    pub theta1: f64,
    /// Bloch norm of the initial state, `p₁(0) - p₂(0)`.
    pub r0: f64,
    /// `arg(cos θ₁ + i R₀ sin θ₁)` in `(-π, π]`.
    pub gamma: f64,
}

impl InterferometricResult {
    /// Phase picked up by the second eigenvector, `θ₂ = -θ₁`.
    pub fn theta2(&self) -> f64 {
        -self.theta1
    }
}

pub fn interferometric_phase(curve: &ClosedCurve) -> Result<InterferometricResult> {
    let theta1 = solid_angle_phase(curve)?;
    let r0 = curve.start_radius();
    let (re, im) = if curve.is_equatorial() {
        // θ₁ is an exact multiple of π here
        let d = (theta1 / PI).round() as i64;
        (if d % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    } else {
        (theta1.cos(), r0 * theta1.sin())
    };
    Ok(InterferometricResult {
        theta1,
        r0,
        gamma: numerics::principal_angle(im.atan2(re)),
    })
}

/// Interferometric phase of the chain's closed curve over `n_turns` turns.
pub fn chain_phase(params: &ChainParams, n_turns: u32) -> Result<InterferometricResult> {
    interferometric_phase(&ClosedCurve::from_chain(params, n_turns, CURVE_DENSITY)?)
}

/// Shifts the phases of a sampled eigenvector path so that consecutive
/// overlaps are real and positive, the discrete form of `⟨u|u̇⟩ = 0`.
pub fn gauge_fix(path: &[Ket]) -> Vec<Ket> {
    let mut out = Vec::with_capacity(path.len());
    let mut alpha = 0.0;
    for (i, u) in path.iter().enumerate() {
        if i > 0 {
            alpha += path[i - 1].inner(u).arg();
        }
        out.push(u.scale(C64::from_polar(1.0, -alpha)));
    }
    out
}

/// `arg⟨u(0)|ũ(end)⟩` of the parallel-transported path.
pub fn transported_phase(path: &[Ket]) -> f64 {
    let fixed = gauge_fix(path);
    path[0].inner(&fixed[fixed.len() - 1]).arg()
}

struct ParallelFrame {
    p: Vec<(f64, f64)>,
    u1: Vec<Ket>,
    u2: Vec<Ket>,
}

fn parallel_frame(curve: &ClosedCurve) -> Result<ParallelFrame> {
    curve.check_admissible()?;
    let spectra: Vec<_> = curve.samples.iter().map(|s| s.state.spectral()).collect();
    if let Some((s, _)) = curve
        .samples
        .iter()
        .zip(&spectra)
        .find(|(_, sp)| sp.degenerate)
    {
        return Err(Error::PhaseUndefined(format!(
            "degenerate spectrum at k = {}",
            s.k
        )));
    }
    let p = spectra.iter().map(|sp| (sp.p1, sp.p2)).collect();
    let u1 = gauge_fix(&spectra.iter().map(|sp| sp.u1).collect::<Vec<_>>());
    let u2 = gauge_fix(&spectra.iter().map(|sp| sp.u2).collect::<Vec<_>>());
    Ok(ParallelFrame { p, u1, u2 })
}

impl ParallelFrame {
    fn overlap_sum(&self, j: usize) -> C64 {
        let (p1, p2) = self.p[0];
        let (q1, q2) = self.p[j];
        self.u1[0].inner(&self.u1[j]) * (p1 * q1).sqrt()
            + self.u2[0].inner(&self.u2[j]) * (p2 * q2).sqrt()
    }
}

/// `γ(κ)` evaluated directly from the parallel-transported eigenvectors.
pub fn phase_from_overlaps(curve: &ClosedCurve) -> Result<f64> {
    let frame = parallel_frame(curve)?;
    let sum = frame.overlap_sum(curve.len() - 1);
    if sum.norm() < OVERLAP_FLOOR {
        return Err(Error::PhaseUndefined(
            "overlap vanishes at the curve end".into(),
        ));
    }
    Ok(numerics::principal_angle(sum.arg()))
}

/// `γ(k)` along the curve; `None` where the overlap vanishes (a node).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub k: f64,
    pub gamma: Option<f64>,
}

pub fn phase_profile(curve: &ClosedCurve) -> Result<Vec<ProfilePoint>> {
    let frame = parallel_frame(curve)?;
    Ok(curve
        .samples
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let sum = frame.overlap_sum(j);
            let gamma = (sum.norm() >= OVERLAP_FLOOR).then(|| numerics::principal_angle(sum.arg()));
            ProfilePoint { k: s.k, gamma }
        })
        .collect())
}

/// The radial segment `{-t·r(0) : t ∈ (0, 1]}` opposite the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRay {
    /// Unit vector along `-r(0)`.
    pub direction: BlochVector,
    /// `|r(0)|`.
    pub length: f64,
}

pub fn node_ray(start: &QubitState) -> Result<NodeRay> {
    let r = start.to_bloch();
    let direction = r
        .scaled(-1.0)
        .unit()
        .ok_or_else(|| Error::InvalidState("maximally mixed start has no node ray".into()))?;
    Ok(NodeRay {
        direction,
        length: r.norm(),
    })
}

impl NodeRay {
    pub fn is_node(&self, state: &QubitState) -> bool {
        let r = state.to_bloch();
        let len = r.norm();
        if len == 0.0 || len > self.length * (1.0 + 1e-12) {
            return false;
        }
        let cos = (r.dot(&self.direction) / len).clamp(-1.0, 1.0);
        let sin = r.cross(&self.direction).norm() / len;
        cos > 0.0 && sin.atan2(cos) < NODE_ANGLE_TOL
    }

    /// Number of times the equatorial projection of the curve crosses the
    /// ray.
    pub fn crossings(&self, curve: &ClosedCurve) -> usize {
        let base = self.direction.y.atan2(self.direction.x);
        let pts = curve.bloch_points();
        let rel: Vec<f64> = pts
            .iter()
            .map(|r| numerics::principal_angle(r.y.atan2(r.x) - base))
            .collect();
        let mut count = 0;
        for (i, w) in rel.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let through_ray = (a < 0.0) != (b < 0.0) && (a - b).abs() < PI;
            if !through_ray {
                continue;
            }
            // radius where the segment meets the ray's line
            let (p, q) = (&pts[i], &pts[i + 1]);
            let t = a / (a - b);
            let hit = BlochVector::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y), 0.0);
            if hit.norm() <= self.length * (1.0 + 1e-12) {
                count += 1;
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(radius: f64, turns: u32, n: usize, z: f64) -> ClosedCurve {
        let pts: Vec<BlochVector> = (0..=n * turns as usize)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                BlochVector::new(radius * a.cos(), radius * a.sin(), z)
            })
            .collect();
        ClosedCurve::from_bloch_points(&pts).unwrap()
    }

    #[test]
    fn equator_winding_one_and_two() {
        assert_eq!(solid_angle_phase(&circle(0.7, 1, 64, 0.0)).unwrap(), PI);
        assert_eq!(
            solid_angle_phase(&circle(0.7, 2, 64, 0.0)).unwrap(),
            2.0 * PI
        );
    }

    #[test]
    fn equatorial_gamma_is_parity() {
        assert_eq!(
            interferometric_phase(&circle(0.4, 1, 64, 0.0))
                .unwrap()
                .gamma,
            PI
        );
        assert_eq!(
            interferometric_phase(&circle(0.4, 2, 64, 0.0))
                .unwrap()
                .gamma,
            0.0
        );
    }

    #[test]
    fn latitude_circle_solid_angle() {
        // cone of half-angle β encloses 2π(1 - cos β)
        let (rho, z) = (0.3_f64, 0.4_f64);
        let cos_beta = z / rho.hypot(z);
        let theta = solid_angle_phase(&circle(rho, 1, 2048, z)).unwrap();
        let expected = -PI * (1.0 - cos_beta);
        assert!(
            (numerics::wrap_to_pi(theta - expected)).abs() < 1e-5,
            "{theta} vs {expected}"
        );
    }

    #[test]
    fn overlaps_match_closed_form_off_plane() {
        let c = circle(0.3, 1, 256, 0.4);
        let g1 = interferometric_phase(&c).unwrap().gamma;
        let g2 = phase_from_overlaps(&c).unwrap();
        assert!(numerics::wrap_to_pi(g1 - g2).abs() < 1e-10);
    }

    #[test]
    fn centre_passing_curve_is_rejected() {
        let pts = [
            BlochVector::new(0.5, 0.0, 0.0),
            BlochVector::new(0.0, 0.0, 0.0),
            BlochVector::new(-0.5, 0.0, 0.0),
            BlochVector::new(0.0, 0.5, 0.0),
            BlochVector::new(0.5, 0.0, 0.0),
        ];
        let c = ClosedCurve::from_bloch_points(&pts).unwrap();
        assert!(matches!(
            solid_angle_phase(&c),
            Err(Error::PhaseUndefined(_))
        ));
        assert!(matches!(
            phase_from_overlaps(&c),
            Err(Error::PhaseUndefined(_))
        ));
    }

    #[test]
    fn chain_phase_by_winding() {
        assert_eq!(
            chain_phase(&ChainParams::new(0.5, 0.5).unwrap(), 1)
                .unwrap()
                .gamma,
            PI
        );
        assert_eq!(
            chain_phase(&ChainParams::new(1.25, 0.5).unwrap(), 1)
                .unwrap()
                .gamma,
            0.0
        );
        assert_eq!(
            chain_phase(&ChainParams::new(0.5, 0.0).unwrap(), 1)
                .unwrap()
                .gamma,
            PI
        );
        assert!(chain_phase(&ChainParams::new(1.0, 0.5).unwrap(), 1).is_err());
        assert!(chain_phase(&ChainParams::new(1.0, 0.0).unwrap(), 1).is_err());
    }

    #[test]
    fn overlap_route_on_chain() {
        for m in [0.3, 0.7, 1.25] {
            let c = ClosedCurve::from_chain(&ChainParams::new(m, 0.5).unwrap(), 1, CURVE_DENSITY)
                .unwrap();
            let a = interferometric_phase(&c).unwrap().gamma;
            let b = phase_from_overlaps(&c).unwrap();
            assert!(
                numerics::wrap_to_pi(a - b).abs() < 1e-6,
                "m = {m}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn gauge_fix_removes_injected_phase() {
        let ks = numerics::linspace(0.0, 2.0 * PI, 512);
        let clean: Vec<Ket> = ks
            .iter()
            .map(|&k| {
                QubitState::from_bloch(BlochVector::new(0.6 * k.cos(), 0.6 * k.sin(), 0.2))
                    .unwrap()
                    .spectral()
                    .u1
            })
            .collect();
        let dirty: Vec<Ket> = clean
            .iter()
            .zip(&ks)
            .map(|(u, &k)| u.scale(C64::from_polar(1.0, 5.0 * k)))
            .collect();
        let a = gauge_fix(&clean);
        let b = gauge_fix(&dirty);
        for (x, y) in a.iter().zip(&b) {
            let d = (x.0[0] - y.0[0]).norm() + (x.0[1] - y.0[1]).norm();
            assert!(d < 1e-8);
        }
    }

    #[test]
    fn gauge_fix_keeps_parallel_path() {
        let path: Vec<Ket> = (0..5)
            .map(|i| Ket::new(C64::from(1.0), C64::from(0.1 * i as f64)).normalized())
            .collect();
        let fixed = gauge_fix(&path);
        for (a, b) in path.iter().zip(&fixed) {
            assert!((a.0[0] - b.0[0]).norm() + (a.0[1] - b.0[1]).norm() < 1e-15);
        }
    }

    #[test]
    fn node_ray_on_negative_x_axis() {
        let ray =
            node_ray(&QubitState::from_bloch(BlochVector::new(0.8, 0.0, 0.0)).unwrap()).unwrap();
        assert!((ray.direction.x + 1.0).abs() < 1e-15);
        assert!(ray.is_node(&QubitState::from_bloch(BlochVector::new(-0.3, 0.0, 0.0)).unwrap()));
        assert!(!ray.is_node(&QubitState::from_bloch(BlochVector::new(-0.3, 1e-6, 0.0)).unwrap()));
        assert!(!ray.is_node(&QubitState::from_bloch(BlochVector::new(0.3, 0.0, 0.0)).unwrap()));
        assert!(!ray.is_node(&QubitState::from_bloch(BlochVector::new(-0.9, 0.0, 0.0)).unwrap()));
    }

    #[test]
    fn ray_crossings_by_winding() {
        let one = circle(0.6, 1, 100, 0.0);
        let ray = node_ray(&one.samples()[0].state).unwrap();
        assert_eq!(ray.crossings(&one), 1);
        let east: Vec<BlochVector> = (0..=100)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 100.0;
                BlochVector::new(0.6 + 0.2 * a.cos() - 0.2, 0.2 * a.sin(), 0.0)
            })
            .collect();
        let east = ClosedCurve::from_bloch_points(&east).unwrap();
        let ray = node_ray(&east.samples()[0].state).unwrap();
        assert_eq!(ray.crossings(&east), 0);
        assert_eq!(interferometric_phase(&east).unwrap().gamma, 0.0);
    }
}
