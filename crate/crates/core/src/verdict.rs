//! Phase values reported to callers, together with which invariant produced
//! them.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// Sign of the Uhlmann holonomy trace at the end of the curve.
    Uhlmann,
    /// Interferometric phase of the closed thermal curve.
    Interferometric,
    /// Berry phase of the `T = 0` ground-state curve.
    Berry,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::Uhlmann => "uhlmann",
            Invariant::Interferometric => "interferometric",
            Invariant::Berry => "berry",
        })
    }
}

/// A geometric phase in `{0, π}`, or undefined with a reason.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVerdict {
    pub invariant: Invariant,
    pub phase: Option<f64>,
    pub reason: Option<String>,
}

impl PhaseVerdict {
    pub fn defined(invariant: Invariant, phase: f64) -> Self {
        Self {
            invariant,
            phase: Some(phase),
            reason: None,
        }
    }

    pub fn undefined(invariant: Invariant, reason: impl Into<String>) -> Self {
        Self {
            invariant,
            phase: None,
            reason: Some(reason.into()),
        }
    }

    /// Verdict for a ±1 phase factor.
    pub fn from_sign(invariant: Invariant, sign: i8) -> Self {
        Self::defined(invariant, if sign < 0 { PI } else { 0.0 })
    }

    /// `e^{iγ}` rounded to ±1, when defined.
    pub fn factor(&self) -> Option<i8> {
        self.phase.map(|g| if g.cos() < 0.0 { -1 } else { 1 })
    }
}
