//! Complex 2×2 algebra, Bloch vectors and qubit density operators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Slack allowed on trace, Hermiticity and Bloch norm when validating states.
pub const STATE_TOL: f64 = 1e-12;
/// Smallest eigenvalue for which a state counts as full rank.
pub const RANK_TOL: f64 = 1e-10;
/// Bloch norms below this are treated as the maximally mixed state.
pub const DEGENERACY_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major complex 2×2 matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMat2(pub [[C64; 2]; 2]);

impl fmt::Debug for ComplexMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

impl ComplexMat2 {
    pub const ZERO: Self = Self([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Self = Self([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Self::new(ZERO, -C64::i(), C64::i(), ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::diag(ONE, -ONE)
    }

    /// |a⟩⟨b|
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        let (a, b) = (a.0, b.0);
        Self::new(
            a[0] * b[0].conj(),
            a[0] * b[1].conj(),
            a[1] * b[0].conj(),
            a[1] * b[1].conj(),
        )
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self::new(
            m[0][0].conj(),
            m[1][0].conj(),
            m[0][1].conj(),
            m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Self::new(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let m = &self.0;
        Ket([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = *self - *other;
        d.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Pauli coefficients `(a, b)` with `M = a·𝟙 + b·σ`.
    pub fn pauli_decompose(&self) -> (C64, [C64; 3]) {
        let m = &self.0;
        let a = 0.5 * (m[0][0] + m[1][1]);
        let bx = 0.5 * (m[0][1] + m[1][0]);
        let by = 0.5 * C64::i() * (m[0][1] - m[1][0]);
        let bz = 0.5 * (m[0][0] - m[1][1]);
        (a, [bx, by, bz])
    }

    /// Matrix exponential via `exp(a + b·σ) = e^a (cosh s + sinh s / s · b·σ)`,
    /// `s² = b·b`.
    pub fn exp(&self) -> Self {
        let (a, b) = self.pauli_decompose();
        let s2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        let s = s2.sqrt();
        let (ch, shc) = if s.norm() < 1e-8 {
            // series to fourth order; |s|^6 below rounding
            (
                ONE + s2 / 2.0 + s2 * s2 / 24.0,
                ONE + s2 / 6.0 + s2 * s2 / 120.0,
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        let ea = a.exp();
        let sx = Self::sigma_x().scale(b[0]);
        let sy = Self::sigma_y().scale(b[1]);
        let sz = Self::sigma_z().scale(b[2]);
        (Self::IDENTITY.scale(ch) + (sx + sy + sz).scale(shc)).scale(ea)
    }
}

impl Add for ComplexMat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for ComplexMat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for ComplexMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for ComplexMat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Complex 2-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket(pub [C64; 2]);

impl Ket {
    pub fn new(a: C64, b: C64) -> Self {
        Self([a, b])
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, s: C64) -> Ket {
        Ket([s * self.0[0], s * self.0[1]])
    }

    pub fn normalized(&self) -> Ket {
        self.scale(C64::from(1.0 / self.norm()))
    }

    /// Rotates the global phase so the first component with modulus above
    /// `1e-14` is real and positive.
    pub fn phase_fixed(&self) -> Ket {
        match self.0.iter().find(|c| c.norm() > 1e-14) {
            Some(c) => self.scale(c.conj() / c.norm()),
            None => *self,
        }
    }
}

/// Real 3-vector in the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.x, s * self.y, s * self.z)
    }

    pub fn unit(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }

    pub fn distance(&self, o: &Self) -> f64 {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z).norm()
    }
}

/// A purification amplitude `ψ` with `ψψ† = ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Purification {
    pub psi: ComplexMat2,
}

impl Purification {
    pub fn new(psi: ComplexMat2) -> Self {
        Self { psi }
    }

    /// `ψψ†`
    pub fn projection(&self) -> ComplexMat2 {
        self.psi * self.psi.adjoint()
    }

    /// `Tr(self† other)`
    pub fn overlap(&self, other: &Purification) -> C64 {
        (self.psi.adjoint() * other.psi).trace()
    }
}

/// Qubit density operator with its cached spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    bloch: BlochVector,
    matrix: ComplexMat2,
    p1: f64,
    p2: f64,
    u1: Ket,
    u2: Ket,
}

/// Ordered eigen-decomposition of a [`QubitState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub p1: f64,
    pub p2: f64,
    pub u1: Ket,
    pub u2: Ket,
    /// Set when `p1 == p2` (maximally mixed); the eigenbasis is then arbitrary.
    pub degenerate: bool,
}

impl QubitState {
    /// `ρ = ½(𝟙 + v·σ)`.
    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        let r = v.norm();
        if !r.is_finite() || r > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch vector norm {r} exceeds 1"
            )));
        }
        let half = 0.5;
        let matrix = ComplexMat2::new(
            C64::new(half * (1.0 + v.z), 0.0),
            C64::new(half * v.x, -half * v.y),
            C64::new(half * v.x, half * v.y),
            C64::new(half * (1.0 - v.z), 0.0),
        );
        let rc = r.min(1.0);
        let p1 = 0.5 * (1.0 + rc);
        let p2 = 0.5 * (1.0 - rc);
        let (u1, u2) = eigenvectors(&v, r);
        Ok(Self {
            bloch: v,
            matrix,
            p1,
            p2,
            u1,
            u2,
        })
    }

    /// Validates a matrix as a density operator.
    pub fn from_matrix(m: ComplexMat2) -> Result<Self> {
        let herm = m.max_abs_diff(&m.adjoint());
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "matrix not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let c = 0.5 * (m.get(1, 0) + m.get(0, 1).conj());
        let v = BlochVector::new(2.0 * c.re, 2.0 * c.im, (m.get(0, 0) - m.get(1, 1)).re);
        Self::from_bloch(v)
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch(BlochVector::ORIGIN).expect("origin is a valid state")
    }

    pub fn to_bloch(&self) -> BlochVector {
        self.bloch
    }

    pub fn matrix(&self) -> &ComplexMat2 {
        &self.matrix
    }

    pub fn spectral(&self) -> Spectrum {
        Spectrum {
            p1: self.p1,
            p2: self.p2,
            u1: self.u1,
            u2: self.u2,
            degenerate: self.is_degenerate(),
        }
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        (self.p1, self.p2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.bloch.norm() < DEGENERACY_TOL
    }

    pub fn is_full_rank(&self) -> bool {
        self.p2 > RANK_TOL
    }

    /// The positive square root `√ρ`, the canonical point of the fibre.
    pub fn sqrt_lift(&self) -> Result<Purification> {
        if !self.is_full_rank() {
            return Err(Error::BundleUndefined { p_min: self.p2 });
        }
        let a = ComplexMat2::outer(&self.u1, &self.u1).scale(C64::from(self.p1.sqrt()));
        let b = ComplexMat2::outer(&self.u2, &self.u2).scale(C64::from(self.p2.sqrt()));
        Ok(Purification::new(a + b))
    }
}

fn eigenvectors(v: &BlochVector, r: f64) -> (Ket, Ket) {
    if r < DEGENERACY_TOL {
        return (Ket::new(ONE, ZERO), Ket::new(ZERO, ONE));
    }
    let n = v.scaled(1.0 / r);
    let w = C64::new(n.x, n.y);
    // +1 eigenvector of n·σ is ∝ (1 + n_z, n_x + i n_y) or (n_x - i n_y, 1 - n_z);
    // pick the better conditioned form.
    let up = if n.z >= 0.0 {
        Ket::new(C64::from(1.0 + n.z), w)
    } else {
        Ket::new(w.conj(), C64::from(1.0 - n.z))
    };
    let down = if n.z <= 0.0 {
        Ket::new(C64::from(1.0 - n.z), -w)
    } else {
        Ket::new(-w.conj(), C64::from(1.0 + n.z))
    };
    (
        up.normalized().phase_fixed(),
        down.normalized().phase_fixed(),
    )
}

/// Root fidelity `Tr√(√a b √a)`, via the qubit identity
/// `(Tr√X)² = Tr X + 2√det X` with `Tr X = Tr(ab)`, `det X = det a · det b`.
pub fn fidelity(a: &QubitState, b: &QubitState) -> f64 {
    let (ra, rb) = (a.to_bloch(), b.to_bloch());
    let tr_ab = 0.5 * (1.0 + ra.dot(&rb));
    let det_a = 0.25 * (1.0 - ra.dot(&ra)).max(0.0);
    let det_b = 0.25 * (1.0 - rb.dot(&rb)).max(0.0);
    (tr_ab + 2.0 * (det_a * det_b).sqrt())
        .max(0.0)
        .sqrt()
        .min(1.0)
}
