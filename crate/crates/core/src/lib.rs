//! Mixed-state geometric phases along the thermal Kitaev chain.
//!
//! The crate follows the Gibbs states `ρ(k)` of the chain across the
//! Brillouin zone and evaluates two geometric phases for that curve:
//!
//! * the Uhlmann phase, through the parallel lift of `ρ(k)` in its
//!   purification bundle, the real holonomy trace and the nodes where it
//!   changes sign ([`uhlmann`]);
//! * the interferometric phase, from parallel-transported eigenvectors
//!   and the solid angle enclosed by the normalised Bloch curve
//!   ([`interferometric`]).
//!
//! [`figures`] assembles the parameter sweeps exported by the command-line
//! tool. Sweeps run on rayon when the `parallel` feature is enabled (the
//! default) and sequentially otherwise; see [`exec`].

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod error;
pub mod exec;
pub mod figures;
pub mod interferometric;
pub mod kitaev;
pub mod numerics;
pub mod uhlmann;
pub mod verdict;

pub use bloch::{fidelity, BlochVector, ComplexMat2, Ket, Purification, QubitState, Spectrum};
pub use error::{Error, Result};
pub use exec::Execution;
pub use kitaev::ChainParams;
pub use verdict::{Invariant, PhaseVerdict};
