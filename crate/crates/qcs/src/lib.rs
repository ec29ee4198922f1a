//! Desk-scale simulator for multiparty quantum clock synchronization (QCS)
//! with supersinglet states.
//!
//! The library is organized around a dense state-vector / density-matrix
//! kernel ([`state`], [`density`]), angular-momentum and singlet machinery
//! ([`spin`]), the QCS protocol itself ([`protocol`]), Bell-pair
//! purification with Preskill-phase handling ([`purify`]), dephasing noise
//! ([`noise`]), the timing-error budget ([`timing`]) and optimization over
//! the singlet manifold ([`optimize`]).
//!
//! Conventions used throughout:
//! * Qubits are indexed from 1; qubit 1 (Alice) is the most significant bit
//!   of a computational basis index.
//! * `Z = |0><0| - |1><1|`, so bit value 0 carries Z eigenvalue +1.
//! * All stochastic operations take an explicit seedable generator.

pub mod density;
pub mod error;
pub mod noise;
pub mod optimize;
pub mod output;
pub mod protocol;
pub mod purify;
pub mod rng;
pub mod spin;
pub mod state;
pub mod timing;

pub use error::{QcsError, Result};

/// Tolerance for algebraic identities.
pub const TOL: f64 = 1e-10;
/// Tolerance for eigenvalue positivity of floating-point spectra.
pub const EIG_TOL: f64 = 1e-9;
/// Singular-value cutoff for numeric null-space extraction.
pub const SVD_CUT: f64 = 1e-8;
/// Hard cap on the number of qubits in the dense representation.
pub const MAX_QUBITS: usize = 12;
