//! Entanglement harvesting between two smeared two-level detectors.
//!
//! The crate evaluates the excitation probabilities `L` and the nonlocal
//! term `M` of the perturbative joint detector state for three couplings
//! (linear scalar, second-derivative scalar, linearized gravity), builds the
//! density matrix and its negativity, and carries slow brute-force oracles
//! that integrate the full three-dimensional momentum integrals.
//!
//! Units: the switching width `T` is kept explicit everywhere, but every
//! scenario exercised by the CLI sets `T = 1`, so lengths, times and gaps
//! are in units of `T`.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
mod contour;
pub mod error;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod state;

pub use error::{HarvestError, Result};
pub use num_complex::Complex64;
