//! Non-Gaussianity of bosonic quantum states and operations.
//!
//! The crate is split into four layers:
//!
//! - [`gaussian`]: exact phase-space algebra (symplectic maps, Gaussian states,
//!   Williamson spectra and entropies, purification).
//! - [`fock`]: a truncated Fock-space backend for non-Gaussian states and
//!   conditional maps, the Gaussification map and the relative-entropy
//!   non-Gaussianity `δ_G`.
//! - [`maps`]: a catalog of conditional maps (photon subtraction/addition,
//!   binary phase shift, Kerr, coherent-state projection, Gaussian-dilatable
//!   channels).
//! - [`monotone`]: the entanglement-assisted generating power `δ̃_G`, its
//!   unassisted lower bound `d_G`, Gaussian moment factoring for the analytic
//!   photon subtraction/addition outputs, and finite/diverging classification.
//!
//! Conventions: `ħ = 2` so the vacuum covariance is the identity, quadratures
//! are ordered `(q1, p1, …, qn, pn)` and all entropies are in bits.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` style guards are how NaN gets rejected along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Every `use num_traits::Float` carries `allow(unused_imports)`: once any crate
// in the build enables num-traits/std, the inherent float methods win.

extern crate alloc;

mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod maps;
pub mod monotone;

pub use error::{Error, Result};

/// Complex scalar used throughout the Fock backend.
pub type C64 = num_complex::Complex64;
