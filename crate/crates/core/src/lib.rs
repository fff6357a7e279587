//! Delocalized L²-invariants of closed manifolds: delocalized Betti numbers,
//! analytic torsion and eta invariants, computed from closed forms for
//! hyperbolic manifolds, mapping tori, finite covers and ℤˡ-covers, each
//! paired with an independent oracle (quadrature, Fourier series or an exact
//! second route).
//!
//! The crate is `no_std` with `alloc`. The `std` feature (default) only
//! forwards to the dependencies; `parallel` evaluates torus grids with rayon
//! while keeping the summation order fixed.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod finite_cover;
pub mod groups;
pub mod heat_trace;
pub mod hyperbolic;
pub mod integrals;
pub mod invariants;
pub mod linalg;
pub mod mapping_torus;
pub mod nielsen;
pub mod poly;
pub mod quadrature;
pub mod scalar;

pub use error::{DelocError, Result};
pub use num_complex::Complex64;
pub use num_rational::BigRational;

/// Absolute and relative tolerance used when the caller does not supply one.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
