//! Numerical core for evaluating the real-analytic Eisenstein series
//! E*_T(x+iy) on the modular surface and for restricted-mass experiments
//! along vertical geodesic segments.
//!
//! Everything is computed in scaled double-precision arithmetic: the
//! Fourier coefficients carry ρ*(1)·e^{−πT/2} while the K-Bessel kernel
//! carries e^{πT/2}·K_{iT}, so no unscaled e^{±πT/2} ever materializes
//! (|Γ(1/2+iT)| ~ e^{−πT/2} would underflow near T ≈ 470 otherwise).

pub mod arithmetic;
pub mod eisenstein;
pub mod error;
pub mod experiments;
pub mod quadrature;
pub mod restriction;
pub mod special;

pub use error::{Error, Result};

/// Default working tolerance used when a caller does not override it.
pub const DEFAULT_TOL: f64 = 1e-10;
