//! Special functions in fully scaled arithmetic.
//!
//! Everything here works with quantities that stay O(1)-to-moderate across
//! the supported parameter range: the Bessel kernel carries its `e^{pi T/2}`
//! prefactor, the completed-Gamma factor is exposed only in scaled form, and
//! the normalization constants are stored as (phase, scaled modulus) pairs.

mod bessel_j;
mod kernel;
mod log_gamma;
mod normalization;
mod zeta;

pub use bessel_j::bessel_j;
pub use kernel::{bessel_k_imag_scaled, bessel_k_imag_scaled_many, ScaledKernelValue};
pub use log_gamma::log_gamma;
pub use normalization::{gamma_v_scaled, normalization, NormalizationData};
pub use zeta::zeta;

pub(crate) use log_gamma::log_gamma_unchecked;
