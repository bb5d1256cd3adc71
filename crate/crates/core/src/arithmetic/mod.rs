//! Integer arithmetic layer: factorization, the divisor phase
//! `tau_{iT}(n)`, Dirichlet rational approximation by continued
//! fractions, the finite Euler products `B_q` attached to rational
//! points, and the Rankin-Selberg closed form for the second moment of
//! the divisor phase.
//!
//! Everything here is exact or accurate to a few ulps: the only
//! floating-point inputs are `T` (through `alpha = T log p`) and the
//! real part of Dirichlet-series variables.

mod bq;
mod factor;
mod rankin;
mod rational;
mod tau;

pub use bq::{bq, bq_cusp, bq_prime_closed_form, CuspFormData};
pub use factor::{factorize, Factorization};
pub use rankin::rankin_selberg_z;
pub use rational::{dirichlet_approx, RationalApprox};
pub use tau::tau_it;
