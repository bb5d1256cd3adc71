//! Normalization constants of the Eisenstein expansion, in scaled form.
//!
//! With theta(s) = pi^{-s} Gamma(s) zeta(2s) evaluated at s = 1/2 + iT:
//!
//! - mu = theta/|theta| is the unit phase; its argument is assembled
//!   additively as -T ln pi + Im lnGamma(1/2+iT) + arg zeta(1+2iT), so no
//!   large quantity is ever exponentiated.
//! - rho_scaled = rho*(1) e^{-pi T/2}, where rho*(1) = sqrt(2/pi)/|theta|.
//!   Using |Gamma(1/2+iT)| = sqrt(pi/cosh(pi T)) this reduces to the
//!   overflow-free closed form
//!     rho_scaled = sqrt(2/pi) sqrt((1+e^{-2 pi T})/2) / |zeta(1+2iT)|.
//!
//! The completed-Gamma factor of the kernel's Mellin transform is exposed
//! on the same e^{pi T/2}-scaled convention.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Scaled normalization data for one spectral parameter T.
#[derive(Debug, Clone)]
pub struct NormalizationData {
    pub t: f64,
    /// Unit phase mu = theta(1/2+iT)/|theta(1/2+iT)|.
    pub mu: Complex64,
    /// zeta(1 + 2iT).
    pub zeta_1_2it: Complex64,
    /// rho*(1) e^{-pi T/2}.
    pub rho_scaled: f64,
    /// pi T / 2, the logarithm of the scaling factor carried elsewhere.
    pub log_scale: f64,
}

/// Compute the normalization constants for 1 <= T <= 1e3.
pub fn normalization(t: f64, tol: f64) -> Result<NormalizationData> {
    if !t.is_finite() || !(1.0..=1e3).contains(&t) {
        return Err(Error::Domain {
            op: "normalization",
            detail: format!("T = {t} outside [1, 1e3]"),
        });
    }
    let zeta_1_2it = crate::special::zeta(Complex64::new(1.0, 2.0 * t), tol)?;
    let lg = crate::special::log_gamma(Complex64::new(0.5, t))?;
    let arg_mu = -t * std::f64::consts::PI.ln() + lg.im + zeta_1_2it.arg();
    let mu = Complex64::new(arg_mu.cos(), arg_mu.sin());
    let rho_scaled = (2.0 / std::f64::consts::PI).sqrt()
        * (0.5 * (1.0 + (-2.0 * std::f64::consts::PI * t).exp())).sqrt()
        / zeta_1_2it.norm();
    Ok(NormalizationData {
        t,
        mu,
        zeta_1_2it,
        rho_scaled,
        log_scale: std::f64::consts::FRAC_PI_2 * t,
    })
}

/// Scaled completed-Gamma factor
///
///   e^{pi T/2} 2^{-3/2} pi^{-(s-1/2)} Gamma((s+iT)/2) Gamma((s-iT)/2),
///
/// which equals the Mellin transform int_0^inf S_V(T, 2 pi y) y^{s-1/2}
/// dy/y of the scaled kernel (the transform variable s' of that integral
/// enters as s = 1/2 + s'). Domain: Re s in (-1/2, 20), 0 <= T <= 1e3;
/// relative error <= 1e-11.
pub fn gamma_v_scaled(s: Complex64, t: f64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) || !(-0.5..20.0).contains(&s.re) {
        return Err(Error::Domain {
            op: "gamma_v_scaled",
            detail: format!("Re s = {} outside (-1/2, 20)", s.re),
        });
    }
    if !t.is_finite() || !(0.0..=1e3).contains(&t) {
        return Err(Error::Domain {
            op: "gamma_v_scaled",
            detail: format!("T = {t} outside [0, 1e3]"),
        });
    }
    let zp = (s + Complex64::new(0.0, t)) / 2.0;
    let zm = (s - Complex64::new(0.0, t)) / 2.0;
    for z in [zp, zm] {
        // Re z > -1/4 here, so the only reachable Gamma pole is z = 0.
        if z.norm() < 1e-8 {
            return Err(Error::Pole {
                op: "gamma_v_scaled",
                detail: format!("Gamma argument {z} within 1e-8 of the pole at 0"),
            });
        }
    }
    let exponent = Complex64::new(
        std::f64::consts::FRAC_PI_2 * t - 1.5 * std::f64::consts::LN_2,
        0.0,
    ) - (s - 0.5) * std::f64::consts::PI.ln()
        + crate::special::log_gamma_unchecked(zp)
        + crate::special::log_gamma_unchecked(zm);
    Ok(exponent.exp())
}
