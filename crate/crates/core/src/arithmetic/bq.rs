//! Finite Euler products `B_q(s, T)` attached to rational points `a/q`.
//!
//! For `p^{q_p} || q` the local factor is a weighted-to-plain ratio of
//! the local Rankin-Selberg series in `x = p^{-s}`,
//!
//! ```text
//!               -c_{q_p - 1} x^{q_p - 1}/(p - 1) + sum_{j >= q_p} c_j x^j
//!   L_p(s, T) = --------------------------------------------------------,
//!                              sum_{j >= 0} c_j x^j
//! ```
//!
//! with `c_j = tau_{iT}(p^j)^2`: the Moebius/Euler-phi weights
//! `mu(p^{q_p - j}) / phi(p^{q_p - j})` vanish for `j <= q_p - 2`,
//! contribute `-1/(p-1)` at `j = q_p - 1`, and are `1` from `j = q_p`
//! on.  `B_q` is the product of the local factors over `p | q`, and
//! `B_1 = 1` (empty product).

use std::collections::BTreeMap;

use super::factor::factorize;
use super::tau::tau_local;
use crate::{Error, Result};

/// Local series terms are truncated once the envelope
/// `(j+1)^2 p^{-js}` (the squared-coefficient bound times the power)
/// drops below this.
const TERM_FLOOR: f64 = 1e-16;

/// Hecke data for the cusp-form variant of the local products.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspFormData {
    /// Parity of the form: `+1` (even) or `-1` (odd).
    pub delta: i8,
    /// Hecke eigenvalues `lambda(p)`, keyed by prime.  Only the primes
    /// dividing the `q` actually passed to [`bq_cusp`] are required.
    pub lambda_p: BTreeMap<u64, f64>,
    /// When set, reject eigenvalues outside the Ramanujan bound
    /// `|lambda(p)| <= 2` instead of summing a possibly divergent
    /// local series.
    pub enforce_bound: bool,
}

/// One local factor; `coeff(j)` must yield the squared local
/// coefficient `c_j` and is called with `j = 0, 1, 2, ...` in order.
///
/// Returns a `Domain` error if the series has not decayed at the
/// truncation point (possible only for cusp data violating the
/// Ramanujan bound, where `c_j` can outgrow the `(j+1)^2` envelope).
fn local_factor(
    p: u64,
    qp: u32,
    s: f64,
    coeff: &mut dyn FnMut(u32) -> f64,
) -> Result<f64> {
    let pf = p as f64;
    let x = (-s * pf.ln()).exp();
    let mut denom = 0.0f64;
    let mut numer = 0.0f64;
    let mut xj = 1.0f64;
    let mut j = 0u32;
    let mut last_term;
    loop {
        let term = coeff(j) * xj;
        last_term = term;
        denom += term;
        if j + 1 == qp {
            numer -= term / (pf - 1.0);
        } else if j >= qp {
            numer += term;
        }
        let envelope = (j as f64 + 1.0) * (j as f64 + 1.0) * xj;
        if j >= qp && envelope < TERM_FLOOR {
            break;
        }
        j += 1;
        xj *= x;
        if j > 4000 {
            break; // unreachable for x <= 2^{-1/2}; defensive only
        }
    }
    if last_term.abs() > 1e-10 * denom.abs() {
        return Err(Error::Domain {
            op: "bq_cusp",
            detail: format!(
                "local series at p = {p} has not converged (last term {:e}); \
                 eigenvalue too large for s = {s}",
                last_term
            ),
        });
    }
    Ok(numer / denom)
}

fn check_q_s(op: &'static str, q: u64, s: f64) -> Result<()> {
    if q == 0 || q > 1_000_000_000 {
        return Err(Error::Domain {
            op,
            detail: format!("q must lie in [1, 1e9], got {q}"),
        });
    }
    if !s.is_finite() || s <= 0.5 || s > 4.0 {
        return Err(Error::Domain {
            op,
            detail: format!("s must lie in (1/2, 4], got {s}"),
        });
    }
    Ok(())
}

/// The finite Euler product `B_q(s, T)` for the divisor phase, with
/// `B_q(1, T)` the arithmetic weight of the secondary main term at a
/// rational point of denominator `q`.
///
/// # Errors
///
/// `Error::Domain` unless `1 <= q <= 10^9`, `s` lies in `(1/2, 4]`,
/// and `T >= 0` is finite.
pub fn bq(q: u64, t: f64, s: f64) -> Result<f64> {
    check_q_s("bq", q, s)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain {
            op: "bq",
            detail: format!("T must be finite and nonnegative, got {t}"),
        });
    }
    let f = factorize(q)?;
    let mut out = 1.0f64;
    for &(p, e) in &f.factors {
        let alpha = t * (p as f64).ln();
        let mut coeff = |j: u32| {
            let v = tau_local(alpha, j);
            v * v
        };
        out *= local_factor(p, e, s, &mut coeff)?;
    }
    Ok(out)
}

/// Closed form of the prime local factor at `s = 1`:
///
/// the local Rankin-Selberg series factors as
/// `sum_j tau(p^j)^2 x^j = (1 - x^2) / ((1-x)^2 (1 - x e^{2i alpha}) (1 - x e^{-2i alpha}))`
/// with `alpha = T log p`, and the `q = p` weighted ratio collapses to
///
/// ```text
///   B_p(1, T) = (1 + 2 cos(2 T log p) - 1/p) / (p + 1).
/// ```
///
/// # Errors
///
/// `Error::Domain` if `p` is not prime, `p > 10^9`, or `T` is invalid.
pub fn bq_prime_closed_form(p: u64, t: f64) -> Result<f64> {
    if !is_prime(p) || p > 1_000_000_000 {
        return Err(Error::Domain {
            op: "bq_prime_closed_form",
            detail: format!("p must be a prime <= 1e9, got {p}"),
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain {
            op: "bq_prime_closed_form",
            detail: format!("T must be finite and nonnegative, got {t}"),
        });
    }
    let pf = p as f64;
    Ok((1.0 + 2.0 * (2.0 * t * pf.ln()).cos() - 1.0 / pf) / (pf + 1.0))
}

/// Cusp-form analogue of [`bq`]: the squared local coefficients are
/// `lambda(p^j)^2` built from the supplied `lambda(p)` by the Hecke
/// recursion `lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1})`.
///
/// Specializing `lambda(p) = 2 cos(T log p)` for every `p | q`
/// reproduces `bq(q, T, s)` exactly, since the divisor phase satisfies
/// the same recursion.
///
/// # Errors
///
/// * `Error::MissingEigenvalue` if some `p | q` has no entry.
/// * `Error::Domain` for invalid `q`/`s`/`delta`, or when
///   `enforce_bound` is set and some `|lambda(p)| > 2`.
pub fn bq_cusp(q: u64, data: &CuspFormData, s: f64) -> Result<f64> {
    check_q_s("bq_cusp", q, s)?;
    if data.delta != 1 && data.delta != -1 {
        return Err(Error::Domain {
            op: "bq_cusp",
            detail: format!("parity delta must be +1 or -1, got {}", data.delta),
        });
    }
    let f = factorize(q)?;
    let mut out = 1.0f64;
    for &(p, e) in &f.factors {
        let lp = *data
            .lambda_p
            .get(&p)
            .ok_or(Error::MissingEigenvalue { p })?;
        if data.enforce_bound && lp.abs() > 2.0 {
            return Err(Error::Domain {
                op: "bq_cusp",
                detail: format!("|lambda({p})| = {} violates the Ramanujan bound", lp.abs()),
            });
        }
        // lambda(p^j) by the Hecke recursion; local_factor calls with
        // j = 0, 1, 2, ... in order, so two running values suffice.
        let mut prev = 0.0f64; // lambda(p^{j-1})
        let mut cur = 1.0f64; // lambda(p^j)
        let mut coeff = |_j: u32| {
            let v = cur;
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
            v * v
        };
        out *= local_factor(p, e, s, &mut coeff)?;
    }
    Ok(out)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut p = 5u64;
    let mut step = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += step;
        step = 6 - step;
    }
    true
}
