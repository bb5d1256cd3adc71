//! Dirichlet rational approximation by continued-fraction convergents.

use crate::{Error, Result};

/// Rational approximation `a/q` to a real `x2`, with the quality
/// guarantees of Dirichlet's theorem.
///
/// Invariants (all enforced by construction and checked in tests):
/// `gcd(a, q) = 1`, `1 <= q <= q_max`, and `|q * theta| <= 1/q_max`
/// where `theta = x2 - a/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalApprox {
    /// Numerator; may be negative or larger than `q` in magnitude.
    pub a: i64,
    /// Denominator, coprime to `a`.
    pub q: u64,
    /// Approximation offset `theta = x2 - a/q`.
    pub theta: f64,
    /// The quality parameter `Q` the approximation was requested for.
    pub q_max: f64,
}

/// Best rational approximation to `x2` with denominator at most `Q`.
///
/// The input is treated as the exact dyadic rational it is, and the
/// continued fraction is unwound by integer Euclid steps on `i128`
/// convergents, so no rounding enters before the final `theta`.  The
/// last convergent `p_k/q_k` with `q_k <= Q` satisfies
/// `|q_k x2 - p_k| < 1/q_{k+1} <= 1/(floor(Q)+1) < 1/Q` (Hardy &
/// Wright, Theorem 171), so the classical Dirichlet bound holds
/// constructively and no mediant refinement is ever needed; if the
/// fraction terminates first, `theta = 0` exactly.
///
/// # Errors
///
/// `Error::Domain` if `x2` is not finite, `|x2| > 10^6`, or `Q` is
/// outside `[1, 10^8]`.  The upper bound on `Q` keeps every numerator
/// below 2^53 so that `theta` can be assembled exactly from an FMA
/// product residual.
pub fn dirichlet_approx(x2: f64, q_max: f64) -> Result<RationalApprox> {
    if !x2.is_finite() || x2.abs() > 1e6 {
        return Err(Error::Domain {
            op: "dirichlet_approx",
            detail: format!("x2 must be finite with |x2| <= 1e6, got {x2}"),
        });
    }
    if !(1.0..=1e8).contains(&q_max) {
        return Err(Error::Domain {
            op: "dirichlet_approx",
            detail: format!("Q must lie in [1, 1e8], got {q_max}"),
        });
    }
    let qcap = q_max.floor() as i128;

    // Magnitudes below 2^-60 would need an i128-overflowing dyadic
    // denominator; a/q = 0/1 already beats the Dirichlet bound there.
    if x2 == 0.0 || x2.abs() < 2.0_f64.powi(-60) {
        return Ok(RationalApprox { a: 0, q: 1, theta: x2, q_max });
    }

    // x2 = num/den exactly: doubling a finite f64 is exact, so scale
    // until the value is an integer.  |x2| >= 2^-60 bounds den by 2^113.
    let mut scaled = x2;
    let mut den: i128 = 1;
    while scaled.fract() != 0.0 {
        scaled *= 2.0;
        den *= 2;
    }
    let mut num = scaled as i128;

    // Convergents p_k/q_k via Euclid: a_k = floor(num/den), remainder
    // feeds the next step.  gcd(p_k, q_k) = 1 automatically.
    let (mut p_prev, mut q_prev): (i128, i128) = (1, 0);
    let a0 = num.div_euclid(den);
    let (mut p_cur, mut q_cur): (i128, i128) = (a0, 1);
    let mut rem = num - a0 * den;
    num = den;
    den = rem;

    while den != 0 {
        let ak = num.div_euclid(den);
        // Accept the next convergent only while its denominator fits
        // under Q; q grows at least like Fibonacci so this terminates
        // within ~40 steps for Q <= 1e8.
        let q_next = match ak.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) {
            Some(v) if v <= qcap => v,
            _ => break,
        };
        let p_next = ak * p_cur + p_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        rem = num - ak * den;
        num = den;
        den = rem;
    }

    let a = p_cur as i64;
    let q = q_cur as u64;

    // theta = x2 - a/q assembled as ((x2*q - a) + fma residual)/q: the
    // rounded product and `a` agree to within 1, so their difference is
    // exact, and the FMA residual restores the product's low bits.
    let qf = q as f64;
    let prod = x2 * qf;
    let resid = x2.mul_add(qf, -prod);
    let theta = ((prod - a as f64) + resid) / qf;

    Ok(RationalApprox { a, q, theta, q_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gcd_i(mut a: i128, mut b: i128) -> i128 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    }

    /// Exact invariant check: treat x2 as the dyadic rational num/2^k it
    /// is and verify |q * x2 - a| * Q <= 2^k in integer arithmetic
    /// (up to the float rounding of the final comparison).
    fn check_invariants(x2: f64, r: &RationalApprox) {
        assert!(r.q >= 1);
        assert!((r.q as f64) <= r.q_max, "q = {} > Q = {}", r.q, r.q_max);
        assert_eq!(gcd_i(r.a as i128, r.q as i128), 1, "gcd(a, q) != 1");

        let mut scaled = x2;
        let mut den: i128 = 1;
        while scaled.fract() != 0.0 && den < (1i128 << 115) {
            scaled *= 2.0;
            den *= 2;
        }
        if scaled.fract() == 0.0 {
            let num = scaled as i128;
            let lhs = (r.q as i128 * num - r.a as i128 * den).abs();
            assert!(
                lhs as f64 * r.q_max <= den as f64 * (1.0 + 1e-9),
                "|q x2 - a| = {:e} > 1/Q for x2 = {x2}, Q = {}",
                lhs as f64 / den as f64,
                r.q_max
            );
            // theta agrees with the exact offset (q*num - a*den)/(q*den),
            // both factors exact in i128 and rounded once on conversion.
            let lhs_signed = r.q as i128 * num - r.a as i128 * den;
            // divide by den (a power of two, exact) then by q (one round)
            let theta_ref = lhs_signed as f64 / den as f64 / r.q as f64;
            assert!(
                (r.theta - theta_ref).abs() <= 5e-16 * theta_ref.abs(),
                "theta = {:e} vs exact {:e}",
                r.theta,
                theta_ref
            );
        }
    }

    #[test]
    fn integers_and_exact_rationals_terminate_with_zero_theta() {
        let r = dirichlet_approx(0.0, 5.0).unwrap();
        assert_eq!((r.a, r.q, r.theta), (0, 1, 0.0));

        let r = dirichlet_approx(3.0, 7.0).unwrap();
        assert_eq!((r.a, r.q, r.theta), (3, 1, 0.0));

        // fl(2/3) is not exactly 2/3, but its best approximation with
        // q <= 10 is still 2/3, and theta is the f64 encoding offset.
        let r = dirichlet_approx(2.0 / 3.0, 10.0).unwrap();
        assert_eq!((r.a, r.q), (2, 3));
        assert!(r.theta.abs() <= 1e-15, "theta = {:e}", r.theta);

        // 0.75 = 3/4 exactly.
        let r = dirichlet_approx(0.75, 10.0).unwrap();
        assert_eq!((r.a, r.q, r.theta), (3, 4, 0.0));
    }

    #[test]
    fn sqrt_two_matches_frozen_convergent() {
        // Convergents of sqrt(2): 1, 3/2, 7/5, 17/12, ...; with Q = 10
        // the last admissible is 7/5 and theta = sqrt(2) - 1.4.
        let r = dirichlet_approx(std::f64::consts::SQRT_2, 10.0).unwrap();
        assert_eq!((r.a, r.q), (7, 5));
        let want = 0.014213562373095048801689; // 30-digit reference
        assert!((r.theta - want).abs() <= 1e-15, "theta = {:.21e}", r.theta);
        assert!(5.0 * r.theta.abs() <= 0.1, "|q theta| = {}", 5.0 * r.theta.abs());
        check_invariants(std::f64::consts::SQRT_2, &r);
    }

    #[test]
    fn golden_ratio_walks_the_fibonacci_ladder() {
        // All partial quotients of (1+sqrt(5))/2 are 1, so convergents
        // are ratios of consecutive Fibonacci numbers: q <= 100 stops
        // at 144/89.
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let r = dirichlet_approx(phi, 100.0).unwrap();
        assert_eq!((r.a, r.q), (144, 89));
        check_invariants(phi, &r);
    }

    #[test]
    fn rejects_out_of_domain_inputs() {
        assert!(matches!(dirichlet_approx(f64::NAN, 5.0), Err(Error::Domain { .. })));
        assert!(matches!(dirichlet_approx(2e6, 5.0), Err(Error::Domain { .. })));
        assert!(matches!(dirichlet_approx(0.5, 0.5), Err(Error::Domain { .. })));
        assert!(matches!(dirichlet_approx(0.5, 2e8), Err(Error::Domain { .. })));
    }

    #[test]
    fn invariants_hold_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd117_1c); // Dirichlet
        for i in 0..10_000 {
            // Log-uniform magnitudes cover near-integers, tiny values,
            // and the full 1e6 range; Q log-uniform in [1, 1e8].
            let mag = 10.0_f64.powf(rng.gen_range(-8.0..6.0));
            let x2: f64 = if i % 7 == 0 {
                // near-rational stress: k/m + tiny jitter
                let m = rng.gen_range(1..=30) as f64;
                let k = rng.gen_range(-30..=30) as f64;
                k / m + mag.min(1e-3) * (rng.gen::<f64>() - 0.5)
            } else {
                mag * (rng.gen::<f64>() * 2.0 - 1.0)
            };
            let q_max = 10.0_f64.powf(rng.gen_range(0.0..8.0)).max(1.0);
            let r = dirichlet_approx(x2, q_max).unwrap();
            check_invariants(x2, &r);
        }
    }
}
