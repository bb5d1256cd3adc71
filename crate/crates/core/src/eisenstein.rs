//! The completed real-analytic Eisenstein series on the critical line,
//!
//! ```text
//!   E_T*(x + iy) = 2 Re(mu y^{1/2+iT})
//!       + rho*(1) sum_{n != 0} tau_{iT}(n) |n|^{-1/2} e(nx) V_T(2 pi |n| y),
//! ```
//!
//! evaluated in fully scaled arithmetic: the kernel carries `e^{pi T/2}
//! sqrt(u) K_{iT}(u)` and the coefficient carries `rho*(1) e^{-pi T/2}`,
//! so no intermediate ever sees the `e^{+-pi T/2}` sizes.  The `+-n`
//! terms pair exactly into `2 cos(2 pi n x)` because `tau_{iT}(-n) =
//! tau_{iT}(n)`, which keeps the whole computation in real arithmetic;
//! `E_T*` itself is real-valued.

use std::sync::{Arc, RwLock, RwLockReadGuard};

use num_complex::Complex64;

use crate::arithmetic::tau_it;
use crate::special::{bessel_k_imag_scaled_many, normalization, NormalizationData};
use crate::{Error, Result};

/// Hard ceiling on the number of Fourier terms.
const TRUNCATION_CAP: u64 = 10_000_000;

/// Fixed data for evaluating `E_T*` at one spectral parameter.
#[derive(Debug, Clone)]
pub struct EisensteinParams {
    /// Spectral parameter, `1 <= T <= 1e3`.
    pub t: f64,
    /// Target accuracy for truncation and per-term kernel budgets,
    /// `1e-12 <= tol <= 1e-3`.  End-to-end accuracy bottoms out near
    /// 1e-10 at the top of the `T` range regardless of `tol`.
    pub tol: f64,
    /// Scaled normalization constants at this `T`.
    pub norm: NormalizationData,
    /// Additive margin in the truncation formula (default 30), in units
    /// of the decay exponent.
    pub truncation_margin: f64,
    /// Cached `tau_{iT}(n)` for `n = 1..=len`, shared across clones;
    /// readers proceed concurrently and extension takes the write lock.
    tau_cache: Arc<RwLock<Vec<f64>>>,
}

impl EisensteinParams {
    /// Parameters with the default tolerance `1e-9`.
    pub fn new(t: f64) -> Result<Self> {
        Self::with_tol(t, 1e-9)
    }

    /// Parameters with an explicit tolerance.
    pub fn with_tol(t: f64, tol: f64) -> Result<Self> {
        if !t.is_finite() || !(1.0..=1e3).contains(&t) {
            return Err(Error::Domain {
                op: "EisensteinParams",
                detail: format!("T = {t} outside [1, 1e3]"),
            });
        }
        if !tol.is_finite() || !(1e-12..=1e-3).contains(&tol) {
            return Err(Error::Domain {
                op: "EisensteinParams",
                detail: format!("tol = {tol} outside [1e-12, 1e-3]"),
            });
        }
        // The normalization constants enter every term, so they are
        // computed two digits tighter than the evaluation target.
        let norm = normalization(t, (tol * 1e-2).max(1e-14))?;
        Ok(EisensteinParams {
            t,
            tol,
            norm,
            truncation_margin: 30.0,
            tau_cache: Arc::new(RwLock::new(Vec::new())),
        })
    }

    /// Read access to `tau_{iT}(1..=n_max)`, extending the cache first
    /// if it is short.  Extension is single-writer; concurrent readers
    /// of an already-long-enough cache never block each other.
    fn tau_prefix(&self, n_max: usize) -> Result<RwLockReadGuard<'_, Vec<f64>>> {
        {
            let guard = self.tau_cache.read().expect("tau cache poisoned");
            if guard.len() >= n_max {
                return Ok(guard);
            }
        }
        {
            let mut guard = self.tau_cache.write().expect("tau cache poisoned");
            while guard.len() < n_max {
                let n = guard.len() as i64 + 1;
                guard.push(tau_it(n, self.t)?);
            }
        }
        Ok(self.tau_cache.read().expect("tau cache poisoned"))
    }
}

/// One evaluation of `E_T*`.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    /// `E_T*(x + iy)`; real-valued.
    pub value: f64,
    /// Fourier terms actually summed (`= N` from [`truncation_length`]).
    pub terms_used: u64,
    /// Bound on the neglected tail; at most `tol` on success.
    pub tail_bound: f64,
}

/// Number of Fourier terms needed at height `y`:
///
/// ```text
///   N = ceil((T + 3 T^{1/3} L^{2/3} + L + margin) / (2 pi y)),   L = log(1/tol).
/// ```
///
/// The kernel `K_{iT}(2 pi n y)` turns from oscillation to decay at
/// `2 pi n y = T` through an Airy zone of width `~T^{1/3}`; the
/// `T^{1/3} L^{2/3}` term crosses that zone far enough for the decay
/// exponent to reach `L`, and the margin covers the divisor-weight
/// growth.
///
/// # Errors
///
/// `Error::TruncationTooLong` if `N` would exceed 10^7;
/// `Error::Domain` for `y < 1e-3`.
pub fn truncation_length(y: f64, params: &EisensteinParams) -> Result<u64> {
    if !y.is_finite() || y < 1e-3 {
        return Err(Error::Domain {
            op: "truncation_length",
            detail: format!("y = {y} below the supported minimum 1e-3"),
        });
    }
    let t = params.t;
    let l = (1.0 / params.tol).ln();
    let numer = t + 3.0 * t.cbrt() * l.powf(2.0 / 3.0) + l + params.truncation_margin;
    let n = (numer / (2.0 * std::f64::consts::PI * y)).ceil().max(1.0);
    if n > TRUNCATION_CAP as f64 {
        return Err(Error::TruncationTooLong {
            needed: n as u64,
            cap: TRUNCATION_CAP,
        });
    }
    Ok(n as u64)
}

/// Fold `x` into `[0, 1/2]` using 1-periodicity and evenness of the
/// cosine pairing.  `rem_euclid(1.0)` is exact, and `1 - f` for
/// `f >= 1/2` is exact by Sterbenz, so the fold costs at most one
/// rounding (when reflecting an `f < 1/2` image).
fn fold_x(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f > 0.5 {
        1.0 - f
    } else {
        f
    }
}

/// Envelope of the scaled kernel past the turning point:
/// `|S_V(T, u)| <= sqrt(pi/2) e^{T acos(T/u) - sqrt(u^2 - T^2)}` for
/// `u >= T` (saddle-point bound with the `e^{pi T/2}` scale absorbed).
fn tail_envelope(t: f64, u: f64) -> f64 {
    if u <= t {
        return (0.5 * std::f64::consts::PI).sqrt();
    }
    let c = ((u - t) * (u + t)).sqrt();
    let expo = t * (t / u).acos() - c;
    (0.5 * std::f64::consts::PI).sqrt() * expo.min(0.0).exp()
}

/// Truncation-tail estimate: sum the envelope over a few terms past `N`
/// with the crude divisor bound `|tau(n)|/sqrt(n) <= 2(log n + 1)/sqrt(n)`,
/// then close with a geometric extrapolation using the observed decay
/// ratio.
fn tail_bound(t: f64, y: f64, n: u64, rho_scaled: f64) -> f64 {
    let two_pi_y = 2.0 * std::f64::consts::PI * y;
    let weight = |k: u64| {
        let kf = k as f64;
        2.0 * (kf.ln() + 1.0) / kf.sqrt() * tail_envelope(t, two_pi_y * kf)
    };
    let mut sum = 0.0;
    for k in (n + 1)..=(n + 6) {
        sum += weight(k);
    }
    let a = weight(n + 6);
    let b = weight(n + 7);
    let ratio = if a > 0.0 { (b / a).min(0.9) } else { 0.0 };
    rho_scaled * 2.0 * (sum + a * ratio / (1.0 - ratio))
}

/// Shared core: evaluate with an explicit term count.
fn eval_with_n(x: f64, y: f64, params: &EisensteinParams, n: u64) -> Result<EvalResult> {
    let t = params.t;
    let xf = fold_x(x);

    let tail = tail_bound(t, y, n, params.norm.rho_scaled);
    if !(tail <= params.tol) {
        return Err(Error::AccuracyNotReached {
            op: "eval_star",
            regime: "truncation-tail",
            requested: params.tol,
            achieved: tail,
        });
    }

    // Per-term kernel budget: the series has ~N terms of weight
    // tau(n)/sqrt(n), so an RSS-style sqrt(N) split of tol is ample;
    // the floor keeps the long T ~ 1e3 downward sweeps admissible.
    let kernel_tol = (params.tol * 0.25 / (n as f64).sqrt()).clamp(3e-12, 1e-6);
    let two_pi_y = 2.0 * std::f64::consts::PI * y;
    let us: Vec<f64> = (1..=n).map(|k| two_pi_y * k as f64).collect();
    let kernels = bessel_k_imag_scaled_many(t, &us, kernel_tol)?;
    let taus = params.tau_prefix(n as usize)?;

    let two_pi_x = 2.0 * std::f64::consts::PI * xf;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation: the terms oscillate
    for k in 1..=n {
        let i = (k - 1) as usize;
        let kf = k as f64;
        let term = taus[i] / kf.sqrt() * 2.0 * (two_pi_x * kf).cos() * kernels[i].value;
        let yk = term - comp;
        let tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }

    // Constant term 2 Re(mu y^{1/2+iT}) = 2 sqrt(y) cos(T log y + arg mu).
    let main = 2.0 * (params.norm.mu * Complex64::from_polar(y.sqrt(), t * y.ln())).re;

    Ok(EvalResult {
        value: main + params.norm.rho_scaled * sum,
        terms_used: n,
        tail_bound: tail,
    })
}

/// Evaluate `E_T*(x + iy)`.
///
/// No fundamental-domain reduction is performed: callers integrate
/// along vertical segments `{x + iy : alpha <= y <= beta}` and need the
/// expansion at the given point.  `x` is folded into `[0, 1/2]` by the
/// exact symmetries `E*(x) = E*(x + 1) = E*(-x)`.
///
/// # Errors
///
/// * `Error::Domain` for `y < 1e-3` or nonfinite `x`.
/// * `Error::TruncationTooLong` if 10^7 terms would not reach `tol`.
/// * Kernel accuracy errors propagate unchanged.
pub fn eval_star(x: f64, y: f64, params: &EisensteinParams) -> Result<EvalResult> {
    if !x.is_finite() {
        return Err(Error::Domain {
            op: "eval_star",
            detail: format!("x = {x} must be finite"),
        });
    }
    let n = truncation_length(y, params)?;
    eval_with_n(x, y, params, n)
}

/// The unnormalized value `E_T(z) = conj(mu) E_T*(z)`: `E_T*` divided
/// by the unit phase `mu = theta(1/2+iT)/|theta(1/2+iT)|`.  Same
/// modulus as [`eval_star`], complex phase `conj(mu)` up to sign.
pub fn eval_raw(x: f64, y: f64, params: &EisensteinParams) -> Result<Complex64> {
    let star = eval_star(x, y, params)?;
    Ok(params.norm.mu.conj() * star.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// z -> -1/z in (x, y) coordinates.
    fn invert(x: f64, y: f64) -> (f64, f64) {
        let norm_sq = x * x + y * y;
        (-x / norm_sq, y / norm_sq)
    }

    #[test]
    fn matches_frozen_anchors() {
        // Reference values from 30-digit arithmetic on the expansion.
        let cases = [
            (0.2, 1.3, 10.0, -1.1689096064136166683),
            (0.0, 1.7, 30.0, -4.5199445075225084175),
            (1.0 / 3.0, 1.05, 50.0, -0.6947380716074801765),
            (0.6180339887498949, 2.7, 100.0, 1.6713564893439189673),
            (0.2, 1.3, 1.0, -1.6323085299483431854),
        ];
        for (x, y, t, want) in cases {
            let params = EisensteinParams::new(t).unwrap();
            let got = eval_star(x, y, &params).unwrap();
            assert!(
                (got.value - want).abs() <= 2e-10 * want.abs().max(1.0),
                "E*({x} + {y}i; T = {t}) = {:.18e}, want {want:.18e}",
                got.value
            );
            assert!(got.terms_used >= 1);
            assert!(got.tail_bound <= params.tol);
        }
    }

    #[test]
    fn modular_invariance_at_frozen_point() {
        // z = 0.2 + 1.3i maps to -1/z = -0.11560... + 0.75144...i.
        let params = EisensteinParams::new(30.0).unwrap();
        let (xi, yi) = invert(0.2, 1.3);
        assert!((xi - -0.1156069364161849711).abs() < 1e-15);
        assert!((yi - 0.75144508670520231214).abs() < 1e-15);
        let a = eval_star(0.2, 1.3, &params).unwrap().value;
        let b = eval_star(xi, yi, &params).unwrap().value;
        assert!(
            (a - b).abs() <= 1e-6 * a.abs().max(1.0),
            "E* at z vs -1/z: {a} vs {b}"
        );
    }

    #[test]
    fn modular_invariance_at_random_points() {
        // The end-to-end oracle binding kernel, zeta, gamma, tau, and
        // normalization: E*(-1/z) = E*(z).
        let mut rng = ChaCha8Rng::seed_from_u64(0x30d_1a5);
        for &t in &[10.0, 30.0] {
            let params = EisensteinParams::new(t).unwrap();
            for _ in 0..20 {
                let x: f64 = rng.gen_range(-0.5..0.5);
                let y: f64 = rng.gen_range(0.8..2.0);
                let (xi, yi) = invert(x, y);
                let a = eval_star(x, y, &params).unwrap().value;
                let b = eval_star(xi, yi, &params).unwrap().value;
                assert!(
                    (a - b).abs() <= 1e-6 * a.abs().max(1.0),
                    "T = {t}, z = {x} + {y}i: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn even_and_periodic_in_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e10d);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(1.0..50.0);
            let params = EisensteinParams::new(t).unwrap();
            let x: f64 = rng.gen_range(-2.0..2.0);
            let y: f64 = rng.gen_range(0.9..3.0);
            let v = eval_star(x, y, &params).unwrap().value;
            let v_neg = eval_star(-x, y, &params).unwrap().value;
            let v_shift = eval_star(x + 1.0, y, &params).unwrap().value;
            let scale = v.abs().max(1.0);
            assert!((v - v_neg).abs() <= 1e-12 * scale, "evenness at x = {x}, T = {t}");
            assert!((v - v_shift).abs() <= 1e-12 * scale, "periodicity at x = {x}, T = {t}");
        }
    }

    #[test]
    fn tail_is_honest_under_doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
        for _ in 0..50 {
            let t: f64 = rng.gen_range(1.0..100.0);
            let params = EisensteinParams::new(t).unwrap();
            let x: f64 = rng.gen_range(0.0..1.0);
            let y: f64 = rng.gen_range(0.5..3.0);
            let n = truncation_length(y, &params).unwrap();
            let v1 = eval_with_n(x, y, &params, n).unwrap().value;
            let v2 = eval_with_n(x, y, &params, 2 * n).unwrap().value;
            assert!(
                (v1 - v2).abs() <= 2.0 * params.tol,
                "T = {t}, y = {y}: doubling N moved the value by {:.3e}",
                (v1 - v2).abs()
            );
        }
    }

    #[test]
    fn truncation_formula_is_the_contract() {
        let params = EisensteinParams::new(100.0).unwrap();
        let l = (1e9f64).ln();
        let want = ((100.0 + 3.0 * 100.0f64.cbrt() * l.powf(2.0 / 3.0) + l + 30.0)
            / (2.0 * std::f64::consts::PI))
            .ceil() as u64;
        assert_eq!(truncation_length(1.0, &params).unwrap(), want);

        // 1/y scaling: doubling y at least halves N (up to the ceil).
        for y in [0.3, 0.7, 1.0, 2.4] {
            let n1 = truncation_length(y, &params).unwrap();
            let n2 = truncation_length(2.0 * y, &params).unwrap();
            assert!(n2 <= n1 / 2 + 1, "y = {y}: N(2y) = {n2} vs N(y) = {n1}");
        }

        // Monotone in 1/tol.
        let mut last = 0;
        for tol in [1e-3, 1e-6, 1e-9, 1e-12] {
            let p = EisensteinParams::with_tol(100.0, tol).unwrap();
            let n = truncation_length(1.0, &p).unwrap();
            assert!(n >= last, "N not monotone at tol = {tol}");
            last = n;
        }

        // Far up the cusp a single term suffices, but N stays >= 1.
        assert!(truncation_length(1e6, &params).unwrap() >= 1);
    }

    #[test]
    fn raw_value_is_unit_rotation_of_star() {
        let params = EisensteinParams::new(30.0).unwrap();
        let star = eval_star(0.37, 1.21, &params).unwrap();
        let raw = eval_raw(0.37, 1.21, &params).unwrap();
        assert!(
            (raw.norm() - star.value.abs()).abs() <= 1e-13 * star.value.abs().max(1.0),
            "|E_T| = {} vs |E_T*| = {}",
            raw.norm(),
            star.value.abs()
        );
        // mu * E_T = E_T* is real.
        let rotated = params.norm.mu * raw;
        assert!(rotated.im.abs() <= 1e-12 * (1.0 + rotated.re.abs()));
    }

    #[test]
    fn raw_regression_at_t_30_z_i() {
        // Pinned from the first build that passed the modular-invariance
        // oracle; guards the mu phase convention against drift.
        let params = EisensteinParams::new(30.0).unwrap();
        let raw = eval_raw(0.0, 1.0, &params).unwrap();
        let want = Complex64::new(2.154235914371490423, -0.4710029211671089566);
        assert!(
            (raw - want).norm() <= 1e-9,
            "E_T(i) at T = 30: {raw} vs pinned {want}"
        );
        let star = eval_star(0.0, 1.0, &params).unwrap();
        assert!((star.value - 2.205124968457779389).abs() <= 1e-9);
    }

    #[test]
    fn rejects_out_of_domain_inputs() {
        assert!(matches!(EisensteinParams::new(0.5), Err(Error::Domain { .. })));
        assert!(matches!(EisensteinParams::new(2e3), Err(Error::Domain { .. })));
        assert!(matches!(
            EisensteinParams::with_tol(10.0, 1e-13),
            Err(Error::Domain { .. })
        ));
        let params = EisensteinParams::new(10.0).unwrap();
        assert!(matches!(
            eval_star(0.2, 1e-4, &params),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            eval_star(f64::NAN, 1.0, &params),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn tau_cache_extends_and_is_shared_across_clones() {
        let params = EisensteinParams::new(10.0).unwrap();
        let clone = params.clone();
        // Evaluate low-y first (long cache), then check the clone sees it.
        let n_long = truncation_length(0.05, &params).unwrap();
        eval_star(0.1, 0.05, &params).unwrap();
        assert!(clone.tau_cache.read().unwrap().len() >= n_long as usize);
        // Cached values agree with direct computation.
        let taus = clone.tau_prefix(50).unwrap();
        for n in [1usize, 7, 12, 49] {
            let direct = tau_it(n as i64 + 1, 10.0).unwrap();
            assert_eq!(taus[n], direct);
        }
    }
}
