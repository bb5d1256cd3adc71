//! Complex log-Gamma.
//!
//! The workhorse is the Lanczos approximation with g = 607/128 and the
//! 15-term coefficient set (Godfrey's fit; see also Pugh's thesis for the
//! error analysis of this parameter choice), which delivers ~1e-13 relative
//! accuracy of exp(log_gamma) on Re z >= 1/2. For Re z < 1/2 we do not use
//! the reflection formula (its log form needs careful branch unwinding);
//! instead we shift upward with
//!     logGamma(z) = logGamma(z + n) - sum_{j=0}^{n-1} Log(z + j),
//! which is an identity between analytic functions on C cut along
//! (-inf, 0], valid as long as no z + j lands on the cut. The public entry
//! point guards the cut; an unchecked variant is available inside the crate
//! for callers that have already validated their arguments.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Lanczos coefficients for g = 607/128, n = 15 (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
];

const LN_SQRT_2PI: f64 = 0.91893853320467274178032973640562;

/// Principal log-Gamma for Re z >= 1/2 via Lanczos. No branch issues here:
/// Gamma maps the half-plane Re z >= 1/2 into the cut plane and the direct
/// formula already yields the principal (analytic) branch.
fn log_gamma_lanczos(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut s = Complex64::new(LANCZOS_C[0], 0.0);
    for (k, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        s += c / (zm1 + k as f64);
    }
    let t = zm1 + (LANCZOS_G + 0.5);
    (zm1 + 0.5) * t.ln() - t + LN_SQRT_2PI + s.ln()
}

/// log-Gamma on the cut plane C \ (-inf, 0], principal branch, no domain
/// gating. Callers must keep z off the cut; accuracy degrades only within
/// ~1e-8 of the poles (where the caller-facing wrapper errors out anyway).
pub(crate) fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return log_gamma_lanczos(z);
    }
    // Shift into Re >= 0.5. Each factor z + j stays off (-inf, 0] because z
    // itself does (Im z != 0, or z real positive), so every Log is principal
    // and the identity is exact.
    let n = (0.5 - z.re).ceil() as usize;
    let mut log_prod = Complex64::new(0.0, 0.0);
    for j in 0..n {
        log_prod += (z + j as f64).ln();
    }
    log_gamma_lanczos(z + n as f64) - log_prod
}

/// Principal-branch log-Gamma.
///
/// Domain: `Re z > 0` or `|Im z| > 1`, with `|z| <= 1e6`; arguments within
/// 1e-8 of a pole 0, -1, -2, ... are rejected. Within this domain the
/// relative error of `exp(log_gamma(z))` is below ~1e-12.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain {
            op: "log_gamma",
            detail: format!("non-finite argument {z}"),
        });
    }
    if z.norm() > 1e6 {
        return Err(Error::Domain {
            op: "log_gamma",
            detail: format!("|z| = {:.3e} exceeds 1e6", z.norm()),
        });
    }
    if !(z.re > 0.0 || z.im.abs() > 1.0) {
        return Err(Error::Domain {
            op: "log_gamma",
            detail: format!("z = {z} outside the domain Re z > 0 or |Im z| > 1"),
        });
    }
    // Pole guard: relevant only on the strip just right of the imaginary
    // axis admitted by the domain (the pole at 0).
    if z.im.abs() <= 1.0 {
        let k = (-z.re).round();
        if k >= 0.0 {
            let d = (z - Complex64::new(-k, 0.0)).norm();
            if d < 1e-8 {
                return Err(Error::Pole {
                    op: "log_gamma",
                    detail: format!("z = {z} within 1e-8 of the pole at {}", -k),
                });
            }
        }
    }
    Ok(log_gamma_unchecked(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Stirling series with Bernoulli terms B_2..B_20,
    /// preceded by an upward recurrence shift to |z + m| >= 32. Completely
    /// different algorithm and coefficient set from the Lanczos path.
    fn log_gamma_stirling(z: Complex64) -> Complex64 {
        // B_{2k} / (2k (2k-1)) for k = 1..10
        const STIRLING: [(f64, f64); 10] = [
            (2.0, 1.0 / 6.0),
            (4.0, -1.0 / 30.0),
            (6.0, 1.0 / 42.0),
            (8.0, -1.0 / 30.0),
            (10.0, 5.0 / 66.0),
            (12.0, -691.0 / 2730.0),
            (14.0, 7.0 / 6.0),
            (16.0, -3617.0 / 510.0),
            (18.0, 43867.0 / 798.0),
            (20.0, -174611.0 / 330.0),
        ];
        let mut shift = Complex64::new(0.0, 0.0);
        let mut w = z;
        while w.norm() < 32.0 {
            shift += w.ln();
            w += 1.0;
        }
        let mut s = (w - 0.5) * w.ln() - w + LN_SQRT_2PI;
        let w2 = w * w;
        let mut p = w;
        for &(two_k, b) in &STIRLING {
            s += b / ((two_k * (two_k - 1.0)) * p);
            p *= w2;
        }
        s - shift
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matches_frozen_anchors() {
        // (z, reference) pairs computed independently to 25 digits.
        let cases = [
            (c(0.5, 10.0), c(-14.78902473474429345053289, 13.03002003491108985080755)),
            (c(0.5, 1000.0), c(-1569.877388261691946489541, 5907.755320648806149276965)),
            (c(0.25, 5.0), c(-7.33708808420918112768755, 2.656575032957105579015123)),
            (c(3.7, -2.2), c(0.7264467516244264743056691, -2.718064292441145666372118)),
            (c(1.5, 0.0), c(-0.1207822376352452223455184, 0.0)),
            (c(12.0, 0.0), c(17.50230784587388583928765, 0.0)),
            (c(0.5, 2000.0), c(-3140.673715056588565720863, 13201.80493991749836009521)),
            (c(2.0, -35.0), c(-48.72550281562392373703439, -91.76243196729917132924581)),
        ];
        for (z, want) in cases {
            let got = log_gamma(z).unwrap();
            // The contract is a relative error on exp(log_gamma): that means
            // abs error on Re and on the value of Im (mod nothing; the branch
            // must match too since the reference is principal).
            let scale = want.norm().max(1.0);
            assert!(
                (got - want).norm() <= 1e-11 * scale,
                "log_gamma({z}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn agrees_with_stirling_oracle() {
        // Deterministic sweep over the domain, including the Re z < 1/2,
        // |Im z| > 1 region served by the recurrence shift.
        let mut zs = Vec::new();
        for i in 0..40 {
            let re = -20.0 + 1.37 * i as f64;
            for j in 0..20 {
                let im = 1.1 + 4.7 * j as f64;
                zs.push(c(re, im));
                zs.push(c(re, -im));
            }
        }
        for i in 0..30 {
            zs.push(c(0.05 + 0.9 * i as f64, 0.0)); // positive real axis
        }
        for z in zs {
            let got = log_gamma(z).unwrap();
            let want = log_gamma_stirling(z);
            let scale = want.norm().max(1.0);
            assert!(
                (got - want).norm() <= 1e-12 * scale,
                "log_gamma({z}): lanczos {got} vs stirling {want}"
            );
        }
    }

    #[test]
    fn functional_equation_holds() {
        // Gamma(z+1) = z Gamma(z): log form must hold exactly up to branch,
        // and on these samples no branch jump occurs.
        for i in 0..50 {
            let z = c(0.2 + 0.13 * i as f64, -3.0 + 0.31 * i as f64);
            if !(z.re > 0.0 || z.im.abs() > 1.0) {
                continue;
            }
            let lhs = log_gamma(z + 1.0).unwrap();
            let rhs = log_gamma(z).unwrap() + z.ln();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0), "z={z}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for i in 0..25 {
            let z = c(0.5 + i as f64 * 0.7, 2.0 + i as f64 * 3.9);
            let a = log_gamma(z).unwrap();
            let b = log_gamma(z.conj()).unwrap();
            assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1.0));
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(matches!(
            log_gamma(c(-1.0, 0.5)),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            log_gamma(c(2e6, 0.0)),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            log_gamma(c(1e-9, 0.0)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn unchecked_reaches_left_strip() {
        // gamma_v needs logGamma at w/2 with Re w in (-1/2, 0], Im w = -T/ something;
        // verify the unchecked path against Stirling there.
        let z = c(-0.2, 0.35);
        let got = log_gamma_unchecked(z);
        let want = log_gamma_stirling(z);
        assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
    }
}
