//! Exact prime factorization of integers up to 10^12 by trial division.

use crate::{Error, Result};

/// Largest integer `factorize` accepts.  Trial division runs over the
/// primes below 10^6, and a cofactor that survives every such division
/// is prime because a composite survivor would need two prime factors
/// above 10^6, exceeding 10^12.
const FACTOR_BOUND: u64 = 1_000_000_000_000;

/// Prime factorization of a positive integer `n <= 10^12`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// The integer that was factored.
    pub n: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes and
    /// every exponent at least 1; the product of `p^e` reconstructs
    /// `n`.  Empty exactly when `n = 1`.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Divisor count `d(n) = prod_i (e_i + 1)`.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }
}

/// Factor `n` by trial division over 2, 3, and the 6k +- 1 wheel.
///
/// The wheel only needs to run while `p * p <= m` for the remaining
/// cofactor `m`; once it stops, any `m > 1` is prime (see
/// [`FACTOR_BOUND`]).  Deliberately unmemoized: the evaluation paths
/// that need many factorizations (Fourier sums over `n <= N`) are
/// dominated by Bessel evaluations, and a shared cache would buy
/// nothing for the cost of synchronization.
///
/// # Errors
///
/// * `Error::Domain` if `n = 0`.
/// * `Error::FactorOverflow` if `n > 10^12`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain {
            op: "factorize",
            detail: "n must be a positive integer".into(),
        });
    }
    if n > FACTOR_BOUND {
        return Err(Error::FactorOverflow { n });
    }

    let mut m = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();

    for p in [2u64, 3] {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }

    let mut p = 5u64;
    let mut step = 2u64; // alternates 2, 4: 5, 7, 11, 13, 17, 19, ...
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += step;
        step = 6 - step;
    }
    if m > 1 {
        factors.push((m, 1));
    }

    Ok(Factorization { n, factors })
}
