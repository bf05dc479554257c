//! Exact Bernoulli numbers and the numerator/denominator pairs that govern
//! the first and second cohomology of the integers in even weights.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::Mutex;

/// Exact rational in lowest terms with positive denominator.
pub type ExactRational = BigRational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("weight must be even and positive, got {0}")]
    BadWeight(i64),
}

static BERNOULLI_CACHE: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// Exact Bernoulli number B_n, via the recursion
/// sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1, with B_0 = 1.
///
/// Values are memoized; concurrent fills recompute the same prefix and are
/// idempotent.
pub fn bernoulli(n: usize) -> BigRational {
    {
        let cache = BERNOULLI_CACHE.lock().unwrap();
        if let Some(b) = cache.get(n) {
            return b.clone();
        }
    }
    let mut local: Vec<BigRational> = {
        let cache = BERNOULLI_CACHE.lock().unwrap();
        cache.clone()
    };
    if local.is_empty() {
        local.push(BigRational::one());
    }
    while local.len() <= n {
        let m = local.len();
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in local.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let bm = -acc / BigRational::from_integer(BigInt::from(m + 1));
        local.push(bm);
    }
    let result = local[n].clone();
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    if cache.len() < local.len() {
        *cache = local;
    }
    result
}

/// Coprime pair (u, v) with u/v = |B_w| / (2w) in lowest terms, indexed by the
/// even positive weight w. The denominator v is even and the numerator u odd;
/// v gives the order of the weight-w piece of the first cohomology line and u
/// the odd torsion of the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UVNumbers {
    pub weight: u64,
    pub u: BigUint,
    pub v: BigUint,
}

pub fn uv_of_weight(w: i64) -> Result<UVNumbers, ArithError> {
    if w <= 0 || w % 2 != 0 {
        return Err(ArithError::BadWeight(w));
    }
    let b = bernoulli(w as usize);
    let frac = b.abs() / BigRational::from_integer(BigInt::from(2 * w));
    let u = frac.numer().magnitude().clone();
    let v = frac.denom().magnitude().clone();
    debug_assert!(u.gcd(&v).is_one());
    Ok(UVNumbers { weight: w as u64, u, v })
}

/// The order v(w) of the cyclic group sitting in bidegree (1, w) for even
/// positive w over the integers.
pub fn w_number(w: i64) -> Result<BigUint, ArithError> {
    Ok(uv_of_weight(w)?.v)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Bernoulli numbers via the Akiyama-Tanigawa
    /// triangle, entirely separate from the binomial recursion.
    fn bernoulli_akiyama_tanigawa(n: usize) -> BigRational {
        let mut row: Vec<BigRational> = (0..=n)
            .map(|m| BigRational::new(BigInt::one(), BigInt::from(m + 1)))
            .collect();
        for j in (1..=n).rev() {
            for m in 0..j {
                let diff = row[m].clone() - row[m + 1].clone();
                row[m] = BigRational::from_integer(BigInt::from(m + 1)) * diff;
            }
            row.truncate(j);
        }
        // The triangle yields B_n with the plus convention (B_1 = +1/2); the
        // generating-function convention used here has B_1 = -1/2 and agrees
        // elsewhere.
        if n == 1 {
            -row[0].clone()
        } else {
            row[0].clone()
        }
    }

    #[test]
    fn bernoulli_basics() {
        assert_eq!(bernoulli(0), BigRational::one());
        assert_eq!(bernoulli(1), BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert!(bernoulli(3).is_zero());
        assert!(bernoulli(15).is_zero());
        assert_eq!(
            bernoulli(12),
            BigRational::new(BigInt::from(-691), BigInt::from(2730))
        );
    }

    #[test]
    fn bernoulli_matches_independent_oracle() {
        for n in 0..=40 {
            assert_eq!(bernoulli(n), bernoulli_akiyama_tanigawa(n), "B_{}", n);
        }
    }

    #[test]
    fn von_staudt_clausen_denominators() {
        // For even n the denominator of B_n is the product of primes p with
        // (p - 1) | n.
        for n in (2..=40).step_by(2) {
            let denom = bernoulli(n).denom().magnitude().clone();
            let mut expected = BigUint::one();
            for p in 2u64..=(n as u64 + 1) {
                if is_prime(p) && n as u64 % (p - 1) == 0 {
                    expected *= BigUint::from(p);
                }
            }
            assert_eq!(denom, expected, "von Staudt-Clausen fails at n={}", n);
        }
    }

    fn is_prime(p: u64) -> bool {
        if p < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= p {
            if p % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn uv_values() {
        let uv2 = uv_of_weight(2).unwrap();
        assert_eq!((uv2.u, uv2.v), (BigUint::one(), BigUint::from(24u32)));
        let uv4 = uv_of_weight(4).unwrap();
        assert_eq!((uv4.u, uv4.v), (BigUint::one(), BigUint::from(240u32)));
        let uv12 = uv_of_weight(12).unwrap();
        assert_eq!(
            (uv12.u, uv12.v),
            (BigUint::from(691u32), BigUint::from(65520u32))
        );
        assert!(uv_of_weight(3).is_err());
        assert!(uv_of_weight(0).is_err());
        assert!(uv_of_weight(-2).is_err());
    }

    #[test]
    fn w_numbers() {
        assert_eq!(w_number(2).unwrap(), BigUint::from(24u32));
        assert_eq!(w_number(4).unwrap(), BigUint::from(240u32));
        assert_eq!(w_number(6).unwrap(), BigUint::from(504u32));
    }

    #[test]
    fn u_is_small_through_weight_14() {
        // In the window w <= 14 the numerators are 1 except at w = 12.
        for w in (2..=14).step_by(2) {
            let u = uv_of_weight(w).unwrap().u;
            if w == 12 {
                assert_eq!(u, BigUint::from(691u32));
            } else {
                assert!(u.is_one(), "u({}) = {}", w, u);
            }
        }
    }

    #[test]
    fn u_values_through_weight_24() {
        // Frozen from the Akiyama-Tanigawa oracle; every factor is an
        // irregular prime.
        let expected: [(i64, u64); 5] = [
            (16, 3617),
            (18, 43867),
            (20, 283 * 617),
            (22, 131 * 593),
            (24, 103 * 2_294_797),
        ];
        for (w, u) in expected {
            assert_eq!(uv_of_weight(w).unwrap().u, BigUint::from(u), "u({})", w);
        }
    }

    #[test]
    fn v_divisibility_window() {
        for w in (2..=24).step_by(2) {
            let v = uv_of_weight(w).unwrap().v;
            if w % 4 == 0 {
                assert!((&v % BigUint::from(8u32)).is_zero(), "8 | v({})", w);
            } else {
                assert!((&v % BigUint::from(24u32)).is_zero(), "24 | v({})", w);
            }
        }
    }

    #[test]
    fn u_odd_v_even() {
        for w in (2..=30).step_by(2) {
            let uv = uv_of_weight(w).unwrap();
            assert!((&uv.v % BigUint::from(2u32)).is_zero());
            assert!(!(&uv.u % BigUint::from(2u32)).is_zero());
        }
    }
}
