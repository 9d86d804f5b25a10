//! Exact arithmetic substrate: rationals, polynomials, truncated Laurent
//! series, triangular Toeplitz helpers, and multinomial coefficients.
//!
//! Everything is exact; there is no floating point anywhere in the crate.

pub mod polynomial;
pub mod rational;
pub mod series;
pub mod toeplitz;

pub use polynomial::Polynomial;
pub use rational::Rational;
pub use series::{SeriesOrder, TruncatedLaurentSeries};
pub use toeplitz::{toeplitz_solve, LowerToeplitz};

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Exact multinomial coefficient `total! / (parts[0]! * ... * parts[k]!)`.
///
/// The parts must sum to the total; computed as a product of binomials so
/// no factorial is ever materialized.
pub fn multinomial(total: u64, parts: &[u64]) -> Result<BigInt> {
    let sum: u64 = parts.iter().sum();
    if sum != total {
        return Err(Error::MultinomialMismatch {
            total,
            parts_sum: sum,
        });
    }
    let mut acc = BigInt::from(1);
    let mut remaining = total;
    for &p in parts {
        acc *= num_integer::binomial(BigInt::from(remaining), BigInt::from(p));
        remaining -= p;
    }
    Ok(acc)
}

/// `multinomial` lifted to a [`Rational`].
pub fn multinomial_rational(total: u64, parts: &[u64]) -> Result<Rational> {
    Ok(Rational::from_integer(multinomial(total, parts)?))
}

/// Factorial as a big integer; only used for cross-checks.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(2, &[1, 1]).unwrap(), BigInt::from(2));
        assert_eq!(multinomial(3, &[2, 1]).unwrap(), BigInt::from(3));
        assert_eq!(multinomial(4, &[2, 2]).unwrap(), BigInt::from(6));
        assert_eq!(multinomial(0, &[0, 0]).unwrap(), BigInt::from(1));
    }

    #[test]
    fn multinomial_rejects_sum_mismatch() {
        assert_eq!(
            multinomial(4, &[2, 1]).unwrap_err(),
            Error::MultinomialMismatch {
                total: 4,
                parts_sum: 3
            }
        );
    }

    #[test]
    fn multinomial_matches_factorial_formula() {
        let cases: &[(u64, &[u64])] = &[(4, &[2, 2]), (6, &[3, 2, 1]), (10, &[4, 3, 3])];
        for (total, parts) in cases {
            let direct = multinomial(*total, parts).unwrap();
            let mut denom = BigInt::from(1);
            for &p in *parts {
                denom *= factorial(p);
            }
            assert_eq!(direct, factorial(*total) / denom);
        }
    }
}
