//! Exact arithmetic shared by every other module: big rationals, sparse
//! multivariate polynomials, generalized harmonic numbers and lcm utilities.
//!
//! Nothing in here touches floating point.

mod harmonic;
mod poly;

pub use harmonic::{harmonic, HarmonicCache};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
pub use poly::{poly_pow_expand, Monomial, Poly};

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(pub String);

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Canonical text form: `-935/8`, or `108` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() || den.sign() == num_bigint::Sign::Minus {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// `lcm(1, 2, ..., n)`; the empty lcm for `n = 0` is 1.
pub fn lcm_upto(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc = acc.lcm(&BigUint::from(i));
    }
    acc
}

/// Serde adapter storing a [`BigRational`] as its canonical string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn lcm_small_values() {
        assert_eq!(lcm_upto(10), BigUint::from(2520u32));
        assert_eq!(lcm_upto(1), BigUint::one());
        assert_eq!(lcm_upto(6), BigUint::from(60u32));
    }

    fn prime_power_base(mut q: u64) -> Option<u64> {
        let mut p = 2;
        while p * p <= q {
            if q % p == 0 {
                while q % p == 0 {
                    q /= p;
                }
                return (q == 1).then_some(p);
            }
            p += 1;
        }
        (q > 1).then_some(q)
    }

    #[test]
    fn lcm_steps_are_one_or_prime() {
        let mut prev = lcm_upto(1);
        for n in 2..=2000u64 {
            let next = prev.lcm(&BigUint::from(n));
            assert_eq!(&next % &prev, BigUint::zero());
            let step = &next / &prev;
            if step != BigUint::one() {
                // lcm grows by p exactly when n is a power of p
                let p = prime_power_base(n).expect("n must be a prime power");
                assert_eq!(step, BigUint::from(p), "n = {n}");
            }
            prev = next;
        }
        assert_eq!(prev, lcm_upto(2000));
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(format_rational(&rat(-935, 8)), "-935/8");
        assert_eq!(format_rational(&int(108)), "108");
        assert_eq!(format_rational(&rat(0, 5)), "0");
        assert_eq!(parse_rational("-39185573/3456").unwrap(), rat(-39185573, 3456));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/-2").is_err());
    }

    proptest! {
        #[test]
        fn rational_sum_is_normalized_and_commutative(a in -1000i64..1000, b in 1i64..1000,
                                                      c in -1000i64..1000, d in 1i64..1000) {
            let r = rat(a, b);
            let s = rat(c, d);
            let lhs = &r + &s;
            prop_assert_eq!(&lhs, &(&s + &r));
            prop_assert!(lhs.denom().is_positive());
            prop_assert!(lhs.numer().gcd(lhs.denom()).is_one());
            if lhs.is_zero() {
                prop_assert!(lhs.denom().is_one());
            }
            prop_assert_eq!(parse_rational(&format_rational(&lhs)).unwrap(), lhs);
        }
    }
}
