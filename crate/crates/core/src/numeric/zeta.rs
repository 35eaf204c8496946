use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::NumericError;
use crate::exact::int;
use crate::hp::HpReal;
use crate::zeta_form::ZetaForm;

const GUARD_DIGITS: u32 = 10;
pub const MAX_DIGITS: u32 = 100;

/// `B_0 ..= B_n` (with `B_1 = -1/2`), from `sum_{k<=n} C(n+1,k) B_k = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += bk * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        // binom is now C(m+1, m)
        b.push(-acc / BigRational::from_integer(binom));
    }
    b
}

fn rising(a: u32, len: u32) -> BigInt {
    (0..len).fold(BigInt::one(), |acc, i| acc * BigInt::from(a + i))
}

/// `zeta(a)` by direct summation up to `N - 1` plus an exact rational
/// Euler-Maclaurin tail.
pub fn zeta_value(a: u32, digits: u32) -> Result<HpReal, NumericError> {
    if a < 2 {
        return Err(NumericError::InvalidArgument(format!("zeta({a}) is not a convergent series")));
    }
    if digits > MAX_DIGITS {
        return Err(NumericError::InvalidArgument(format!("at most {MAX_DIGITS} digits supported")));
    }
    let key = (a, digits);
    if let Some(v) = zeta_cache().lock().expect("zeta cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let w = digits + GUARD_DIGITS;
    let p = (w / 2 + 2) as usize;
    let bern = bernoulli_numbers(2 * p + 2);
    let eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(w + 5));

    let mut big_n: u32 = 2 * w + 20;
    loop {
        let n = BigRational::from_integer(BigInt::from(big_n));
        // first omitted correction term bounds the remainder
        let j = p + 1;
        let next = &bern[2 * j] / fact(2 * j) * BigRational::from_integer(rising(a, 2 * j as u32 - 1))
            / pow_rat(&n, a + 2 * j as u32 - 1);
        if abs(&next) < eps {
            break;
        }
        big_n *= 2;
    }
    let n = BigRational::from_integer(BigInt::from(big_n));
    let mut tail = pow_rat(&n, a - 1).recip() / int((a - 1) as i64) + pow_rat(&n, a).recip() / int(2);
    for j in 1..=p {
        tail += &bern[2 * j] / fact(2 * j) * BigRational::from_integer(rising(a, 2 * j as u32 - 1))
            / pow_rat(&n, a + 2 * j as u32 - 1);
    }

    let mut sum = HpReal::from_rational(&tail, w);
    for m in (1..big_n).rev() {
        let mm = HpReal::from_i64(m as i64, w);
        sum = sum + mm.powi(a as usize).recip();
    }
    zeta_cache().lock().expect("zeta cache poisoned").insert(key, sum.clone());
    Ok(sum)
}

fn zeta_cache() -> &'static Mutex<HashMap<(u32, u32), HpReal>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), HpReal>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn fact(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

fn pow_rat(q: &BigRational, e: u32) -> BigRational {
    num_traits::pow(q.clone(), e as usize)
}

fn abs(q: &BigRational) -> BigRational {
    if q < &BigRational::zero() {
        -q
    } else {
        q.clone()
    }
}

/// Numeric value of a finite form at `digits` (plus guard digits).
pub fn eval_form(f: &ZetaForm, digits: u32) -> Result<HpReal, NumericError> {
    if !f.is_finite() {
        return Err(NumericError::DivergentForm);
    }
    let w = digits + GUARD_DIGITS;
    let mut acc = HpReal::from_rational(&f.rational, w);
    for (a, q) in &f.zeta {
        acc = acc + HpReal::from_rational(q, w) * zeta_value(*a, digits)?;
    }
    Ok(acc)
}
