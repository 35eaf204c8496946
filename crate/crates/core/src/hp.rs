//! Arbitrary-precision reals parameterized by decimal digits.
//!
//! `HpReal` wraps an [`astro_float::BigFloat`] together with the working
//! precision it was created at. Conversions to and from exact integers go
//! through the raw mantissa so no decimal parsing is involved, and decimal
//! output is produced by exact big-integer rounding.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 32;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Number of mantissa bits used for a requested count of decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS
}

#[derive(Clone, Debug)]
pub struct HpReal {
    value: BigFloat,
    bits: usize,
}

impl HpReal {
    pub fn zero(digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        HpReal { value: BigFloat::from_word(0, bits), bits }
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        HpReal { value: BigFloat::from_i64(v, bits), bits }
    }

    pub fn from_f64(v: f64, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        HpReal { value: BigFloat::from_f64(v, bits), bits }
    }

    pub fn from_bigint(v: &BigInt, digits: u32) -> Self {
        Self::from_bigint_bits(v, bits_for_digits(digits))
    }

    fn from_bigint_bits(v: &BigInt, bits: usize) -> Self {
        if v.is_zero() {
            return HpReal { value: BigFloat::from_word(0, bits), bits };
        }
        let mag = v.magnitude();
        let bitlen = mag.bits() as usize;
        let words_len = bitlen.div_ceil(64);
        // normalize so the top bit of the top word is set
        let shifted: BigUint = mag << (words_len * 64 - bitlen);
        let words = shifted.to_u64_digits();
        let sign = if v.is_negative() { Sign::Neg } else { Sign::Pos };
        let mut value = BigFloat::from_words(&words, sign, bitlen as i32);
        value.set_precision(bits, RM).expect("precision change");
        HpReal { value, bits }
    }

    pub fn from_rational(q: &BigRational, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        let num = Self::from_bigint_bits(q.numer(), bits + 64);
        let den = Self::from_bigint_bits(q.denom(), bits + 64);
        let value = num.value.div(&den.value, bits, RM);
        HpReal { value, bits }
    }

    pub fn pi(digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        let value = with_consts(|cc| cc.pi(bits, RM));
        HpReal { value, bits }
    }

    /// Working precision in bits.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Working precision in decimal digits (guard bits excluded).
    pub fn digits(&self) -> u32 {
        ((self.bits.saturating_sub(GUARD_BITS)) as f64 / std::f64::consts::LOG2_10).floor() as u32
    }

    fn prec(&self, other: &HpReal) -> usize {
        self.bits.max(other.bits)
    }

    fn wrap(value: BigFloat, bits: usize) -> Self {
        HpReal { value, bits }
    }

    /// The same value rounded to `digits` decimal digits of precision.
    pub fn round_to(&self, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        let mut v = self.value.clone();
        v.set_precision(bits, RM).expect("precision change");
        HpReal { value: v, bits }
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.bits, RM), self.bits)
    }

    pub fn exp(&self) -> Self {
        let v = with_consts(|cc| self.value.exp(self.bits, RM, cc));
        Self::wrap(v, self.bits)
    }

    pub fn ln(&self) -> Self {
        let v = with_consts(|cc| self.value.ln(self.bits, RM, cc));
        Self::wrap(v, self.bits)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.value.powi(n, self.bits, RM), self.bits)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.bits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.bits, RM), self.bits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.value.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.value.is_nan() && !self.value.is_inf()
    }

    /// Exact decomposition `mantissa * 2^exponent`.
    pub fn to_parts(&self) -> Option<(BigInt, i64)> {
        if self.value.is_zero() {
            return Some((BigInt::zero(), 0));
        }
        let (words, _, sign, e, _) = self.value.as_raw_parts()?;
        let mag = BigUint::from_slice(
            &words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
        );
        let s = if sign == Sign::Neg { BigSign::Minus } else { BigSign::Plus };
        let exp = e as i64 - 64 * words.len() as i64;
        Some((BigInt::from_biguint(s, mag), exp))
    }

    /// Exact rational value of the binary representation.
    pub fn to_rational(&self) -> BigRational {
        let (m, e) = self.to_parts().expect("finite value");
        if e >= 0 {
            BigRational::from_integer(m << (e as usize))
        } else {
            BigRational::new(m, BigInt::one() << ((-e) as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.to_parts() {
            None => f64::NAN,
            Some((m, e)) => {
                if m.is_zero() {
                    return 0.0;
                }
                let bits = m.bits() as i64;
                let drop = (bits - 64).max(0);
                let top = (&m >> (drop as usize)).to_f64().unwrap_or(f64::NAN);
                top * 2f64.powi((e + drop) as i32)
            }
        }
    }

    /// Fixed-point decimal rendering with `decimals` fractional digits,
    /// rounded half away from zero.
    pub fn to_fixed(&self, decimals: usize) -> String {
        let Some((m, e)) = self.to_parts() else {
            return "NaN".into();
        };
        let scale = num_traits::pow(BigInt::from(10), decimals);
        let scaled = if e >= 0 {
            (m << (e as usize)) * scale
        } else {
            let den = BigInt::one() << ((-e) as usize);
            let num = m * scale;
            let (q, r) = num.abs().div_rem(&den);
            let q = if (r << 1usize) >= den { q + 1 } else { q };
            if num.is_negative() { -q } else { q }
        };
        let neg = scaled.is_negative();
        let mut digits = scaled.abs().to_string();
        if digits.len() <= decimals {
            digits = format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits);
        }
        let split = digits.len() - decimals;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&digits[..split]);
        if decimals > 0 {
            out.push('.');
            out.push_str(&digits[split..]);
        }
        out
    }

    /// Rendering with `sig` significant digits in scientific notation.
    pub fn to_sci(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mag = self.to_f64().abs().log10().floor() as i64;
        let shift = sig as i64 - 1 - mag;
        let ten = HpReal::from_i64(10, self.digits().max(sig as u32 + 5));
        let scaled = if shift >= 0 {
            self * &ten.powi(shift as usize)
        } else {
            self / &ten.powi((-shift) as usize)
        };
        let s = scaled.to_fixed(0);
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b.to_string()),
            None => (false, s),
        };
        // rounding may carry into an extra digit
        let (body, exp10) = if body.len() > sig { (body[..sig].to_string(), mag + 1) } else { (body, mag) };
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&body[..1]);
        if body.len() > 1 {
            out.push('.');
            out.push_str(&body[1..]);
        }
        out.push_str(&format!("e{exp10}"));
        out
    }
}

/// Serialized as a decimal string together with its precision in digits.
impl Serialize for HpReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HpReal", 2)?;
        st.serialize_field("value", &self.to_sci(self.digits().max(1) as usize))?;
        st.serialize_field("digits", &self.digits())?;
        st.end()
    }
}

impl PartialEq for HpReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_fixed(p)),
            None => f.write_str(&self.to_sci(self.digits().max(1) as usize)),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl $tr<&HpReal> for &HpReal {
            type Output = HpReal;
            fn $method(self, rhs: &HpReal) -> HpReal {
                let bits = self.prec(rhs);
                HpReal::wrap(self.value.$call(&rhs.value, bits, RM), bits)
            }
        }
        impl $tr<HpReal> for HpReal {
            type Output = HpReal;
            fn $method(self, rhs: HpReal) -> HpReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&HpReal> for HpReal {
            type Output = HpReal;
            fn $method(self, rhs: &HpReal) -> HpReal {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal::wrap(BigFloat::neg(&self.value), self.bits)
    }
}

impl Neg for &HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal::wrap(BigFloat::neg(&self.value), self.bits)
    }
}
