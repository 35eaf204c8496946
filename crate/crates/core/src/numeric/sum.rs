use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::quad::gauss_legendre;
use super::zeta::bernoulli_numbers;
use super::NumericError;
use crate::hp::HpReal;
use crate::zeta_form::PfTerm;

const GUARD_DIGITS: u32 = 10;

/// `sum_{m>=1} f(m)` split as a partial sum over `m < m_cut` and a tail,
/// with `radius` bounding the total error.
#[derive(Clone, Debug)]
pub struct TailBracket {
    pub partial: HpReal,
    pub tail: HpReal,
    pub radius: HpReal,
    pub m_cut: u64,
}

impl TailBracket {
    pub fn estimate(&self) -> HpReal {
        &self.partial + &self.tail
    }

    pub fn lower(&self) -> HpReal {
        &self.estimate() - &self.radius
    }

    pub fn upper(&self) -> HpReal {
        &self.estimate() + &self.radius
    }

    pub fn contains(&self, v: &HpReal) -> bool {
        (&self.estimate() - v).abs() <= self.radius
    }
}

fn ten_pow_neg(d: u32, w: u32) -> HpReal {
    HpReal::from_i64(10, w).powi(d as usize).recip()
}

fn rising(a: u32, len: u32) -> BigInt {
    (0..len).fold(BigInt::one(), |acc, i| acc * BigInt::from(a + i))
}

/// Sum a partial-fraction multiset term by term in high precision.
///
/// The tail `m >= m_cut` uses Euler-Maclaurin with the standard remainder
/// bound `|R_p| <= 2 zeta(2p)/(2 pi)^{2p} * int |f^{(2p)}|`, so the returned
/// bracket is rigorous up to the working-precision rounding term.
pub fn sum_terms_numeric(terms: &[PfTerm], m_cut: u64, digits: u32) -> Result<TailBracket, NumericError> {
    if m_cut < 1000 {
        return Err(NumericError::InvalidArgument(format!("m_cut must be at least 1000, got {m_cut}")));
    }
    let mut by_shift: BTreeMap<u32, BTreeMap<u32, BigRational>> = BTreeMap::new();
    for t in terms {
        *by_shift.entry(t.shift).or_default().entry(t.power).or_insert_with(BigRational::zero) += &t.coeff;
    }
    for powers in by_shift.values_mut() {
        powers.retain(|_, c| !c.is_zero());
    }
    by_shift.retain(|_, p| !p.is_empty());

    let harmonic: BigRational = by_shift.values().filter_map(|p| p.get(&1)).sum();
    if !harmonic.is_zero() {
        return Err(NumericError::DivergentInput(format!(
            "1/m coefficients sum to {harmonic}, summand decays only like 1/m"
        )));
    }

    let w = digits + GUARD_DIGITS;
    let hp = |q: &BigRational| HpReal::from_rational(q, w);
    let shifts: Vec<(u32, Vec<(u32, HpReal)>)> = by_shift
        .iter()
        .map(|(j, p)| (*j, p.iter().map(|(a, c)| (*a, hp(c))).collect()))
        .collect();
    let abs_total: BigRational = by_shift.values().flat_map(|p| p.values()).map(|c| c.abs()).sum();

    // f(m) summed from the top down
    let mut partial = HpReal::zero(w);
    for m in (1..m_cut).rev() {
        for (j, powers) in &shifts {
            let x = HpReal::from_i64((m + *j as u64) as i64, w).recip();
            let max_a = powers.last().map(|(a, _)| *a).unwrap_or(0);
            let mut xp = vec![HpReal::from_i64(1, w)];
            for _ in 0..max_a {
                let next = xp.last().expect("nonempty") * &x;
                xp.push(next);
            }
            for (a, c) in powers {
                partial = partial + c * &xp[*a as usize];
            }
        }
    }

    let big_m = m_cut as i64;
    let mut tail = HpReal::zero(w);
    for (j, powers) in &shifts {
        let mj = HpReal::from_i64(big_m + *j as i64, w);
        for (a, c) in powers {
            if *a == 1 {
                tail = tail - c * &mj.ln();
            } else {
                tail = tail + c / &(HpReal::from_i64((*a - 1) as i64, w) * mj.powi((*a - 1) as usize));
            }
        }
    }

    let deriv = |q: u32| -> HpReal {
        let mut acc = HpReal::zero(w);
        for (j, powers) in &shifts {
            let mj = HpReal::from_i64(big_m + *j as i64, w);
            for (a, c) in powers {
                let r = HpReal::from_bigint(&rising(*a, q), w);
                let term = c * &r / mj.powi((*a + q) as usize);
                acc = if q % 2 == 0 { acc + term } else { acc - term };
            }
        }
        acc
    };
    tail = tail + deriv(0) / HpReal::from_i64(2, w);

    let target = ten_pow_neg(digits + 2, w);
    let two_pi = HpReal::pi(w) * HpReal::from_i64(2, w);
    let mut p = 1u32;
    let bern = bernoulli_numbers(80);
    let remainder = loop {
        // bound for stopping after p corrections
        let mut integral_abs = HpReal::zero(w);
        for (j, powers) in &by_shift {
            let mj = HpReal::from_i64(big_m + *j as i64, w);
            for (a, c) in powers {
                let r = HpReal::from_bigint(&rising(*a, 2 * p), w);
                let denom = HpReal::from_i64((*a + 2 * p - 1) as i64, w) * mj.powi((*a + 2 * p - 1) as usize);
                integral_abs = integral_abs + hp(&c.abs()) * r / denom;
            }
        }
        let bound = HpReal::from_i64(4, w) * integral_abs / two_pi.powi(2 * p as usize);
        if bound < target || p >= 39 {
            break bound;
        }
        p += 1;
    };
    let mut fact = BigInt::one();
    for i in 1..=p {
        fact *= BigInt::from((2 * i - 1) * 2 * i);
        let b = hp(&(&bern[2 * i as usize] / BigRational::from_integer(fact.clone())));
        tail = tail - b * deriv(2 * i - 1);
    }

    let rounding = ten_pow_neg(digits, w) * (HpReal::from_i64(1, w) + hp(&abs_total));
    Ok(TailBracket { partial, tail, radius: remainder + rounding, m_cut })
}

/// Result of summing a monomial's series directly in double precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectSum {
    pub value: f64,
    pub tail: f64,
    pub error_bound: f64,
    pub m_cut: u64,
}

/// `w_t(m) * K_k(m; r, s)` evaluated straight from its defining formula.
fn monomial_summand(r: f64, s: f64, t: u32, k: u32, m: f64) -> f64 {
    let mut weight = 1.0;
    for i in 1..t {
        weight *= (m + i as f64 - 1.0) / i as f64;
    }
    let (a, b) = (m + r, m + s);
    let kernel = match k {
        0 => 1.0 / (a * b),
        1 => -(a + b) / (a * a * b * b),
        _ => 2.0 * (3.0 * m * m + 3.0 * m * (r + s) + r * r + r * s + s * s) / (a * a * a * b * b * b),
    };
    weight * kernel
}

/// Direct summation of `sum_m w_t(m) K_k(m; r, s)` up to `m_cut - 1` with a
/// quadrature-plus-Euler-Maclaurin tail. Independent of the partial-fraction
/// machinery.
pub fn sum_monomial_direct(r: u32, s: u32, t: u32, k: u32, m_cut: u64) -> Result<DirectSum, NumericError> {
    if k > 2 || t == 0 {
        return Err(NumericError::InvalidArgument(format!("unsupported monomial t={t}, k={k}")));
    }
    if t > k + 1 {
        return Err(NumericError::DivergentInput(format!(
            "summand grows like m^{} for t={t}, k={k}",
            t as i64 - 3 - k as i64
        )));
    }
    let (rf, sf) = (r as f64, s as f64);
    let f = |m: f64| monomial_summand(rf, sf, t, k, m);

    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    for m in (1..m_cut).rev() {
        let v = f(m as f64);
        abs_sum += v.abs();
        let s2 = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s2) + v;
        } else {
            comp += (v - s2) + sum;
        }
        sum = s2;
    }
    let partial = sum + comp;

    // int_M^inf f(m) dm with m = M/v
    let big_m = m_cut as f64;
    let (nodes, weights) = gauss_legendre(24);
    let integral: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(x, wt)| {
            let v = 0.5 * (x + 1.0);
            0.5 * wt * f(big_m / v) * big_m / (v * v)
        })
        .sum();
    let d1 = (f(big_m + 1.0) - f(big_m - 1.0)) / 2.0;
    let tail = integral + f(big_m) / 2.0 - d1 / 12.0;
    let error_bound = d1.abs() / 12.0 + 8.0 * f64::EPSILON * (abs_sum + integral.abs());
    Ok(DirectSum { value: partial + tail, tail, error_bound, m_cut })
}
