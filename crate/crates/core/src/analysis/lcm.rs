use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::exact::lcm_upto;
use crate::hp::HpReal;

const THRESHOLD: f64 = 1.0025;

#[derive(Clone, Debug, Serialize)]
pub struct LcmRow {
    pub n: u64,
    pub psi: HpReal,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LcmGrowthReport {
    pub n_max: u64,
    pub exact_upto: u64,
    pub digits: u32,
    /// Sampled at powers of ten and at `n_max`.
    pub rows: Vec<LcmRow>,
    /// `(n, psi(n)/n)` maximizing the ratio over `10 <= n <= n_max`.
    pub max_ratio: Option<(u64, f64)>,
    /// Every `n <= exact_upto` has prime-power product equal to the lcm.
    pub exact_match: bool,
    /// Largest `|psi(n) - ln lcm(1..n)|` on the cross-check range.
    pub max_log_deviation: f64,
    /// Smallest `N` with `psi(n)/n < 1.0025` for all `N <= n <= n_max`.
    pub threshold_1_0025: Option<u64>,
}

/// `base[n] = p` when `n = p^k` for a prime `p`, else 0.
fn prime_power_bases(n_max: u64) -> Vec<u32> {
    let n = n_max as usize;
    let mut composite = vec![false; n + 1];
    let mut base = vec![0u32; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
        let mut q = p;
        loop {
            base[q] = p as u32;
            match q.checked_mul(p) {
                Some(next) if next <= n => q = next,
                _ => break,
            }
        }
    }
    base
}

/// Chebyshev `psi(n) = ln lcm(1..n)` by sieve, accumulated in high precision.
pub fn lcm_growth(n_max: u64, exact_upto: u64, digits: u32) -> Result<LcmGrowthReport, AnalysisError> {
    if exact_upto > n_max {
        return Err(AnalysisError::InvalidArgument(format!("exact_upto {exact_upto} exceeds n_max {n_max}")));
    }
    if digits < 30 {
        return Err(AnalysisError::InvalidArgument("psi needs at least 30 digits".into()));
    }
    let base = prime_power_bases(n_max);
    let w = digits + 10;
    let primes: Vec<u32> = (2..=n_max as usize).filter(|&i| base[i] == i as u32).map(|i| i as u32).collect();
    let logs: Vec<HpReal> = primes.par_iter().map(|p| HpReal::from_i64(*p as i64, w).ln()).collect();
    let log_of = |p: u32| &logs[primes.binary_search(&p).expect("sieved prime")];

    let mut psi = HpReal::zero(w);
    let mut product = BigUint::one();
    let mut running_lcm = BigUint::one();
    let mut exact_match = true;
    let mut max_log_deviation = 0.0f64;
    let mut rows = Vec::new();
    let mut max_ratio: Option<(u64, f64)> = None;
    let mut last_high: Option<u64> = None;
    let mut next_sample = 10u64;

    for n in 1..=n_max {
        let p = base[n as usize];
        if p != 0 {
            psi = psi + log_of(p);
        }
        if n <= exact_upto {
            if p != 0 {
                product *= p;
            }
            running_lcm = running_lcm.lcm(&BigUint::from(n));
            if product != running_lcm {
                exact_match = false;
            }
            let dev = (&psi - &HpReal::from_bigint(&product.clone().into(), w).ln()).abs().to_f64();
            max_log_deviation = max_log_deviation.max(dev);
        }
        // psi(n)/n only increases at prime powers, so those (and n = 10) are
        // the only candidates for the maximum and for threshold violations
        if n >= 10 && (p != 0 || n == 10) {
            let r = psi.to_f64() / n as f64;
            if max_ratio.is_none_or(|(_, m)| r > m) {
                max_ratio = Some((n, r));
            }
            if r >= THRESHOLD {
                last_high = Some(n);
            }
        } else if n < 10 && p != 0 && psi.to_f64() / n as f64 >= THRESHOLD {
            last_high = Some(n);
        }
        if n == next_sample || n == n_max {
            rows.push(LcmRow { n, psi: psi.round_to(digits), ratio: psi.to_f64() / n as f64 });
            if n == next_sample {
                next_sample = next_sample.saturating_mul(10);
            }
        }
    }
    if exact_upto > 0 && running_lcm != lcm_upto(exact_upto) {
        exact_match = false;
    }
    let threshold = match last_high {
        None => Some(1),
        Some(n) if n < n_max => Some(n + 1),
        Some(_) => None,
    };
    Ok(LcmGrowthReport {
        n_max,
        exact_upto,
        digits,
        rows,
        max_ratio,
        exact_match,
        max_log_deviation,
        threshold_1_0025: threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_of_ten_is_log_2520() {
        let rep = lcm_growth(10, 10, 30).unwrap();
        let row = &rep.rows[0];
        assert_eq!(row.n, 10);
        let exact = HpReal::from_i64(2520, 40).ln();
        assert!((&row.psi - &exact).abs().to_f64() < 1e-30);
        assert!(rep.exact_match);
    }

    #[test]
    fn exact_agreement_to_2000() {
        let rep = lcm_growth(2000, 2000, 30).unwrap();
        assert!(rep.exact_match);
        assert!(rep.max_log_deviation < 1e-25, "{}", rep.max_log_deviation);
    }

    #[test]
    fn prime_power_table() {
        let b = prime_power_bases(32);
        assert_eq!(b[8], 2);
        assert_eq!(b[9], 3);
        assert_eq!(b[6], 0);
        assert_eq!(b[1], 0);
        assert_eq!(b[31], 31);
        assert_eq!(b[32], 2);
    }

    #[test]
    fn classical_maximum_near_113() {
        let rep = lcm_growth(10_000, 100, 30).unwrap();
        let (n, r) = rep.max_ratio.unwrap();
        assert_eq!(n, 113);
        assert!((r - 1.03883).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(lcm_growth(10, 20, 30).is_err());
        assert!(lcm_growth(10, 5, 20).is_err());
    }
}
