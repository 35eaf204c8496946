use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow, Zero};

/// Memo table for generalized harmonic numbers `H_j^(a) = sum_{i=1..j} 1/i^a`.
///
/// Values for one order `a` are stored as a growing prefix vector, so a
/// lookup of `H_j` fills in every `H_i` with `i < j` on the way.
#[derive(Debug, Default)]
pub struct HarmonicCache {
    by_order: HashMap<u32, Vec<BigRational>>,
}

impl HarmonicCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, j: u32, a: u32) -> BigRational {
        assert!(a >= 1, "harmonic order must be positive");
        let prefix = self.by_order.entry(a).or_insert_with(|| vec![BigRational::zero()]);
        while prefix.len() <= j as usize {
            let i = prefix.len();
            let term = BigRational::new(1.into(), pow(BigInt::from(i), a as usize));
            let next = prefix.last().expect("H_0 present") + term;
            prefix.push(next);
        }
        prefix[j as usize].clone()
    }
}

fn global() -> &'static Mutex<HarmonicCache> {
    static CACHE: OnceLock<Mutex<HarmonicCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HarmonicCache::new()))
}

/// `H_j^(a)`, memoized process-wide.
pub fn harmonic(j: u32, a: u32) -> BigRational {
    global().lock().expect("harmonic cache poisoned").get(j, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn small_values() {
        assert_eq!(harmonic(3, 1), rat(11, 6));
        assert_eq!(harmonic(2, 4), rat(17, 16));
        assert_eq!(harmonic(0, 3), int(0));
    }

    #[test]
    fn recurrence_holds() {
        let mut local = HarmonicCache::new();
        for a in 1..=6u32 {
            for j in 1..=200u32 {
                let step = harmonic(j, a) - local.get(j - 1, a);
                let expected = BigRational::new(1.into(), pow(BigInt::from(j), a as usize));
                assert_eq!(step, expected, "j = {j}, a = {a}");
            }
        }
    }

    #[test]
    fn concurrent_lookups_agree() {
        let handles: Vec<_> = (0..4)
            .map(|t| std::thread::spawn(move || (0..50).map(|j| harmonic(j + t, 2)).collect::<Vec<_>>()))
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            let vals = h.join().unwrap();
            for (j, v) in vals.into_iter().enumerate() {
                assert_eq!(v, HarmonicCache::new().get((j + t) as u32, 2));
            }
        }
    }
}
