use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NumericError;
use crate::reducer::{Family, FamilySpec};

/// Samples per batch. Each batch draws from its own ChaCha stream, so the
/// estimate depends only on (seed, samples) and not on the thread count.
pub const MC_BATCH: u64 = 1 << 16;
pub const MIN_SAMPLES: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub family: Family,
    pub n: u32,
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// The original, unreduced integrand of a family at a point of the cube.
pub fn mc_integrand(spec: FamilySpec, p: &[f64; 4]) -> f64 {
    let n = spec.n as i32;
    let [x, y, z, w] = *p;
    let bx = x * (1.0 - x) * y * (1.0 - y);
    let u = 1.0 - x * y;
    match spec.family {
        Family::Zeta2 => bx.powi(n) / u.powi(n + 1),
        Family::Zeta3 => (bx * z * (1.0 - z)).powi(n) / (1.0 - u * z).powi(n + 1),
        Family::Zeta4 => {
            let dz = 1.0 - u * z;
            let dw = 1.0 - u * w;
            (bx * z * (1.0 - z) * w * (1.0 - w)).powi(n) * u.powi(2 * n + 1) / (dz * dw).powi(n + 1)
        }
    }
}

/// Plain Monte Carlo over the unit hypercube of the family's dimension.
pub fn mc_integral(spec: FamilySpec, samples: u64, seed: u64) -> Result<McEstimate, NumericError> {
    if samples < MIN_SAMPLES {
        return Err(NumericError::InvalidArgument(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let dim = spec.family.dimension();
    let batches = samples.div_ceil(MC_BATCH);
    let partials: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let (mut s1, mut s2) = (0.0, 0.0);
            let mut p = [0.5f64; 4];
            for _ in 0..count {
                for c in p.iter_mut().take(dim) {
                    *c = rng.sample(Open01);
                }
                let v = mc_integrand(spec, &p);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partials.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(McEstimate { family: spec.family, n: spec.n, mean, std_error: (var / nf).sqrt(), samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_for_fixed_seed() {
        let spec = FamilySpec::new(Family::Zeta4, 1);
        let a = mc_integral(spec, 200_000, 7).unwrap();
        let b = mc_integral(spec, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = mc_integral(spec, 200_000, 8).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn independent_of_thread_count() {
        let spec = FamilySpec::new(Family::Zeta3, 1);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| mc_integral(spec, 300_000, 42).unwrap());
        assert_eq!(single, mc_integral(spec, 300_000, 42).unwrap());
    }

    #[test]
    fn zeta2_base_case() {
        let est = mc_integral(FamilySpec::new(Family::Zeta2, 0), 1_000_000, 2024).unwrap();
        assert!(est.covers(1.644_934_066_848_226_4, 3.0), "{est:?}");
    }

    #[test]
    fn integrand_vanishes_on_boundary() {
        let spec = FamilySpec::new(Family::Zeta4, 2);
        assert_eq!(mc_integrand(spec, &[0.0, 0.3, 0.4, 0.5]), 0.0);
        assert_eq!(mc_integrand(spec, &[0.2, 0.3, 1.0, 0.5]), 0.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(mc_integral(FamilySpec::new(Family::Zeta2, 0), 10, 1).is_err());
    }
}
