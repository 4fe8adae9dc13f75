//! Monte Carlo estimate of the success probability.
//!
//! Trials are split into fixed-size chunks. Chunk `i` draws from a ChaCha8
//! stream seeded with `seed` and stream number `i`, so the estimate does not
//! depend on the number of worker threads or on merge order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::MultiplexConfiguration;

pub const CHUNK_SAMPLES: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_counts(successes: u64, samples: u64, seed: u64) -> Self {
        let mean = successes as f64 / samples as f64;
        let std_error = (mean * (1.0 - mean) / samples as f64).sqrt();
        McEstimate {
            mean,
            std_error,
            samples,
            seed,
        }
    }

    /// Distance from `value` in units of the standard error. Zero error
    /// counts as agreement only on exact equality.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.mean - value).abs();
        if self.std_error == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

struct Sampler {
    survival: Vec<f64>,
    qudits: Vec<Vec<usize>>,
    n_qudits: usize,
    budget: usize,
}

impl Sampler {
    fn new(config: &MultiplexConfiguration) -> Self {
        let code = config.code();
        let survival = (0..config.photons().len())
            .map(|i| config.photon_probability(i))
            .collect();
        let qudits = config
            .photons()
            .iter()
            .map(|ph| ph.qudits().collect())
            .collect();
        let budget = code.tolerance().saturating_sub(config.withheld()) as usize;
        Sampler {
            survival,
            qudits,
            n_qudits: code.d() as usize,
            budget,
        }
    }

    fn run_chunk(&self, seed: u64, chunk: u64, trials: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut stamp = vec![0u64; self.n_qudits];
        let mut successes = 0;
        for trial in 1..=trials {
            let mut lost = 0usize;
            for (p, qs) in self.survival.iter().zip(&self.qudits) {
                if rng.gen::<f64>() >= *p {
                    for &q in qs {
                        if stamp[q] != trial {
                            stamp[q] = trial;
                            lost += 1;
                        }
                    }
                }
            }
            if lost <= self.budget {
                successes += 1;
            }
        }
        successes
    }
}

/// Estimate the success probability from `samples` independent trials.
///
/// # Panics
/// If `samples` is zero.
pub fn estimate(config: &MultiplexConfiguration, samples: u64, seed: u64) -> McEstimate {
    assert!(samples >= 1, "at least one sample is required");
    let sampler = Sampler::new(config);
    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let trials = CHUNK_SAMPLES.min(samples - c * CHUNK_SAMPLES);
            sampler.run_chunk(seed, c, trials)
        })
        .sum();
    McEstimate::from_counts(successes, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ps_six_photon;
    use crate::code::QrsCode;
    use crate::config::{six_photon_mixed_configuration, uniform_configuration, Channel};

    #[test]
    fn perfect_channel() {
        let code = QrsCode::new(7, 4).unwrap();
        let cfg = uniform_configuration(code, 1, &[(Channel::new("a", 1.0), 7)], 0).unwrap();
        let est = estimate(&cfg, 1000, 3);
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.samples, 1000);
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = six_photon_mixed_configuration(0.8, 0.9);
        let a = estimate(&cfg, 200_000, 11);
        let b = estimate(&cfg, 200_000, 11);
        assert_eq!(a, b);
        let c = estimate(&cfg, 200_000, 12);
        assert_ne!(a.mean, c.mean);
        assert!((a.mean - c.mean).abs() < 6.0 * a.std_error.max(c.std_error) * 2f64.sqrt());
    }

    #[test]
    fn partial_chunk() {
        let cfg = six_photon_mixed_configuration(0.7, 0.7);
        let est = estimate(&cfg, CHUNK_SAMPLES + 17, 1);
        assert_eq!(est.samples, CHUNK_SAMPLES + 17);
        let exact = ps_six_photon(0.7, 0.7).unwrap().value();
        assert!(est.z_score(exact) < 4.5);
    }

    #[test]
    fn all_lost() {
        let code = QrsCode::new(5, 3).unwrap();
        let cfg = uniform_configuration(code, 1, &[(Channel::new("a", 0.0), 5)], 0).unwrap();
        assert_eq!(estimate(&cfg, 500, 0).mean, 0.0);
    }
}
