mod common;

use approx::assert_abs_diff_eq;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qrsnet::analytic::{ps_single, ps_single_withheld, ps_six_photon, ps_two_channel};
use qrsnet::config::{six_photon_mixed_configuration, uniform_configuration};
use qrsnet::engine::{brute_force, cluster_decompose, loss_distribution, success_probability};
use qrsnet::{Channel, MultiplexConfiguration, QrsCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn engine_matches_brute_force_on_random_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut multi_photon_clusters = 0;
    for case in 0..250 {
        let cfg = common::random_config(&mut rng, 20);
        let fast = success_probability(&cfg).unwrap().value();
        let slow = brute_force(&cfg).unwrap().value();
        assert!((fast - slow).abs() <= 1e-12, "case {case}: {fast} vs {slow}");
        if cluster_decompose(&cfg).iter().any(|c| c.photons.len() > 2) {
            multi_photon_clusters += 1;
        }
    }
    assert!(multi_photon_clusters > 50, "generator should produce shared photons");
}

/// Success probability as an exact fraction, channel `i` arriving with `probs[i]`.
fn exact_success(cfg: &MultiplexConfiguration, probs: &[BigRational]) -> BigRational {
    let code = cfg.code();
    let budget = code.tolerance() - cfg.withheld();
    let n = cfg.photons().len();
    let mut total = BigRational::zero();
    for pattern in 0u32..(1 << n) {
        let mut weight = BigRational::one();
        let mut lost = vec![false; code.d() as usize];
        for (i, photon) in cfg.photons().iter().enumerate() {
            let p = &probs[cfg.channel_of(i)];
            if pattern >> i & 1 == 1 {
                weight *= p;
            } else {
                weight *= BigRational::one() - p;
                for q in photon.qudits() {
                    lost[q] = true;
                }
            }
        }
        if lost.iter().filter(|&&l| l).count() as u32 <= budget {
            total += weight;
        }
    }
    total
}

#[test]
fn engine_matches_exact_rational_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for case in 0..40 {
        let cfg = common::random_config(&mut rng, 13);
        let numerators: Vec<i64> = cfg.channels().iter().map(|_| rng.gen_range(0..=1000)).collect();
        let probs: Vec<BigRational> = numerators
            .iter()
            .map(|&a| BigRational::new(BigInt::from(a), BigInt::from(1000)))
            .collect();
        let floats: Vec<f64> = numerators.iter().map(|&a| a as f64 / 1000.0).collect();
        let cfg = cfg.with_probabilities(&floats);
        let exact = exact_success(&cfg, &probs).to_f64().unwrap();
        let fast = success_probability(&cfg).unwrap().value();
        assert!((fast - exact).abs() <= 1e-12, "case {case}: {fast} vs {exact}");
    }
}

#[test]
fn loss_distributions_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let cfg = common::random_config(&mut rng, 24);
        let dist = loss_distribution(&cfg).unwrap();
        assert_abs_diff_eq!(dist.total(), 1.0, epsilon = 1e-12);
        assert_eq!(dist.qudits(), cfg.transmitted());
    }
}

#[test]
fn single_channel_closed_form_matches_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let code = common::random_code(&mut rng, 13);
        let q = rng.gen_range(1..=code.qubits_per_qudit());
        let p: f64 = rng.gen();
        let l = rng.gen_range(0..=code.tolerance());
        let cfg = uniform_configuration(code, q, &[(Channel::new("a", p), (code.d() - l) as usize)], l).unwrap();
        let engine = success_probability(&cfg).unwrap().value();
        let closed = ps_single_withheld(code, q, p, l).unwrap().value();
        assert!((engine - closed).abs() <= 1e-12);
        if l == 0 {
            assert_eq!(closed, ps_single(code, q, p).unwrap().value());
        }
    }
}

#[test]
fn large_code_closed_form_matches_engine() {
    for (d, q, p) in [(43, 1, 0.94), (43, 4, 0.83), (211, 8, 0.6), (101, 3, 0.9)] {
        let code = QrsCode::single_logical(d).unwrap();
        let cfg = uniform_configuration(code, q, &[(Channel::new("a", p), d as usize)], 0).unwrap();
        let engine = success_probability(&cfg).unwrap().value();
        let closed = ps_single(code, q, p).unwrap().value();
        assert!((engine - closed).abs() <= 1e-12, "d={d}: {engine} vs {closed}");
    }
}

#[test]
fn two_channel_closed_form_matches_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let d = [3u32, 5, 7, 11, 13, 43][rng.gen_range(0..6)];
        let code = QrsCode::single_logical(d).unwrap();
        let q = rng.gen_range(1..=code.qubits_per_qudit());
        let n = rng.gen_range(0..=d);
        let (pa, pb): (f64, f64) = (rng.gen(), rng.gen());
        let split = [(Channel::new("b", pb), n as usize), (Channel::new("a", pa), (d - n) as usize)];
        let cfg = uniform_configuration(code, q, &split, 0).unwrap();
        let engine = success_probability(&cfg).unwrap().value();
        let closed = ps_two_channel(code, q, n, pa, pb).unwrap().value();
        assert!((engine - closed).abs() <= 1e-12);
    }
}

#[test]
fn six_photon_closed_form_matches_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let (p1, p2): (f64, f64) = (rng.gen(), rng.gen());
        let cfg = six_photon_mixed_configuration(p1, p2);
        let engine = success_probability(&cfg).unwrap().value();
        let slow = brute_force(&cfg).unwrap().value();
        let closed = ps_six_photon(p1, p2).unwrap().value();
        assert!((engine - closed).abs() <= 1e-12);
        assert!((slow - closed).abs() <= 1e-12);
    }
}
