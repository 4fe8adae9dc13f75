#![allow(dead_code)]

use qrsnet::config::{validate, CodeParams, ConfigDocument};
use qrsnet::{Channel, MultiplexConfiguration, Photon, QrsCode};
use rand::seq::SliceRandom;
use rand::Rng;

pub const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

pub fn random_code(rng: &mut impl Rng, max_d: u32) -> QrsCode {
    let primes: Vec<u32> = PRIMES.iter().copied().filter(|&d| d <= max_d).collect();
    let d = *primes.choose(rng).unwrap();
    let k = rng.gen_range(d / 2 + 1..=d);
    QrsCode::new(d, k).unwrap()
}

/// A random valid configuration with at most `max_photons` photons. Qubits of
/// each transmitted qudit are cut into pieces, and photons bundle up to
/// three pieces from distinct qudits.
pub fn random_config(rng: &mut impl Rng, max_photons: usize) -> MultiplexConfiguration {
    loop {
        let code = random_code(rng, 13);
        let withheld = rng.gen_range(0..=code.tolerance());
        let sent = (code.d() - withheld) as usize;
        let per = code.qubits_per_qudit();
        let n_channels = rng.gen_range(1..=3);
        let channels: Vec<Channel> = (0..n_channels)
            .map(|i| {
                let p = match rng.gen_range(0..6) {
                    0 => 1.0,
                    1 => 0.0,
                    _ => rng.gen_range(0.3..1.0),
                };
                Channel::new(format!("c{i}"), p)
            })
            .collect();
        let mut pieces = Vec::new();
        for qudit in 0..sent {
            let cut = if per > 1 && rng.gen_bool(0.5) { rng.gen_range(1..per) } else { per };
            pieces.push((qudit, cut));
            if cut < per {
                pieces.push((qudit, per - cut));
            }
        }
        pieces.shuffle(rng);
        let mut photons = Vec::new();
        while !pieces.is_empty() {
            let want = rng.gen_range(1..=3);
            let mut carries: Vec<(usize, u32)> = vec![pieces.pop().unwrap()];
            while carries.len() < want {
                match pieces.iter().position(|p| carries.iter().all(|c| c.0 != p.0)) {
                    Some(i) => carries.push(pieces.swap_remove(i)),
                    None => break,
                }
            }
            let ch = &channels[rng.gen_range(0..n_channels)];
            photons.push(Photon::new(ch.id.clone(), &carries));
        }
        if photons.len() > max_photons {
            continue;
        }
        let doc = ConfigDocument {
            code: CodeParams::from(code),
            withheld: code.d() - sent as u32,
            channels,
            photons,
        };
        return validate(&doc).expect("generator builds valid documents");
    }
}
