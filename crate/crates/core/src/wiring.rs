//! Search for a fifteen-photon wiring of the eleven-qudit code that
//! reproduces [`ps_fifteen_photon`].
//!
//! The layout uses d = 11 (4 qubits per qudit) with seven degree-4 photons
//! in channel `ch2`, each holding 2 qubits of two different qudits, and eight
//! degree-2 photons in channel `ch1`, each holding half of one qudit.
//!
//! Every qudit has two 2-qubit halves. A `ch1` photon fills one half, so the
//! `ch2` photons form a loopless multigraph on the qudits with maximum degree
//! two: a disjoint union of paths and cycles (a 2-cycle is a doubled
//! photon pair). Path endpoints are qudits with one `ch1` photon, qudits off
//! the graph have two. Up to relabeling, a wiring is therefore fixed by the
//! number of qudits with two `ch1` photons, the multiset of path interior
//! lengths, and the multiset of cycle lengths, which is what
//! [`wiring_shapes`] enumerates: every isomorphism class exactly once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::ps_fifteen_photon;
use crate::code::QrsCode;
use crate::config::{validate, Channel, ConfigDocument, MultiplexConfiguration, Photon};
use crate::engine::{success_table, SuccessTable};

pub const SHARED_PHOTONS: u32 = 7;
pub const HALF_PHOTONS: u32 = 8;
const QUDITS: u32 = 11;

/// Agreement required at every sample point.
pub const MATCH_TOLERANCE: f64 = 1e-10;
pub const SAMPLE_POINTS: usize = 50;

/// One isomorphism class of wirings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WiringShape {
    /// Qudits carried entirely by two `ch1` photons.
    pub doubled: u32,
    /// Interior vertex count of each path, non-increasing.
    pub path_interiors: Vec<u32>,
    /// Length of each cycle (>= 2), non-increasing.
    pub cycles: Vec<u32>,
}

impl WiringShape {
    pub fn configuration(&self, p1: f64, p2: f64) -> MultiplexConfiguration {
        let mut photons = Vec::new();
        let mut next = 0usize;
        let shared = |a: usize, b: usize| Photon::new("ch2", &[(a, 2), (b, 2)]);
        for &interior in &self.path_interiors {
            let len = interior as usize + 2;
            let verts: Vec<usize> = (next..next + len).collect();
            next += len;
            for w in verts.windows(2) {
                photons.push(shared(w[0], w[1]));
            }
            photons.push(Photon::new("ch1", &[(verts[0], 2)]));
            photons.push(Photon::new("ch1", &[(verts[len - 1], 2)]));
        }
        for &len in &self.cycles {
            let len = len as usize;
            for i in 0..len {
                photons.push(shared(next + i, next + (i + 1) % len));
            }
            next += len;
        }
        for _ in 0..self.doubled {
            photons.push(Photon::new("ch1", &[(next, 2)]));
            photons.push(Photon::new("ch1", &[(next, 2)]));
            next += 1;
        }
        let doc = ConfigDocument {
            code: QrsCode::new(QUDITS, 6).expect("valid code").into(),
            withheld: 0,
            channels: vec![Channel::new("ch1", p1), Channel::new("ch2", p2)],
            photons,
        };
        validate(&doc).expect("every shape is a valid wiring")
    }
}

/// Partitions of `total` into at most `parts` non-negative parts, non-increasing.
fn partitions(total: u32, parts: u32, max: u32, min: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![vec![]];
    }
    if parts == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    for first in (min.max(1)..=max.min(total)).rev() {
        for mut rest in partitions(total - first, parts - 1, first, min) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All wiring isomorphism classes.
pub fn wiring_shapes() -> Vec<WiringShape> {
    let mut shapes = Vec::new();
    for doubled in 0..=HALF_PHOTONS / 2 {
        let endpoints = HALF_PHOTONS - 2 * doubled;
        let paths = endpoints / 2;
        let inner = QUDITS - doubled - endpoints;
        for on_paths in 0..=inner {
            if paths == 0 && on_paths > 0 {
                continue;
            }
            for mut interiors in partitions(on_paths, paths, on_paths, 0) {
                interiors.resize(paths as usize, 0);
                for cycles in partitions(inner - on_paths, u32::MAX, inner, 2) {
                    shapes.push(WiringShape {
                        doubled,
                        path_interiors: interiors.clone(),
                        cycles,
                    });
                }
            }
        }
    }
    shapes
}

#[derive(Debug, Clone)]
pub struct WiringCandidate {
    pub shape: WiringShape,
    pub table: SuccessTable,
    /// Largest |candidate - printed polynomial| over the sample points.
    pub max_deviation: f64,
    /// Basis coefficients that differ from the printed polynomial, as
    /// `((lost ch2, lost ch1), candidate, printed)`.
    pub coefficient_mismatches: Vec<((u32, u32), u64, u64)>,
}

impl WiringCandidate {
    pub fn configuration(&self) -> MultiplexConfiguration {
        self.shape.configuration(0.5, 0.5)
    }
}

#[derive(Debug, Clone)]
pub struct WiringSearch {
    pub shapes_examined: usize,
    /// First shape matching at every sample point, if any.
    pub matched: Option<WiringCandidate>,
    /// Shape with the smallest deviation.
    pub closest: WiringCandidate,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("no wiring among {shapes_examined} shapes reproduces the polynomial (closest deviation {closest_deviation:.3e})")]
pub struct NotFound {
    pub shapes_examined: usize,
    pub closest_deviation: f64,
}

impl WiringSearch {
    pub fn outcome(&self) -> Result<&WiringCandidate, NotFound> {
        self.matched.as_ref().ok_or(NotFound {
            shapes_examined: self.shapes_examined,
            closest_deviation: self.closest.max_deviation,
        })
    }
}

fn printed_coefficient(a: u32, b: u32) -> u64 {
    crate::analytic::fifteen_photon_coefficients()
        .into_iter()
        .find(|&(key, _)| key == (a, b))
        .map_or(0, |(_, n)| n)
}

fn assess(shape: WiringShape, samples: &[(f64, f64)]) -> WiringCandidate {
    let cfg = shape.configuration(0.5, 0.5);
    let table = success_table(&cfg).expect("15 photons are enumerable");
    let max_deviation = samples
        .iter()
        .map(|&(p1, p2)| {
            let printed = ps_fifteen_photon(p1, p2).expect("valid probabilities").value();
            (table.evaluate(&[p1, p2]) - printed).abs()
        })
        .fold(0.0, f64::max);
    let mut coefficient_mismatches = Vec::new();
    for a in 0..=SHARED_PHOTONS {
        for b in 0..=HALF_PHOTONS {
            // Table keys are [lost ch1, lost ch2] in channel order.
            let ours = table.get(&[b, a]);
            let printed = printed_coefficient(a, b);
            if ours != printed {
                coefficient_mismatches.push(((a, b), ours, printed));
            }
        }
    }
    WiringCandidate {
        shape,
        table,
        max_deviation,
        coefficient_mismatches,
    }
}

pub fn search_fifteen_photon_wiring(seed: u64) -> WiringSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(f64, f64)> = (0..SAMPLE_POINTS)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    let shapes = wiring_shapes();
    let shapes_examined = shapes.len();
    let candidates: Vec<WiringCandidate> = shapes.into_iter().map(|s| assess(s, &samples)).collect();
    let matched = candidates
        .iter()
        .find(|c| c.max_deviation <= MATCH_TOLERANCE)
        .cloned();
    let closest = candidates
        .into_iter()
        .min_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation))
        .expect("at least one shape");
    WiringSearch {
        shapes_examined,
        matched,
        closest,
    }
}
