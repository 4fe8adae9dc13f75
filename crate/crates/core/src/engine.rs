//! Exact success probability for arbitrary multiplexing configurations.
//!
//! Photons and qudits form a bipartite incidence graph. Its connected
//! components (clusters) lose qudits independently of each other, so the
//! loss distribution of the whole packet is the convolution of per-cluster
//! distributions. A cluster holding a single qudit reduces to a survival
//! product; larger clusters are enumerated over all photon arrival patterns.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analytic::SuccessProbability;
use crate::config::MultiplexConfiguration;

/// Largest cluster enumerated pattern by pattern (2^24 patterns).
pub const MAX_CLUSTER_PHOTONS: usize = 24;
/// Photon bound for the unclustered oracle.
pub const MAX_BRUTE_FORCE_PHOTONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("cluster of {0} photons exceeds the enumeration bound of {MAX_CLUSTER_PHOTONS}")]
    ClusterTooLarge(usize),
    #[error("{0} photons exceed the brute-force bound of {MAX_BRUTE_FORCE_PHOTONS}")]
    TooManyPhotons(usize),
}

/// Probability mass over the number of lost qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDistribution {
    pmf: Vec<f64>,
}

impl LossDistribution {
    pub fn new(pmf: Vec<f64>) -> Self {
        assert!(!pmf.is_empty());
        Self { pmf }
    }

    /// No qudits, nothing lost.
    pub fn certain_zero() -> Self {
        Self { pmf: vec![1.0] }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Number of qudits covered (`pmf.len() - 1`).
    pub fn qudits(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    /// `P(lost <= t)`.
    pub fn cdf(&self, t: usize) -> f64 {
        self.pmf.iter().take(t + 1).sum()
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.pmf.len() + other.pmf.len() - 1];
        for (i, &a) in self.pmf.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.pmf.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { pmf: out }
    }

    /// Distribution of `lost + offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let mut pmf = vec![0.0; offset];
        pmf.extend_from_slice(&self.pmf);
        Self { pmf }
    }
}

/// Poisson-binomial loss distribution of independent qudits with the given
/// survival probabilities.
pub fn poisson_binomial(survival: &[f64]) -> LossDistribution {
    let mut pmf = Vec::with_capacity(survival.len() + 1);
    pmf.push(1.0);
    for &s in survival {
        let lost = 1.0 - s;
        pmf.push(0.0);
        for t in (1..pmf.len()).rev() {
            pmf[t] = pmf[t] * s + pmf[t - 1] * lost;
        }
        pmf[0] *= s;
    }
    LossDistribution { pmf }
}

/// Connected component of the photon-qudit incidence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub photons: BTreeSet<usize>,
    pub qudits: BTreeSet<usize>,
}

/// Clusters ordered by their smallest qudit index.
pub fn cluster_decompose(config: &MultiplexConfiguration) -> Vec<Cluster> {
    let n = config.transmitted();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for photon in config.photons() {
        let mut qudits = photon.qudits();
        if let Some(first) = qudits.next() {
            let mut root = find(&mut parent, first);
            for q in qudits {
                let r = find(&mut parent, q);
                if r != root {
                    let (lo, hi) = if r < root { (r, root) } else { (root, r) };
                    parent[hi] = lo;
                    root = lo;
                }
            }
        }
    }
    let mut by_root: BTreeMap<usize, Cluster> = BTreeMap::new();
    for q in 0..n {
        let r = find(&mut parent, q);
        by_root
            .entry(r)
            .or_insert_with(|| Cluster {
                photons: BTreeSet::new(),
                qudits: BTreeSet::new(),
            })
            .qudits
            .insert(q);
    }
    for (i, photon) in config.photons().iter().enumerate() {
        if let Some(q) = photon.qudits().next() {
            let r = find(&mut parent, q);
            by_root.get_mut(&r).expect("qudit has a cluster").photons.insert(i);
        }
    }
    // Roots are always the smallest member, so BTreeMap order is qudit order.
    by_root.into_values().collect()
}

/// Loss distribution over the qudits of one cluster.
pub fn cluster_loss_pmf(
    cluster: &Cluster,
    config: &MultiplexConfiguration,
) -> Result<LossDistribution, EngineError> {
    let qudits: Vec<usize> = cluster.qudits.iter().copied().collect();
    if qudits.len() == 1 {
        let survive: f64 = cluster
            .photons
            .iter()
            .map(|&i| config.photon_probability(i))
            .product();
        return Ok(LossDistribution {
            pmf: vec![survive, 1.0 - survive],
        });
    }
    let m = cluster.photons.len();
    if m > MAX_CLUSTER_PHOTONS {
        return Err(EngineError::ClusterTooLarge(m));
    }
    let local = |q: usize| qudits.binary_search(&q).expect("qudit in cluster");
    let photons: Vec<(f64, Vec<usize>)> = cluster
        .photons
        .iter()
        .map(|&i| {
            (
                config.photon_probability(i),
                config.photons()[i].qudits().map(local).collect(),
            )
        })
        .collect();
    let mut walker = PatternWalker {
        photons: &photons,
        hits: vec![0; qudits.len()],
        lost: 0,
        pmf: vec![0.0; qudits.len() + 1],
    };
    walker.walk(0, 1.0);
    Ok(LossDistribution { pmf: walker.pmf })
}

/// Depth-first enumeration of arrival patterns, tracking how many lost
/// photons touch each qudit.
struct PatternWalker<'a> {
    photons: &'a [(f64, Vec<usize>)],
    hits: Vec<u32>,
    lost: usize,
    pmf: Vec<f64>,
}

impl PatternWalker<'_> {
    fn walk(&mut self, depth: usize, prob: f64) {
        if prob == 0.0 {
            return;
        }
        let Some((p, qudits)) = self.photons.get(depth) else {
            self.pmf[self.lost] += prob;
            return;
        };
        self.walk(depth + 1, prob * p);
        for &q in qudits {
            if self.hits[q] == 0 {
                self.lost += 1;
            }
            self.hits[q] += 1;
        }
        self.walk(depth + 1, prob * (1.0 - p));
        for &q in qudits {
            self.hits[q] -= 1;
            if self.hits[q] == 0 {
                self.lost -= 1;
            }
        }
    }
}

/// Loss distribution over the transmitted qudits (length `d - l + 1`).
pub fn loss_distribution(config: &MultiplexConfiguration) -> Result<LossDistribution, EngineError> {
    let clusters = cluster_decompose(config);
    let mut acc = LossDistribution::certain_zero();
    for cluster in &clusters {
        acc = acc.convolve(&cluster_loss_pmf(cluster, config)?);
    }
    debug_assert_eq!(acc.qudits(), config.transmitted());
    Ok(acc)
}

/// Distribution of total erasures, withheld qudits counted as lost (length `d + 1`).
pub fn erasure_distribution(
    config: &MultiplexConfiguration,
) -> Result<LossDistribution, EngineError> {
    Ok(loss_distribution(config)?.shifted(config.withheld() as usize))
}

pub fn success_probability(
    config: &MultiplexConfiguration,
) -> Result<SuccessProbability, EngineError> {
    let budget = config.code().tolerance() as usize;
    Ok(SuccessProbability::new(erasure_distribution(config)?.cdf(budget)))
}

/// Success probability of a uniform layout without building photons:
/// `blocks` lists `(qudit count, photon probability)`, every qudit relying
/// on `photons_per_qudit` photons of its block.
pub fn uniform_success(
    tolerance: u32,
    photons_per_qudit: u32,
    blocks: &[(usize, f64)],
    withheld: u32,
) -> SuccessProbability {
    let survival: Vec<f64> = blocks
        .iter()
        .flat_map(|&(n, p)| std::iter::repeat_n(p.powi(photons_per_qudit as i32), n))
        .collect();
    let value = match tolerance.checked_sub(withheld) {
        Some(budget) => poisson_binomial(&survival).cdf(budget as usize),
        None => 0.0,
    };
    SuccessProbability::new(value)
}

/// Independent oracle: one enumeration over every photon, no clustering.
pub fn brute_force(config: &MultiplexConfiguration) -> Result<SuccessProbability, EngineError> {
    let n = config.photons().len();
    if n > MAX_BRUTE_FORCE_PHOTONS {
        return Err(EngineError::TooManyPhotons(n));
    }
    let budget = config.code().tolerance() as usize;
    let withheld = config.withheld() as usize;
    let probs: Vec<f64> = (0..n).map(|i| config.photon_probability(i)).collect();
    let mut lost = vec![false; config.transmitted()];
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        lost.iter_mut().for_each(|l| *l = false);
        let mut prob = 1.0;
        for (i, photon) in config.photons().iter().enumerate() {
            if mask >> i & 1 == 1 {
                prob *= 1.0 - probs[i];
                for q in photon.qudits() {
                    lost[q] = true;
                }
            } else {
                prob *= probs[i];
            }
        }
        if withheld + lost.iter().filter(|&&l| l).count() <= budget {
            total += prob;
        }
    }
    Ok(SuccessProbability::new(total))
}

/// Success counts grouped by how many photons each channel lost.
///
/// `counts[v]` is the number of arrival patterns that lose `v[c]` photons
/// of channel `c` and still decode. The success probability is then
/// `sum_v counts[v] * prod_c p_c^(n_c - v_c) (1 - p_c)^v_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessTable {
    pub photons_per_channel: Vec<u32>,
    pub counts: BTreeMap<Vec<u32>, u64>,
}

impl SuccessTable {
    pub fn evaluate(&self, probs: &[f64]) -> f64 {
        assert_eq!(probs.len(), self.photons_per_channel.len());
        self.counts
            .iter()
            .map(|(lost, &n)| {
                let mut term = n as f64;
                for ((&v, &total), &p) in lost.iter().zip(&self.photons_per_channel).zip(probs) {
                    term *= p.powi((total - v) as i32) * (1.0 - p).powi(v as i32);
                }
                term
            })
            .sum()
    }

    pub fn get(&self, lost: &[u32]) -> u64 {
        self.counts.get(lost).copied().unwrap_or(0)
    }
}

pub fn success_table(config: &MultiplexConfiguration) -> Result<SuccessTable, EngineError> {
    let n = config.photons().len();
    if n > MAX_CLUSTER_PHOTONS {
        return Err(EngineError::ClusterTooLarge(n));
    }
    let channels = config.channels().len();
    let mut photons_per_channel = vec![0u32; channels];
    for i in 0..n {
        photons_per_channel[config.channel_of(i)] += 1;
    }
    let budget = config.code().tolerance() as usize;
    let withheld = config.withheld() as usize;
    let qudit_masks: Vec<Vec<usize>> = config
        .photons()
        .iter()
        .map(|p| p.qudits().collect())
        .collect();
    let mut counts = BTreeMap::new();
    let mut lost = vec![false; config.transmitted()];
    let mut per_channel = vec![0u32; channels];
    for mask in 0u64..(1u64 << n) {
        lost.iter_mut().for_each(|l| *l = false);
        per_channel.iter_mut().for_each(|c| *c = 0);
        for (i, qudits) in qudit_masks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                per_channel[config.channel_of(i)] += 1;
                for &q in qudits {
                    lost[q] = true;
                }
            }
        }
        if withheld + lost.iter().filter(|&&l| l).count() <= budget {
            *counts.entry(per_channel.clone()).or_insert(0) += 1;
        }
    }
    Ok(SuccessTable {
        photons_per_channel,
        counts,
    })
}
