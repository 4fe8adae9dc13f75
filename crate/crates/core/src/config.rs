//! Photon, channel and multiplexing configurations.
//!
//! A [`ConfigDocument`] is the unchecked, serializable form read from disk.
//! [`validate`] turns it into a [`MultiplexConfiguration`], which is
//! immutable and guaranteed to satisfy every structural invariant, or returns
//! a [`ValidationReport`] listing all violations at once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{is_prime, CodeError, QrsCode};

/// Version of the JSON configuration schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub id: String,
    /// Per-photon transmission probability.
    pub p: f64,
}

impl Channel {
    pub fn new(id: impl Into<String>, p: f64) -> Self {
        Self { id: id.into(), p }
    }
}

/// Qubits of one qudit carried by a photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Carry {
    pub qudit: usize,
    pub qubits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Photon {
    #[serde(rename = "channel")]
    pub channel_id: String,
    pub carries: Vec<Carry>,
}

impl Photon {
    pub fn new(channel_id: impl Into<String>, carries: &[(usize, u32)]) -> Self {
        Self {
            channel_id: channel_id.into(),
            carries: carries
                .iter()
                .map(|&(qudit, qubits)| Carry { qudit, qubits })
                .collect(),
        }
    }

    /// Multiplexing degree: total qubits carried.
    pub fn degree(&self) -> u32 {
        self.carries.iter().map(|c| c.qubits).sum()
    }

    pub fn qudits(&self) -> impl Iterator<Item = usize> + '_ {
        self.carries.iter().map(|c| c.qudit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub d: u32,
    pub k: u32,
}

impl From<QrsCode> for CodeParams {
    fn from(code: QrsCode) -> Self {
        Self {
            d: code.d(),
            k: code.k(),
        }
    }
}

/// On-disk configuration, not yet validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub code: CodeParams,
    #[serde(default)]
    pub withheld: u32,
    pub channels: Vec<Channel>,
    pub photons: Vec<Photon>,
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("d = {0} is not prime")]
    NonPrimeD(u32),
    #[error("k = {k} is invalid for d = {d}: need 1 <= k <= d and 2k - d >= 1")]
    InvalidK { d: u32, k: u32 },
    #[error("channel '{0}' is declared more than once")]
    DuplicateChannel(String),
    #[error("channel '{id}' has transmission probability {p} outside [0, 1]")]
    InvalidProbability { id: String, p: f64 },
    #[error("photon {photon} references unknown channel '{channel}'")]
    UnknownChannel { photon: usize, channel: String },
    #[error("photon {photon} carries no qubits")]
    EmptyPhoton { photon: usize },
    #[error("photon {photon} carries qudit {qudit} more than once")]
    DuplicateQudit { photon: usize, qudit: usize },
    #[error("photon {photon} carries zero qubits of qudit {qudit}")]
    ZeroQubits { photon: usize, qudit: usize },
    #[error("photon {photon} carries qudit {qudit}, which is not transmitted (valid indices 0..{transmitted})")]
    QuditOutOfRange {
        photon: usize,
        qudit: usize,
        transmitted: usize,
    },
    #[error("qudit {qudit} receives {found} qubits, expected {expected}")]
    QubitCountMismatch {
        qudit: usize,
        expected: u32,
        found: u32,
    },
    #[error("{withheld} withheld qudits exceed the erasure tolerance {tolerance}")]
    WithheldExceedsTolerance { withheld: u32, tolerance: u32 },
}

/// Every invariant violated by a configuration document.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} violations)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexConfiguration {
    code: QrsCode,
    channels: Vec<Channel>,
    photons: Vec<Photon>,
    withheld: u32,
    photon_channel: Vec<usize>,
}

impl MultiplexConfiguration {
    pub fn code(&self) -> QrsCode {
        self.code
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn photons(&self) -> &[Photon] {
        &self.photons
    }

    pub fn withheld(&self) -> u32 {
        self.withheld
    }

    /// Number of qudits actually sent, `d - l`.
    pub fn transmitted(&self) -> usize {
        (self.code.d() - self.withheld) as usize
    }

    /// Index into [`Self::channels`] of the channel carrying photon `i`.
    pub fn channel_of(&self, photon: usize) -> usize {
        self.photon_channel[photon]
    }

    /// Transmission probability of photon `i`.
    pub fn photon_probability(&self, photon: usize) -> f64 {
        self.channels[self.photon_channel[photon]].p
    }

    pub fn channel_index(&self, id: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    pub fn total_qubits(&self) -> u32 {
        self.photons.iter().map(Photon::degree).sum()
    }

    /// Qudits whose photons all travel in channel `id` (the per-channel `n`).
    pub fn qudits_in_channel(&self, id: &str) -> usize {
        let Some(ch) = self.channel_index(id) else {
            return 0;
        };
        let mut owner: Vec<Option<Option<usize>>> = vec![None; self.transmitted()];
        for (i, photon) in self.photons.iter().enumerate() {
            let c = self.photon_channel[i];
            for q in photon.qudits() {
                owner[q] = match owner[q] {
                    None => Some(Some(c)),
                    Some(Some(prev)) if prev == c => Some(Some(c)),
                    _ => Some(None),
                };
            }
        }
        owner.iter().filter(|o| **o == Some(Some(ch))).count()
    }

    /// Copy with the probability of channel `id` replaced.
    pub fn with_probability(&self, id: &str, p: f64) -> Option<Self> {
        let idx = self.channel_index(id)?;
        let mut out = self.clone();
        out.channels[idx].p = p;
        Some(out)
    }

    /// Copy with every channel probability replaced, in channel order.
    pub fn with_probabilities(&self, probs: &[f64]) -> Self {
        assert_eq!(probs.len(), self.channels.len());
        let mut out = self.clone();
        for (c, &p) in out.channels.iter_mut().zip(probs) {
            c.p = p;
        }
        out
    }

    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            code: self.code.into(),
            withheld: self.withheld,
            channels: self.channels.clone(),
            photons: self.photons.clone(),
        }
    }
}

pub fn validate(doc: &ConfigDocument) -> Result<MultiplexConfiguration, ValidationReport> {
    let mut violations = Vec::new();
    let CodeParams { d, k } = doc.code;

    let code = match QrsCode::new(d, k) {
        Ok(code) => Some(code),
        Err(CodeError::NonPrimeD(d)) => {
            violations.push(Violation::NonPrimeD(d));
            None
        }
        Err(CodeError::InvalidK { d, k, .. }) => {
            violations.push(Violation::InvalidK { d, k });
            None
        }
    };
    // Structural checks below only need d; a missing prime still yields useful reports.
    let qubits_per_qudit = crate::code::qubits_for_dimension(d);
    let tolerance = d.saturating_sub(k);
    if is_prime(d) && doc.withheld > tolerance {
        violations.push(Violation::WithheldExceedsTolerance {
            withheld: doc.withheld,
            tolerance,
        });
    }
    let transmitted = d.saturating_sub(doc.withheld) as usize;

    let mut channel_ids: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, ch) in doc.channels.iter().enumerate() {
        if channel_ids.insert(ch.id.as_str(), i).is_some() {
            violations.push(Violation::DuplicateChannel(ch.id.clone()));
        }
        if !(0.0..=1.0).contains(&ch.p) {
            violations.push(Violation::InvalidProbability {
                id: ch.id.clone(),
                p: ch.p,
            });
        }
    }

    let mut photon_channel = Vec::with_capacity(doc.photons.len());
    let mut received = vec![0u32; transmitted];
    for (i, photon) in doc.photons.iter().enumerate() {
        match channel_ids.get(photon.channel_id.as_str()) {
            Some(&c) => photon_channel.push(c),
            None => {
                violations.push(Violation::UnknownChannel {
                    photon: i,
                    channel: photon.channel_id.clone(),
                });
                photon_channel.push(usize::MAX);
            }
        }
        if photon.carries.is_empty() {
            violations.push(Violation::EmptyPhoton { photon: i });
        }
        let mut seen = BTreeSet::new();
        for carry in &photon.carries {
            if !seen.insert(carry.qudit) {
                violations.push(Violation::DuplicateQudit {
                    photon: i,
                    qudit: carry.qudit,
                });
            }
            if carry.qubits == 0 {
                violations.push(Violation::ZeroQubits {
                    photon: i,
                    qudit: carry.qudit,
                });
            }
            match received.get_mut(carry.qudit) {
                Some(r) => *r += carry.qubits,
                None => violations.push(Violation::QuditOutOfRange {
                    photon: i,
                    qudit: carry.qudit,
                    transmitted,
                }),
            }
        }
    }
    for (qudit, &found) in received.iter().enumerate() {
        if found != qubits_per_qudit {
            violations.push(Violation::QubitCountMismatch {
                qudit,
                expected: qubits_per_qudit,
                found,
            });
        }
    }

    match code {
        Some(code) if violations.is_empty() => Ok(MultiplexConfiguration {
            code,
            channels: doc.channels.clone(),
            photons: doc.photons.clone(),
            withheld: doc.withheld,
            photon_channel,
        }),
        _ => Err(ValidationReport { violations }),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("split assigns {assigned} qudits but d - withheld = {expected}")]
    SplitMismatch { assigned: usize, expected: usize },
    #[error("multiplexing degree must be at least 1")]
    ZeroDegree,
    #[error(transparent)]
    Invalid(#[from] ValidationReport),
}

/// Canonical configuration: each qudit is carried by `ceil(ceil(log2 d) / q)`
/// photons of its own, all in the channel it was assigned to. The last photon
/// of a qudit carries the remainder when `q` does not divide `ceil(log2 d)`.
///
/// Qudits are numbered in split order; the top `withheld` indices are not sent.
pub fn uniform_configuration(
    code: QrsCode,
    q: u32,
    split: &[(Channel, usize)],
    withheld: u32,
) -> Result<MultiplexConfiguration, BuildError> {
    if q == 0 {
        return Err(BuildError::ZeroDegree);
    }
    let expected = code.d().saturating_sub(withheld) as usize;
    let assigned: usize = split.iter().map(|(_, n)| n).sum();
    if assigned != expected {
        return Err(BuildError::SplitMismatch { assigned, expected });
    }
    let per_qudit = code.qubits_per_qudit();
    let mut channels: Vec<Channel> = Vec::new();
    let mut photons = Vec::new();
    let mut qudit = 0usize;
    for (channel, count) in split {
        if !channels.iter().any(|c| c.id == channel.id) {
            channels.push(channel.clone());
        }
        for _ in 0..*count {
            let mut remaining = per_qudit;
            while remaining > 0 {
                let take = remaining.min(q);
                photons.push(Photon::new(channel.id.clone(), &[(qudit, take)]));
                remaining -= take;
            }
            qudit += 1;
        }
    }
    let doc = ConfigDocument {
        code: code.into(),
        withheld,
        channels,
        photons,
    };
    Ok(validate(&doc)?)
}

/// Seven-qudit mixed-multiplexing layout (d = 7, k = 4, 6 photons).
///
/// Channel `ch1` carries three degree-3 photons, each holding a whole qudit
/// (qudits 3, 4, 5). Channel `ch2` carries three degree-4 photons; photon `j`
/// holds all of qudit `j` plus one qubit of the shared qudit 6, so losing any
/// `ch2` photon erases two qudits.
pub fn six_photon_mixed_configuration(p1: f64, p2: f64) -> MultiplexConfiguration {
    let code = QrsCode::new(7, 4).expect("valid code");
    let doc = ConfigDocument {
        code: code.into(),
        withheld: 0,
        channels: vec![Channel::new("ch1", p1), Channel::new("ch2", p2)],
        photons: vec![
            Photon::new("ch1", &[(3, 3)]),
            Photon::new("ch1", &[(4, 3)]),
            Photon::new("ch1", &[(5, 3)]),
            Photon::new("ch2", &[(0, 3), (6, 1)]),
            Photon::new("ch2", &[(1, 3), (6, 1)]),
            Photon::new("ch2", &[(2, 3), (6, 1)]),
        ],
    };
    validate(&doc).expect("six-photon layout is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(id: &str, p: f64) -> Channel {
        Channel::new(id, p)
    }

    #[test]
    fn seven_degree_three_photons_is_valid() {
        let code = QrsCode::new(7, 4).unwrap();
        let cfg = uniform_configuration(code, 3, &[(ch("a", 0.9), 7)], 0).unwrap();
        assert_eq!(cfg.photons().len(), 7);
        assert!(cfg.photons().iter().all(|p| p.degree() == 3));
    }

    #[test]
    fn qubit_mismatch_is_reported_with_qudit() {
        let code = QrsCode::new(7, 4).unwrap();
        let mut doc = uniform_configuration(code, 3, &[(ch("a", 0.9), 7)], 0)
            .unwrap()
            .to_document();
        doc.photons[2].carries[0].qubits = 2;
        let report = validate(&doc).unwrap_err();
        assert_eq!(
            report.violations,
            vec![Violation::QubitCountMismatch {
                qudit: 2,
                expected: 3,
                found: 2
            }]
        );
        assert!(report.to_string().contains("qudit 2"));
    }

    #[test]
    fn non_prime_d() {
        let doc = ConfigDocument {
            code: CodeParams { d: 4, k: 3 },
            withheld: 0,
            channels: vec![ch("a", 0.5)],
            photons: (0..4).map(|q| Photon::new("a", &[(q, 2)])).collect(),
        };
        let report = validate(&doc).unwrap_err();
        assert_eq!(report.violations, vec![Violation::NonPrimeD(4)]);
    }

    #[test]
    fn collects_every_violation() {
        let doc = ConfigDocument {
            code: CodeParams { d: 3, k: 2 },
            withheld: 2,
            channels: vec![ch("a", 1.5), ch("a", 0.5)],
            photons: vec![
                Photon::new("zz", &[(0, 1), (0, 1)]),
                Photon::new("a", &[]),
                Photon::new("a", &[(2, 2)]),
            ],
        };
        let v = validate(&doc).unwrap_err().violations;
        assert!(v.contains(&Violation::WithheldExceedsTolerance {
            withheld: 2,
            tolerance: 1
        }));
        assert!(v.contains(&Violation::DuplicateChannel("a".into())));
        assert!(v.contains(&Violation::InvalidProbability { id: "a".into(), p: 1.5 }));
        assert!(v.contains(&Violation::UnknownChannel {
            photon: 0,
            channel: "zz".into()
        }));
        assert!(v.contains(&Violation::DuplicateQudit { photon: 0, qudit: 0 }));
        assert!(v.contains(&Violation::EmptyPhoton { photon: 1 }));
        assert!(v.contains(&Violation::QuditOutOfRange {
            photon: 2,
            qudit: 2,
            transmitted: 1
        }));
    }

    #[test]
    fn uniform_builders() {
        let c7 = QrsCode::new(7, 4).unwrap();
        let cfg = uniform_configuration(c7, 1, &[(ch("a", 0.9), 7)], 0).unwrap();
        assert_eq!(cfg.photons().len(), 21);

        let c43 = QrsCode::new(43, 22).unwrap();
        let cfg = uniform_configuration(c43, 4, &[(ch("a", 0.9), 43)], 0).unwrap();
        assert_eq!(cfg.photons().len(), 86);
        let d0: Vec<u32> = cfg.photons()[..2].iter().map(Photon::degree).collect();
        assert_eq!(d0, vec![4, 2]);

        let c3 = QrsCode::new(3, 2).unwrap();
        let cfg = uniform_configuration(c3, 2, &[(ch("a", 0.9), 3)], 0).unwrap();
        assert_eq!(cfg.photons().len(), 3);

        let err = uniform_configuration(c7, 1, &[(ch("a", 0.9), 5)], 0).unwrap_err();
        assert_eq!(
            err,
            BuildError::SplitMismatch {
                assigned: 5,
                expected: 7
            }
        );
        let with_l = uniform_configuration(c7, 1, &[(ch("a", 0.9), 5)], 2).unwrap();
        assert_eq!(with_l.transmitted(), 5);
    }

    #[test]
    fn six_photon_layout() {
        let cfg = six_photon_mixed_configuration(0.9, 0.95);
        let mut degrees: Vec<u32> = cfg.photons().iter().map(Photon::degree).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![3, 3, 3, 4, 4, 4]);
        assert_eq!(cfg.total_qubits(), 21);
        assert_eq!(cfg.qudits_in_channel("ch1"), 3);
        assert_eq!(cfg.qudits_in_channel("ch2"), 4);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"code":{"d":7,"k":4},"withheld":0,
            "channels":[{"id":"ch1","p":0.96}],
            "photons":[{"channel":"ch1","carries":[{"qudit":0,"qubits":3}]}]}"#;
        let doc = ConfigDocument::from_json(text).unwrap();
        assert_eq!(doc.photons[0].channel_id, "ch1");
        let back: ConfigDocument =
            serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
        // Only one of seven qudits is present.
        assert!(validate(&doc).is_err());
    }
}
