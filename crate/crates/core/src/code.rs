//! Quantum Reed-Solomon code parameters.
//!
//! A `[[d, 2k-d, d-k+1]]_d` code encodes `2k-d` logical qudits of prime
//! dimension `d` into `d` physical qudits and survives up to `d-k` erasures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("d = {0} is not prime")]
    NonPrimeD(u32),
    #[error("k = {k} is outside [1, d] or leaves no logical qudit (2k - d = {logical}) for d = {d}")]
    InvalidK { d: u32, k: u32, logical: i64 },
}

/// Trial division; codes stay in the low thousands.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3u32;
    while (f as u64) * (f as u64) <= n as u64 {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Number of qubits needed to carry one qudit of dimension `d`, i.e. `ceil(log2 d)`.
pub fn qubits_for_dimension(d: u32) -> u32 {
    if d <= 1 {
        1
    } else {
        (d - 1).ilog2() + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct QrsCode {
    d: u32,
    k: u32,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    d: u32,
    k: u32,
}

impl TryFrom<RawCode> for QrsCode {
    type Error = CodeError;
    fn try_from(raw: RawCode) -> Result<Self, Self::Error> {
        QrsCode::new(raw.d, raw.k)
    }
}

impl From<QrsCode> for RawCode {
    fn from(code: QrsCode) -> Self {
        RawCode { d: code.d, k: code.k }
    }
}

impl QrsCode {
    pub fn new(d: u32, k: u32) -> Result<Self, CodeError> {
        if !is_prime(d) {
            return Err(CodeError::NonPrimeD(d));
        }
        let logical = 2 * k as i64 - d as i64;
        if k < 1 || k > d || logical < 1 {
            return Err(CodeError::InvalidK { d, k, logical });
        }
        Ok(Self { d, k })
    }

    /// The code with a single logical qudit, `k = (d + 1) / 2`.
    pub fn single_logical(d: u32) -> Result<Self, CodeError> {
        Self::new(d, d / 2 + 1)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Qudit dimension; equal to the number of physical qudits.
    pub fn radix(&self) -> u32 {
        self.d
    }

    pub fn logical_qudits(&self) -> u32 {
        2 * self.k - self.d
    }

    /// Maximum number of erased qudits the code recovers from.
    pub fn tolerance(&self) -> u32 {
        self.d - self.k
    }

    pub fn qubits_per_qudit(&self) -> u32 {
        qubits_for_dimension(self.d)
    }

    /// Photons each qudit depends on when every photon carries `q` qubits.
    pub fn photons_per_qudit(&self, q: u32) -> u32 {
        assert!(q >= 1, "multiplexing degree must be positive");
        self.qubits_per_qudit().div_ceil(q)
    }
}

impl std::fmt::Display for QrsCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[[{}, {}, {}]]_{}",
            self.d,
            self.logical_qudits(),
            self.tolerance() + 1,
            self.d
        )
    }
}
