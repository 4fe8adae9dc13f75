//! Closed-form success probabilities.
//!
//! These are the printed polynomial forms: a single uniform channel, a single
//! channel with withheld qudits, two uniform channels, and the two
//! mixed-multiplexing layouts (six photons over seven qudits, fifteen photons
//! over eleven qudits). The general configuration case lives in
//! [`crate::engine`].

use thiserror::Error;

use crate::binom::binomial_f64;
use crate::code::QrsCode;

/// Roundoff slack allowed outside `[0, 1]`.
pub const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SuccessProbability(f64);

impl SuccessProbability {
    pub fn new(value: f64) -> Self {
        assert!(
            (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value),
            "success probability {value} outside [0, 1]"
        );
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<SuccessProbability> for f64 {
    fn from(p: SuccessProbability) -> f64 {
        p.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("{withheld} withheld qudits exceed the erasure tolerance {tolerance}")]
    WithheldExceedsTolerance { withheld: u32, tolerance: u32 },
    #[error("two-channel form needs 2k - d = 1, got {logical}")]
    ToleranceMismatch { logical: u32 },
    #[error("{n} qudits requested in one channel of a {d}-qudit code")]
    SplitOutOfRange { n: u32, d: u32 },
    #[error("multiplexing degree must be at least 1")]
    ZeroDegree,
}

fn check_p(p: f64) -> Result<f64, AnalyticError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(AnalyticError::InvalidProbability(p))
    }
}

/// Probability that a qudit survives when each of its photons arrives with `p`.
fn qudit_survival(code: QrsCode, q: u32, p: f64) -> Result<f64, AnalyticError> {
    if q == 0 {
        return Err(AnalyticError::ZeroDegree);
    }
    Ok(check_p(p)?.powi(code.photons_per_qudit(q) as i32))
}

/// Success over one channel: `sum_{j<=d-k} C(d,j) P^(d-j) (1-P)^j`, `P = p^ceil(log2 d / q)`.
pub fn ps_single(code: QrsCode, q: u32, p: f64) -> Result<SuccessProbability, AnalyticError> {
    ps_single_withheld(code, q, p, 0)
}

/// Single channel with `l` encoded qudits kept back; they use up `l` units of tolerance.
pub fn ps_single_withheld(
    code: QrsCode,
    q: u32,
    p: f64,
    l: u32,
) -> Result<SuccessProbability, AnalyticError> {
    if l > code.tolerance() {
        return Err(AnalyticError::WithheldExceedsTolerance {
            withheld: l,
            tolerance: code.tolerance(),
        });
    }
    let survive = qudit_survival(code, q, p)?;
    let sent = (code.d() - l) as i32;
    let budget = (code.tolerance() - l) as i32;
    let total: f64 = (0..=budget)
        .map(|j| {
            binomial_f64(sent as u64, j as u64)
                * survive.powi(sent - j)
                * (1.0 - survive).powi(j)
        })
        .sum();
    Ok(SuccessProbability::new(total))
}

/// Two uniform channels: `n` qudits travel at `p_b`, the remaining `d - n` at `p_a`.
///
/// Defined only for single-logical-qudit codes (`2k - d = 1`), whose tolerance
/// is `(d - 1) / 2`.
pub fn ps_two_channel(
    code: QrsCode,
    q: u32,
    n: u32,
    p_a: f64,
    p_b: f64,
) -> Result<SuccessProbability, AnalyticError> {
    if code.logical_qudits() != 1 {
        return Err(AnalyticError::ToleranceMismatch {
            logical: code.logical_qudits(),
        });
    }
    let d = code.d();
    if n > d {
        return Err(AnalyticError::SplitOutOfRange { n, d });
    }
    let sa = qudit_survival(code, q, p_a)?;
    let sb = qudit_survival(code, q, p_b)?;
    let (n, rest) = (n as i64, (d - n) as i64);
    let mut total = 0.0;
    for i in 0..=((d as i64 - 1) / 2) {
        for j in 0..=i {
            let lost_b = i - j;
            if lost_b > n || j > rest {
                continue;
            }
            let term_b = binomial_f64(n as u64, lost_b as u64)
                * sb.powi((n - lost_b) as i32)
                * (1.0 - sb).powi(lost_b as i32);
            let term_a = binomial_f64(rest as u64, j as u64)
                * sa.powi((rest - j) as i32)
                * (1.0 - sa).powi(j as i32);
            total += term_b * term_a;
        }
    }
    Ok(SuccessProbability::new(total))
}

fn c(n: u64, k: u64) -> f64 {
    binomial_f64(n, k)
}

/// Six-photon, seven-qudit mixed layout; `p2` is the channel of the three
/// photons that each span two qudits.
pub fn ps_six_photon(p1: f64, p2: f64) -> Result<SuccessProbability, AnalyticError> {
    let (p1, p2) = (check_p(p1)?, check_p(p2)?);
    let (l1, l2) = (1.0 - p1, 1.0 - p2);
    let terms = [
        p1.powi(3) * p2.powi(3),
        c(3, 1) * p2.powi(2) * l2 * p1.powi(3),
        c(3, 1) * p1.powi(2) * l1 * p2.powi(3),
        c(3, 1) * p2.powi(2) * l2 * c(3, 1) * p1.powi(2) * l1,
        c(3, 2) * p2 * l2.powi(2) * p1.powi(3),
        c(3, 2) * p2.powi(3) * l1.powi(2) * p1,
        p2.powi(3) * l1.powi(3),
    ];
    Ok(SuccessProbability::new(terms.iter().sum()))
}

/// Fifteen-photon, eleven-qudit mixed layout: seven degree-4 photons at `p2`
/// and eight degree-2 photons at `p1`.
///
/// Every displayed line of the printed polynomial is summed, including the
/// line lacking a leading `+`. The pure-`p2` two-loss term carries
/// `(1 - p2)^2`; with the printed single power the sum exceeds 1.
pub fn ps_fifteen_photon(p1: f64, p2: f64) -> Result<SuccessProbability, AnalyticError> {
    let (p1, p2) = (check_p(p1)?, check_p(p2)?);
    let (l1, l2) = (1.0 - p1, 1.0 - p2);
    let a = |k: i32| p2.powi(7 - k) * l2.powi(k);
    let b = |k: i32| p1.powi(8 - k) * l1.powi(k);
    let c22 = c(7, 2) * c(8, 2) - 3.0 * (c(2, 1) * c(2, 1) * c(6, 2) + c(2, 1) * c(1, 1) * c(5, 2));
    let c31 = c(7, 3) * c(8, 1)
        - (3.0 * (c(2, 2) * c(2, 1) * c(5, 1) + c(2, 2) * c(1, 1) * c(4, 2)) + 20.0 * c(8, 1));
    let terms = [
        a(0) * b(0),
        c(7, 1) * a(1) * b(0),
        c(8, 1) * a(0) * b(1),
        c(7, 2) * a(2) * b(0),
        c(8, 2) * a(0) * b(2),
        c(7, 1) * c(8, 1) * a(1) * b(1),
        (c(7, 3) - 20.0) * a(3) * b(0),
        c(8, 3) * a(0) * b(3),
        c(7, 2) * c(8, 1) * a(2) * b(1),
        c(7, 1) * c(8, 2) * a(1) * b(2),
        c(8, 4) * a(0) * b(4),
        c(7, 1) * c(8, 3) * a(1) * b(3),
        c22 * a(2) * b(2),
        c31 * a(3) * b(1),
        c(8, 5) * a(0) * b(5),
    ];
    Ok(SuccessProbability::new(terms.iter().sum()))
}

/// Coefficients of [`ps_fifteen_photon`] in the basis
/// `p2^(7-a) (1-p2)^a p1^(8-b) (1-p1)^b`, keyed by `(a, b)` = (lost degree-4
/// photons, lost degree-2 photons). Missing keys have coefficient zero.
pub fn fifteen_photon_coefficients() -> Vec<((u32, u32), u64)> {
    let c = |n, k| crate::binom::binomial(n, k).try_into().unwrap_or(0u64);
    let c22 = c(7, 2) * c(8, 2) - 3 * (c(2, 1) * c(2, 1) * c(6, 2) + c(2, 1) * c(1, 1) * c(5, 2));
    let c31 = c(7, 3) * c(8, 1)
        - (3 * (c(2, 2) * c(2, 1) * c(5, 1) + c(2, 2) * c(1, 1) * c(4, 2)) + 20 * c(8, 1));
    vec![
        ((0, 0), 1),
        ((1, 0), c(7, 1)),
        ((0, 1), c(8, 1)),
        ((2, 0), c(7, 2)),
        ((0, 2), c(8, 2)),
        ((1, 1), c(7, 1) * c(8, 1)),
        ((3, 0), c(7, 3) - 20),
        ((0, 3), c(8, 3)),
        ((2, 1), c(7, 2) * c(8, 1)),
        ((1, 2), c(7, 1) * c(8, 2)),
        ((0, 4), c(8, 4)),
        ((1, 3), c(7, 1) * c(8, 3)),
        ((2, 2), c22),
        ((3, 1), c31),
        ((0, 5), c(8, 5)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code(d: u32, k: u32) -> QrsCode {
        QrsCode::new(d, k).unwrap()
    }

    /// Enumerate all 2^(d*m) photon patterns of a uniform single channel.
    fn brute_single(code: QrsCode, q: u32, p: f64) -> f64 {
        let m = code.photons_per_qudit(q) as usize;
        let n = code.d() as usize * m;
        assert!(n <= 22);
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let lost_photons = mask.count_ones() as i32;
            let prob = p.powi(n as i32 - lost_photons) * (1.0 - p).powi(lost_photons);
            let lost_qudits = (0..code.d() as usize)
                .filter(|&q| (mask >> (q * m)) & ((1 << m) - 1) != 0)
                .count() as u32;
            if lost_qudits <= code.tolerance() {
                total += prob;
            }
        }
        total
    }

    #[test]
    fn single_channel_values() {
        // Direct evaluation and brute-force pattern enumeration.
        let v3 = ps_single(code(3, 2), 1, 0.98).unwrap().value();
        assert_abs_diff_eq!(v3, brute_single(code(3, 2), 1, 0.98), epsilon = 1e-12);
        assert_abs_diff_eq!(v3, 0.995419718272, epsilon = 1e-12);
        assert!(v3 >= 0.995);

        let v5 = ps_single(code(5, 3), 1, 0.972).unwrap().value();
        assert_abs_diff_eq!(v5, brute_single(code(5, 3), 1, 0.972), epsilon = 1e-12);
        assert_abs_diff_eq!(v5, 0.995198159066041, epsilon = 1e-12);

        let v7 = ps_single(code(7, 4), 1, 0.96).unwrap().value();
        assert_abs_diff_eq!(v7, brute_single(code(7, 4), 1, 0.96), epsilon = 1e-12);
        assert_abs_diff_eq!(v7, 0.995372344, epsilon = 1e-9);
    }

    #[test]
    fn lossless_channel() {
        for (d, k) in [(3, 2), (7, 4), (43, 22), (211, 106)] {
            for q in 1..9 {
                assert_abs_diff_eq!(
                    ps_single(code(d, k), q, 1.0).unwrap().value(),
                    1.0,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn withheld() {
        let c7 = code(7, 4);
        for p in [0.5, 0.9, 0.99] {
            assert_eq!(
                ps_single_withheld(c7, 1, p, 0).unwrap(),
                ps_single(c7, 1, p).unwrap()
            );
        }
        assert_abs_diff_eq!(
            ps_single_withheld(c7, 1, 1.0, 3).unwrap().value(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(
            ps_single_withheld(c7, 1, 0.9, 4),
            Err(AnalyticError::WithheldExceedsTolerance {
                withheld: 4,
                tolerance: 3
            })
        );
    }

    #[test]
    fn two_channel_reduces_to_single() {
        for (d, k) in [(3, 2), (5, 3), (7, 4), (11, 6), (43, 22)] {
            let cd = code(d, k);
            for q in [1, 2, 4] {
                for &p in &[0.3, 0.8, 0.97] {
                    let single = ps_single(cd, q, p).unwrap().value();
                    for n in [0, d / 2, d] {
                        let two = ps_two_channel(cd, q, n, p, p).unwrap().value();
                        assert_abs_diff_eq!(two, single, epsilon = 1e-12);
                    }
                    assert_abs_diff_eq!(
                        ps_two_channel(cd, q, 0, p, 0.1).unwrap().value(),
                        single,
                        epsilon = 1e-12
                    );
                    assert_abs_diff_eq!(
                        ps_two_channel(cd, q, d, 0.1, p).unwrap().value(),
                        single,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn two_channel_anchor_points() {
        let c43 = code(43, 22);
        let v = ps_two_channel(c43, 1, 20, 0.99, 0.81).unwrap().value();
        assert_abs_diff_eq!(v, 0.9951317206016372, epsilon = 1e-12);
        let v = ps_two_channel(c43, 4, 20, 0.99, 0.39).unwrap().value();
        assert_abs_diff_eq!(v, 0.9955720184818952, epsilon = 1e-12);
        assert!(matches!(
            ps_two_channel(code(7, 5), 1, 3, 0.9, 0.9),
            Err(AnalyticError::ToleranceMismatch { logical: 3 })
        ));
    }

    #[test]
    fn six_photon_polynomial() {
        assert_abs_diff_eq!(ps_six_photon(1.0, 1.0).unwrap().value(), 1.0, epsilon = 1e-15);
        // The p2^3 terms are the binomial expansion of (p1 + (1 - p1))^3.
        for &p1 in &[0.0, 0.2, 0.5, 0.9] {
            assert_abs_diff_eq!(ps_six_photon(p1, 1.0).unwrap().value(), 1.0, epsilon = 1e-12);
        }
        let v = ps_six_photon(0.882, 0.95).unwrap().value();
        assert_abs_diff_eq!(v, 0.992428635311, epsilon = 1e-11);
    }

    #[test]
    fn fifteen_photon_polynomial() {
        assert_abs_diff_eq!(
            ps_fifteen_photon(1.0, 1.0).unwrap().value(),
            1.0,
            epsilon = 1e-15
        );
        let p2: f64 = 0.99;
        let q2 = 1.0 - p2;
        let expected =
            p2.powi(7) + 7.0 * p2.powi(6) * q2 + 21.0 * p2.powi(5) * q2 * q2 + 15.0 * p2.powi(4) * q2.powi(3);
        assert_abs_diff_eq!(
            ps_fifteen_photon(1.0, p2).unwrap().value(),
            expected,
            epsilon = 1e-15
        );
        let coeffs = fifteen_photon_coefficients();
        assert!(coeffs.contains(&((2, 2), 348)));
        assert!(coeffs.contains(&((3, 1), 72)));
        assert!(coeffs.contains(&((3, 0), 15)));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (p1, p2) = (rng.gen::<f64>(), rng.gen::<f64>());
            let v = ps_fifteen_photon(p1, p2).unwrap().value();
            assert!((0.0..=1.0 + 1e-12).contains(&v));
            let from_table: f64 = coeffs
                .iter()
                .map(|&((a, b), n)| {
                    n as f64
                        * p2.powi(7 - a as i32)
                        * (1.0 - p2).powi(a as i32)
                        * p1.powi(8 - b as i32)
                        * (1.0 - p1).powi(b as i32)
                })
                .sum();
            assert_abs_diff_eq!(v, from_table, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_bad_probability() {
        assert_eq!(
            ps_single(code(3, 2), 1, 1.2),
            Err(AnalyticError::InvalidProbability(1.2))
        );
        assert!(ps_six_photon(-0.1, 0.5).is_err());
    }
}
