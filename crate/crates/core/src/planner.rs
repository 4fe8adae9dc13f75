//! Threshold curves and channel allocation.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{ps_fifteen_photon, ps_six_photon, AnalyticError};
use crate::code::{CodeError, QrsCode};
use crate::config::{CodeParams, MultiplexConfiguration};
use crate::engine::{success_probability, uniform_success, EngineError};

pub const DEFAULT_TARGET: f64 = 0.995;
pub const MAX_ITERATIONS: u32 = 60;
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error("no p1 in [0, 1] reaches the target at p2 = {p2}")]
    Infeasible { p2: f64 },
    #[error("every grid point is infeasible")]
    EmptyCurve,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("{n} qudits requested in one channel of a {d}-qudit code")]
    SplitOutOfRange { n: u32, d: u32 },
    #[error("multiplexing degree must be at least 1")]
    ZeroDegree,
    #[error("no allocation reaches the target")]
    NoAllocation,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// A success probability as a function of two channel probabilities.
#[derive(Debug, Clone)]
pub enum Scenario {
    /// Every qudit in the `p1` channel.
    Single { code: QrsCode, q: u32 },
    /// `n` qudits in the `p1` channel, the other `d - n` in the `p2` channel.
    TwoChannel { code: QrsCode, q: u32, n: u32 },
    /// Seven-qudit mixed layout, closed form.
    SixPhoton,
    /// Eleven-qudit fifteen-photon layout, closed form.
    FifteenPhoton,
    /// Arbitrary configuration; the two channels are varied, others stay fixed.
    Configuration {
        config: MultiplexConfiguration,
        p1_channel: usize,
        p2_channel: usize,
    },
}

impl Scenario {
    pub fn configuration(
        config: MultiplexConfiguration,
        p1_channel: &str,
        p2_channel: &str,
    ) -> Result<Self, PlannerError> {
        let find = |id: &str| {
            config
                .channel_index(id)
                .ok_or_else(|| PlannerError::UnknownChannel(id.to_string()))
        };
        let (p1_channel, p2_channel) = (find(p1_channel)?, find(p2_channel)?);
        Ok(Scenario::Configuration {
            config,
            p1_channel,
            p2_channel,
        })
    }

    pub fn evaluate(&self, p1: f64, p2: f64) -> Result<f64, PlannerError> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(PlannerError::InvalidProbability(p));
            }
        }
        match self {
            Scenario::Single { code, q } => {
                if *q == 0 {
                    return Err(PlannerError::ZeroDegree);
                }
                let blocks = [(code.d() as usize, p1)];
                Ok(uniform_success(code.tolerance(), code.photons_per_qudit(*q), &blocks, 0).value())
            }
            Scenario::TwoChannel { code, q, n } => {
                if *q == 0 {
                    return Err(PlannerError::ZeroDegree);
                }
                if *n > code.d() {
                    return Err(PlannerError::SplitOutOfRange { n: *n, d: code.d() });
                }
                let blocks = [(*n as usize, p1), ((code.d() - n) as usize, p2)];
                Ok(uniform_success(code.tolerance(), code.photons_per_qudit(*q), &blocks, 0).value())
            }
            Scenario::SixPhoton => Ok(ps_six_photon(p1, p2)?.value()),
            Scenario::FifteenPhoton => Ok(ps_fifteen_photon(p1, p2)?.value()),
            Scenario::Configuration {
                config,
                p1_channel,
                p2_channel,
            } => {
                let mut probs: Vec<f64> = config.channels().iter().map(|c| c.p).collect();
                probs[*p2_channel] = p2;
                probs[*p1_channel] = p1;
                Ok(success_probability(&config.with_probabilities(&probs))?.value())
            }
        }
    }

    pub fn descriptor(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Scenario::Single { code, q } => json!({"kind": "single", "code": code, "q": q}),
            Scenario::TwoChannel { code, q, n } => json!({
                "kind": "two_channel", "code": code, "q": q,
                "p1_qudits": n, "p2_qudits": code.d() - n,
            }),
            Scenario::SixPhoton => json!({"kind": "six_photon", "code": {"d": 7, "k": 4}, "photons": 6}),
            Scenario::FifteenPhoton => {
                json!({"kind": "fifteen_photon", "code": {"d": 11, "k": 6}, "photons": 15})
            }
            Scenario::Configuration {
                config,
                p1_channel,
                p2_channel,
            } => json!({
                "kind": "configuration",
                "code": config.code(),
                "photons": config.photons().len(),
                "withheld": config.withheld(),
                "p1_channel": config.channels()[*p1_channel].id,
                "p2_channel": config.channels()[*p2_channel].id,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Solution {
    pub p1: f64,
    /// `P_S(p1) - target`; non-negative. Exceeds the tolerance only when
    /// `saturated`, in which case it is the surplus at `p1 = 0`.
    pub residual: f64,
    pub iterations: u32,
    pub saturated: bool,
}

fn bisect(f: impl Fn(f64) -> Result<f64, PlannerError>, target: f64, p2: f64) -> Result<Solution, PlannerError> {
    let top = f(1.0)?;
    if top < target {
        return Err(PlannerError::Infeasible { p2 });
    }
    let bottom = f(0.0)?;
    if bottom >= target {
        return Ok(Solution {
            p1: 0.0,
            residual: bottom - target,
            iterations: 0,
            saturated: true,
        });
    }
    let (mut lo, mut hi, mut f_hi) = (0.0f64, 1.0f64, top);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let v = f(mid)?;
        if v >= target {
            hi = mid;
            f_hi = v;
        } else {
            lo = mid;
        }
    }
    Ok(Solution {
        p1: hi,
        residual: f_hi - target,
        iterations,
        saturated: false,
    })
}

/// Smallest `p1` reaching `target` at fixed `p2`.
pub fn solve_p1(scenario: &Scenario, p2: f64, target: f64) -> Result<Solution, PlannerError> {
    bisect(|p1| scenario.evaluate(p1, p2), target, p2)
}

/// Smallest common probability `p = p1 = p2` reaching `target`.
pub fn solve_diagonal(scenario: &Scenario, target: f64) -> Result<Solution, PlannerError> {
    bisect(|p| scenario.evaluate(p, p), target, f64::NAN)
}

/// Ascending grid `lo, lo + step, ...` up to `hi`, parsed from `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            lo: 0.3,
            hi: 1.0,
            step: 0.002,
        }
    }
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self, PlannerError> {
        if [lo, hi, step].iter().any(|x| x.is_nan()) || step <= 0.0 || lo > hi || lo < 0.0 || hi > 1.0 {
            return Err(PlannerError::InvalidGrid(format!("{lo}:{hi}:{step}")));
        }
        Ok(Grid { lo, hi, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let x = self.lo + i as f64 * self.step;
                ((x * 1e12).round() / 1e12).min(self.hi)
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = PlannerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PlannerError::InvalidGrid(s.to_string());
        let parts: Vec<f64> = s
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [lo, hi, step] => Grid::new(lo, hi, step),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p2: f64,
    pub p1: f64,
    pub residual: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdCurve {
    pub scenario: serde_json::Value,
    pub target: f64,
    pub points: Vec<CurvePoint>,
    /// Grid values of `p2` with no feasible `p1`.
    pub infeasible: Vec<f64>,
}

/// Solve every grid point; output follows grid order.
pub fn sweep_curve(scenario: &Scenario, grid: &[f64], target: f64) -> Result<ThresholdCurve, PlannerError> {
    if grid.iter().any(|x| x.is_nan()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PlannerError::InvalidGrid("grid must be strictly ascending".into()));
    }
    let solved: Vec<(f64, Result<Solution, PlannerError>)> = grid
        .par_iter()
        .map(|&p2| (p2, solve_p1(scenario, p2, target)))
        .collect();
    let mut points = Vec::new();
    let mut infeasible = Vec::new();
    for (p2, result) in solved {
        match result {
            Ok(s) => points.push(CurvePoint {
                p2,
                p1: s.p1,
                residual: s.residual,
                saturated: s.saturated,
            }),
            Err(PlannerError::Infeasible { .. }) => infeasible.push(p2),
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(PlannerError::EmptyCurve);
    }
    Ok(ThresholdCurve {
        scenario: scenario.descriptor(),
        target,
        points,
        infeasible,
    })
}

fn sign_change(xs: &[f64], ys: &[f64]) -> Option<f64> {
    for i in 1..xs.len() {
        let (a, b) = (ys[i - 1], ys[i]);
        if a == 0.0 {
            return Some(xs[i - 1]);
        }
        if (a > 0.0) != (b > 0.0) || b == 0.0 {
            let t = a / (a - b);
            return Some(xs[i - 1] + t * (xs[i] - xs[i - 1]));
        }
    }
    None
}

impl ThresholdCurve {
    pub fn max_residual(&self) -> f64 {
        self.points
            .iter()
            .filter(|p| !p.saturated)
            .map(|p| p.residual.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].p1 <= w[0].p1)
    }

    fn interior(&self) -> impl Iterator<Item = &CurvePoint> {
        self.points.iter().filter(|p| !p.saturated)
    }

    /// First `p2` (linearly interpolated) where this curve and `other`
    /// swap order, comparing at shared grid values.
    pub fn crossing_with(&self, other: &ThresholdCurve) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .interior()
            .filter_map(|a| {
                other
                    .interior()
                    .find(|b| b.p2 == a.p2)
                    .map(|b| (a.p2, a.p1 - b.p1))
            })
            .unzip();
        sign_change(&xs, &ys)
    }

    /// `p2` where the curve meets `p1 = p2`.
    pub fn diagonal_crossing(&self) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self.interior().map(|p| (p.p2, p.p1 - p.p2)).unzip();
        sign_change(&xs, &ys)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# scenario: {}", self.scenario);
        let _ = writeln!(out, "# target: {}", self.target);
        if !self.infeasible.is_empty() {
            let _ = writeln!(out, "# infeasible p2 points: {}", self.infeasible.len());
        }
        out.push_str("p2,p1\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.p2, p.p1);
        }
        out
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "scenario": self.scenario,
            "target": self.target,
            "points": self.points.len(),
            "infeasible": self.infeasible,
            "max_residual": self.max_residual(),
            "saturated": self.points.iter().filter(|p| p.saturated).count(),
            "monotone": self.is_monotone(),
            "residuals": self.points.iter().map(|p| p.residual).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelCapacity {
    pub id: String,
    pub p: f64,
    /// Maximum number of qudits the channel may carry.
    pub capacity: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Total qudits, then total photons, then lexicographically smallest split.
    #[default]
    FewestQudits,
    /// Largest per-channel load first, then as `FewestQudits`.
    BalancedLoad,
}

fn default_true() -> bool {
    true
}

fn default_target() -> f64 {
    DEFAULT_TARGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationProblem {
    pub channels: Vec<ChannelCapacity>,
    pub codes: Vec<CodeParams>,
    pub q: u32,
    #[serde(default = "default_target")]
    pub target: f64,
    #[serde(default)]
    pub withheld: u32,
    /// Allow a packet to span several channels.
    #[serde(default = "default_true")]
    pub aggregate: bool,
    #[serde(default)]
    pub objective: Objective,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub code: QrsCode,
    /// Qudits per channel, in problem order.
    pub split: Vec<u32>,
    pub success: f64,
    pub total_qudits: u32,
    pub total_photons: u32,
}

impl AllocationResult {
    fn max_load(&self) -> u32 {
        self.split.iter().copied().max().unwrap_or(0)
    }
}

fn compositions(total: u32, caps: &[u32]) -> Vec<Vec<u32>> {
    fn rec(left: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        match caps.split_first() {
            None => {
                if left == 0 {
                    out.push(cur.clone());
                }
            }
            Some((&cap, rest)) => {
                let room: u32 = rest.iter().sum();
                for n in left.saturating_sub(room)..=cap.min(left) {
                    cur.push(n);
                    rec(left - n, rest, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(total, caps, &mut Vec::new(), &mut out);
    out
}

impl AllocationProblem {
    fn check(&self) -> Result<Vec<QrsCode>, PlannerError> {
        if self.q == 0 {
            return Err(PlannerError::ZeroDegree);
        }
        for c in &self.channels {
            if !(0.0..=1.0).contains(&c.p) {
                return Err(PlannerError::InvalidProbability(c.p));
            }
        }
        self.codes
            .iter()
            .map(|c| QrsCode::new(c.d, c.k).map_err(PlannerError::from))
            .collect()
    }

    fn assess(&self, code: QrsCode, split: Vec<u32>) -> AllocationResult {
        let blocks: Vec<(usize, f64)> = split
            .iter()
            .zip(&self.channels)
            .map(|(&n, c)| (n as usize, c.p))
            .collect();
        let ppq = code.photons_per_qudit(self.q);
        let success = uniform_success(code.tolerance(), ppq, &blocks, self.withheld).value();
        let total_qudits = split.iter().sum();
        AllocationResult {
            code,
            split,
            success,
            total_qudits,
            total_photons: total_qudits * ppq,
        }
    }

    /// Every split meeting the target, unordered.
    pub fn feasible(&self) -> Result<Vec<AllocationResult>, PlannerError> {
        let caps: Vec<u32> = self.channels.iter().map(|c| c.capacity).collect();
        let mut out = Vec::new();
        for code in self.check()? {
            let Some(sent) = code.d().checked_sub(self.withheld) else {
                continue;
            };
            if self.withheld > code.tolerance() {
                continue;
            }
            for split in compositions(sent, &caps) {
                let used = split.iter().filter(|&&n| n > 0).count();
                if !self.aggregate && used > 1 {
                    continue;
                }
                let r = self.assess(code, split);
                if r.success >= self.target {
                    out.push(r);
                }
            }
        }
        Ok(out)
    }
}

/// Best feasible allocation under the problem's objective.
pub fn allocate(problem: &AllocationProblem) -> Result<AllocationResult, PlannerError> {
    let key = |r: &AllocationResult| {
        let load = match problem.objective {
            Objective::FewestQudits => 0,
            Objective::BalancedLoad => r.max_load(),
        };
        (load, r.total_qudits, r.total_photons, r.split.clone(), r.code.d(), r.code.k())
    };
    problem
        .feasible()?
        .into_iter()
        .min_by_key(key)
        .ok_or(PlannerError::NoAllocation)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleChannelSolution {
    pub channel: String,
    /// Largest candidate code the channel can carry alone within capacity.
    pub code: Option<QrsCode>,
    pub success: Option<f64>,
}

/// For each channel, the largest candidate code it sustains on its own.
pub fn single_channel_solutions(problem: &AllocationProblem) -> Result<Vec<SingleChannelSolution>, PlannerError> {
    let alone = AllocationProblem {
        aggregate: false,
        ..problem.clone()
    };
    let feasible = alone.feasible()?;
    Ok(problem
        .channels
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let best = feasible
                .iter()
                .filter(|r| r.split[i] > 0)
                .max_by_key(|r| (r.total_qudits, std::cmp::Reverse(r.total_photons)));
            SingleChannelSolution {
                channel: c.id.clone(),
                code: best.map(|r| r.code),
                success: best.map(|r| r.success),
            }
        })
        .collect())
}
