//! Loss tolerance of quantum Reed-Solomon codes carried by multiplexed
//! photons over heterogeneous erasure channels.

pub mod analytic;
pub mod binom;
pub mod circuit;
pub mod code;
pub mod config;
pub mod engine;
pub mod montecarlo;
pub mod planner;
pub mod wiring;

pub use analytic::{AnalyticError, SuccessProbability};
pub use code::{CodeError, QrsCode};
pub use config::{Channel, ConfigDocument, MultiplexConfiguration, Photon, ValidationReport, SCHEMA_VERSION};
pub use engine::{EngineError, LossDistribution, SuccessTable};
pub use montecarlo::McEstimate;
pub use planner::{AllocationProblem, AllocationResult, Grid, PlannerError, Scenario, ThresholdCurve};
