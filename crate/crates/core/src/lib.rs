//! Success probability of a quorum-sensing strategy.
//!
//! A population starts from one individual and follows a birth-death chain
//! until it either dies out or reaches the quorum `N`. If it reaches `N`,
//! each of the `N` individuals independently succeeds with probability
//! `rho`. The collective success probability is
//!
//! ```text
//! f(N, rho) = P(reach N before 0) * (1 - (1 - rho)^N)
//! ```
//!
//! This crate evaluates `f` exactly ([`exact`]), studies its shape as a
//! function of `N` ([`analysis`]), and checks both against a direct
//! simulation of the process ([`montecarlo`]).
//!
//! ```
//! use quorumlab::{classify, parse_schedule, Monotonicity, QuorumModel};
//!
//! let model = QuorumModel::new(parse_schedule("harmonic").unwrap(), 0.2).unwrap();
//! let report = classify(&model, 50, 1e-12).unwrap();
//! assert_eq!(report.class, Monotonicity::NonMonotone);
//! assert_eq!(report.argmax_n, 8);
//! ```

pub mod analysis;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod schedule;

pub use analysis::{
    classify, classify_constant_analytic, critical_rho_constant, optimal_quorum, threshold_scan,
    Criterion, Monotonicity, MonotonicityReport, ThresholdResult,
};
pub use error::{QuorumError, Result};
pub use exact::{
    reach_probability, reach_probability_closed, success_curve, success_probability,
    success_probability_factored, PathWeightSeries, SuccessCurve,
};
pub use montecarlo::{estimate_success, simulate_phase1, simulate_trial, McEstimate};
pub use schedule::{parse_schedule, QuorumModel, Schedule, ScheduleKind};
