//! Exact reach and success probabilities.
//!
//! The reach probability from state 1 to the quorum `N` is
//! `1 / sum_{i<N} P_i` with `P_0 = 1` and `P_i = prod_{k<=i} q_k / p_k`.
//! The weights are kept in the log domain: for births less likely than
//! deaths the raw products overflow long before the quorum windows we care
//! about.

use serde::{Deserialize, Serialize};

use crate::error::{QuorumError, Result};
use crate::schedule::{QuorumModel, Schedule, ScheduleKind};

/// `r` values within this distance of one use the `1/N` limit in the
/// constant-rate ratio formula.
pub const UNIT_RATIO_EPS: f64 = 1e-9;

/// `ln(e^a + e^b)` without overflow; `-inf` is the additive identity.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `1 - (1 - rho)^n`, the chance that at least one of `n` independent
/// Bernoulli(`rho`) trials succeeds.
pub fn any_success_probability(rho: f64, n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => rho,
        _ if rho >= 1.0 => 1.0,
        _ if rho <= 0.0 => 0.0,
        _ => -((n as f64) * (-rho).ln_1p()).exp_m1(),
    }
}

/// Log path weights `ln P_i` and their running log-sums.
///
/// The series grows one state at a time, so evaluating a whole success
/// curve costs a single pass over the schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathWeightSeries {
    log_weights: Vec<f64>,
    log_cumsum: Vec<f64>,
}

impl Default for PathWeightSeries {
    fn default() -> Self {
        Self::new()
    }
}

impl PathWeightSeries {
    /// The series for quorum 1: just `P_0 = 1`.
    pub fn new() -> Self {
        Self {
            log_weights: vec![0.0],
            log_cumsum: vec![0.0],
        }
    }

    /// Series with weights `P_0..P_{quorum-1}`.
    pub fn for_quorum(schedule: &Schedule, quorum: usize) -> Result<Self> {
        schedule.check_quorum(quorum)?;
        let mut series = Self::new();
        series.extend_to(schedule, quorum)?;
        Ok(series)
    }

    /// Appends `ln P_i = ln P_{i-1} + ln(q_i / p_i)` until the series holds
    /// `quorum` weights. A zero ratio pins every later weight at `-inf`.
    pub fn extend_to(&mut self, schedule: &Schedule, quorum: usize) -> Result<()> {
        while self.log_weights.len() < quorum {
            let i = self.log_weights.len();
            let prev = self.log_weights[i - 1];
            let next = if prev == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                prev + schedule.step_ratio(i)?.ln()
            };
            let sum = ln_add_exp(self.log_cumsum[i - 1], next);
            self.log_weights.push(next);
            self.log_cumsum.push(sum);
        }
        Ok(())
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn log_cumsum(&self) -> &[f64] {
        &self.log_cumsum
    }

    /// Largest quorum the series currently covers.
    pub fn quorum(&self) -> usize {
        self.log_weights.len()
    }

    /// `P(A_N)` for `N <= self.quorum()`.
    pub fn reach_probability_at(&self, quorum: usize) -> f64 {
        assert!(
            quorum >= 1 && quorum <= self.quorum(),
            "quorum {quorum} outside series 1..={}",
            self.quorum()
        );
        (-self.log_cumsum[quorum - 1]).exp()
    }

    pub fn reach_probability(&self) -> f64 {
        self.reach_probability_at(self.quorum())
    }
}

/// Probability that the chain started at 1 hits `quorum` before 0.
pub fn reach_probability(schedule: &Schedule, quorum: usize) -> Result<f64> {
    if quorum == 1 {
        schedule.check_quorum(1)?;
        return Ok(1.0);
    }
    Ok(PathWeightSeries::for_quorum(schedule, quorum)?.reach_probability())
}

/// Closed forms for the two analytic families: `(r - 1)/(r^N - 1)` for a
/// constant schedule and `1 / H_N` for the harmonic one.
pub fn reach_probability_closed(schedule: &Schedule, quorum: usize) -> Result<f64> {
    schedule.check_quorum(quorum)?;
    match schedule.kind() {
        ScheduleKind::Constant { p } => Ok(constant_reach_closed(*p, quorum)),
        ScheduleKind::Harmonic => Ok(1.0 / harmonic_number(quorum)),
        ScheduleKind::Table { .. } => Err(QuorumError::UnsupportedSchedule {
            op: "reach_probability_closed",
            kind: "table",
        }),
    }
}

fn constant_reach_closed(p: f64, quorum: usize) -> f64 {
    let r = (1.0 - p) / p;
    if (r - 1.0).abs() <= UNIT_RATIO_EPS {
        return 1.0 / quorum as f64;
    }
    let n_ln_r = quorum as f64 * r.ln();
    if r < 1.0 {
        (1.0 - r) / -n_ln_r.exp_m1()
    } else if n_ln_r < 700.0 {
        (r - 1.0) / n_ln_r.exp_m1()
    } else {
        // r^N - 1 = r^N (1 - r^-N)
        ((r - 1.0).ln() - n_ln_r - (-(-n_ln_r).exp()).ln_1p()).exp()
    }
}

/// `H_n = 1 + 1/2 + ... + 1/n`, summed smallest term first.
pub fn harmonic_number(n: usize) -> f64 {
    (1..=n).rev().map(|i| 1.0 / i as f64).sum()
}

/// `f(N, rho) = P(A_N) * (1 - (1 - rho)^N)`.
pub fn success_probability(model: &QuorumModel, quorum: usize) -> Result<f64> {
    let reach = reach_probability(model.schedule(), quorum)?;
    Ok(reach * any_success_probability(model.rho(), quorum))
}

/// Constant-rate success probability as the quotient of two geometric sums,
/// `rho * sum_{i<N} (1-rho)^i / sum_{i<N} r^i`. Finite at `r = 1`.
pub fn success_probability_factored(model: &QuorumModel, quorum: usize) -> Result<f64> {
    model.schedule().check_quorum(quorum)?;
    let p = match model.schedule().kind() {
        ScheduleKind::Constant { p } => *p,
        _ => {
            return Err(QuorumError::UnsupportedSchedule {
                op: "success_probability_factored",
                kind: model.schedule().kind_name(),
            })
        }
    };
    let rho = model.rho();
    let r = (1.0 - p) / p;
    let numerator = geometric_sum(1.0 - rho, quorum);
    if r <= 1.0 {
        Ok(rho * numerator / geometric_sum(r, quorum))
    } else {
        // sum r^i = r^{N-1} * sum (1/r)^i keeps every partial sum bounded.
        let scaled = geometric_sum(1.0 / r, quorum);
        let log_ratio = numerator.ln() - scaled.ln() - (quorum as f64 - 1.0) * r.ln();
        Ok(rho * log_ratio.exp())
    }
}

/// `1 + x + ... + x^{n-1}` for `0 <= x <= 1` by Horner accumulation.
fn geometric_sum(x: f64, n: usize) -> f64 {
    (0..n).fold(0.0, |acc, _| acc * x + 1.0)
}

/// `f` over the quorum window `1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessCurve {
    pub rho: f64,
    pub n_values: Vec<usize>,
    pub reach_values: Vec<f64>,
    pub f_values: Vec<f64>,
}

impl SuccessCurve {
    pub fn len(&self) -> usize {
        self.n_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_values.is_empty()
    }

    /// Value at quorum `n`, if inside the window.
    pub fn f_at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.f_values.get(i).copied())
    }

    /// Smallest quorum attaining the maximum, with that maximum.
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (self.n_values[0], self.f_values[0]);
        for (&n, &f) in self.n_values.iter().zip(&self.f_values).skip(1) {
            if f > best.1 {
                best = (n, f);
            }
        }
        best
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.n_values
            .iter()
            .zip(&self.reach_values)
            .zip(&self.f_values)
            .map(|((&n, &reach), &f)| (n, reach, f))
    }
}

/// Evaluates `f(N, rho)` for every `N` in `1..=n_max` in one pass.
pub fn success_curve(model: &QuorumModel, n_max: usize) -> Result<SuccessCurve> {
    if n_max == 0 {
        return Err(QuorumError::Validation("n_max must be at least 1".into()));
    }
    model.schedule().check_quorum(n_max)?;
    let mut series = PathWeightSeries::new();
    series.extend_to(model.schedule(), n_max)?;
    let rho = model.rho();
    let n_values: Vec<usize> = (1..=n_max).collect();
    let reach_values: Vec<f64> = n_values
        .iter()
        .map(|&n| series.reach_probability_at(n))
        .collect();
    let f_values = n_values
        .iter()
        .zip(&reach_values)
        .map(|(&n, &reach)| reach * any_success_probability(rho, n))
        .collect();
    Ok(SuccessCurve {
        rho,
        n_values,
        reach_values,
        f_values,
    })
}
