//! Birth-death rate families.
//!
//! A [`Schedule`] gives the up-probability `p_n` for every transient state
//! `n >= 1`; the down-probability is always `q_n = 1 - p_n`. Schedules are
//! defined independently of any quorum, so a consumer asks for whatever
//! window of states it needs and a finite table reports
//! [`QuorumError::StateOutOfRange`] past its end.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QuorumError, Result};

/// The three supported rate families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScheduleKind {
    /// `p_n = p` for every state.
    Constant { p: f64 },
    /// `p_n = (n + 1) / (2n + 1)`.
    Harmonic,
    /// `probs[k] = p_{k+1}`; defined for states `1..=probs.len()` only.
    Table { probs: Vec<f64> },
}

/// A validated birth-death schedule.
///
/// Construct through [`Schedule::constant`], [`Schedule::harmonic`],
/// [`Schedule::table`], [`str::parse`] or serde; every path enforces the
/// same range checks, so a `Schedule` in hand is always valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleKind", into = "ScheduleKind")]
pub struct Schedule {
    kind: ScheduleKind,
}

impl Schedule {
    pub fn constant(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(QuorumError::Validation(format!(
                "constant up-probability must lie in (0, 1), got {p}"
            )));
        }
        Ok(Self {
            kind: ScheduleKind::Constant { p },
        })
    }

    pub fn harmonic() -> Self {
        Self {
            kind: ScheduleKind::Harmonic,
        }
    }

    /// Entries must lie in `(0, 1]`. A zero entry would make every higher
    /// state unreachable and is rejected; an entry of one is allowed.
    pub fn table(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(QuorumError::Validation(
                "table schedule must have at least one entry".into(),
            ));
        }
        if let Some((k, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > 0.0 && p <= 1.0))
        {
            return Err(QuorumError::Validation(format!(
                "table entry p_{} = {p} is outside (0, 1]",
                k + 1
            )));
        }
        Ok(Self {
            kind: ScheduleKind::Table { probs },
        })
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ScheduleKind::Constant { .. } => "constant",
            ScheduleKind::Harmonic => "harmonic",
            ScheduleKind::Table { .. } => "table",
        }
    }

    /// Highest state with a defined rate, or `None` for the unbounded families.
    pub fn max_state(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Table { probs } => Some(probs.len()),
            _ => None,
        }
    }

    /// Checks that every transient state `1..quorum` has a defined rate.
    pub fn check_quorum(&self, quorum: usize) -> Result<()> {
        if quorum == 0 {
            return Err(QuorumError::Validation("quorum must be at least 1".into()));
        }
        match self.max_state() {
            Some(len) if quorum - 1 > len => Err(QuorumError::StateOutOfRange {
                state: quorum - 1,
                len,
            }),
            _ => Ok(()),
        }
    }

    /// Birth probability `p_n` in state `n >= 1`.
    pub fn up_probability(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(QuorumError::Validation(
                "rates are defined for states n >= 1".into(),
            ));
        }
        match &self.kind {
            ScheduleKind::Constant { p } => Ok(*p),
            ScheduleKind::Harmonic => Ok((n as f64 + 1.0) / (2.0 * n as f64 + 1.0)),
            ScheduleKind::Table { probs } => {
                probs
                    .get(n - 1)
                    .copied()
                    .ok_or(QuorumError::StateOutOfRange {
                        state: n,
                        len: probs.len(),
                    })
            }
        }
    }

    /// Death probability `q_n = 1 - p_n`.
    pub fn down_probability(&self, n: usize) -> Result<f64> {
        self.up_probability(n).map(|p| 1.0 - p)
    }

    /// The factor `q_k / p_k` of the path weights.
    ///
    /// For the harmonic family this is evaluated as `k / (k + 1)` directly,
    /// which is within a few ulps of the generic quotient.
    pub fn step_ratio(&self, k: usize) -> Result<f64> {
        match self.kind {
            ScheduleKind::Harmonic if k >= 1 => Ok(k as f64 / (k as f64 + 1.0)),
            _ => {
                let p = self.up_probability(k)?;
                Ok((1.0 - p) / p)
            }
        }
    }
}

impl TryFrom<ScheduleKind> for Schedule {
    type Error = QuorumError;

    fn try_from(kind: ScheduleKind) -> Result<Self> {
        match kind {
            ScheduleKind::Constant { p } => Schedule::constant(p),
            ScheduleKind::Harmonic => Ok(Schedule::harmonic()),
            ScheduleKind::Table { probs } => Schedule::table(probs),
        }
    }
}

impl From<Schedule> for ScheduleKind {
    fn from(s: Schedule) -> Self {
        s.kind
    }
}

/// Canonical DSL form; `parse_schedule(&s.to_string()) == Ok(s)`.
impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ScheduleKind::Constant { p } => write!(f, "constant:p={p}"),
            ScheduleKind::Harmonic => f.write_str("harmonic"),
            ScheduleKind::Table { probs } => {
                f.write_str("table:")?;
                for (i, p) in probs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Schedule {
    type Err = QuorumError;

    fn from_str(s: &str) -> Result<Self> {
        parse_schedule(s)
    }
}

/// Parses `constant:p=<float>`, `harmonic` or `table:<p1>,<p2>,...`.
pub fn parse_schedule(spec: &str) -> Result<Schedule> {
    let input = spec.trim();
    let err = |reason: &str| QuorumError::Parse {
        input: spec.to_string(),
        reason: reason.to_string(),
    };
    if input.is_empty() {
        return Err(err("empty schedule"));
    }
    if input == "harmonic" {
        return Ok(Schedule::harmonic());
    }
    if let Some(rest) = input.strip_prefix("constant:") {
        let value = rest
            .strip_prefix("p=")
            .ok_or_else(|| err("expected `constant:p=<float>`"))?;
        let p = parse_float(value).ok_or_else(|| err("invalid number for p"))?;
        return Schedule::constant(p);
    }
    if let Some(rest) = input.strip_prefix("table:") {
        if rest.is_empty() {
            return Err(err("table needs at least one entry"));
        }
        let probs = rest
            .split(',')
            .map(|tok| parse_float(tok).ok_or_else(|| err(&format!("invalid table entry `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        return Schedule::table(probs);
    }
    Err(err(
        "expected one of `constant:p=<float>`, `harmonic`, `table:<p1>,<p2>,...`",
    ))
}

// Rejects the textual `inf`/`nan` spellings that `f64::from_str` accepts.
fn parse_float(tok: &str) -> Option<f64> {
    let tok = tok.trim();
    if tok.is_empty()
        || tok
            .chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
    {
        return None;
    }
    tok.parse().ok()
}

/// A schedule together with the per-individual success probability `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuorumModel {
    schedule: Schedule,
    rho: f64,
}

impl QuorumModel {
    pub fn new(schedule: Schedule, rho: f64) -> Result<Self> {
        validate_probability("rho", rho)?;
        Ok(Self { schedule, rho })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.schedule.clone(), rho)
    }
}

pub(crate) fn validate_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(QuorumError::Validation(format!(
            "{name} must lie in [0, 1], got {x}"
        )))
    }
}
