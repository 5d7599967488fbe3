use thiserror::Error;

/// Errors produced by schedule construction, evaluation, analysis and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuorumError {
    #[error("state {state} is beyond the end of a table schedule of length {len}")]
    StateOutOfRange { state: usize, len: usize },

    #[error("malformed schedule `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("operation `{op}` is not supported for {kind} schedules")]
    UnsupportedSchedule {
        op: &'static str,
        kind: &'static str,
    },

    #[error("monotonicity window must contain at least two quorums, got n_max = {0}")]
    WindowTooSmall(usize),

    #[error("criterion `{criterion}` is not bracketed: holds at rho = {lo} is {holds_lo}, at rho = {hi} is {holds_hi}")]
    CriterionNotBracketed {
        criterion: String,
        lo: f64,
        hi: f64,
        holds_lo: bool,
        holds_hi: bool,
    },

    #[error("simulation exceeded {0} steps without absorption")]
    SimulationStuck(u64),
}

pub type Result<T, E = QuorumError> = std::result::Result<T, E>;
