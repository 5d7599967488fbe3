//! Monte Carlo estimate of the success probability by simulating the
//! two-phase process directly.
//!
//! Every trial owns a random stream derived from `(seed, trial index)`, so
//! an estimate does not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QuorumError, Result};
use crate::schedule::{QuorumModel, Schedule};

/// Step budget for a single phase-1 walk.
pub const MAX_STEPS: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    /// Trials whose walk reached the quorum, regardless of phase 2.
    pub reached: u64,
}

impl McEstimate {
    fn from_counts(trials: u64, seed: u64, successes: u64, reached: u64) -> Self {
        let mean = successes as f64 / trials as f64;
        Self {
            mean,
            stderr: (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
            seed,
            successes,
            reached,
        }
    }

    pub fn reach_rate(&self) -> f64 {
        self.reached as f64 / self.trials as f64
    }

    /// `|mean - exact| <= k * stderr`.
    pub fn agrees_with(&self, exact: f64, k: f64) -> bool {
        (self.mean - exact).abs() <= k * self.stderr
    }
}

// splitmix64 finalizer
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for trial `index` under `seed`.
pub fn trial_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let key = mix64(seed ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    ChaCha8Rng::seed_from_u64(key)
}

/// Runs the birth-death walk from 1 until it hits `quorum` (true) or 0 (false).
pub fn simulate_phase1<R: Rng + ?Sized>(
    schedule: &Schedule,
    quorum: usize,
    rng: &mut R,
) -> Result<bool> {
    simulate_phase1_bounded(schedule, quorum, rng, MAX_STEPS)
}

/// [`simulate_phase1`] with an explicit step budget.
pub fn simulate_phase1_bounded<R: Rng + ?Sized>(
    schedule: &Schedule,
    quorum: usize,
    rng: &mut R,
    max_steps: u64,
) -> Result<bool> {
    schedule.check_quorum(quorum)?;
    let mut state = 1usize;
    let mut steps = 0u64;
    while state != 0 && state != quorum {
        if steps == max_steps {
            return Err(QuorumError::SimulationStuck(max_steps));
        }
        let p = schedule.up_probability(state)?;
        if rng.random::<f64>() < p {
            state += 1;
        } else {
            state -= 1;
        }
        steps += 1;
    }
    Ok(state == quorum)
}

/// One trial of the full process. Phase-2 draws come from the same stream
/// after every phase-1 draw, one per individual in index order, stopping
/// at the first success.
pub fn simulate_trial<R: Rng + ?Sized>(
    model: &QuorumModel,
    quorum: usize,
    rng: &mut R,
) -> Result<bool> {
    Ok(simulate_trial_outcome(model, quorum, rng)?.1)
}

fn simulate_trial_outcome<R: Rng + ?Sized>(
    model: &QuorumModel,
    quorum: usize,
    rng: &mut R,
) -> Result<(bool, bool)> {
    if !simulate_phase1(model.schedule(), quorum, rng)? {
        return Ok((false, false));
    }
    let rho = model.rho();
    let success = (0..quorum).any(|_| rng.random::<f64>() < rho);
    Ok((true, success))
}

/// Estimates `f(quorum, rho)` from `trials` independent simulations.
/// Runs on the current rayon pool; the result is identical for any
/// number of threads.
pub fn estimate_success(
    model: &QuorumModel,
    quorum: usize,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(QuorumError::Validation("trials must be at least 1".into()));
    }
    model.schedule().check_quorum(quorum)?;
    let (successes, reached) = (0..trials)
        .into_par_iter()
        .map(|i| simulate_trial_outcome(model, quorum, &mut trial_stream(seed, i)))
        .try_fold(
            || (0u64, 0u64),
            |(s, r), outcome| {
                let (hit, win) = outcome?;
                Ok::<_, QuorumError>((s + win as u64, r + hit as u64))
            },
        )
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(McEstimate::from_counts(trials, seed, successes, reached))
}
