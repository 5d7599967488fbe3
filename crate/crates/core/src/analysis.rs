//! Shape of the success curve over a finite quorum window: monotonicity
//! class, best quorum, and the critical `rho` where the shape flips.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QuorumError, Result};
use crate::exact::success_curve;
use crate::schedule::{validate_probability, QuorumModel, Schedule};

pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-6;
pub const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Increasing => "Increasing",
            Monotonicity::Decreasing => "Decreasing",
            Monotonicity::Constant => "Constant",
            Monotonicity::NonMonotone => "NonMonotone",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    #[serde(rename = "class")]
    pub class: Monotonicity,
    pub argmax_n: usize,
    pub max_f: f64,
    pub window: (usize, usize),
    pub tolerance: f64,
}

/// Classifies `f` over `1..=n_max` from the signs of consecutive
/// differences, treating `|d| <= tolerance` as a tie.
///
/// For a monotone class the reported argmax is the window end the class
/// points at; otherwise it is the smallest quorum attaining the maximum.
pub fn classify(model: &QuorumModel, n_max: usize, tolerance: f64) -> Result<MonotonicityReport> {
    if n_max < 2 {
        return Err(QuorumError::WindowTooSmall(n_max));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(QuorumError::Validation(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let curve = success_curve(model, n_max)?;
    let f = &curve.f_values;
    let diffs = || f.windows(2).map(|w| w[1] - w[0]);

    let class = if diffs().all(|d| d.abs() <= tolerance) {
        Monotonicity::Constant
    } else if diffs().all(|d| d >= -tolerance) {
        Monotonicity::Increasing
    } else if diffs().all(|d| d <= tolerance) {
        Monotonicity::Decreasing
    } else {
        Monotonicity::NonMonotone
    };

    let (argmax_n, max_f) = match class {
        Monotonicity::Increasing => (n_max, f[n_max - 1]),
        Monotonicity::Decreasing => (1, f[0]),
        _ => curve.argmax(),
    };
    Ok(MonotonicityReport {
        class,
        argmax_n,
        max_f,
        window: (1, n_max),
        tolerance,
    })
}

/// Constant-rate shape from the sign of `r - (1 - rho)` alone, with no
/// curve evaluation.
pub fn classify_constant_analytic(p: f64, rho: f64) -> Result<Monotonicity> {
    // Reuse the schedule's range check on p.
    Schedule::constant(p)?;
    validate_probability("rho", rho)?;
    let r = (1.0 - p) / p;
    let gap = r - (1.0 - rho);
    Ok(if gap.abs() <= DEFAULT_TOLERANCE {
        Monotonicity::Constant
    } else if gap > 0.0 {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Increasing
    })
}

/// Smallest quorum in `1..=n_max` maximizing `f`, by exhaustive scan.
pub fn optimal_quorum(model: &QuorumModel, n_max: usize) -> Result<(usize, f64)> {
    Ok(success_curve(model, n_max)?.argmax())
}

/// `1 - r` for births-dominant constant schedules; `None` when `r >= 1`
/// since `f` then decreases for every `rho`.
pub fn critical_rho_constant(p: f64) -> Result<Option<f64>> {
    Schedule::constant(p)?;
    let r = (1.0 - p) / p;
    Ok((r < 1.0).then_some(1.0 - r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "increasing-on-window")]
    IncreasingOnWindow,
    #[serde(rename = "decreasing-on-window")]
    DecreasingOnWindow,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::IncreasingOnWindow => "increasing-on-window",
            Criterion::DecreasingOnWindow => "decreasing-on-window",
        }
    }

    fn target(self) -> Monotonicity {
        match self {
            Criterion::IncreasingOnWindow => Monotonicity::Increasing,
            Criterion::DecreasingOnWindow => Monotonicity::Decreasing,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = QuorumError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increasing-on-window" => Ok(Criterion::IncreasingOnWindow),
            "decreasing-on-window" => Ok(Criterion::DecreasingOnWindow),
            other => Err(QuorumError::Validation(format!(
                "unknown criterion `{other}`; expected increasing-on-window or decreasing-on-window"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub rho_star: f64,
    pub bracket: (f64, f64),
    pub criterion: Criterion,
}

/// Does `classify` on this window return the criterion's class at `rho`?
pub fn criterion_holds(
    schedule: &Schedule,
    n_max: usize,
    criterion: Criterion,
    rho: f64,
) -> Result<bool> {
    let model = QuorumModel::new(schedule.clone(), rho)?;
    Ok(classify(&model, n_max, DEFAULT_TOLERANCE)?.class == criterion.target())
}

/// Bisects on `rho` for the boundary of the region where `criterion`
/// holds on the window `1..=n_max`.
///
/// The search runs over `[tol, 1]`: at `rho = 0` the curve is identically
/// zero and classifies as `Constant`, which would leave the increasing
/// criterion unbracketed for every schedule.
pub fn threshold_scan(
    schedule: &Schedule,
    n_max: usize,
    criterion: Criterion,
    tol: f64,
) -> Result<ThresholdResult> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(QuorumError::Validation(format!(
            "bisection tolerance must lie in (0, 0.5), got {tol}"
        )));
    }
    let holds = |rho: f64| criterion_holds(schedule, n_max, criterion, rho);
    let (mut lo, mut hi) = (tol, 1.0);
    let holds_lo = holds(lo)?;
    let holds_hi = holds(hi)?;
    if holds_lo == holds_hi {
        return Err(QuorumError::CriterionNotBracketed {
            criterion: criterion.to_string(),
            lo,
            hi,
            holds_lo,
            holds_hi,
        });
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if holds(mid)? == holds_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        rho_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        criterion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: Schedule, rho: f64) -> QuorumModel {
        QuorumModel::new(s, rho).unwrap()
    }

    fn constant(p: f64) -> Schedule {
        Schedule::constant(p).unwrap()
    }

    #[test]
    fn figure_one_dichotomy() {
        let inc = classify(&model(constant(0.55), 0.17), 50, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(inc.class, Monotonicity::Increasing);
        assert_eq!(inc.argmax_n, 50);
        let dec = classify(&model(constant(0.55), 0.19), 50, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(dec.class, Monotonicity::Decreasing);
        assert_eq!((dec.argmax_n, dec.max_f), (1, 0.19));
    }

    #[test]
    fn harmonic_is_non_monotone() {
        let rep = classify(&model(Schedule::harmonic(), 0.2), 50, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(rep.class, Monotonicity::NonMonotone);
        assert_eq!(rep.argmax_n, 8);
        assert!((rep.max_f - 0.306207).abs() < 5e-7);
        assert_eq!(rep.window, (1, 50));
    }

    #[test]
    fn deaths_dominate_means_decreasing() {
        for rho in [0.01, 0.3, 0.7, 0.99] {
            let rep = classify(&model(constant(0.45), rho), 50, DEFAULT_TOLERANCE).unwrap();
            assert_eq!(rep.class, Monotonicity::Decreasing, "rho = {rho}");
        }
    }

    #[test]
    fn flat_curves() {
        let rep = classify(&model(constant(0.55), 2.0 / 11.0), 50, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(rep.class, Monotonicity::Constant);
        let zero = classify(&model(Schedule::harmonic(), 0.0), 10, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(zero.class, Monotonicity::Constant);
        assert_eq!((zero.argmax_n, zero.max_f), (1, 0.0));
    }

    #[test]
    fn harmonic_half_is_decreasing() {
        // f(1) = f(2) = 1/2, strictly decreasing afterwards.
        let rep = classify(&model(Schedule::harmonic(), 0.5), 50, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(rep.class, Monotonicity::Decreasing);
    }

    #[test]
    fn classify_errors() {
        let m = model(Schedule::harmonic(), 0.2);
        assert_eq!(classify(&m, 1, 1e-12), Err(QuorumError::WindowTooSmall(1)));
        assert!(classify(&m, 10, 0.0).is_err());
        let short = model(Schedule::table(vec![0.6; 5]).unwrap(), 0.2);
        assert!(matches!(
            classify(&short, 10, 1e-12),
            Err(QuorumError::StateOutOfRange { .. })
        ));
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(
            classify_constant_analytic(0.55, 0.17).unwrap(),
            Monotonicity::Increasing
        );
        assert_eq!(
            classify_constant_analytic(0.55, 2.0 / 11.0).unwrap(),
            Monotonicity::Constant
        );
        assert_eq!(
            classify_constant_analytic(0.5, 0.5).unwrap(),
            Monotonicity::Decreasing
        );
        assert!(classify_constant_analytic(1.0, 0.5).is_err());
        assert!(classify_constant_analytic(0.5, -0.1).is_err());
    }

    #[test]
    fn optimum_examples() {
        let (n, f) = optimal_quorum(&model(Schedule::harmonic(), 0.2), 50).unwrap();
        assert_eq!(n, 8);
        assert!((f - 0.306207).abs() < 5e-7);
        assert_eq!(
            optimal_quorum(&model(constant(0.55), 0.19), 50).unwrap(),
            (1, 0.19)
        );
        assert_eq!(
            optimal_quorum(&model(Schedule::harmonic(), 0.42), 1).unwrap(),
            (1, 0.42)
        );
        // Ties go to the smallest quorum.
        assert_eq!(
            optimal_quorum(&model(Schedule::harmonic(), 0.0), 20).unwrap(),
            (1, 0.0)
        );
    }

    #[test]
    fn critical_rho_examples() {
        let c = critical_rho_constant(0.55).unwrap().unwrap();
        assert!((c - 2.0 / 11.0).abs() < 1e-15);
        assert_eq!(critical_rho_constant(0.5).unwrap(), None);
        assert_eq!(critical_rho_constant(0.3).unwrap(), None);
        let c = critical_rho_constant(0.75).unwrap().unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_examples() {
        let h = Schedule::harmonic();
        let dec = threshold_scan(&h, 50, Criterion::DecreasingOnWindow, 1e-6).unwrap();
        assert!((dec.rho_star - 0.5).abs() < 1e-6);
        assert!(dec.bracket.1 - dec.bracket.0 <= 1e-6);
        assert!(!criterion_holds(&h, 50, dec.criterion, dec.bracket.0).unwrap());
        assert!(criterion_holds(&h, 50, dec.criterion, dec.bracket.1).unwrap());

        let inc = threshold_scan(&h, 50, Criterion::IncreasingOnWindow, 1e-6).unwrap();
        assert!(inc.rho_star > 0.0 && inc.rho_star < 0.1, "{inc:?}");
        assert!(criterion_holds(&h, 50, inc.criterion, inc.bracket.0).unwrap());
        assert!(!criterion_holds(&h, 50, inc.criterion, inc.bracket.1).unwrap());

        let c = threshold_scan(&constant(0.55), 50, Criterion::IncreasingOnWindow, 1e-6).unwrap();
        assert!((c.rho_star - 2.0 / 11.0).abs() < 1e-6);
    }

    #[test]
    fn increasing_threshold_shrinks_with_window() {
        let h = Schedule::harmonic();
        let stars: Vec<f64> = [10, 50, 200]
            .iter()
            .map(|&n| {
                threshold_scan(&h, n, Criterion::IncreasingOnWindow, 1e-6)
                    .unwrap()
                    .rho_star
            })
            .collect();
        assert!(stars.windows(2).all(|w| w[1] < w[0]), "{stars:?}");
    }

    #[test]
    fn unbracketed_threshold() {
        // r > 1: decreasing for every rho > 0, so the decreasing criterion
        // holds at both ends and the increasing one at neither.
        let s = constant(0.4);
        for crit in [Criterion::DecreasingOnWindow, Criterion::IncreasingOnWindow] {
            assert!(matches!(
                threshold_scan(&s, 50, crit, 1e-6),
                Err(QuorumError::CriterionNotBracketed { .. })
            ));
        }
    }

    #[test]
    fn criterion_parsing() {
        for c in [Criterion::IncreasingOnWindow, Criterion::DecreasingOnWindow] {
            assert_eq!(c.as_str().parse::<Criterion>().unwrap(), c);
        }
        assert!("increasing".parse::<Criterion>().is_err());
    }

    #[test]
    fn report_json_field_names() {
        let rep = classify(&model(Schedule::harmonic(), 0.2), 50, DEFAULT_TOLERANCE).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for k in ["class", "argmax_n", "max_f", "window", "tolerance"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["class"], "NonMonotone");
        let th = threshold_scan(
            &Schedule::harmonic(),
            50,
            Criterion::DecreasingOnWindow,
            1e-6,
        )
        .unwrap();
        let v = serde_json::to_value(&th).unwrap();
        assert_eq!(v["criterion"], "decreasing-on-window");
        assert!(v["bracket"].is_array());
        assert!(v["rho_star"].is_number());
    }
}
