//! CSV data behind the comparison curves: discrimination constructs,
//! divergences, and `Q` against `Q''`.
//!
//! * `disc`: the reference belief of a state is fixed at 1/2 and the
//!   measured belief `t` runs over `i/steps`, `i = 1..=steps`.
//! * `div`: `D` and `D'` from Bernoulli(t) to the point mass on its first
//!   outcome, `t = i/(steps-1)`, `i = 0..steps`.
//! * `metric`: the postbelief in the true high state runs over
//!   `i/(steps-1)` with prebelief 0.01 and a three-element secret.
//!
//! Output is deterministic: LF line endings, `.` decimal point, shortest
//! round-trip float formatting, `inf`/`-inf` for infinities.

use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::belief::{Belief, HighState};
use crate::divergence::{alt_discrimination, js_asym_divergence, js_discrimination, kl_discrimination, kl_divergence};
use crate::metrics::{q_double_value, q_value};
use crate::rational::ratio;

/// Reference belief used by the `disc` sweep.
pub const DISC_REFERENCE: f64 = 0.5;
/// Prebelief in the true high state used by the `metric` sweep.
pub const METRIC_PREBELIEF: f64 = 0.01;
/// Number of secrets used by the `metric` sweep.
pub const METRIC_SECRETS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Disc,
    Div,
    Metric,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("unknown sweep kind `{0}` (expected disc, div or metric)")]
    UnknownKind(String),
    #[error("steps must be at least 2, got {0}")]
    TooFewSteps(usize),
}

impl FromStr for SweepKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "disc" => Ok(SweepKind::Disc),
            "div" => Ok(SweepKind::Div),
            "metric" => Ok(SweepKind::Metric),
            other => Err(SweepError::UnknownKind(other.to_string())),
        }
    }
}

pub fn sweep_csv(kind: SweepKind, steps: usize) -> Result<String, SweepError> {
    if steps < 2 {
        return Err(SweepError::TooFewSteps(steps));
    }
    let mut out = String::new();
    match kind {
        SweepKind::Disc => {
            out.push_str("t,I_Dis,I_Dis_half,I_Dis_prime,I_Dis_double_prime\n");
            for i in 1..=steps {
                let t = i as f64 / steps as f64;
                let kl = kl_discrimination(DISC_REFERENCE, t);
                let js = js_discrimination(DISC_REFERENCE, t);
                let alt = alt_discrimination(DISC_REFERENCE, t);
                writeln!(out, "{t},{kl},{},{js},{alt}", kl.half()).unwrap();
            }
        }
        SweepKind::Div => {
            out.push_str("t,D,D_prime\n");
            let outcomes = vec![HighState::single("first"), HighState::single("second")];
            let target = Belief::new(outcomes.clone(), vec![ratio(1, 1), ratio(0, 1)]).unwrap();
            let n = (steps - 1) as i64;
            for i in 0..=n {
                let b = Belief::new(outcomes.clone(), vec![ratio(i, n), ratio(n - i, n)]).unwrap();
                let d = kl_divergence(&b, &target).unwrap();
                let dp = js_asym_divergence(&b, &target).unwrap();
                writeln!(out, "{},{d},{dp}", i as f64 / n as f64).unwrap();
            }
        }
        SweepKind::Metric => {
            out.push_str("post,Q,Q_double_prime,eta,neg_eta\n");
            let eta = (METRIC_SECRETS as f64).log2();
            let n = steps - 1;
            for i in 0..=n {
                let post = i as f64 / n as f64;
                let q = q_value(METRIC_PREBELIEF, post).expect("prebelief is positive");
                let qd = q_double_value(METRIC_PREBELIEF, post, eta).expect("eta is positive");
                writeln!(out, "{post},{q},{qd},{eta},{}", -eta).unwrap();
            }
        }
    }
    Ok(out)
}
