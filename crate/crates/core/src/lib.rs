//! Belief-based quantitative information flow analysis.
//!
//! Programs in a small probabilistic imperative language are run exactly,
//! an attacker's belief about the secret is revised against what the run
//! reveals, and the resulting flow is measured both with the unbounded
//! belief-accuracy metric `Q` and with the size-consistent `Q''`, which
//! always stays within plus or minus the size of the secret.

pub mod belief;
pub mod cli;
pub mod divergence;
pub mod dsl;
pub mod extended;
pub mod metrics;
pub mod rational;
pub mod report;
pub mod scenario;
pub mod semantics;
pub mod sweep;

pub use belief::{Belief, BeliefError, HighState, Reality};
pub use dsl::{parse_program, Program};
pub use extended::ExtendedReal;
pub use metrics::{analyze, Experiment, FlowRange, FlowReport, MetricError};
pub use semantics::ProgramState;
