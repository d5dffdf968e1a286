//! Command implementations behind the `qif` binary. Each returns the text
//! to print, or an error carrying a stable exit code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 2    | scenario or argument validation failed    |
//! | 3    | observation impossible under prebelief    |
//! | 4    | file could not be read                    |
//! | 5    | program failed to parse                   |
//! | 64   | command-line usage error                  |

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::belief::BeliefError;
use crate::dsl::{self, DslError};
use crate::metrics::{self, analyze, size_consistent, Experiment, MetricError};
use crate::rational::{format_ratio, parse_ratio, to_f64};
use crate::report::render_report;
use crate::scenario::{Scenario, ScenarioError};
use crate::sweep::{sweep_csv, SweepError, SweepKind};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IMPOSSIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_PARSE: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Program { path: PathBuf, source: DslError },
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Impossible(String),
    #[error("{0}")]
    Metric(MetricError),
    #[error("{0}")]
    Sweep(#[from] SweepError),
    #[error("no epsilon given: pass --epsilon or set `epsilon` in the scenario")]
    MissingEpsilon,
    #[error("malformed epsilon `{0}`")]
    BadEpsilon(String),
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Belief(BeliefError::ImpossibleObservation(_)) => CliError::Impossible(e.to_string()),
            other => CliError::Metric(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Program { .. } => EXIT_PARSE,
            CliError::Impossible(_) => EXIT_IMPOSSIBLE,
            CliError::Scenario(_)
            | CliError::Metric(_)
            | CliError::Sweep(_)
            | CliError::MissingEpsilon
            | CliError::BadEpsilon(_) => EXIT_VALIDATION,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Loads a scenario and the program it names; the program path is relative
/// to the scenario file's directory.
pub fn load(scenario_path: &Path) -> Result<(Scenario, Experiment), CliError> {
    let scenario = Scenario::parse(&read(scenario_path)?)?;
    let base = scenario_path.parent().unwrap_or_else(|| Path::new("."));
    let program_path = base.join(&scenario.program_path);
    let source = read(&program_path)?;
    let program =
        dsl::parse_program(&source).map_err(|source| CliError::Program { path: program_path.clone(), source })?;
    let experiment = scenario.to_experiment(program)?;
    Ok((scenario, experiment))
}

#[derive(Serialize)]
struct Enumerated {
    observation: crate::semantics::ProgramState,
    probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<metrics::FlowReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn cmd_analyze(scenario_path: &Path, machine: bool, enumerate: bool) -> Result<String, CliError> {
    let (scenario, experiment) = load(scenario_path)?;
    let mut out = String::new();
    for w in dsl::lint(&experiment.program) {
        out.push_str(&format!("warning: {w}\n"));
    }
    if !enumerate {
        let report = analyze(&experiment, scenario.observation_state().as_ref())?;
        if machine {
            // Lint warnings would corrupt the JSON document.
            return Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n");
        }
        out.push_str(&render_report(&report));
        return Ok(out);
    }

    let mut all = Vec::new();
    for (obs, p) in experiment.observations()? {
        let (report, error) = match analyze(&experiment, Some(&obs)) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        all.push(Enumerated { observation: obs, probability: to_f64(&p), report, error });
    }
    if machine {
        return Ok(serde_json::to_string_pretty(&all).expect("report serializes") + "\n");
    }
    out.push_str("observations under the true high state:\n");
    for e in &all {
        out.push_str(&format!("  {}  {:.4}\n", e.observation, e.probability));
    }
    for e in &all {
        out.push_str(&format!("\n== observation {} (probability {:.4}) ==\n", e.observation, e.probability));
        match (&e.report, &e.error) {
            (Some(r), _) => out.push_str(&render_report(r)),
            (None, Some(err)) => out.push_str(&format!("{err}\n")),
            (None, None) => {}
        }
    }
    Ok(out)
}

pub fn cmd_sweep(kind: &str, steps: usize) -> Result<String, CliError> {
    let kind: SweepKind = kind.parse()?;
    Ok(sweep_csv(kind, steps)?)
}

pub fn cmd_check(scenario_path: &Path, epsilon: Option<&str>) -> Result<String, CliError> {
    let (scenario, experiment) = load(scenario_path)?;
    let epsilon: BigRational = match epsilon {
        Some(text) => parse_ratio(text).ok_or_else(|| CliError::BadEpsilon(text.to_string()))?,
        None => scenario.epsilon.clone().ok_or(CliError::MissingEpsilon)?,
    };
    let eta = experiment.eta()?;
    let pre = &experiment.prebelief;
    let reality = &experiment.reality;
    let r_range = metrics::range_r(eta);
    let q_range = metrics::range_q(pre, reality)?;
    let qd_range = metrics::range_q_double(pre, reality, eta)?;
    let admissible = metrics::admissible(pre, &epsilon)?;

    let word = |ok: bool| if ok { "size-consistent" } else { "NOT size-consistent" };
    let (r_ok, q_ok, qd_ok) =
        (size_consistent(&r_range, eta), size_consistent(&q_range, eta), size_consistent(&qd_range, eta));
    let min = pre.probs().iter().min().cloned().unwrap_or_default();
    let bound = &epsilon / BigRational::from_integer(pre.len().into());

    let mut out = String::new();
    out.push_str(&format!("eta = {eta:.4} bits\n"));
    out.push_str(&format!("R: {} (range [{:.4}, {:.4}])\n", word(r_ok), r_range.lo, r_range.hi));
    out.push_str(&format!("Q: {} (range (-inf, {:.4}])\n", word(q_ok), q_range.hi));
    out.push_str(&format!("Q'': {} (range [{:.4}, {:.4}])\n", word(qd_ok), qd_range.lo, qd_range.hi));
    out.push_str(&format!(
        "prebelief: {} at epsilon = {} (min {} vs bound {})\n",
        if admissible { "admissible" } else { "inadmissible" },
        format_ratio(&epsilon),
        format_ratio(&min),
        format_ratio(&bound),
    ));
    out.push_str(&format!("Q: {}; Q'': {}; R: {}\n", word(q_ok), word(qd_ok), word(r_ok)));
    Ok(out)
}
