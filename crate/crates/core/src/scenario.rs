//! Scenario files: one experiment per file.
//!
//! ```text
//! # password checker, attacker guesses A
//! program = pwc.qif
//! reality = C
//! low.g = A
//! belief.A = 0.98
//! belief.B = 0.01
//! belief.C = 0.01
//! observe.a = 0          # optional
//! epsilon = 0.03         # optional
//! ```
//!
//! Tuples for several high variables are written `(x,y)`. High states not
//! listed under `belief.` get probability zero. Probabilities are exact
//! decimals or fractions; a prebelief within 1e-9 of one is renormalized
//! exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::belief::{high_space, Belief, HighState, Reality};
use crate::dsl::{Class, Program};
use crate::metrics::Experiment;
use crate::rational::{format_ratio, parse_ratio, to_f64};
use crate::semantics::ProgramState;

const NORMALIZATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(message: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Invalid(message.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub program_path: String,
    /// Entries in file order.
    pub prebelief: Vec<(HighState, BigRational)>,
    pub reality: HighState,
    pub low_input: BTreeMap<String, String>,
    pub observation: Option<BTreeMap<String, String>>,
    pub epsilon: Option<BigRational>,
}

fn parse_tuple(text: &str) -> Option<HighState> {
    let text = text.trim();
    let inner = match text.strip_prefix('(') {
        Some(rest) => rest.strip_suffix(')')?,
        None => text,
    };
    let parts: Vec<String> = inner.split(',').map(|p| p.trim().to_string()).collect();
    if parts.iter().any(|p| p.is_empty() || p.contains(char::is_whitespace)) {
        return None;
    }
    Some(HighState(parts))
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut program_path = None;
        let mut reality = None;
        let mut prebelief: Vec<(HighState, BigRational)> = Vec::new();
        let mut low_input = BTreeMap::new();
        let mut observation: Option<BTreeMap<String, String>> = None;
        let mut epsilon = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| ScenarioError::Line { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(err(format!("expected `key = value`, found `{content}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("`{key}` has no value")));
            }
            let duplicate = || err(format!("`{key}` is given more than once"));

            if key == "program" {
                if program_path.replace(value.to_string()).is_some() {
                    return Err(duplicate());
                }
            } else if key == "reality" {
                let t = parse_tuple(value).ok_or_else(|| err(format!("malformed tuple `{value}`")))?;
                if reality.replace(t).is_some() {
                    return Err(duplicate());
                }
            } else if key == "epsilon" {
                let e = parse_ratio(value).ok_or_else(|| err(format!("malformed number `{value}`")))?;
                if !e.is_positive() {
                    return Err(err("epsilon must be positive".into()));
                }
                if epsilon.replace(e).is_some() {
                    return Err(duplicate());
                }
            } else if let Some(var) = key.strip_prefix("low.") {
                if !valid_name(var) {
                    return Err(err(format!("malformed variable name `{var}`")));
                }
                if low_input.insert(var.to_string(), value.to_string()).is_some() {
                    return Err(duplicate());
                }
            } else if let Some(var) = key.strip_prefix("observe.") {
                if !valid_name(var) {
                    return Err(err(format!("malformed variable name `{var}`")));
                }
                let obs = observation.get_or_insert_with(BTreeMap::new);
                if obs.insert(var.to_string(), value.to_string()).is_some() {
                    return Err(duplicate());
                }
            } else if let Some(tuple) = key.strip_prefix("belief.") {
                let state = parse_tuple(tuple).ok_or_else(|| err(format!("malformed tuple `{tuple}`")))?;
                let p = parse_ratio(value).ok_or_else(|| err(format!("malformed probability `{value}`")))?;
                if p.is_negative() {
                    return Err(err(format!("negative probability `{value}`")));
                }
                if prebelief.iter().any(|(s, _)| *s == state) {
                    return Err(duplicate());
                }
                prebelief.push((state, p));
            } else {
                return Err(err(format!("unknown key `{key}`")));
            }
        }

        let Some(program_path) = program_path else { return invalid("missing `program`") };
        let Some(reality) = reality else { return invalid("missing `reality`") };
        if prebelief.is_empty() {
            return invalid("no `belief.` entries");
        }
        let total: BigRational = prebelief.iter().map(|(_, p)| p).sum();
        if (to_f64(&total) - 1.0).abs() > NORMALIZATION_SLACK {
            return invalid(format!("prebelief does not normalize: sums to {}", format_ratio(&total)));
        }
        Ok(Scenario { program_path, prebelief, reality, low_input, observation, epsilon })
    }

    /// Binds the scenario to its program, checking every tuple and value
    /// against the declared domains.
    pub fn to_experiment(&self, program: Program) -> Result<Experiment, ScenarioError> {
        let space = high_space(&program);
        if space.is_empty() {
            return invalid("program declares no high variables");
        }
        let arity = program.vars_of(Class::High).count();
        let mut probs = vec![BigRational::zero(); space.len()];
        for (state, p) in &self.prebelief {
            if state.0.len() != arity {
                return invalid(format!("belief tuple {state} should have {arity} components"));
            }
            let Some(i) = space.iter().position(|s| s == state) else {
                return invalid(format!("belief tuple {state} is not a joint high state"));
            };
            probs[i] = p.clone();
        }
        let total: BigRational = probs.iter().sum();
        if total.is_zero() {
            return invalid("prebelief does not normalize: sums to 0");
        }
        let probs = probs.into_iter().map(|p| p / &total).collect();
        let prebelief = Belief::new(space.clone(), probs).map_err(|e| ScenarioError::Invalid(e.to_string()))?;

        if !space.contains(&self.reality) {
            return invalid(format!("reality {} is not a joint high state", self.reality));
        }

        let mut low = ProgramState::new();
        for (var, value) in &self.low_input {
            check_var(&program, var, value, Class::Low)?;
            low.set(var, value);
        }
        for d in program.vars_of(Class::Low) {
            if !self.low_input.contains_key(&d.name) {
                return invalid(format!("low variable `{}` has no `low.{}` value", d.name, d.name));
            }
        }
        if let Some(obs) = &self.observation {
            for (var, value) in obs {
                check_var(&program, var, value, Class::Output)?;
            }
        }
        Experiment::new(program, prebelief, Reality(self.reality.clone()), low)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    pub fn observation_state(&self) -> Option<ProgramState> {
        self.observation.as_ref().map(|obs| obs.iter().fold(ProgramState::new(), |s, (k, v)| s.with(k, v)))
    }
}

fn check_var(program: &Program, var: &str, value: &str, class: Class) -> Result<(), ScenarioError> {
    match program.decl(var) {
        None => invalid(format!("`{var}` is not declared by the program")),
        Some(d) if d.class != class => invalid(format!("`{var}` is a {} variable, not {class}", d.class)),
        Some(d) if !d.contains(value) => invalid(format!("`{value}` is not in the domain of `{var}`")),
        Some(_) => Ok(()),
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "program = {}", self.program_path)?;
        writeln!(f, "reality = {}", self.reality)?;
        for (var, value) in &self.low_input {
            writeln!(f, "low.{var} = {value}")?;
        }
        for (state, p) in &self.prebelief {
            writeln!(f, "belief.{state} = {}", format_ratio(p))?;
        }
        if let Some(obs) = &self.observation {
            for (var, value) in obs {
                writeln!(f, "observe.{var} = {value}")?;
            }
        }
        if let Some(e) = &self.epsilon {
            writeln!(f, "epsilon = {}", format_ratio(e))?;
        }
        Ok(())
    }
}
