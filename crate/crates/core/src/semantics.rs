//! Exact distribution-transformer semantics.
//!
//! Programs are loop-free, so the probabilistic branch tree is finite and can
//! be enumerated outright. All weights stay exact rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dsl::{Class, Cond, Program, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("state does not assign variable `{0}`")]
    Missing(String),
    #[error("value `{value}` is outside the domain of `{var}`")]
    OutOfDomain { var: String, value: String },
    #[error("unknown variable `{0}`")]
    Unknown(String),
}

/// An assignment of values to variables. Total over the declared variables
/// when it is a program state; partial when it is a projection or an input.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProgramState(BTreeMap<String, String>);

impl ProgramState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, value: impl Into<String>) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, value: impl Into<String>) {
        self.0.insert(var.into(), value.into());
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restriction to the given variables; names absent from the state are
    /// ignored.
    pub fn project<'a>(&self, vars: impl IntoIterator<Item = &'a str>) -> ProgramState {
        let mut out = ProgramState::new();
        for v in vars {
            if let Some(x) = self.0.get(v) {
                out.0.insert(v.to_string(), x.clone());
            }
        }
        out
    }

    /// Checks totality and domain membership against `program`.
    pub fn check(&self, program: &Program) -> Result<(), SemanticsError> {
        for var in self.0.keys() {
            if program.decl(var).is_none() {
                return Err(SemanticsError::Unknown(var.clone()));
            }
        }
        for d in &program.decls {
            match self.0.get(&d.name) {
                None => return Err(SemanticsError::Missing(d.name.clone())),
                Some(v) if !d.contains(v) => {
                    return Err(SemanticsError::OutOfDomain { var: d.name.clone(), value: v.clone() })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for ProgramState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// Finite distribution over states with strictly positive exact weights
/// summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDistribution(BTreeMap<ProgramState, BigRational>);

impl StateDistribution {
    pub fn point(state: ProgramState) -> Self {
        StateDistribution(BTreeMap::from([(state, BigRational::one())]))
    }

    pub fn prob(&self, state: &ProgramState) -> BigRational {
        self.0.get(state).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProgramState, &BigRational)> {
        self.0.iter()
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> BigRational {
        self.0.values().fold(BigRational::zero(), |acc, p| acc + p)
    }
}

fn accumulate(into: &mut BTreeMap<ProgramState, BigRational>, state: ProgramState, p: BigRational) {
    if p.is_zero() {
        return;
    }
    let slot = into.entry(state).or_insert_with(BigRational::zero);
    *slot += p;
}

fn holds(cond: &Cond, state: &ProgramState) -> bool {
    match cond {
        Cond::EqValue(v, x) => state.get(v) == Some(x.as_str()),
        Cond::EqVar(a, b) => state.get(a) == state.get(b),
        Cond::Not(c) => !holds(c, state),
        Cond::And(a, b) => holds(a, state) && holds(b, state),
        Cond::Or(a, b) => holds(a, state) || holds(b, state),
    }
}

fn exec(stmt: &Stmt, state: ProgramState) -> BTreeMap<ProgramState, BigRational> {
    match stmt {
        Stmt::Skip => BTreeMap::from([(state, BigRational::one())]),
        Stmt::Assign(var, value) => BTreeMap::from([(state.with(var, value), BigRational::one())]),
        Stmt::Seq(a, b) => {
            let mut out = BTreeMap::new();
            for (mid, p) in exec(a, state) {
                for (end, q) in exec(b, mid) {
                    accumulate(&mut out, end, &p * q);
                }
            }
            out
        }
        Stmt::If(c, a, b) => {
            if holds(c, &state) {
                exec(a, state)
            } else {
                exec(b, state)
            }
        }
        Stmt::PChoice(prob, a, b) => {
            let mut out = BTreeMap::new();
            let rest = BigRational::one() - prob;
            for (end, q) in exec(a, state.clone()) {
                accumulate(&mut out, end, prob * q);
            }
            for (end, q) in exec(b, state) {
                accumulate(&mut out, end, &rest * q);
            }
            out
        }
    }
}

/// Runs `program` from `initial` and returns the exact distribution over
/// final states.
pub fn run(program: &Program, initial: &ProgramState) -> Result<StateDistribution, SemanticsError> {
    initial.check(program)?;
    Ok(StateDistribution(exec(&program.body, initial.clone())))
}

/// Marginalizes onto `vars`, summing the weight of states that agree there.
pub fn observe<'a>(
    dist: &StateDistribution,
    vars: impl IntoIterator<Item = &'a str>,
) -> Result<StateDistribution, SemanticsError> {
    let vars: Vec<&str> = vars.into_iter().collect();
    if let Some((first, _)) = dist.0.iter().next() {
        for v in &vars {
            if first.get(v).is_none() {
                return Err(SemanticsError::Unknown(v.to_string()));
            }
        }
    }
    let mut out = BTreeMap::new();
    for (s, p) in &dist.0 {
        accumulate(&mut out, s.project(vars.iter().copied()), p.clone());
    }
    Ok(StateDistribution(out))
}

/// Names of the variables the attacker observes after a run.
pub fn output_vars(program: &Program) -> Vec<&str> {
    program.vars_of(Class::Output).map(|d| d.name.as_str()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_program;
    use crate::rational::ratio;

    const PWC: &str = "high p in {A,B,C}; low g in {A,B,C}; output a in {0,1};
        if p == g then a := 1 else a := 0 end";
    const PPWC: &str = "high p in {A,B,C}; low g in {A,B,C}; output a in {0,1};
        if p == g then pchoice 0.99 { a := 1 } { a := 0 }
        else pchoice 0.99 { a := 0 } { a := 1 } end";

    fn init(p: &str, g: &str) -> ProgramState {
        ProgramState::new().with("p", p).with("g", g).with("a", "0")
    }

    #[test]
    fn deterministic_checker() {
        let prog = parse_program(PWC).unwrap();
        let d = run(&prog, &init("C", "A")).unwrap();
        assert_eq!(d.support_len(), 1);
        let obs = observe(&d, ["a"]).unwrap();
        assert_eq!(obs.prob(&ProgramState::new().with("a", "0")), ratio(1, 1));
    }

    #[test]
    fn skip_is_identity() {
        let prog = parse_program("high p in {A,B}; low q in {x}; skip").unwrap();
        let s = ProgramState::new().with("p", "B").with("q", "x");
        assert_eq!(run(&prog, &s).unwrap(), StateDistribution::point(s));
    }

    #[test]
    fn probabilistic_checker() {
        let prog = parse_program(PPWC).unwrap();
        let d = run(&prog, &init("C", "A")).unwrap();
        assert_eq!(d.total(), ratio(1, 1));
        let obs = observe(&d, ["a"]).unwrap();
        assert_eq!(obs.prob(&ProgramState::new().with("a", "0")), ratio(99, 100));
        assert_eq!(obs.prob(&ProgramState::new().with("a", "1")), ratio(1, 100));
    }

    #[test]
    fn full_projection_is_identity() {
        let prog = parse_program(PPWC).unwrap();
        let d = run(&prog, &init("A", "A")).unwrap();
        assert_eq!(observe(&d, ["a", "g", "p"]).unwrap(), d);
    }

    #[test]
    fn merges_equal_final_states() {
        let prog = parse_program("output a in {0,1}; pchoice 1/3 { a := 1 } { a := 1 }").unwrap();
        let d = run(&prog, &ProgramState::new().with("a", "0")).unwrap();
        assert_eq!(d.support_len(), 1);
        assert_eq!(d.total(), ratio(1, 1));
    }

    #[test]
    fn rejects_mismatched_state() {
        let prog = parse_program(PWC).unwrap();
        let missing = ProgramState::new().with("p", "A").with("g", "A");
        assert_eq!(run(&prog, &missing), Err(SemanticsError::Missing("a".into())));
        let bad = init("Z", "A");
        assert!(matches!(run(&prog, &bad), Err(SemanticsError::OutOfDomain { .. })));
        let extra = init("A", "A").with("zz", "1");
        assert_eq!(run(&prog, &extra), Err(SemanticsError::Unknown("zz".into())));
        let d = run(&prog, &init("A", "A")).unwrap();
        assert_eq!(observe(&d, ["nope"]), Err(SemanticsError::Unknown("nope".into())));
    }
}
