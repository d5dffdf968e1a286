//! Attacker beliefs over joint high states and their Bayesian revision.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dsl::{Class, Program};
use crate::rational::{format_ratio, to_f64};
use crate::semantics::{self, ProgramState, SemanticsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("belief has {states} states but {probs} probabilities")]
    LengthMismatch { states: usize, probs: usize },
    #[error("belief is over an empty set of states")]
    Empty,
    #[error("state {0} is listed twice")]
    DuplicateState(HighState),
    #[error("negative probability {prob} for state {state}")]
    Negative { state: HighState, prob: String },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("state {0} is not in the belief's domain")]
    NotInDomain(HighState),
    #[error("beliefs are over different state domains")]
    DomainMismatch,
    #[error("low input does not assign low variable `{0}`")]
    MissingLow(String),
    #[error("`{0}` is not a low variable")]
    NotLow(String),
    #[error("observation {0} is impossible under the prebelief")]
    ImpossibleObservation(ProgramState),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A joint assignment to the high variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HighState(pub Vec<String>);

impl HighState {
    pub fn single(value: impl Into<String>) -> Self {
        HighState(vec![value.into()])
    }
}

impl fmt::Display for HighState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            f.write_str(&self.0[0])
        } else {
            write!(f, "({})", self.0.join(","))
        }
    }
}

impl Serialize for HighState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The true high state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reality(pub HighState);

/// Cartesian product of the high domains, first declared variable most
/// significant.
pub fn high_space(program: &Program) -> Vec<HighState> {
    let mut space = vec![Vec::new()];
    for d in program.vars_of(Class::High) {
        space = space
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                d.domain.iter().map(move |v| {
                    let mut s = prefix.clone();
                    s.push(v.clone());
                    s
                })
            })
            .collect();
    }
    if program.vars_of(Class::High).next().is_none() {
        return Vec::new();
    }
    space.into_iter().map(HighState).collect()
}

/// Exact probability distribution over an ordered list of high states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belief {
    over: Vec<HighState>,
    prob: Vec<BigRational>,
}

impl Belief {
    pub fn new(over: Vec<HighState>, prob: Vec<BigRational>) -> Result<Self, BeliefError> {
        if over.len() != prob.len() {
            return Err(BeliefError::LengthMismatch { states: over.len(), probs: prob.len() });
        }
        if over.is_empty() {
            return Err(BeliefError::Empty);
        }
        let mut sorted: Vec<&HighState> = over.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(BeliefError::DuplicateState(w[0].clone()));
        }
        if let Some((s, p)) = over.iter().zip(&prob).find(|(_, p)| p.is_negative()) {
            return Err(BeliefError::Negative { state: s.clone(), prob: format_ratio(p) });
        }
        let total: BigRational = prob.iter().sum();
        if !total.is_one() {
            return Err(BeliefError::NotNormalized(format_ratio(&total)));
        }
        Ok(Belief { over, prob })
    }

    /// Normalizes nonnegative integer weights; at least one must be positive.
    pub fn from_weights(over: Vec<HighState>, weights: &[u64]) -> Result<Self, BeliefError> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(BeliefError::NotNormalized("0".into()));
        }
        let prob = weights.iter().map(|&w| crate::rational::ratio(w as i64, total as i64)).collect();
        Belief::new(over, prob)
    }

    pub fn uniform(over: Vec<HighState>) -> Result<Self, BeliefError> {
        let n = over.len() as i64;
        if n == 0 {
            return Err(BeliefError::Empty);
        }
        let prob = vec![crate::rational::ratio(1, n); over.len()];
        Belief::new(over, prob)
    }

    /// The reality distribution: all mass on `reality`.
    pub fn point_mass(reality: &Reality, domain: Vec<HighState>) -> Result<Self, BeliefError> {
        let Some(i) = domain.iter().position(|s| *s == reality.0) else {
            return Err(BeliefError::NotInDomain(reality.0.clone()));
        };
        let mut prob = vec![BigRational::zero(); domain.len()];
        prob[i] = BigRational::one();
        Belief::new(domain, prob)
    }

    pub fn over(&self) -> &[HighState] {
        &self.over
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.prob
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.prob.iter().map(to_f64).collect()
    }

    pub fn len(&self) -> usize {
        self.over.len()
    }

    pub fn is_empty(&self) -> bool {
        self.over.is_empty()
    }

    pub fn index_of(&self, state: &HighState) -> Option<usize> {
        self.over.iter().position(|s| s == state)
    }

    pub fn prob(&self, state: &HighState) -> Result<&BigRational, BeliefError> {
        self.index_of(state).map(|i| &self.prob[i]).ok_or_else(|| BeliefError::NotInDomain(state.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HighState, &BigRational)> {
        self.over.iter().zip(&self.prob)
    }

    pub fn same_domain(&self, other: &Belief) -> Result<(), BeliefError> {
        if self.over == other.over {
            Ok(())
        } else {
            Err(BeliefError::DomainMismatch)
        }
    }
}

impl fmt::Display for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (s, p)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}: {}", format_ratio(p))?;
        }
        f.write_str(")")
    }
}

impl Serialize for Belief {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.len()))?;
        for (state, p) in self.iter() {
            map.serialize_entry(&state.to_string(), &to_f64(p))?;
        }
        map.end()
    }
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn shannon_entropy(b: &Belief) -> f64 {
    entropy_of(&b.probs_f64())
}

pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

/// The belief's probability of the true high state.
pub fn belief_in_reality(b: &Belief, r: &Reality) -> Result<BigRational, BeliefError> {
    b.prob(&r.0).cloned()
}

/// Initial state for a run: the high state, the low input, and every output
/// variable at the first element of its domain.
pub fn initial_state(
    program: &Program,
    high: &HighState,
    low_input: &ProgramState,
) -> Result<ProgramState, BeliefError> {
    check_low_input(program, low_input)?;
    let mut state = low_input.clone();
    let highs: Vec<_> = program.vars_of(Class::High).collect();
    if highs.len() != high.0.len() {
        return Err(BeliefError::NotInDomain(high.clone()));
    }
    for (d, v) in highs.iter().zip(&high.0) {
        state.set(&d.name, v);
    }
    for d in program.vars_of(Class::Output) {
        state.set(&d.name, &d.domain[0]);
    }
    Ok(state)
}

fn check_low_input(program: &Program, low_input: &ProgramState) -> Result<(), BeliefError> {
    for var in low_input.vars() {
        match program.decl(var) {
            Some(d) if d.class == Class::Low => {}
            Some(_) => return Err(BeliefError::NotLow(var.to_string())),
            None => return Err(SemanticsError::Unknown(var.to_string()).into()),
        }
    }
    for d in program.vars_of(Class::Low) {
        if low_input.get(&d.name).is_none() {
            return Err(BeliefError::MissingLow(d.name.clone()));
        }
    }
    Ok(())
}

/// Pr(observation | high, low input), reading the observation over its own
/// variables.
pub fn likelihood(
    program: &Program,
    high: &HighState,
    low_input: &ProgramState,
    observation: &ProgramState,
) -> Result<BigRational, BeliefError> {
    let init = initial_state(program, high, low_input)?;
    let dist = semantics::run(program, &init)?;
    let seen = semantics::observe(&dist, observation.vars())?;
    Ok(seen.prob(observation))
}

/// Bayesian revision of `prebelief` after seeing `observation` from one run
/// on `low_input`.
pub fn revise_belief(
    prebelief: &Belief,
    program: &Program,
    low_input: &ProgramState,
    observation: &ProgramState,
) -> Result<Belief, BeliefError> {
    if prebelief.over() != high_space(program).as_slice() {
        return Err(BeliefError::DomainMismatch);
    }
    check_low_input(program, low_input)?;
    let mut joint = Vec::with_capacity(prebelief.len());
    for (state, p) in prebelief.iter() {
        let w = if p.is_zero() { BigRational::zero() } else { p * likelihood(program, state, low_input, observation)? };
        joint.push(w);
    }
    let z: BigRational = joint.iter().sum();
    if z.is_zero() {
        return Err(BeliefError::ImpossibleObservation(observation.clone()));
    }
    let post = joint.into_iter().map(|w| w / &z).collect();
    Belief::new(prebelief.over().to_vec(), post)
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

    fn abc() -> Vec<HighState> {
        ["A", "B", "C"].into_iter().map(HighState::single).collect()
    }

    fn confident_pre() -> Belief {
        Belief::new(abc(), vec![ratio(98, 100), ratio(1, 100), ratio(1, 100)]).unwrap()
    }

    fn after_miss() -> Belief {
        Belief::new(abc(), vec![ratio(0, 1), ratio(1, 2), ratio(1, 2)]).unwrap()
    }

    fn reality(v: &str) -> Reality {
        Reality(HighState::single(v))
    }

    #[test]
    fn point_masses() {
        let c = Belief::point_mass(&reality("C"), abc()).unwrap();
        assert_eq!(c.probs_f64(), vec![0.0, 0.0, 1.0]);
        let b = Belief::point_mass(&reality("B"), abc()).unwrap();
        assert_eq!(b.probs_f64(), vec![0.0, 1.0, 0.0]);
        let single = Belief::point_mass(&reality("A"), vec![HighState::single("A")]).unwrap();
        assert_eq!(single.probs_f64(), vec![1.0]);
        assert_eq!(Belief::point_mass(&reality("Z"), abc()), Err(BeliefError::NotInDomain(HighState::single("Z"))));
    }

    #[test]
    fn rejects_invalid_beliefs() {
        assert!(matches!(
            Belief::new(abc(), vec![ratio(9, 10), ratio(0, 1), ratio(0, 1)]),
            Err(BeliefError::NotNormalized(_))
        ));
        assert!(matches!(
            Belief::new(abc(), vec![ratio(3, 2), ratio(-1, 2), ratio(0, 1)]),
            Err(BeliefError::Negative { .. })
        ));
        let dup = vec![HighState::single("A"), HighState::single("A")];
        assert!(matches!(Belief::uniform(dup), Err(BeliefError::DuplicateState(_))));
    }

    #[test]
    fn entropy_values() {
        assert!((shannon_entropy(&confident_pre()) - 0.1614).abs() < 5e-4);
        assert!((shannon_entropy(&after_miss()) - 1.0).abs() < 1e-12);
        assert_eq!(shannon_entropy(&Belief::point_mass(&reality("C"), abc()).unwrap()), 0.0);
        assert!((shannon_entropy(&Belief::uniform(abc()).unwrap()) - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn reality_lookup() {
        assert_eq!(belief_in_reality(&confident_pre(), &reality("C")).unwrap(), ratio(1, 100));
        assert_eq!(belief_in_reality(&after_miss(), &reality("C")).unwrap(), ratio(1, 2));
        let pm = Belief::point_mass(&reality("C"), abc()).unwrap();
        assert_eq!(belief_in_reality(&pm, &reality("C")).unwrap(), ratio(1, 1));
    }

    #[test]
    fn high_space_is_cartesian() {
        let p = parse_program("high x in {0,1}; low g in {z}; high y in {a,b,c}; skip").unwrap();
        let s = high_space(&p);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], HighState(vec!["0".into(), "a".into()]));
        assert_eq!(s[5], HighState(vec!["1".into(), "c".into()]));
        assert!(high_space(&parse_program("low g in {z}; skip").unwrap()).is_empty());
    }

    #[test]
    fn revises_deterministic_checker() {
        let prog = parse_program(PWC).unwrap();
        let low = ProgramState::new().with("g", "A");
        let obs = ProgramState::new().with("a", "0");
        let post = revise_belief(&confident_pre(), &prog, &low, &obs).unwrap();
        assert_eq!(post, after_miss());
    }

    #[test]
    fn consistent_point_mass_is_unchanged() {
        let prog = parse_program(PWC).unwrap();
        let pm = Belief::point_mass(&reality("B"), abc()).unwrap();
        let low = ProgramState::new().with("g", "A");
        let obs = ProgramState::new().with("a", "0");
        assert_eq!(revise_belief(&pm, &prog, &low, &obs).unwrap(), pm);
    }

    #[test]
    fn revises_probabilistic_checker() {
        let prog = parse_program(PPWC).unwrap();
        let low = ProgramState::new().with("g", "A");
        let obs = ProgramState::new().with("a", "0");
        // Pr(a=0 | p) is 1/100 for p = A and 99/100 otherwise.
        let lik = [ratio(1, 100), ratio(99, 100), ratio(99, 100)];
        let joint: Vec<BigRational> = lik.iter().map(|l| l * ratio(1, 3)).collect();
        let z: BigRational = joint.iter().sum();
        let oracle: Vec<BigRational> = joint.iter().map(|j| j / &z).collect();
        assert_eq!(oracle, vec![ratio(1, 199), ratio(99, 199), ratio(99, 199)]);

        let post = revise_belief(&Belief::uniform(abc()).unwrap(), &prog, &low, &obs).unwrap();
        assert_eq!(post.probs(), oracle.as_slice());
    }

    #[test]
    fn revision_errors() {
        let prog = parse_program(PWC).unwrap();
        let obs = ProgramState::new().with("a", "1");
        let pm = Belief::point_mass(&reality("B"), abc()).unwrap();
        let low = ProgramState::new().with("g", "A");
        assert!(matches!(revise_belief(&pm, &prog, &low, &obs), Err(BeliefError::ImpossibleObservation(_))));
        assert_eq!(revise_belief(&pm, &prog, &ProgramState::new(), &obs), Err(BeliefError::MissingLow("g".into())));
        let wrong = ProgramState::new().with("g", "A").with("p", "A");
        assert_eq!(revise_belief(&pm, &prog, &wrong, &obs), Err(BeliefError::NotLow("p".into())));
        let other = Belief::uniform(vec![HighState::single("A")]).unwrap();
        assert_eq!(revise_belief(&other, &prog, &low, &obs), Err(BeliefError::DomainMismatch));
    }

    #[test]
    fn uninformative_program_leaves_belief() {
        let prog =
            parse_program("high p in {A,B,C}; low g in {A,B,C}; output a in {0,1}; pchoice 1/4 { a := 1 } { a := 0 }")
                .unwrap();
        let low = ProgramState::new().with("g", "C");
        let obs = ProgramState::new().with("a", "1");
        assert_eq!(revise_belief(&confident_pre(), &prog, &low, &obs).unwrap(), confident_pre());
    }
}
