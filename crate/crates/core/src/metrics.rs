//! Flow metrics over one experiment: the uncertainty reduction `R`, the
//! belief-accuracy metric `Q`, its normalized form `Q'` and the size-scaled
//! `Q'' = eta * Q'`, together with their ranges, the guess-likelihood
//! multiplier and the residual exhaustive-search effort.
//!
//! Every metric that is reality-aware depends only on the pre- and
//! postbelief probability of the true high state, so each has a scalar form
//! (`*_value`) that the belief-level functions delegate to.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::belief::{high_space, initial_state, revise_belief, shannon_entropy, Belief, BeliefError, Reality};
use crate::divergence::{js_asym_of, kl_of};
use crate::dsl::{self, Class, DslError, Program};
use crate::extended::ExtendedReal;
use crate::rational::to_f64;
use crate::semantics::{self, ProgramState};

/// Diagnostic attached to an undefined search effort.
pub const SEARCH_UNDEFINED: &str =
    "flow exceeds the size of the secret; the exhaustive search space cannot be established";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Program(#[from] DslError),
    #[error("secret size must be positive, got {0} bits")]
    NonPositiveEta(String),
    #[error("Q is undefined: the true high state has probability 0 both before and after")]
    UndefinedQ,
    #[error("a flow of {k} bits is outside the range for prebelief {pre} at eta = {eta}")]
    FlowOutOfRange { k: String, eta: String, pre: String },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("reality {0} is not a joint high state of the program")]
    RealityOutsideDomain(String),
}

fn check_eta(eta: f64) -> Result<(), MetricError> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(MetricError::NonPositiveEta(eta.to_string()))
    }
}

/// Closed interval of flow values in bits; the ends may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowRange {
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
}

impl FlowRange {
    pub fn new(lo: impl Into<ExtendedReal>, hi: impl Into<ExtendedReal>) -> Self {
        let (lo, hi) = (lo.into(), hi.into());
        debug_assert!(lo <= hi);
        FlowRange { lo, hi }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lo.to_f64() - tol <= x && x <= self.hi.to_f64() + tol
    }
}

// ---- scalar forms -------------------------------------------------------

/// `Q = -log2 pre + log2 post`, both probabilities of the true high state.
pub fn q_value(pre: f64, post: f64) -> Result<ExtendedReal, MetricError> {
    match (pre == 0.0, post == 0.0) {
        (true, true) => Err(MetricError::UndefinedQ),
        (true, false) => Ok(ExtendedReal::PosInf),
        (false, true) => Ok(ExtendedReal::NegInf),
        (false, false) => Ok(ExtendedReal::Finite(post.log2() - pre.log2())),
    }
}

/// `Q' = -log2(1 + pre) + log2(1 + post)`, in [-1, 1].
pub fn q_prime_value(pre: f64, post: f64) -> f64 {
    (1.0 + post).log2() - (1.0 + pre).log2()
}

pub fn q_double_value(pre: f64, post: f64, eta: f64) -> Result<f64, MetricError> {
    check_eta(eta)?;
    Ok(eta * q_prime_value(pre, post))
}

/// `[-eta log2(1 + pre), eta (1 - log2(1 + pre))]`.
pub fn q_double_bounds(pre: f64, eta: f64) -> Result<FlowRange, MetricError> {
    check_eta(eta)?;
    let l = (1.0 + pre).log2();
    Ok(FlowRange::new(-eta * l, eta * (1.0 - l)))
}

/// Refined distance from reality, `eta (1 - log2(1 + b))`, where `b` is the
/// belief's probability of the true high state.
pub fn distance_to_reality(at_reality: f64, eta: f64) -> f64 {
    eta * (1.0 - (1.0 + at_reality).log2())
}

// ---- belief forms -------------------------------------------------------

fn at_reality(b: &Belief, r: &Reality) -> Result<f64, MetricError> {
    Ok(to_f64(b.prob(&r.0)?))
}

fn pair_at(pre: &Belief, post: &Belief, r: &Reality) -> Result<(f64, f64), MetricError> {
    pre.same_domain(post)?;
    Ok((at_reality(pre, r)?, at_reality(post, r)?))
}

/// Reduction in Shannon uncertainty, `S(pre) - S(post)`.
pub fn metric_r(pre: &Belief, post: &Belief) -> Result<f64, MetricError> {
    pre.same_domain(post)?;
    Ok(shannon_entropy(pre) - shannon_entropy(post))
}

/// The range of `R` for a secret of `eta` bits.
pub fn range_r(eta: f64) -> FlowRange {
    FlowRange::new(-eta, eta)
}

pub fn metric_q(pre: &Belief, post: &Belief, r: &Reality) -> Result<ExtendedReal, MetricError> {
    let (b, b2) = pair_at(pre, post, r)?;
    q_value(b, b2)
}

pub fn metric_q_prime(pre: &Belief, post: &Belief, r: &Reality) -> Result<f64, MetricError> {
    let (b, b2) = pair_at(pre, post, r)?;
    Ok(q_prime_value(b, b2))
}

pub fn metric_q_double(pre: &Belief, post: &Belief, r: &Reality, eta: f64) -> Result<f64, MetricError> {
    let (b, b2) = pair_at(pre, post, r)?;
    q_double_value(b, b2, eta)
}

/// `(-inf, -log2 pre(reality)]`.
pub fn range_q(pre: &Belief, r: &Reality) -> Result<FlowRange, MetricError> {
    let b = at_reality(pre, r)?;
    let hi = if b == 0.0 { ExtendedReal::PosInf } else { ExtendedReal::Finite(-b.log2()) };
    Ok(FlowRange { lo: ExtendedReal::NegInf, hi })
}

pub fn range_q_prime() -> FlowRange {
    FlowRange::new(-1.0, 1.0)
}

pub fn range_q_double(pre: &Belief, r: &Reality, eta: f64) -> Result<FlowRange, MetricError> {
    q_double_bounds(at_reality(pre, r)?, eta)
}

/// True iff the range lies within `[-eta, eta]`.
pub fn size_consistent(range: &FlowRange, eta: f64) -> bool {
    range.hi <= ExtendedReal::Finite(eta) && range.lo >= ExtendedReal::Finite(-eta)
}

/// KL distance from reality, `D(b -> point mass)`, i.e. `-log2 b(reality)`.
pub fn kl_distance_to_reality(b: &Belief, r: &Reality) -> Result<ExtendedReal, MetricError> {
    let reality = Belief::point_mass(r, b.over().to_vec())?;
    Ok(kl_of(&b.probs_f64(), &reality.probs_f64()))
}

/// `K(b -> point mass)`; the D'-form distance whose difference is `Q'`.
pub fn js_distance_to_reality(b: &Belief, r: &Reality) -> Result<f64, MetricError> {
    let reality = Belief::point_mass(r, b.over().to_vec())?;
    Ok(js_asym_of(&b.probs_f64(), &reality.probs_f64()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Multiplier {
    /// Postbelief in the true high state implied by the flow.
    pub post_at_reality: f64,
    /// `post / pre`; `+inf` when the prebelief was zero and the post is not.
    pub fold_increase: ExtendedReal,
}

/// Inverts `Q''`: a flow of `k` bits moves the belief in the true high state
/// from `pre` to `2^(k/eta) (1 + pre) - 1`.
pub fn multiplier(k: f64, eta: f64, pre_at_reality: f64) -> Result<Multiplier, MetricError> {
    check_eta(eta)?;
    const SLACK: f64 = 1e-12;
    // k = 0 is exactly the identity; the general formula rounds through 1 + pre.
    let post = if k == 0.0 { pre_at_reality } else { (k / eta).exp2() * (1.0 + pre_at_reality) - 1.0 };
    if !(-SLACK..=1.0 + SLACK).contains(&post) || !(0.0..=1.0).contains(&pre_at_reality) {
        return Err(MetricError::FlowOutOfRange {
            k: k.to_string(),
            eta: eta.to_string(),
            pre: pre_at_reality.to_string(),
        });
    }
    let post = post.clamp(0.0, 1.0);
    let fold = if pre_at_reality == 0.0 {
        if post == 0.0 {
            ExtendedReal::Finite(1.0)
        } else {
            ExtendedReal::PosInf
        }
    } else {
        ExtendedReal::Finite(post / pre_at_reality)
    };
    Ok(Multiplier { post_at_reality: post, fold_increase: fold })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchEffort {
    Defined { residual_bits: ExtendedReal, space: ExtendedReal },
    Undefined { diagnostic: &'static str },
}

/// Candidates left to try after `k` informing bits from an `eta`-bit secret.
pub fn search_effort(eta: f64, k: ExtendedReal) -> SearchEffort {
    if k > ExtendedReal::Finite(eta) {
        return SearchEffort::Undefined { diagnostic: SEARCH_UNDEFINED };
    }
    let residual = ExtendedReal::Finite(eta).to_f64() - k.to_f64();
    SearchEffort::Defined {
        residual_bits: ExtendedReal::from_f64(residual),
        space: ExtendedReal::from_f64(residual.exp2()),
    }
}

/// Whether `min pre >= epsilon / |states|`.
pub fn admissible(pre: &Belief, epsilon: &BigRational) -> Result<bool, MetricError> {
    if *epsilon <= BigRational::zero() {
        return Err(MetricError::NonPositiveEpsilon);
    }
    let bound = epsilon / BigRational::from_integer(pre.len().into());
    Ok(pre.probs().iter().all(|p| *p >= bound))
}

// ---- experiments --------------------------------------------------------

/// One interaction: a program, the attacker's prebelief, the true high state
/// and the low input the attacker supplies.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub program: Program,
    pub prebelief: Belief,
    pub reality: Reality,
    pub low_input: ProgramState,
}

impl Experiment {
    pub fn new(
        program: Program,
        prebelief: Belief,
        reality: Reality,
        low_input: ProgramState,
    ) -> Result<Self, MetricError> {
        let space = high_space(&program);
        if prebelief.over() != space.as_slice() {
            return Err(BeliefError::DomainMismatch.into());
        }
        if !space.contains(&reality.0) {
            return Err(MetricError::RealityOutsideDomain(reality.0.to_string()));
        }
        initial_state(&program, &reality.0, &low_input)?;
        Ok(Experiment { program, prebelief, reality, low_input })
    }

    pub fn eta(&self) -> Result<f64, MetricError> {
        Ok(dsl::eta(&self.program)?)
    }

    /// Distribution of what the attacker sees when the program runs on the
    /// true high state, in declaration order of the output domains.
    pub fn observations(&self) -> Result<Vec<(ProgramState, BigRational)>, MetricError> {
        let init = initial_state(&self.program, &self.reality.0, &self.low_input)?;
        let dist = semantics::run(&self.program, &init).map_err(BeliefError::from)?;
        let outputs = semantics::output_vars(&self.program);
        let seen = semantics::observe(&dist, outputs.iter().copied()).map_err(BeliefError::from)?;
        let mut list: Vec<(Vec<usize>, ProgramState, BigRational)> =
            seen.iter().map(|(s, p)| (domain_rank(&self.program, s), s.clone(), p.clone())).collect();
        list.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(list.into_iter().map(|(_, s, p)| (s, p)).collect())
    }

    /// Most probable observation under the true high state; ties go to the
    /// earliest in domain order.
    pub fn default_observation(&self) -> Result<ProgramState, MetricError> {
        let mut best: Option<(ProgramState, BigRational)> = None;
        for (s, p) in self.observations()? {
            if best.as_ref().is_none_or(|(_, bp)| p > *bp) {
                best = Some((s, p));
            }
        }
        Ok(best.map(|(s, _)| s).unwrap_or_default())
    }
}

fn domain_rank(program: &Program, state: &ProgramState) -> Vec<usize> {
    program
        .vars_of(Class::Output)
        .map(|d| state.get(&d.name).and_then(|v| d.domain.iter().position(|x| x == v)).unwrap_or(usize::MAX))
        .collect()
}

/// Runs the experiment and revises the prebelief. Without an explicit
/// observation the most probable one under the true high state is used.
pub fn run_experiment(
    e: &Experiment,
    observation: Option<&ProgramState>,
) -> Result<(Belief, ProgramState), MetricError> {
    let obs = match observation {
        Some(o) => o.clone(),
        None => e.default_observation()?,
    };
    let post = revise_belief(&e.prebelief, &e.program, &e.low_input, &obs)?;
    Ok((post, obs))
}

/// Every metric for one experiment outcome.
#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub eta: f64,
    pub observation: ProgramState,
    pub prebelief: Belief,
    pub postbelief: Belief,
    pub pre_at_reality: f64,
    pub post_at_reality: f64,
    pub uncertainty_pre: f64,
    pub uncertainty_post: f64,
    pub r: f64,
    pub range_r: FlowRange,
    /// `None` when both beliefs give the true high state probability zero.
    pub q: Option<ExtendedReal>,
    pub range_q: FlowRange,
    pub q_prime: f64,
    pub range_q_prime: FlowRange,
    pub q_double_prime: f64,
    pub range_q_double: FlowRange,
    pub pre_kl_distance: ExtendedReal,
    pub post_kl_distance: ExtendedReal,
    pub pre_distance: f64,
    pub post_distance: f64,
    pub multiplier: ExtendedReal,
    pub search_q_double: SearchEffort,
    pub search_q: Option<SearchEffort>,
    pub size_consistent_r: bool,
    pub size_consistent_q: bool,
    pub size_consistent_q_double: bool,
}

pub fn analyze(e: &Experiment, observation: Option<&ProgramState>) -> Result<FlowReport, MetricError> {
    let eta = e.eta()?;
    check_eta(eta)?;
    let (post, obs) = run_experiment(e, observation)?;
    let pre = &e.prebelief;
    let r = &e.reality;
    let (b, b2) = pair_at(pre, &post, r)?;

    let q = match q_value(b, b2) {
        Ok(q) => Some(q),
        Err(MetricError::UndefinedQ) => None,
        Err(other) => return Err(other),
    };
    let q_double_prime = q_double_value(b, b2, eta)?;
    let range_q = range_q(pre, r)?;
    let range_q_double = q_double_bounds(b, eta)?;
    let multiplier = multiplier(q_double_prime, eta, b)?.fold_increase;

    Ok(FlowReport {
        eta,
        observation: obs,
        pre_at_reality: b,
        post_at_reality: b2,
        uncertainty_pre: shannon_entropy(pre),
        uncertainty_post: shannon_entropy(&post),
        r: metric_r(pre, &post)?,
        range_r: range_r(eta),
        q,
        range_q,
        q_prime: q_prime_value(b, b2),
        range_q_prime: range_q_prime(),
        q_double_prime,
        range_q_double,
        pre_kl_distance: kl_distance_to_reality(pre, r)?,
        post_kl_distance: kl_distance_to_reality(&post, r)?,
        pre_distance: distance_to_reality(b, eta),
        post_distance: distance_to_reality(b2, eta),
        multiplier,
        search_q_double: search_effort(eta, ExtendedReal::Finite(q_double_prime)),
        search_q: q.map(|q| search_effort(eta, q)),
        size_consistent_r: size_consistent(&range_r(eta), eta),
        size_consistent_q: size_consistent(&range_q, eta),
        size_consistent_q_double: size_consistent(&range_q_double, eta),
        prebelief: pre.clone(),
        postbelief: post,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::HighState;
    use crate::dsl::parse_program;
    use crate::rational::ratio;

    const PWC: &str = "high p in {A,B,C}; low g in {A,B,C}; output a in {0,1};
        if p == g then a := 1 else a := 0 end";
    const PPWC: &str = "high p in {A,B,C}; low g in {A,B,C}; output a in {0,1};
        if p == g then pchoice 0.99 { a := 1 } { a := 0 }
        else pchoice 0.99 { a := 0 } { a := 1 } end";
    const ETA3: f64 = 1.584962500721156;

    fn abc() -> Vec<HighState> {
        ["A", "B", "C"].into_iter().map(HighState::single).collect()
    }

    fn confident_pre() -> Belief {
        Belief::new(abc(), vec![ratio(98, 100), ratio(1, 100), ratio(1, 100)]).unwrap()
    }

    fn after_miss() -> Belief {
        Belief::new(abc(), vec![ratio(0, 1), ratio(1, 2), ratio(1, 2)]).unwrap()
    }

    fn c() -> Reality {
        Reality(HighState::single("C"))
    }

    fn pwc_experiment(src: &str, pre: Belief) -> Experiment {
        Experiment::new(parse_program(src).unwrap(), pre, c(), ProgramState::new().with("g", "A")).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn run_experiment_examples() {
        let (post, obs) = run_experiment(&pwc_experiment(PWC, confident_pre()), None).unwrap();
        assert_eq!(post, after_miss());
        assert_eq!(obs, ProgramState::new().with("a", "0"));

        let skip = pwc_experiment("high p in {A,B,C}; low g in {A,B,C}; output a in {0,1}; skip", confident_pre());
        assert_eq!(run_experiment(&skip, None).unwrap().0, confident_pre());

        let e = pwc_experiment(PPWC, Belief::uniform(abc()).unwrap());
        let obs = ProgramState::new().with("a", "0");
        let (post, _) = run_experiment(&e, Some(&obs)).unwrap();
        assert_eq!(post.probs(), &[ratio(1, 199), ratio(99, 199), ratio(99, 199)]);
    }

    #[test]
    fn r_values() {
        assert!(close(metric_r(&confident_pre(), &after_miss()).unwrap(), -0.8386, 5e-4));
        assert_eq!(metric_r(&confident_pre(), &confident_pre()).unwrap(), 0.0);
        let pm = Belief::point_mass(&c(), abc()).unwrap();
        assert!(close(metric_r(&Belief::uniform(abc()).unwrap(), &pm).unwrap(), 1.5849, 5e-4));
    }

    #[test]
    fn q_values() {
        let q = metric_q(&confident_pre(), &after_miss(), &c()).unwrap();
        assert!(close(q.finite().unwrap(), 5.6438, 5e-4));
        assert_eq!(metric_q(&confident_pre(), &confident_pre(), &c()).unwrap(), ExtendedReal::ZERO);
        assert_eq!(q_value(0.5, 0.0).unwrap(), ExtendedReal::NegInf);
        assert_eq!(q_value(0.0, 1.0).unwrap(), ExtendedReal::PosInf);
        assert_eq!(q_value(0.0, 0.0), Err(MetricError::UndefinedQ));
    }

    #[test]
    fn q_prime_values() {
        assert!(close(metric_q_prime(&confident_pre(), &after_miss(), &c()).unwrap(), 0.5706, 5e-4));
        assert_eq!(metric_q_prime(&after_miss(), &after_miss(), &c()).unwrap(), 0.0);
        assert_eq!(q_prime_value(0.0, 1.0), 1.0);
    }

    #[test]
    fn q_double_values() {
        assert!(close(metric_q_double(&confident_pre(), &after_miss(), &c(), ETA3).unwrap(), 0.9044, 5e-4));
        assert_eq!(metric_q_double(&confident_pre(), &confident_pre(), &c(), ETA3).unwrap(), 0.0);
        assert!(close(q_double_value(0.0, 1.0, 1.5849).unwrap(), 1.5849, 1e-12));
        assert!(matches!(q_double_value(0.1, 0.2, 0.0), Err(MetricError::NonPositiveEta(_))));
    }

    #[test]
    fn range_q_values() {
        let r = range_q(&confident_pre(), &c()).unwrap();
        assert_eq!(r.lo, ExtendedReal::NegInf);
        assert!(close(r.hi.finite().unwrap(), 6.6438, 5e-4));
        let pm = range_q(&Belief::point_mass(&c(), abc()).unwrap(), &c()).unwrap();
        assert_eq!(pm.hi, ExtendedReal::ZERO);
        let u = range_q(&Belief::uniform(abc()).unwrap(), &c()).unwrap();
        assert!(close(u.hi.finite().unwrap(), 1.5849, 5e-4));
        assert_eq!(range_q(&after_miss(), &Reality(HighState::single("A"))).unwrap().hi, ExtendedReal::PosInf);
    }

    #[test]
    fn range_q_double_values() {
        let r = range_q_double(&confident_pre(), &c(), 1.5849).unwrap();
        assert!(close(r.hi.finite().unwrap(), 1.5621, 5e-4));
        assert_eq!(q_double_bounds(0.0, 1.5849).unwrap(), FlowRange::new(0.0, 1.5849));
        assert_eq!(q_double_bounds(1.0, 1.5849).unwrap(), FlowRange::new(-1.5849, 0.0));
    }

    #[test]
    fn size_consistency_values() {
        let eta = 1.5849;
        for pre in [0.0, 0.01, 0.5, 1.0] {
            assert!(size_consistent(&q_double_bounds(pre, eta).unwrap(), eta));
        }
        assert!(!size_consistent(&range_q(&confident_pre(), &c()).unwrap(), eta));
        assert!(size_consistent(&range_r(eta), eta));
    }

    #[test]
    fn multiplier_values() {
        let m = multiplier(0.9044, 1.5849, 0.01).unwrap();
        assert!(close(m.post_at_reality, 0.5, 1e-3));
        let m = multiplier(0.0, 1.5849, 0.3).unwrap();
        assert_eq!(m.post_at_reality, 0.3);
        assert_eq!(m.fold_increase, ExtendedReal::Finite(1.0));
        let m = multiplier(1.5849, 1.5849, 0.0).unwrap();
        assert_eq!(m.post_at_reality, 1.0);
        assert_eq!(m.fold_increase, ExtendedReal::PosInf);
        assert!(matches!(multiplier(1.0, 1.5849, 0.9), Err(MetricError::FlowOutOfRange { .. })));
        assert!(matches!(multiplier(-2.0, 1.5849, 0.1), Err(MetricError::FlowOutOfRange { .. })));
    }

    #[test]
    fn search_effort_values() {
        let SearchEffort::Defined { residual_bits, space } = search_effort(ETA3, ExtendedReal::Finite(0.9044)) else {
            panic!()
        };
        assert!(close(residual_bits.to_f64(), 0.6805, 5e-4));
        assert!(close(space.to_f64(), residual_bits.to_f64().exp2(), 1e-12));
        assert!(close(space.to_f64(), 1.6026, 1e-3));
        let SearchEffort::Defined { space, .. } = search_effort(ETA3, ExtendedReal::ZERO) else { panic!() };
        assert!(close(space.to_f64(), 3.0, 1e-12));
        assert_eq!(
            search_effort(ETA3, ExtendedReal::Finite(5.6438)),
            SearchEffort::Undefined { diagnostic: SEARCH_UNDEFINED }
        );
    }

    #[test]
    fn admissibility() {
        assert!(admissible(&confident_pre(), &ratio(3, 100)).unwrap());
        assert!(!admissible(&confident_pre(), &ratio(31, 1000)).unwrap());
        for eps in [ratio(1, 1000000), ratio(1, 2), ratio(1, 1)] {
            assert!(!admissible(&after_miss(), &eps).unwrap());
        }
        assert!(admissible(&Belief::uniform(abc()).unwrap(), &ratio(1, 1)).unwrap());
        assert_eq!(admissible(&confident_pre(), &ratio(0, 1)), Err(MetricError::NonPositiveEpsilon));
    }

    #[test]
    fn analyze_pwc() {
        let rep = analyze(&pwc_experiment(PWC, confident_pre()), None).unwrap();
        assert!(close(rep.r, -0.8386, 5e-4));
        assert!(close(rep.q.unwrap().to_f64(), 5.6438, 5e-4));
        assert!(close(rep.q_double_prime, 0.9044, 5e-4));
        assert!(close(rep.pre_distance, 1.5621, 5e-4));
        assert!(close(rep.post_distance, 0.6577, 5e-4));
        assert!(close(rep.q_double_prime, rep.eta * rep.q_prime, 1e-12));
        assert!(close(rep.multiplier.to_f64(), 50.0, 1e-9));
        assert!(!rep.size_consistent_q);
        assert!(rep.size_consistent_q_double);
        assert!(matches!(rep.search_q, Some(SearchEffort::Undefined { .. })));
    }

    #[test]
    fn analyze_skip() {
        let e = pwc_experiment("high p in {A,B,C}; low g in {A,B,C}; output a in {0,1}; skip", confident_pre());
        let rep = analyze(&e, None).unwrap();
        assert_eq!((rep.r, rep.q, rep.q_prime, rep.q_double_prime), (0.0, Some(ExtendedReal::ZERO), 0.0, 0.0));
    }

    #[test]
    fn analyze_ppwc() {
        let e = pwc_experiment(PPWC, Belief::uniform(abc()).unwrap());
        let rep = analyze(&e, Some(&ProgramState::new().with("a", "0"))).unwrap();
        let expected = (99.0f64 / 199.0).log2() - (1.0f64 / 3.0).log2();
        assert!(close(rep.q.unwrap().to_f64(), expected, 1e-12));
    }

    #[test]
    fn experiment_validation() {
        let prog = parse_program(PWC).unwrap();
        let low = ProgramState::new().with("g", "A");
        let bad = Experiment::new(prog.clone(), confident_pre(), Reality(HighState::single("Z")), low.clone());
        assert!(matches!(bad, Err(MetricError::RealityOutsideDomain(_))));
        let bad = Experiment::new(prog, confident_pre(), c(), ProgramState::new());
        assert!(matches!(bad, Err(MetricError::Belief(BeliefError::MissingLow(_)))));
    }

    #[test]
    fn observations_in_domain_order() {
        let e = pwc_experiment(PPWC, confident_pre());
        let obs = e.observations().unwrap();
        assert_eq!(obs[0], (ProgramState::new().with("a", "0"), ratio(99, 100)));
        assert_eq!(obs[1], (ProgramState::new().with("a", "1"), ratio(1, 100)));
        let tie = pwc_experiment(
            "high p in {A,B,C}; low g in {A,B,C}; output a in {1,0}; pchoice 1/2 { a := 0 } { a := 1 }",
            confident_pre(),
        );
        assert_eq!(tie.default_observation().unwrap(), ProgramState::new().with("a", "1"));
    }
}
