//! Per-state discrimination constructs and the divergences built from them.
//!
//! Throughout, `b` is the reference belief and `b2` the belief being
//! measured: `D(b -> b2) = sum b2 * log2(b2 / b)`. Zero conventions:
//! `0 * log(0 / q) = 0` and `p * log(p / 0) = +inf` for `p > 0`.

use crate::belief::{entropy_of, Belief, BeliefError, HighState};
use crate::extended::ExtendedReal;

fn values_at(b: &Belief, b2: &Belief, state: &HighState) -> Result<(f64, f64), BeliefError> {
    b.same_domain(b2)?;
    let i = b.index_of(state).ok_or_else(|| BeliefError::NotInDomain(state.clone()))?;
    Ok((b.probs_f64()[i], b2.probs_f64()[i]))
}

/// `log2(b2 / b)` on bare probabilities.
pub fn kl_discrimination(b: f64, b2: f64) -> ExtendedReal {
    match (b == 0.0, b2 == 0.0) {
        (true, true) => ExtendedReal::ZERO,
        (true, false) => ExtendedReal::PosInf,
        (false, true) => ExtendedReal::NegInf,
        (false, false) => ExtendedReal::Finite((b2 / b).log2()),
    }
}

/// `log2(b2 / ((b2 + b) / 2))` on bare probabilities. At most one bit;
/// `-inf` only when `b2 = 0 < b`.
pub fn js_discrimination(b: f64, b2: f64) -> ExtendedReal {
    if b2 == 0.0 {
        return if b == 0.0 { ExtendedReal::ZERO } else { ExtendedReal::NegInf };
    }
    ExtendedReal::Finite((2.0 * b2 / (b2 + b)).log2())
}

/// `log2((1 + b2) / (1 + b))` on bare probabilities; always in [-1, 1].
pub fn alt_discrimination(b: f64, b2: f64) -> f64 {
    ((1.0 + b2) / (1.0 + b)).log2()
}

pub fn disc_kl(b: &Belief, b2: &Belief, state: &HighState) -> Result<ExtendedReal, BeliefError> {
    let (p, q) = values_at(b, b2, state)?;
    Ok(kl_discrimination(p, q))
}

pub fn disc_js(b: &Belief, b2: &Belief, state: &HighState) -> Result<ExtendedReal, BeliefError> {
    let (p, q) = values_at(b, b2, state)?;
    Ok(js_discrimination(p, q))
}

pub fn disc_alt(b: &Belief, b2: &Belief, state: &HighState) -> Result<f64, BeliefError> {
    let (p, q) = values_at(b, b2, state)?;
    Ok(alt_discrimination(p, q))
}

fn pair(b: &Belief, b2: &Belief) -> Result<(Vec<f64>, Vec<f64>), BeliefError> {
    b.same_domain(b2)?;
    Ok((b.probs_f64(), b2.probs_f64()))
}

pub(crate) fn kl_of(b: &[f64], b2: &[f64]) -> ExtendedReal {
    let mut sum = 0.0;
    for (&p, &q) in b.iter().zip(b2) {
        if q == 0.0 {
            continue;
        }
        if p == 0.0 {
            return ExtendedReal::PosInf;
        }
        sum += q * (q / p).log2();
    }
    ExtendedReal::Finite(sum.max(0.0))
}

pub(crate) fn js_asym_of(b: &[f64], b2: &[f64]) -> f64 {
    let sum: f64 = b.iter().zip(b2).filter(|(_, &q)| q > 0.0).map(|(&p, &q)| q * (2.0 * q / (q + p)).log2()).sum();
    sum.clamp(0.0, 1.0)
}

/// Kullback-Leibler divergence `D(b -> b2)` in bits.
pub fn kl_divergence(b: &Belief, b2: &Belief) -> Result<ExtendedReal, BeliefError> {
    let (p, q) = pair(b, b2)?;
    Ok(kl_of(&p, &q))
}

/// Asymmetric Jensen-Shannon divergence `K(b -> b2)`: the expectation under
/// `b2` of the discrimination against the midpoint. Always in [0, 1].
pub fn js_asym_divergence(b: &Belief, b2: &Belief) -> Result<f64, BeliefError> {
    let (p, q) = pair(b, b2)?;
    Ok(js_asym_of(&p, &q))
}

/// Symmetrized Kullback-Leibler divergence `J`.
pub fn j_divergence(b: &Belief, b2: &Belief) -> Result<ExtendedReal, BeliefError> {
    let (p, q) = pair(b, b2)?;
    let mut sum = 0.0;
    for (&p, &q) in p.iter().zip(&q) {
        match (p == 0.0, q == 0.0) {
            (true, true) => {}
            (true, false) | (false, true) => return Ok(ExtendedReal::PosInf),
            (false, false) => sum += (q - p) * (q / p).log2(),
        }
    }
    Ok(ExtendedReal::Finite(sum.max(0.0)))
}

/// Symmetrized Jensen-Shannon divergence `L = 2 S(m) - S(b) - S(b2)` with
/// `m` the midpoint. Always in [0, 2].
pub fn l_divergence(b: &Belief, b2: &Belief) -> Result<f64, BeliefError> {
    let (p, q) = pair(b, b2)?;
    let mid: Vec<f64> = p.iter().zip(&q).map(|(x, y)| (x + y) / 2.0).collect();
    Ok((2.0 * entropy_of(&mid) - entropy_of(&p) - entropy_of(&q)).clamp(0.0, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Reality;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn states(n: usize) -> Vec<HighState> {
        (0..n).map(|i| HighState::single(format!("s{i}"))).collect()
    }

    fn belief(ps: &[(i64, i64)]) -> Belief {
        Belief::new(states(ps.len()), ps.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    fn confident_pre() -> Belief {
        belief(&[(98, 100), (1, 100), (1, 100)])
    }

    fn after_miss() -> Belief {
        belief(&[(0, 1), (1, 2), (1, 2)])
    }

    fn point(i: usize, n: usize) -> Belief {
        Belief::point_mass(&Reality(states(n)[i].clone()), states(n)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kl_discrimination_values() {
        assert!(close(kl_discrimination(0.01, 0.5).finite().unwrap(), 5.6438, 5e-4));
        assert_eq!(kl_discrimination(0.3, 0.3), ExtendedReal::ZERO);
        assert_eq!(kl_discrimination(0.0, 0.5), ExtendedReal::PosInf);
        assert_eq!(kl_discrimination(0.5, 0.0), ExtendedReal::NegInf);
        assert_eq!(kl_discrimination(0.0, 0.0), ExtendedReal::ZERO);
    }

    #[test]
    fn js_discrimination_values() {
        assert_eq!(js_discrimination(0.0, 1.0), ExtendedReal::Finite(1.0));
        assert_eq!(js_discrimination(0.4, 0.4), ExtendedReal::ZERO);
        assert!(close(js_discrimination(0.01, 0.5).finite().unwrap(), (0.5f64 / 0.255).log2(), 1e-15));
        assert!(close(js_discrimination(0.01, 0.5).finite().unwrap(), 0.9714, 5e-4));
        assert_eq!(js_discrimination(0.0, 0.0), ExtendedReal::ZERO);
    }

    #[test]
    fn alt_discrimination_values() {
        assert_eq!(alt_discrimination(0.0, 1.0), 1.0);
        assert_eq!(alt_discrimination(0.7, 0.7), 0.0);
        assert!(close(alt_discrimination(0.01, 0.5), 0.5706, 5e-4));
        assert_eq!(alt_discrimination(1.0, 0.0), -1.0);
    }

    #[test]
    fn belief_level_discriminations() {
        let c = HighState::single("s2");
        assert!(close(disc_kl(&confident_pre(), &after_miss(), &c).unwrap().finite().unwrap(), 5.6438, 5e-4));
        assert!(close(disc_js(&confident_pre(), &after_miss(), &c).unwrap().finite().unwrap(), 0.9714, 5e-4));
        assert!(close(disc_alt(&confident_pre(), &after_miss(), &c).unwrap(), 0.5706, 5e-4));
        assert_eq!(
            disc_kl(&confident_pre(), &after_miss(), &HighState::single("zz")).unwrap_err(),
            BeliefError::NotInDomain(HighState::single("zz"))
        );
    }

    #[test]
    fn kl_values() {
        let reality = point(2, 3);
        assert!(close(kl_divergence(&confident_pre(), &reality).unwrap().finite().unwrap(), 6.6438, 5e-4));
        assert!(close(kl_divergence(&after_miss(), &reality).unwrap().finite().unwrap(), 1.0, 1e-12));
        assert_eq!(kl_divergence(&confident_pre(), &confident_pre()).unwrap(), ExtendedReal::ZERO);
        assert_eq!(kl_divergence(&after_miss(), &confident_pre()).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn js_asym_values() {
        assert_eq!(js_asym_divergence(&confident_pre(), &confident_pre()).unwrap(), 0.0);
        assert_eq!(js_asym_divergence(&point(0, 2), &point(1, 2)).unwrap(), 1.0);
        let d = js_asym_divergence(&confident_pre(), &point(2, 3)).unwrap();
        assert!(close(d, (2.0f64 / 1.01).log2(), 1e-12));
        assert!(close(d, 1.0 - 1.01f64.log2(), 1e-12));
        assert!(close(d, 0.9856, 5e-4));
    }

    #[test]
    fn j_values() {
        let b = belief(&[(1, 2), (1, 2)]);
        let b2 = belief(&[(1, 4), (3, 4)]);
        // Hand sum: (0.25 - 0.5) log2(0.5) + (0.75 - 0.5) log2(1.5).
        let hand = (0.25f64 - 0.5) * 0.5f64.log2() + (0.75f64 - 0.5) * 1.5f64.log2();
        let via_kl = kl_divergence(&b, &b2).unwrap().to_f64() + kl_divergence(&b2, &b).unwrap().to_f64();
        let j = j_divergence(&b, &b2).unwrap().finite().unwrap();
        assert!(close(j, hand, 1e-12));
        assert!(close(j, via_kl, 1e-12));
        assert!(close(j, 0.3962, 5e-4));
        assert_eq!(j_divergence(&b, &b).unwrap(), ExtendedReal::ZERO);
        assert_eq!(j_divergence(&confident_pre(), &after_miss()).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn l_values() {
        assert_eq!(l_divergence(&confident_pre(), &confident_pre()).unwrap(), 0.0);
        assert!(close(l_divergence(&point(0, 3), &point(1, 3)).unwrap(), 2.0, 1e-12));
        let l = l_divergence(&confident_pre(), &after_miss()).unwrap();
        let k = js_asym_divergence(&confident_pre(), &after_miss()).unwrap()
            + js_asym_divergence(&after_miss(), &confident_pre()).unwrap();
        assert!(close(l, k, 1e-12));
    }

    #[test]
    fn domain_mismatch() {
        let other = belief(&[(1, 2), (1, 2)]);
        assert_eq!(kl_divergence(&confident_pre(), &other), Err(BeliefError::DomainMismatch));
        assert_eq!(l_divergence(&confident_pre(), &other), Err(BeliefError::DomainMismatch));
    }

    fn arb_pair() -> impl Strategy<Value = (Belief, Belief)> {
        (2usize..=6).prop_flat_map(|n| {
            (proptest::collection::vec(0u64..20, n), proptest::collection::vec(0u64..20, n))
                .prop_filter("nonzero", |(a, b)| a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0)
                .prop_map(move |(a, b)| {
                    (Belief::from_weights(states(n), &a).unwrap(), Belief::from_weights(states(n), &b).unwrap())
                })
        })
    }

    proptest! {
        #[test]
        fn js_cuts_discrimination_by_half((b, b2) in arb_pair()) {
            for s in b.over() {
                let q = b2.prob(s).unwrap();
                if num_traits::Zero::is_zero(q) { continue; }
                let js = disc_js(&b, &b2, s).unwrap();
                let kl = disc_kl(&b, &b2, s).unwrap();
                prop_assert!(js <= kl.half(), "{} > {}/2", js, kl);
            }
        }

        #[test]
        fn ranges_and_identities((b, b2) in arb_pair()) {
            let k = js_asym_divergence(&b, &b2).unwrap();
            prop_assert!((0.0..=1.0).contains(&k));
            let d = kl_divergence(&b, &b2).unwrap();
            prop_assert!(d >= ExtendedReal::ZERO);
            let supp_ok = b.probs().iter().zip(b2.probs()).all(|(p, q)| !(num_traits::Zero::is_zero(p) && !num_traits::Zero::is_zero(q)));
            prop_assert_eq!(d.is_finite(), supp_ok);
            prop_assert!(j_divergence(&b, &b2).unwrap() >= ExtendedReal::ZERO);
            let (j, jr) = (j_divergence(&b, &b2).unwrap(), j_divergence(&b2, &b).unwrap());
            prop_assert_eq!(j.is_finite(), jr.is_finite());
            prop_assert!(!j.is_finite() || (j.to_f64() - jr.to_f64()).abs() <= 1e-12);
            let l = l_divergence(&b, &b2).unwrap();
            let k2 = js_asym_divergence(&b2, &b).unwrap();
            prop_assert!((l - (k + k2)).abs() <= 1e-9);
            if b == b2 {
                prop_assert_eq!(k, 0.0);
            } else {
                prop_assert!(k > 0.0);
            }
        }

        #[test]
        fn invariant_under_common_permutation((b, b2) in arb_pair(), seed in any::<u64>()) {
            let n = b.len();
            let mut order: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (s >> 33) as usize % (i + 1));
            }
            let permute = |x: &Belief| {
                Belief::new(states(n), order.iter().map(|&i| x.probs()[i].clone()).collect()).unwrap()
            };
            let (pb, pb2) = (permute(&b), permute(&b2));
            let tol = 1e-12;
            prop_assert!((js_asym_divergence(&b, &b2).unwrap() - js_asym_divergence(&pb, &pb2).unwrap()).abs() <= tol);
            prop_assert!((l_divergence(&b, &b2).unwrap() - l_divergence(&pb, &pb2).unwrap()).abs() <= tol);
            let (d, pd) = (kl_divergence(&b, &b2).unwrap(), kl_divergence(&pb, &pb2).unwrap());
            prop_assert_eq!(d.is_finite(), pd.is_finite());
            if let (Some(x), Some(y)) = (d.finite(), pd.finite()) {
                prop_assert!((x - y).abs() <= tol);
            }
        }
    }
}
