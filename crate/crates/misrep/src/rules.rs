//! Rules from the weighted family, and counterexamples to two axioms.
//!
//! A [`Rule`] fixes a weight and maps profiles to allocations by minimizing
//! the combined objective, with ties resolved toward Party A (the largest
//! optimal seat total, filled by A's strongest districts). [`fptp`] and
//! [`proportional`] are the `w = 0` and `w = ∞` endpoints of the family.
//!
//! The constructors witness which axioms fail in the interior of the
//! family: [`strong_monotonicity_counterexample`] produces two profiles
//! where Party A's support weakly rises in every district yet a district A
//! held flips away, and [`gerrymandering_proofness_counterexample`]
//! produces an equal-vote-mass redraw that gains the trailing party a seat.
//! Both certify their construction against the rule itself before
//! returning, and report when the axiom provably holds instead (majority
//! rule is monotone; the pure proportional rule is immune to mean-preserving
//! redraws).

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{top_s_allocation, Allocation, Profile, Rational, Share, Weight};
use crate::optimizer::selected_seats;
use crate::ratio::ratio;

/// A member of the weighted rule family: minimize `Dist + w · Agg`,
/// breaking ties toward Party A.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    weight: Weight,
}

impl Rule {
    pub fn new(weight: Weight) -> Self {
        Rule { weight }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// The allocation the rule selects: Party A's strongest districts up to
    /// the largest optimal seat total.
    pub fn apply(&self, profile: &Profile) -> Result<Allocation> {
        top_s_allocation(profile, selected_seats(profile, &self.weight)?)
    }
}

/// The rule at weight `w`.
pub fn family_rule(weight: Weight) -> Rule {
    Rule::new(weight)
}

/// District-by-district majority rule (the `w = 0` member): Party A takes
/// exactly the districts where its share reaches one half.
pub fn fptp(profile: &Profile) -> Result<Allocation> {
    Rule::new(Weight::zero()).apply(profile)
}

/// Rounded proportionality (the `w = ∞` member): Party A takes its
/// strongest districts up to the proportional seat count.
pub fn proportional(profile: &Profile) -> Result<Allocation> {
    Rule::new(Weight::Infinity).apply(profile)
}

/// Witness that a rule is not strongly monotone: going from `before` to
/// `after`, Party A's share weakly rises in every district, yet district
/// `lost_district` — awarded to A under `before` — is no longer awarded
/// under `after`.
#[derive(Clone, Debug)]
pub struct MonotonicityCounterexample {
    pub before: Profile,
    pub after: Profile,
    pub lost_district: usize,
}

#[derive(Clone, Debug)]
pub enum MonotonicityOutcome {
    /// The axiom provably holds at this weight and size.
    Holds,
    Violated(MonotonicityCounterexample),
}

fn build_profile(values: Vec<Rational>) -> Result<Profile> {
    Profile::new(
        values
            .into_iter()
            .map(Share::new)
            .collect::<Result<Vec<_>>>()?,
    )
}

fn certify_monotonicity(w: &Weight, before: &Profile, after: &Profile, lost: usize) -> Result<()> {
    let rule = Rule::new(w.clone());
    let rising = before
        .shares()
        .iter()
        .zip(after.shares())
        .all(|(b, a)| b.value() <= a.value());
    let held = rule.apply(before)?.awarded(lost);
    let kept = rule.apply(after)?.awarded(lost);
    if rising && held && !kept {
        Ok(())
    } else {
        Err(Error::Property(format!(
            "monotonicity construction failed certification at w = {w}: \
             rising = {rising}, held = {held}, kept = {kept}"
        )))
    }
}

/// Builds the two-profile monotonicity witness from its free parameter:
/// the share perturbation `ε` for `n ≥ 3`, or the boundary offset `δ` for
/// `n = 2`. Errors when the parameter leaves the certified range.
pub fn strong_monotonicity_counterexample_with(
    w: &Weight,
    n: usize,
    param: &Rational,
) -> Result<MonotonicityCounterexample> {
    if n < 2 {
        return Err(Error::Domain(
            "a monotonicity violation needs at least two districts".into(),
        ));
    }
    if !param.is_positive() {
        return Err(Error::Domain(
            "the construction parameter must be positive".into(),
        ));
    }
    let half = ratio(1, 2);
    let zero = Rational::zero();
    let (before, after, lost) = if n == 2 {
        let delta = param;
        let before = build_profile(vec![zero.clone(), &half + delta])?;
        let after = build_profile(vec![&half + delta * ratio(2, 1), &half + delta])?;
        (before, after, 1)
    } else {
        let eps = param;
        let mut b = vec![&half + eps, &half - eps];
        let mut a = vec![&half + eps, &half + eps * ratio(2, 1)];
        b.resize(n, zero.clone());
        a.resize(n, zero);
        (build_profile(b)?, build_profile(a)?, 0)
    };
    certify_monotonicity(w, &before, &after, lost)?;
    Ok(MonotonicityCounterexample {
        before,
        after,
        lost_district: lost,
    })
}

/// Decides strong monotonicity for the rule at weight `w` on `n` districts:
/// returns a certified counterexample, or reports that the axiom holds
/// (majority rule at `w = 0`, and any rule on a single district, cannot
/// violate it).
pub fn strong_monotonicity_counterexample(w: &Weight, n: usize) -> Result<MonotonicityOutcome> {
    if n == 0 {
        return Err(Error::Domain(
            "a profile needs at least one district".into(),
        ));
    }
    let zero = Rational::zero();
    if n == 1 || w == &Weight::Finite(zero.clone()) {
        return Ok(MonotonicityOutcome::Holds);
    }
    let param = if n == 2 {
        // δ below both 1/8 (keeps shares interior) and w/(2 + 6w) (keeps
        // the seat from following the improved district).
        match w {
            Weight::Infinity => ratio(1, 16),
            Weight::Finite(v) => {
                let cap = v / (ratio(2, 1) + ratio(6, 1) * v);
                cap.min(ratio(1, 8)) / ratio(2, 1)
            }
        }
    } else {
        // ε below both w/8 and 1/12, halved for strictness.
        match w {
            Weight::Infinity => ratio(1, 24),
            Weight::Finite(v) => (v / ratio(8, 1)).min(ratio(1, 12)) / ratio(2, 1),
        }
    };
    strong_monotonicity_counterexample_with(w, n, &param).map(MonotonicityOutcome::Violated)
}

/// Witness that a rule rewards redistricting: `after` redistributes exactly
/// the vote mass of `before` (equal aggregates), yet the rule hands Party B
/// one more seat under `after`.
#[derive(Clone, Debug)]
pub struct GerrymanderCounterexample {
    pub before: Profile,
    pub after: Profile,
    pub seats_before: usize,
    pub seats_after: usize,
}

#[derive(Clone, Debug)]
pub enum GerrymanderOutcome {
    /// The axiom provably holds at this weight (pure proportionality pins
    /// the seat count to the invariant vote mass).
    Holds,
    Violated(GerrymanderCounterexample),
}

fn certify_gerrymander(w: &Weight, before: &Profile, after: &Profile) -> Result<(usize, usize)> {
    if before.aggregate() != after.aggregate() {
        return Err(Error::Property(
            "redistricting construction failed certification: aggregates differ".into(),
        ));
    }
    let rule = Rule::new(w.clone());
    let s_before = rule.apply(before)?.seat_total();
    let s_after = rule.apply(after)?.seat_total();
    if s_after < s_before {
        Ok((s_before, s_after))
    } else {
        Err(Error::Property(format!(
            "redistricting construction failed certification at w = {w}: \
             seats {s_before} -> {s_after}"
        )))
    }
}

/// Builds the equal-mass redraw witness from its free parameters `δ`
/// (margin of the district Party B flips) and `ε` (slack spread across the
/// remaining mass). Errors when the parameters leave the certified range.
pub fn gerrymandering_proofness_counterexample_with(
    w: &Weight,
    n: usize,
    delta: &Rational,
    eps: &Rational,
) -> Result<GerrymanderCounterexample> {
    if n < 3 {
        return Err(Error::Domain(
            "the redraw construction needs at least three districts".into(),
        ));
    }
    if !delta.is_positive() || !eps.is_positive() {
        return Err(Error::Domain(
            "the construction parameters must be positive".into(),
        ));
    }
    let one = Rational::one();
    let half = ratio(1, 2);
    // Before: n−2 near-unanimous A districts, one marginal A district, one
    // B shutout. After: the A districts consolidate to exactly 1, the
    // marginal district flips to B, and the slack pads a second B district.
    let spread = (delta - eps) / Rational::from_integer(BigInt::from(n as u32 - 2));
    if !spread.is_positive() {
        return Err(Error::Domain("delta must exceed eps".into()));
    }
    let mut b = vec![&one - &spread; n - 2];
    b.push(&half + delta);
    b.push(Rational::zero());
    let mut a = vec![one; n - 2];
    a.push(&half - delta);
    a.push(eps + delta);
    let before = build_profile(b)?;
    let after = build_profile(a)?;
    let (seats_before, seats_after) = certify_gerrymander(w, &before, &after)?;
    Ok(GerrymanderCounterexample {
        before,
        after,
        seats_before,
        seats_after,
    })
}

/// Decides gerrymandering-proofness for the rule at weight `w` on `n`
/// districts: returns a certified equal-mass redraw gaining Party B a seat,
/// or reports that the axiom holds (only at the symbolic infinite weight,
/// where the seat count depends on the invariant vote mass alone).
pub fn gerrymandering_proofness_counterexample(w: &Weight, n: usize) -> Result<GerrymanderOutcome> {
    if n < 3 {
        return Err(Error::Domain(
            "the redraw construction needs at least three districts".into(),
        ));
    }
    let v = match w {
        Weight::Infinity => return Ok(GerrymanderOutcome::Holds),
        Weight::Finite(v) => v,
    };
    let delta = ratio(1, 8);
    // ε = (1/2)·min(δ/(1+w), 1/2 − 2δ); with δ = 1/8 the first term always
    // binds.
    let eps = &delta / (Rational::one() + v) / ratio(2, 1);
    gerrymandering_proofness_counterexample_with(w, n, &delta, &eps)
        .map(GerrymanderOutcome::Violated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{agg_misrep, phi};

    fn profile(shares: &[&str]) -> Profile {
        Profile::from_strs(shares).unwrap()
    }

    fn w(s: &str) -> Weight {
        Weight::parse(s).unwrap()
    }

    /// Exhaustive check that an allocation attains the minimal objective.
    fn assert_phi_minimal(p: &Profile, alloc: &Allocation, wt: &Weight) {
        let chosen = phi(p, alloc, wt).unwrap();
        let n = p.len();
        for mask in 0u32..1 << n {
            let other = Allocation::new((0..n).map(|d| mask >> d & 1 == 1).collect());
            assert!(
                chosen <= phi(p, &other, wt).unwrap(),
                "allocation {alloc:?} beaten by {other:?} at {wt}"
            );
        }
    }

    #[test]
    fn fptp_awards_majorities_with_ties_to_a() {
        let p = profile(&["0.5", "0.4"]);
        assert_eq!(fptp(&p).unwrap().bits(), &[true, false]);
        let q = profile(&["0.49", "0.51", "0.5"]);
        assert_eq!(fptp(&q).unwrap().bits(), &[false, true, true]);
    }

    #[test]
    fn proportional_takes_strongest_districts() {
        let p = profile(&["0.1", "0.45", "0.4", "0.35"]);
        // a = 1.3: one seat, to the strongest district.
        assert_eq!(
            proportional(&p).unwrap().bits(),
            &[false, true, false, false]
        );
        let q = profile(&["0.5", "0.5"]);
        // a = 1.0 exactly: one seat, tie broken by district index.
        assert_eq!(proportional(&q).unwrap().bits(), &[true, false]);
    }

    #[test]
    fn family_rule_minimizes_phi() {
        let p = profile(&["0.61", "0.55", "0.52", "0.4", "0.3"]);
        for wv in ["0", "0.05", "0.2", "1", "4", "inf"] {
            let rule = family_rule(w(wv));
            assert_phi_minimal(&p, &rule.apply(&p).unwrap(), rule.weight());
        }
    }

    #[test]
    fn monotonicity_holds_at_zero_and_single_district() {
        assert!(matches!(
            strong_monotonicity_counterexample(&w("0"), 5).unwrap(),
            MonotonicityOutcome::Holds
        ));
        assert!(matches!(
            strong_monotonicity_counterexample(&w("3"), 1).unwrap(),
            MonotonicityOutcome::Holds
        ));
        assert!(strong_monotonicity_counterexample(&w("1"), 0).is_err());
    }

    #[test]
    fn monotonicity_violations_certify_across_weights() {
        for n in [2usize, 3, 4, 7] {
            for wv in ["0.1", "0.5", "1", "5", "inf"] {
                match strong_monotonicity_counterexample(&w(wv), n).unwrap() {
                    MonotonicityOutcome::Violated(cx) => {
                        assert_eq!(cx.before.len(), n);
                        // Certification already ran; re-check the headline
                        // facts by brute force for small n.
                        let rule = Rule::new(w(wv));
                        assert_phi_minimal(&cx.before, &rule.apply(&cx.before).unwrap(), &w(wv));
                        assert_phi_minimal(&cx.after, &rule.apply(&cx.after).unwrap(), &w(wv));
                        assert!(rule.apply(&cx.before).unwrap().awarded(cx.lost_district));
                        assert!(!rule.apply(&cx.after).unwrap().awarded(cx.lost_district));
                    }
                    MonotonicityOutcome::Holds => panic!("expected a violation at w = {wv}"),
                }
            }
        }
    }

    #[test]
    fn monotonicity_example_fixture() {
        let cx = strong_monotonicity_counterexample_with(&w("1"), 3, &ratio(1, 20)).unwrap();
        assert_eq!(cx.before, profile(&["0.55", "0.45", "0"]));
        assert_eq!(cx.after, profile(&["0.55", "0.60", "0"]));
        assert_eq!(cx.lost_district, 0);
        // Out-of-range parameters are rejected rather than mis-certified.
        assert!(strong_monotonicity_counterexample_with(&w("1"), 3, &ratio(1, 3)).is_err());
        assert!(strong_monotonicity_counterexample_with(&w("0"), 3, &ratio(1, 20)).is_err());
    }

    #[test]
    fn gerrymandering_holds_only_at_infinity() {
        assert!(matches!(
            gerrymandering_proofness_counterexample(&Weight::Infinity, 4).unwrap(),
            GerrymanderOutcome::Holds
        ));
        assert!(gerrymandering_proofness_counterexample(&w("1"), 2).is_err());
    }

    #[test]
    fn gerrymandering_violations_certify_across_weights() {
        for n in [3usize, 4, 6] {
            for wv in ["0", "0.1", "0.5", "1", "5"] {
                match gerrymandering_proofness_counterexample(&w(wv), n).unwrap() {
                    GerrymanderOutcome::Violated(cx) => {
                        assert_eq!(cx.seats_before, n - 1);
                        assert_eq!(cx.seats_after, n - 2);
                        assert_eq!(cx.before.aggregate(), cx.after.aggregate());
                        let rule = Rule::new(w(wv));
                        assert_phi_minimal(&cx.before, &rule.apply(&cx.before).unwrap(), &w(wv));
                        assert_phi_minimal(&cx.after, &rule.apply(&cx.after).unwrap(), &w(wv));
                    }
                    GerrymanderOutcome::Holds => panic!("expected a violation at w = {wv}"),
                }
            }
        }
    }

    #[test]
    fn gerrymandering_example_fixture() {
        let cx =
            gerrymandering_proofness_counterexample_with(&w("1"), 4, &ratio(1, 5), &ratio(1, 20))
                .unwrap();
        assert_eq!(cx.before, profile(&["0.925", "0.925", "0.7", "0"]));
        assert_eq!(cx.after, profile(&["1", "1", "0.3", "0.25"]));
        assert_eq!(cx.seats_before, 3);
        assert_eq!(cx.seats_after, 2);
        // Shared vote mass a = 2.55 on both sides of the redraw.
        assert_eq!(agg_misrep(&cx.after, 2).unwrap(), ratio(11, 20));
        assert_eq!(cx.before.aggregate(), &ratio(51, 20));
    }
}
