//! Concentration comparisons between vote profiles.
//!
//! One profile majorizes another (with the same total vote mass) when
//! every top-`k` partial sum of its sorted shares is at least as large —
//! it concentrates the same mass into fewer districts. For a fixed seat
//! total the family objective always moves weakly in the concentrated
//! profile's favour, and [`mm_holds_fixed_s`] returns the exact slack.
//! Once each profile is scored at its *own* selected seat total the
//! comparison can reverse near a seat switch; [`mm_violation_search`]
//! hunts for certified reversals between a rule weight and an evaluation
//! weight.

use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{phi, top_s_allocation, PhiValue, Profile, Rational, Share, Weight};
use crate::optimizer::selected_seats;
use crate::ratio::ratio;
use crate::rules::{gerrymandering_proofness_counterexample, GerrymanderOutcome};

/// Proof that one profile majorizes another: the gap of every top-`k`
/// partial sum, all nonnegative, with the full-sum gap zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorizationCertificate {
    /// `prefix_gaps[k-1]` = (top-`k` sum of the dominating profile) −
    /// (top-`k` sum of the dominated one), for `k = 1..=N`.
    pub prefix_gaps: Vec<Rational>,
}

/// Outcome of a majorization test, with evidence either way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MajorizationResult {
    Majorizes(MajorizationCertificate),
    /// The profiles carry different total vote mass, so neither can
    /// majorize the other.
    UnequalTotals {
        p_total: Rational,
        q_total: Rational,
    },
    /// The first prefix whose partial sum falls short, and by how much.
    PrefixViolation {
        prefix_len: usize,
        shortfall: Rational,
    },
}

/// Tests whether `p` majorizes `q` (same district count required).
pub fn majorizes(p: &Profile, q: &Profile) -> Result<MajorizationResult> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "cannot compare concentration across district counts {} and {}",
            p.len(),
            q.len()
        )));
    }
    if p.aggregate() != q.aggregate() {
        return Ok(MajorizationResult::UnequalTotals {
            p_total: p.aggregate().clone(),
            q_total: q.aggregate().clone(),
        });
    }
    let mut gaps = Vec::with_capacity(p.len());
    for k in 1..=p.len() {
        let gap = p.top_sum(k) - q.top_sum(k);
        if gap.is_negative() {
            return Ok(MajorizationResult::PrefixViolation {
                prefix_len: k,
                shortfall: -gap,
            });
        }
        gaps.push(gap);
    }
    debug_assert!(gaps.last().unwrap().is_zero());
    Ok(MajorizationResult::Majorizes(MajorizationCertificate {
        prefix_gaps: gaps,
    }))
}

/// Applies up to `count` random mass transfers from weaker to stronger
/// districts, each capped so shares stay in `[0, 1]`. Every transfer makes
/// the vector more concentrated, so the result majorizes the input.
fn apply_spreading_transfers<R: Rng>(shares: &mut [Rational], rng: &mut R, count: usize) {
    let n = shares.len();
    if n < 2 {
        return;
    }
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j || shares[i] == shares[j] {
            continue;
        }
        let (lo, hi) = if shares[i] < shares[j] {
            (i, j)
        } else {
            (j, i)
        };
        let headroom = (Rational::one() - &shares[hi]).min(shares[lo].clone());
        if !headroom.is_positive() {
            continue;
        }
        let t = headroom * ratio(rng.gen_range(1..=64), 64);
        shares[lo] -= &t;
        shares[hi] += t;
    }
}

/// Produces a profile that majorizes `q` by a chain of seeded random
/// weak-to-strong transfers (the inverses of equalizing transfers). The
/// result is certified before it is returned.
pub fn t_transform_chain(q: &Profile, steps: usize, rng_seed: u64) -> Result<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut shares: Vec<Rational> = (0..q.len()).map(|d| q.share(d).value().clone()).collect();
    apply_spreading_transfers(&mut shares, &mut rng, steps);
    let p = Profile::new(
        shares
            .into_iter()
            .map(Share::new)
            .collect::<Result<Vec<_>>>()?,
    )?;
    match majorizes(&p, q)? {
        MajorizationResult::Majorizes(_) => Ok(p),
        other => Err(Error::Property(format!(
            "transfer chain failed majorization certification: {other:?}"
        ))),
    }
}

/// Exact slack of the fixed-seat comparative static: with `p` majorizing
/// `q`, evaluating both at the same seat total `s` and finite weight `w`
/// gives `Φ_q − Φ_p = 2·(top_s(p) − top_s(q)) ≥ 0`.
pub fn mm_holds_fixed_s(p: &Profile, q: &Profile, s: usize, w: &Weight) -> Result<Rational> {
    if !w.is_finite() {
        return Err(Error::Domain(
            "the fixed-seat slack is defined for finite weights only".into(),
        ));
    }
    if s > p.len() {
        return Err(Error::Domain(format!(
            "seat total {s} exceeds the {} districts",
            p.len()
        )));
    }
    match majorizes(p, q)? {
        MajorizationResult::Majorizes(_) => {}
        other => {
            return Err(Error::Domain(format!(
                "the slack bound requires the first profile to majorize the second: {other:?}"
            )))
        }
    }
    let phi_p = phi(p, &top_s_allocation(p, s)?, w)?;
    let phi_q = phi(q, &top_s_allocation(q, s)?, w)?;
    let slack = match (phi_q, phi_p) {
        (PhiValue::Finite(q_val), PhiValue::Finite(p_val)) => q_val - p_val,
        _ => unreachable!("finite weight gives finite objective values"),
    };
    debug_assert_eq!(slack, ratio(2, 1) * (p.top_sum(s) - q.top_sum(s)));
    debug_assert!(!slack.is_negative());
    Ok(slack)
}

/// A certified reversal: a more concentrated profile that the rule at the
/// search weight serves *worse*, as scored at the evaluation weight.
#[derive(Clone, Debug)]
pub struct MmViolation {
    pub more_concentrated: Profile,
    pub less_concentrated: Profile,
    pub certificate: MajorizationCertificate,
    /// Seat totals the rule selects for each profile.
    pub seats_more: usize,
    pub seats_less: usize,
    /// Objective values at the evaluation weight; `phi_more > phi_less`.
    pub phi_more: PhiValue,
    pub phi_less: PhiValue,
    /// Rule evaluations consumed when the pair was found.
    pub rule_evaluations: usize,
}

/// Search outcome; `NotFound` reports the evaluations spent.
#[derive(Clone, Debug)]
pub enum MmSearchOutcome {
    Found(Box<MmViolation>),
    NotFound { rule_evaluations: usize },
}

struct EvalBudget {
    used: usize,
    limit: usize,
}

impl EvalBudget {
    /// Consumes one rule evaluation; false when the budget is exhausted.
    fn spend(&mut self) -> bool {
        if self.used >= self.limit {
            return false;
        }
        self.used += 1;
        true
    }
}

/// Point on the line from `m` toward `t` at parameter `u ∈ [0, 1]`.
fn segment_profile(m: &Profile, t: &Profile, u: &Rational) -> Profile {
    let one_minus = Rational::one() - u;
    let shares = (0..m.len())
        .map(|d| {
            Share::new(&one_minus * m.share(d).value() + u * t.share(d).value())
                .expect("convex combination of shares stays in range")
        })
        .collect();
    Profile::new(shares).expect("segment endpoints have equal length")
}

/// Scans one mean-preserving segment for a seat switch of the rule at
/// `lambda`, then tests the two sides of the switch at `w_eval`. Returns
/// `None` when the budget runs out or no bracket certifies.
fn scan_segment(
    m: &Profile,
    t: &Profile,
    lambda: &Weight,
    w_eval: &Weight,
    budget: &mut EvalBudget,
) -> Result<Option<MmViolation>> {
    const GRID: i64 = 64;
    // Bisection floor: brackets narrower than 2^-40 are certified as-is.
    let tolerance = Rational::new(1.into(), num::BigInt::from(1u64 << 40));

    let mut seats = Vec::with_capacity(GRID as usize + 1);
    for i in 0..=GRID {
        if !budget.spend() {
            return Ok(None);
        }
        seats.push(selected_seats(
            &segment_profile(m, t, &ratio(i, GRID)),
            lambda,
        )?);
    }
    for i in 0..GRID as usize {
        if seats[i] == seats[i + 1] {
            continue;
        }
        let mut lo = ratio(i as i64, GRID);
        let mut hi = ratio(i as i64 + 1, GRID);
        let s_lo = seats[i];
        let mut s_hi = seats[i + 1];
        while &hi - &lo > tolerance {
            if !budget.spend() {
                return Ok(None);
            }
            let mid = (&lo + &hi) / ratio(2, 1);
            let s_mid = selected_seats(&segment_profile(m, t, &mid), lambda)?;
            if s_mid == s_lo {
                lo = mid;
            } else {
                hi = mid;
                s_hi = s_mid;
            }
        }
        let p_less = segment_profile(m, t, &lo);
        let p_more = segment_profile(m, t, &hi);
        let certificate = match majorizes(&p_more, &p_less)? {
            MajorizationResult::Majorizes(c) => c,
            _ => continue,
        };
        let phi_more = phi(&p_more, &top_s_allocation(&p_more, s_hi)?, w_eval)?;
        let phi_less = phi(&p_less, &top_s_allocation(&p_less, s_lo)?, w_eval)?;
        if phi_more > phi_less {
            return Ok(Some(MmViolation {
                more_concentrated: p_more,
                less_concentrated: p_less,
                certificate,
                seats_more: s_hi,
                seats_less: s_lo,
                phi_more,
                phi_less,
                rule_evaluations: budget.used,
            }));
        }
    }
    Ok(None)
}

/// Searches for a profile pair on which extra concentration is penalized:
/// the rule runs at `lambda`, outcomes are scored at `w_eval`, and any
/// reported pair carries an exact majorization certificate plus the two
/// objective values. `attempts` bounds the number of rule evaluations.
///
/// When the two weights differ and `lambda` is finite, the search walks
/// mean-preserving segments from a flat profile toward concentrated
/// targets built from the redistricting counterexample family; a seat
/// switch along such a segment is where the scored objective can jump the
/// wrong way. The remaining budget (and the whole budget when `lambda` is
/// infinite or the weights agree, in which case no violation exists) goes
/// to seeded random majorization pairs.
pub fn mm_violation_search(
    lambda: &Weight,
    w_eval: &Weight,
    attempts: usize,
    rng_seed: u64,
) -> Result<MmSearchOutcome> {
    let mut budget = EvalBudget {
        used: 0,
        limit: attempts,
    };

    let mut segments: Vec<(Profile, Profile)> = Vec::new();
    if lambda != w_eval {
        if let Weight::Finite(lv) = lambda {
            // Concentration targets from the equal-mass redraw pair: the
            // consolidated profile sits two switches further than the flat
            // profile of the same mean.
            let cx = match gerrymandering_proofness_counterexample(lambda, 4)? {
                GerrymanderOutcome::Violated(cx) => cx,
                GerrymanderOutcome::Holds => unreachable!("finite weight always has a redraw"),
            };
            let flat = cx.before.mean_constant();
            let toward_consolidated = (flat.clone(), cx.after.clone());
            let toward_marginal = (flat, cx.before.clone());
            // A low-mean pair whose switch approaches the proportional
            // count from below; scoring at a smaller weight penalizes the
            // step toward proportionality.
            let eta = ratio(1, 8).min(Rational::one() / (ratio(16, 1) * (Rational::one() + lv)));
            let a = ratio(3, 2) + &eta;
            let quarter = &a / ratio(4, 1);
            let half_each = &a / ratio(2, 1);
            let low_flat = Profile::new(
                std::iter::repeat_with(|| Share::new(quarter.clone()))
                    .take(4)
                    .collect::<Result<Vec<_>>>()?,
            )?;
            let low_concentrated = Profile::new(vec![
                Share::new(half_each.clone())?,
                Share::new(half_each)?,
                Share::new(Rational::zero())?,
                Share::new(Rational::zero())?,
            ])?;
            let toward_low = (low_flat, low_concentrated);
            let rising = matches!(w_eval, Weight::Infinity) || w_eval > lambda;
            if rising {
                segments.extend([toward_consolidated, toward_marginal, toward_low]);
            } else {
                segments.extend([toward_low, toward_marginal, toward_consolidated]);
            }
        }
    }
    for (m, t) in &segments {
        if let Some(violation) = scan_segment(m, t, lambda, w_eval, &mut budget)? {
            return Ok(MmSearchOutcome::Found(Box::new(violation)));
        }
    }

    // Randomized fallback: seeded concentration pairs checked directly.
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    loop {
        if budget.used + 2 > budget.limit {
            return Ok(MmSearchOutcome::NotFound {
                rule_evaluations: budget.used,
            });
        }
        let n = rng.gen_range(4..=6);
        let mut shares: Vec<Rational> = (0..n)
            .map(|_| ratio(rng.gen_range(0..=1000), 1000))
            .collect();
        let q = Profile::new(
            shares
                .iter()
                .map(|v| Share::new(v.clone()))
                .collect::<Result<Vec<_>>>()?,
        )?;
        apply_spreading_transfers(&mut shares, &mut rng, 2 * n);
        let p = Profile::new(
            shares
                .into_iter()
                .map(Share::new)
                .collect::<Result<Vec<_>>>()?,
        )?;
        let certificate = match majorizes(&p, &q)? {
            MajorizationResult::Majorizes(c) => c,
            other => {
                return Err(Error::Property(format!(
                    "transfer chain failed majorization certification: {other:?}"
                )))
            }
        };
        budget.spend();
        let s_p = selected_seats(&p, lambda)?;
        budget.spend();
        let s_q = selected_seats(&q, lambda)?;
        let phi_p = phi(&p, &top_s_allocation(&p, s_p)?, w_eval)?;
        let phi_q = phi(&q, &top_s_allocation(&q, s_q)?, w_eval)?;
        if phi_p > phi_q {
            return Ok(MmSearchOutcome::Found(Box::new(MmViolation {
                more_concentrated: p,
                less_concentrated: q,
                certificate,
                seats_more: s_p,
                seats_less: s_q,
                phi_more: phi_p,
                phi_less: phi_q,
                rule_evaluations: budget.used,
            })));
        }
    }
}
