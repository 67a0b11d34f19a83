//! Cost of redrawing a baseline profile until the rule awards a seat
//! target.
//!
//! A redraw moves vote mass between districts without changing the total.
//! Effort is measured as half the L1 distance between the profiles —
//! exactly the mass moved. For a target of `k` seats with `k − 1` at or
//! above the vote total, the rule at finite weight `w` awards at least
//! `k` seats precisely when the `k`-th strongest district reaches the
//! threshold `(1 + w)/2`, which turns the cheapest redraw into a
//! closed-form lift-and-drain plan. A grid oracle cross-checks the closed
//! form by brute force on small instances.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Profile, Rational, Share, Weight};
use crate::optimizer::selected_seats;
use crate::ratio::ratio;

/// Distance a redraw must cover between two profiles.
pub trait CostMetric {
    fn cost(&self, from: &Profile, to: &Profile) -> Result<Rational>;
    fn name(&self) -> &'static str;
}

/// Half the L1 distance between share vectors: the total mass moved.
pub struct HalfL1;

impl CostMetric for HalfL1 {
    fn cost(&self, from: &Profile, to: &Profile) -> Result<Rational> {
        if from.len() != to.len() {
            return Err(Error::Dimension(format!(
                "cannot compare profiles with {} and {} districts",
                from.len(),
                to.len()
            )));
        }
        let sum: Rational = (0..from.len())
            .map(|d| (from.share(d).value() - to.share(d).value()).abs())
            .sum();
        Ok(sum / ratio(2, 1))
    }

    fn name(&self) -> &'static str {
        "half-l1"
    }
}

/// A seat target under a specific rule weight.
#[derive(Clone, Debug)]
pub struct GerryTarget {
    pub baseline: Profile,
    pub weight: Weight,
    /// Seats Party A must win (at least this many).
    pub seats: usize,
}

/// Result of the cheapest-redraw computation.
#[derive(Clone, Debug)]
pub enum GerryOutcome {
    Feasible {
        /// Minimal mass moved (half-L1 distance from the baseline).
        cost: Rational,
        /// A cheapest redrawn profile, in the baseline's district order.
        witness: Profile,
    },
    Infeasible {
        reason: String,
    },
}

fn threshold(w: &Rational) -> Rational {
    (Rational::one() + w) / ratio(2, 1)
}

fn check_target(target: &GerryTarget) -> Result<()> {
    let n = target.baseline.len();
    if target.seats > n {
        return Err(Error::Domain(format!(
            "target of {} seats exceeds the {n} districts",
            target.seats
        )));
    }
    let current = selected_seats(&target.baseline, &target.weight)?;
    if target.seats <= current {
        return Err(Error::Domain(format!(
            "the rule already awards {current} seats; a redraw target must exceed that"
        )));
    }
    Ok(())
}

/// Computes the minimal redraw cost to reach `target.seats`, with a
/// witness profile attaining it, or explains why no redraw works.
///
/// Requires the target to exceed the currently awarded seats and to sit
/// above the vote total (`seats − 1 ≥` aggregate): in that range the
/// award condition reduces to the threshold test that the closed form
/// optimizes, and the cheapest plan lifts every deficient target district
/// exactly to the threshold, draining the weakest districts first.
pub fn gerry_cost(target: &GerryTarget) -> Result<GerryOutcome> {
    check_target(target)?;
    let p = &target.baseline;
    let n = p.len();
    let k = target.seats;
    if Rational::from_integer((k as i64 - 1).into()) < *p.aggregate() {
        return Err(Error::Domain(format!(
            "the closed form requires seats − 1 ≥ vote total ({})",
            p.aggregate()
        )));
    }
    let w = match &target.weight {
        Weight::Infinity => {
            return Ok(GerryOutcome::Infeasible {
                reason: "at the infinite weight the seat count follows the invariant vote \
                         total, which no redraw can change"
                    .into(),
            })
        }
        Weight::Finite(w) => w,
    };
    let t = threshold(w);
    if t > Rational::one() {
        return Ok(GerryOutcome::Infeasible {
            reason: format!("the winning threshold {t} exceeds a full district share"),
        });
    }

    // Lift: mass needed to raise the k strongest districts to the
    // threshold. Capacity: everything the remaining districts hold plus
    // the surplus above the threshold inside the target group.
    let mut lift = Rational::zero();
    let mut capacity = Rational::zero();
    for rank in 1..=n {
        let share = p.order_stat(rank).clone();
        if rank <= k {
            let gap = &t - &share;
            if gap.is_positive() {
                lift += gap;
            } else {
                capacity += -gap;
            }
        } else {
            capacity += share;
        }
    }
    if lift > capacity {
        return Ok(GerryOutcome::Infeasible {
            reason: format!(
                "reaching the threshold needs {lift} of mass but only {capacity} can move"
            ),
        });
    }

    // Build the witness in rank order: lift deficient targets to the
    // threshold, then drain the needed mass from the weakest districts
    // upward, finishing with the surplus inside the target group.
    let mut by_rank: Vec<Rational> = (1..=n).map(|r| p.order_stat(r).clone()).collect();
    let mut need = lift.clone();
    for v in by_rank.iter_mut().take(k) {
        if *v < t {
            *v = t.clone();
        }
    }
    for v in by_rank.iter_mut().skip(k).rev() {
        if !need.is_positive() {
            break;
        }
        let take = need.clone().min(v.clone());
        *v -= &take;
        need -= take;
    }
    for v in by_rank.iter_mut().take(k).rev() {
        if !need.is_positive() {
            break;
        }
        let take = need.clone().min(&*v - &t);
        *v -= &take;
        need -= take;
    }
    debug_assert!(need.is_zero());

    let mut shares = vec![Share::new(Rational::zero())?; n];
    for (rank_idx, district) in p.sorted_indices().iter().enumerate() {
        shares[*district] = Share::new(by_rank[rank_idx].clone())?;
    }
    let witness = Profile::new(shares)?;
    debug_assert_eq!(witness.aggregate(), p.aggregate());
    debug_assert!(selected_seats(&witness, &target.weight)? >= k);
    debug_assert_eq!(HalfL1.cost(p, &witness)?, lift);
    Ok(GerryOutcome::Feasible {
        cost: lift,
        witness,
    })
}

/// Districts beyond which the grid oracle is refused.
const ORACLE_DISTRICT_LIMIT: usize = 6;

/// Brute-force check of [`gerry_cost`]: minimizes the half-L1 cost over
/// every redraw on a `1/resolution` share grid, testing the seat award
/// directly. Returns the minimal cost, or `None` when no grid redraw
/// reaches the target. Refused above 6 districts; the baseline must sit
/// exactly on the grid.
pub fn gerry_cost_oracle(target: &GerryTarget, resolution: usize) -> Result<Option<Rational>> {
    let p = &target.baseline;
    let n = p.len();
    if n > ORACLE_DISTRICT_LIMIT {
        return Err(Error::Resource(format!(
            "the grid oracle enumerates partitions and is limited to \
             {ORACLE_DISTRICT_LIMIT} districts; got {n}"
        )));
    }
    if resolution == 0 {
        return Err(Error::Domain("the grid resolution must be positive".into()));
    }
    check_target(target)?;
    let (wn, wd) = match &target.weight {
        // The seat count is pinned by the vote total, which redraws keep.
        Weight::Infinity => return Ok(None),
        Weight::Finite(w) => {
            let to_i128 = |b: &num::BigInt| -> Result<i128> {
                b.try_into().map_err(|_| {
                    Error::Domain("the grid oracle cannot handle so large a weight".into())
                })
            };
            (to_i128(w.numer())?, to_i128(w.denom())?)
        }
    };

    let r = resolution as i128;
    let mut base = Vec::with_capacity(n);
    for rank in 1..=n {
        let scaled = p.order_stat(rank) * Rational::from_integer(r.into());
        if !scaled.is_integer() {
            return Err(Error::Domain(format!(
                "baseline share {} does not sit on the 1/{resolution} grid",
                p.order_stat(rank)
            )));
        }
        base.push(i128::try_from(scaled.to_integer()).expect("grid values are small"));
    }
    let total: i128 = base.iter().sum();

    // The rule awards at least k seats iff stepping from k−1 to k seats
    // does not increase the objective (the forward difference at k−1 is
    // nonpositive); everything is scaled to integers by r·wd. The k-th
    // strongest entry alone decides the test, so it can run as soon as
    // the candidate prefix reaches rank k.
    let k = target.seats;
    let award_g = (total - k as i128 * r).abs() - (total - (k as i128 - 1) * r).abs();
    let awards_k = move |kth_entry: i128| wd * (r - 2 * kth_entry) + wn * award_g <= 0;

    struct Search<F: Fn(i128) -> bool> {
        base: Vec<i128>,
        /// `suffix_base[i]` = sum of the baseline entries from rank i on.
        suffix_base: Vec<i128>,
        best: Option<i128>,
        award_rank: usize,
        awards_k: F,
    }

    // Depth-first over nonincreasing grid vectors summing to the total,
    // tracking twice the half-L1 cost against the sorted baseline.
    // Comparing sorted against sorted is lossless for the minimum: any
    // redraw can be reordered to match the baseline's ranking without
    // increasing the distance.
    fn dfs<F: Fn(i128) -> bool>(
        s: &mut Search<F>,
        v: &mut Vec<i128>,
        cap: i128,
        remaining: i128,
        twice_cost: i128,
    ) {
        let idx = v.len();
        let n = s.base.len();
        // The remaining entries contribute at least the imbalance between
        // the mass left to place and the baseline's remaining mass.
        let bound = twice_cost + (remaining - s.suffix_base[idx]).abs();
        if let Some(best) = s.best {
            if bound >= best {
                return;
            }
        }
        if idx == n {
            debug_assert_eq!(remaining, 0);
            s.best = Some(twice_cost);
            return;
        }
        let slots_after = (n - idx - 1) as i128;
        // Nonincreasing completion requires this entry to cover its even
        // share of what remains.
        let lo = ((remaining - slots_after * cap).max(0) + slots_after) / (slots_after + 1);
        let hi = cap.min(remaining);
        for value in (lo..=hi).rev() {
            if idx + 1 == s.award_rank && !(s.awards_k)(value) {
                // Later candidates at this rank are smaller still.
                break;
            }
            v.push(value);
            dfs(
                s,
                v,
                value,
                remaining - value,
                twice_cost + (value - s.base[idx]).abs(),
            );
            v.pop();
        }
    }

    let mut suffix_base = vec![0i128; n + 1];
    for i in (0..n).rev() {
        suffix_base[i] = suffix_base[i + 1] + base[i];
    }
    let mut search = Search {
        base,
        suffix_base,
        best: None,
        award_rank: k,
        awards_k,
    };
    dfs(&mut search, &mut Vec::with_capacity(n), r, total, 0);

    Ok(search
        .best
        .map(|twice| Rational::new(twice.into(), (2 * r).into())))
}

/// One point of the cost-versus-weight curve.
#[derive(Clone, Debug)]
pub struct CostCurvePoint {
    pub weight: Weight,
    pub cost: Rational,
}

/// Redraw costs across weights, truncated at the first infeasible weight.
#[derive(Clone, Debug)]
pub struct CostCurve {
    pub points: Vec<CostCurvePoint>,
    /// First weight at which the target became unreachable, if any.
    pub truncated_at: Option<Weight>,
    /// Whether the recorded costs are nondecreasing.
    pub monotone: bool,
}

/// Evaluates the redraw cost of the same seat target at each weight;
/// weights must be given in nondecreasing order.
pub fn cost_monotonicity_check(
    baseline: &Profile,
    seats: usize,
    weights: &[Weight],
) -> Result<CostCurve> {
    if weights.windows(2).any(|pair| pair[0] > pair[1]) {
        return Err(Error::Domain("weights must be nondecreasing".into()));
    }
    let mut points: Vec<CostCurvePoint> = Vec::new();
    let mut truncated_at = None;
    for w in weights {
        let target = GerryTarget {
            baseline: baseline.clone(),
            weight: w.clone(),
            seats,
        };
        match gerry_cost(&target)? {
            GerryOutcome::Feasible { cost, .. } => points.push(CostCurvePoint {
                weight: w.clone(),
                cost,
            }),
            GerryOutcome::Infeasible { .. } => {
                truncated_at = Some(w.clone());
                break;
            }
        }
    }
    let monotone = points.windows(2).all(|pair| pair[0].cost <= pair[1].cost);
    Ok(CostCurve {
        points,
        truncated_at,
        monotone,
    })
}
