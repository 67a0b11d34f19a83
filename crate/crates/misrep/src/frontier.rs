//! The feasible set of `(Dist, Agg)` value pairs and its Pareto frontier.
//!
//! Compact mode evaluates only the `N + 1` allocations that award Party A
//! its strongest districts — one per seat total — which is lossless for
//! frontier purposes: at any seat total, every other allocation has the
//! same `Agg` and weakly larger `Dist`, so no Pareto point is missed. A
//! top-`S` point is on the frontier exactly when some strictly positive
//! finite weight makes `S` optimal, read off its [`weight_interval`].
//!
//! Full mode enumerates all `2^N` allocations to expose the interior of
//! the feasible set, deduplicates coincident value pairs, and marks the
//! frontier by a direct dominance sweep. The two modes must agree on the
//! frontier; tests rely on that cross-check.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::model::{agg_misrep, dist_at, top_s_allocation, Allocation, Profile, Rational, Weight};
use crate::optimizer::{weight_interval, WeightInterval};

/// Districts beyond which the `2^N` full enumeration is refused.
const FULL_ENUMERATION_LIMIT: usize = 20;

/// One achievable `(Dist, Agg)` value pair with a witness allocation.
#[derive(Clone, Debug)]
pub struct FrontierPoint {
    pub dist: Rational,
    pub agg: Rational,
    /// Seat total of the witness (the smallest seat total achieving the
    /// pair, in full mode).
    pub seat_total: usize,
    pub allocation: Allocation,
    pub is_pareto: bool,
    /// The weights at which the witness seat total is optimal; only
    /// reported in compact mode, where the witness is a top-`S` allocation.
    pub supporting: Option<WeightInterval>,
}

/// Enumerates achievable value pairs.
///
/// Compact mode (`full = false`) returns the `N + 1` top-`S` points in
/// seat-total order. Full mode returns every achievable pair once,
/// ordered by `(Dist, Agg)`, and is refused above 20 districts.
pub fn enumerate_points(profile: &Profile, full: bool) -> Result<Vec<FrontierPoint>> {
    if full {
        enumerate_full(profile)
    } else {
        enumerate_compact(profile)
    }
}

fn enumerate_compact(profile: &Profile) -> Result<Vec<FrontierPoint>> {
    let n = profile.len();
    let mut out = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let supporting = weight_interval(profile, s)?;
        out.push(FrontierPoint {
            dist: dist_at(profile, s)?,
            agg: agg_misrep(profile, s)?,
            seat_total: s,
            allocation: top_s_allocation(profile, s)?,
            is_pareto: supporting.has_positive_finite(),
            supporting: Some(supporting),
        });
    }
    Ok(out)
}

fn enumerate_full(profile: &Profile) -> Result<Vec<FrontierPoint>> {
    let n = profile.len();
    if n > FULL_ENUMERATION_LIMIT {
        return Err(Error::Resource(format!(
            "full enumeration visits 2^{n} allocations; N = {n} exceeds the limit of \
             {FULL_ENUMERATION_LIMIT} — rerun in compact mode"
        )));
    }
    // Depth-first walk over award decisions, carrying the running Dist sum
    // so each node costs one rational addition.
    let mut best: BTreeMap<(Rational, Rational), (usize, Vec<bool>)> = BTreeMap::new();
    let mut bits = vec![false; n];
    let mut stack_dist = Vec::with_capacity(n + 1);
    stack_dist.push(Rational::zero());
    walk(profile, 0, &mut bits, &mut stack_dist, &mut best);

    let mut points: Vec<FrontierPoint> = best
        .into_iter()
        .map(|((dist, agg), (seat_total, bits))| FrontierPoint {
            dist,
            agg,
            seat_total,
            allocation: Allocation::new(bits),
            is_pareto: false,
            supporting: None,
        })
        .collect();
    // BTreeMap order is already (Dist, Agg) ascending; sweep for dominance.
    let mut min_agg: Option<Rational> = None;
    for p in &mut points {
        match &min_agg {
            Some(m) if *m <= p.agg => {}
            _ => {
                p.is_pareto = true;
                min_agg = Some(p.agg.clone());
            }
        }
    }
    Ok(points)
}

fn walk(
    profile: &Profile,
    d: usize,
    bits: &mut Vec<bool>,
    dist: &mut Vec<Rational>,
    best: &mut BTreeMap<(Rational, Rational), (usize, Vec<bool>)>,
) {
    if d == profile.len() {
        let seat_total = bits.iter().filter(|&&b| b).count();
        let key = (
            dist.last().unwrap().clone(),
            agg_misrep(profile, seat_total).expect("seat total within range"),
        );
        match best.get(&key) {
            Some((s, _)) if *s <= seat_total => {}
            _ => {
                best.insert(key, (seat_total, bits.clone()));
            }
        }
        return;
    }
    let share = profile.share(d);
    for award in [false, true] {
        bits[d] = award;
        let contribution = if award {
            share.complement().into_value()
        } else {
            share.value().clone()
        };
        dist.push(dist.last().unwrap() + contribution);
        walk(profile, d + 1, bits, dist, best);
        dist.pop();
    }
    bits[d] = false;
}

/// Switch weights and segment slopes along the frontier.
///
/// Consecutive frontier points in order of increasing `Dist` are joined
/// by a segment whose slope `ΔAgg / ΔDist` equals `−1/w` at the weight
/// `w` where the optimal seat total switches between them; each entry is
/// one `(w_switch, slope)` pair.
pub fn frontier_slopes(profile: &Profile) -> Result<Vec<(Rational, Rational)>> {
    let points = enumerate_compact(profile)?;
    let mut pareto: Vec<&FrontierPoint> = points.iter().filter(|p| p.is_pareto).collect();
    pareto.sort_by(|x, y| x.dist.cmp(&y.dist));
    let mut slopes = Vec::new();
    for pair in pareto.windows(2) {
        let d_dist = &pair[1].dist - &pair[0].dist;
        let d_agg = &pair[1].agg - &pair[0].agg;
        if d_dist.is_zero() {
            // Two seat totals share one value pair (an exact-half share at
            // a half-integer vote total); there is no segment between them.
            debug_assert!(d_agg.is_zero());
            continue;
        }
        let slope = d_agg / d_dist;
        let switch = match pair[1].supporting.as_ref().and_then(|i| i.entry_weight()) {
            Some(Weight::Finite(w)) => w,
            _ => unreachable!("a later frontier point enters at a finite weight"),
        };
        debug_assert_eq!(slope, -switch.recip());
        slopes.push((switch, slope));
    }
    Ok(slopes)
}
