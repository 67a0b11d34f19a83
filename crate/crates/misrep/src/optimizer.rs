//! Optimization of the combined objective across the weight parameter.
//!
//! For a fixed profile, `Φ(top-S; w)` is a function of the seat total `S`
//! whose forward difference
//!
//! ```text
//! Δ(S; w) = Φ(top-(S+1); w) − Φ(top-S; w)
//!         = (1 − 2 p_(S+1)) + w · (|a − (S+1)| − |a − S|)
//! ```
//!
//! is weakly increasing in `S`, so the objective is unimodal and `S` is
//! optimal exactly when `Δ(S−1; w) ≤ 0 ≤ Δ(S; w)`. Every quantity in this
//! module comes from that one inequality system: [`optimal_seats`] fixes `w`
//! and solves for `S`, [`weight_interval`] fixes `S` and solves for `w`
//! (each `Δ` is affine in `w`, so the solution is an interval), and
//! [`seat_schedule`], [`transition_weights`], and [`optimal_cutoff`] read
//! the resulting breakpoint structure off those intervals.
//!
//! Ties always resolve toward Party A: among optimal seat totals the largest
//! is selected ([`selected_seats`]), and at the symbolic infinite weight the
//! proportional target rounds half upward.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Profile, Rational, Share, Weight};
use crate::ratio::{format_ratio, one_half};

fn rat(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A forward-difference value, extended with the sentinels used at the ends
/// of the seat range.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeltaValue {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl DeltaValue {
    pub fn is_nonneg(&self) -> bool {
        match self {
            DeltaValue::NegInfinity => false,
            DeltaValue::Finite(v) => !v.is_negative(),
            DeltaValue::PosInfinity => true,
        }
    }

    pub fn is_nonpos(&self) -> bool {
        match self {
            DeltaValue::NegInfinity => true,
            DeltaValue::Finite(v) => !v.is_positive(),
            DeltaValue::PosInfinity => false,
        }
    }
}

impl fmt::Debug for DeltaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaValue::NegInfinity => f.write_str("-inf"),
            DeltaValue::Finite(v) => f.write_str(&format_ratio(v)),
            DeltaValue::PosInfinity => f.write_str("+inf"),
        }
    }
}

/// `Δ(s; ·)` as an affine function of the weight; only defined for
/// `s < N`.
struct DeltaAffine {
    intercept: Rational,
    slope: Rational,
}

fn delta_affine(profile: &Profile, s: usize) -> DeltaAffine {
    debug_assert!(s < profile.len());
    let a = profile.aggregate();
    let intercept = Rational::from_integer(BigInt::from(1)) - rat(2) * profile.order_stat(s + 1);
    let slope = (a - rat(s + 1)).abs() - (a - rat(s)).abs();
    DeltaAffine { intercept, slope }
}

/// The forward difference `Φ(top-(s+1); w) − Φ(top-s; w)`.
///
/// `s = N` returns the `+∞` sentinel (there is no seat above `N`); the
/// matching `−∞` sentinel below `s = 0` only ever appears implicitly in
/// optimality checks. At `Weight::Infinity` the value is the limit sign of
/// the affine function `w ↦ Δ(s; w)`: the sign of its slope, or the finite
/// intercept when the slope is zero. Note that at half-integer `a` this
/// limit can disagree with the pinned proportional tie-break of
/// [`optimal_seats`], which rounds toward Party A.
pub fn forward_difference(profile: &Profile, s: usize, w: &Weight) -> Result<DeltaValue> {
    let n = profile.len();
    if s > n {
        return Err(Error::Domain(format!("seat total {s} exceeds N = {n}")));
    }
    if s == n {
        return Ok(DeltaValue::PosInfinity);
    }
    let aff = delta_affine(profile, s);
    Ok(match w {
        Weight::Finite(w) => DeltaValue::Finite(aff.intercept + w * aff.slope),
        Weight::Infinity => match aff.slope.cmp(&Rational::zero()) {
            Ordering::Greater => DeltaValue::PosInfinity,
            Ordering::Less => DeltaValue::NegInfinity,
            Ordering::Equal => DeltaValue::Finite(aff.intercept),
        },
    })
}

/// All seat totals minimizing `Φ(top-S; w)`, ascending (always a contiguous
/// run by unimodality).
///
/// At `Weight::Infinity` the minimizer is pinned to the singleton containing
/// the proportional seat count `S_PR` (half-integer targets round toward
/// Party A), which is how ties among equally proportional seat totals are
/// resolved throughout the crate.
pub fn optimal_seats(profile: &Profile, w: &Weight) -> Result<Vec<usize>> {
    let n = profile.len();
    if let Weight::Infinity = w {
        return Ok(vec![profile.proportional_seats()]);
    }
    let mut out = Vec::new();
    for s in 0..=n {
        let left_ok = s == 0 || forward_difference(profile, s - 1, w)?.is_nonpos();
        if !left_ok {
            // Δ is weakly increasing in s, so no later s can qualify.
            break;
        }
        if forward_difference(profile, s, w)?.is_nonneg() {
            out.push(s);
        }
    }
    debug_assert!(!out.is_empty());
    debug_assert!(out.windows(2).all(|p| p[1] == p[0] + 1));
    Ok(out)
}

/// The deterministic seat selection: the largest optimal seat total, i.e.
/// ties resolved in Party A's favor.
pub fn selected_seats(profile: &Profile, w: &Weight) -> Result<usize> {
    Ok(*optimal_seats(profile, w)?
        .last()
        .expect("optimal set is nonempty"))
}

/// The set of weights at which a given seat total is optimal.
///
/// Both defining inequalities are affine in `w`, so over the finite weights
/// the set is a closed interval (possibly empty or a single point); the
/// symbolic `Weight::Infinity` belongs to the set exactly when the seat
/// total is the proportional target `S_PR`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WeightInterval {
    /// No weight, finite or infinite, makes the seat total optimal.
    Empty,
    /// Only the symbolic infinite weight (arises when the proportional
    /// target rounds a half-integer up to a minority-share district).
    InfinityOnly,
    /// All finite weights in `[lo, hi]` (closed at both finite ends), plus
    /// the symbolic infinite weight when `includes_infinity` is set.
    Range {
        lo: Rational,
        hi: Weight,
        includes_infinity: bool,
    },
}

impl WeightInterval {
    pub fn is_empty(&self) -> bool {
        matches!(self, WeightInterval::Empty)
    }

    pub fn contains(&self, w: &Weight) -> bool {
        match self {
            WeightInterval::Empty => false,
            WeightInterval::InfinityOnly => !w.is_finite(),
            WeightInterval::Range {
                lo,
                hi,
                includes_infinity,
            } => match w {
                Weight::Infinity => *includes_infinity,
                Weight::Finite(v) => {
                    v >= lo
                        && match hi {
                            Weight::Finite(h) => v <= h,
                            Weight::Infinity => true,
                        }
                }
            },
        }
    }

    /// The smallest weight in the set, counting the symbolic infinity.
    pub fn entry_weight(&self) -> Option<Weight> {
        match self {
            WeightInterval::Empty => None,
            WeightInterval::InfinityOnly => Some(Weight::Infinity),
            WeightInterval::Range { lo, .. } => Some(Weight::Finite(lo.clone())),
        }
    }

    /// Whether some strictly positive finite weight lies in the set.
    pub fn has_positive_finite(&self) -> bool {
        match self {
            WeightInterval::Empty | WeightInterval::InfinityOnly => false,
            WeightInterval::Range { hi, .. } => match hi {
                Weight::Infinity => true,
                Weight::Finite(h) => h.is_positive(),
            },
        }
    }
}

/// Intersects `[lo, hi] ∩ [0, ∞)` with the solution set of
/// `intercept + slope·w ≤ 0` (or `≥ 0` when `at_most` is false).
fn apply_affine_constraint(
    aff: &DeltaAffine,
    at_most: bool,
    lo: &mut Rational,
    hi: &mut Option<Rational>,
    empty: &mut bool,
) {
    let zero = Rational::zero();
    let tighten_hi = |hi: &mut Option<Rational>, bound: Rational| match hi {
        Some(h) if *h <= bound => {}
        _ => *hi = Some(bound),
    };
    match aff.slope.cmp(&zero) {
        Ordering::Equal => {
            let violated = if at_most {
                aff.intercept.is_positive()
            } else {
                aff.intercept.is_negative()
            };
            *empty |= violated;
        }
        Ordering::Greater => {
            let bound = -&aff.intercept / &aff.slope;
            if at_most {
                tighten_hi(hi, bound);
            } else if bound > *lo {
                *lo = bound;
            }
        }
        Ordering::Less => {
            let bound = -&aff.intercept / &aff.slope;
            if at_most {
                if bound > *lo {
                    *lo = bound;
                }
            } else {
                tighten_hi(hi, bound);
            }
        }
    }
}

/// Solves for the weights at which seat total `s` is optimal: the
/// `w ∈ [0, ∞)` with `Δ(s−1; w) ≤ 0` and `Δ(s; w) ≥ 0`, plus the symbolic
/// infinity when `s` is the proportional target.
pub fn weight_interval(profile: &Profile, s: usize) -> Result<WeightInterval> {
    let n = profile.len();
    if s > n {
        return Err(Error::Domain(format!("seat total {s} exceeds N = {n}")));
    }
    let mut lo = Rational::zero();
    let mut hi: Option<Rational> = None;
    let mut empty = false;
    if s >= 1 {
        apply_affine_constraint(
            &delta_affine(profile, s - 1),
            true,
            &mut lo,
            &mut hi,
            &mut empty,
        );
    }
    if s < n {
        apply_affine_constraint(
            &delta_affine(profile, s),
            false,
            &mut lo,
            &mut hi,
            &mut empty,
        );
    }
    if let Some(h) = &hi {
        empty |= *h < lo;
    }
    let at_infinity = s == profile.proportional_seats();
    Ok(match (empty, at_infinity) {
        (true, false) => WeightInterval::Empty,
        (true, true) => WeightInterval::InfinityOnly,
        (false, inf) => WeightInterval::Range {
            lo,
            hi: match hi {
                Some(h) => Weight::Finite(h),
                None => Weight::Infinity,
            },
            includes_infinity: inf,
        },
    })
}

/// The weights at which an observed seat total is consistent with optimal
/// behavior — the same set as [`weight_interval`], under the name used when
/// inverting outcomes back to preferences.
pub fn rationalizing_weights(profile: &Profile, s: usize) -> Result<WeightInterval> {
    weight_interval(profile, s)
}

/// The characteristic weights at which the optimal rule changes shape.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionWeights {
    /// Switch weight for the last seat on the far side of the proportional
    /// target: `max(0, 1 − 2 p'_(⌊a'⌋))` on the profile oriented so the
    /// majority-seat count does not exceed the proportional target
    /// (`p'_(0)` reads as 1).
    pub w_floor: Rational,
    /// Switch weight for the final, nearest seat: present exactly when the
    /// oriented target has fractional part above one half, where it equals
    /// `max(0, (1 − 2 p'_(⌈a'⌉)) / (2 frac(a') − 1))`.
    pub w_ceil: Option<Rational>,
    /// Smallest weight at which the proportional seat count is optimal
    /// (`Weight::Infinity` when only the symbolic infinite weight achieves
    /// it).
    pub w_pr: Weight,
}

/// Computes [`TransitionWeights`]. `w_floor` and `w_ceil` are
/// party-symmetric: they are read off the profile after relabeling parties
/// if necessary so that the majority-seat count is at most the proportional
/// target. `w_pr` always refers to Party A's proportional seat count on the
/// original profile (ties at half-integer targets resolve toward A).
pub fn transition_weights(profile: &Profile) -> Result<TransitionWeights> {
    let s_pr = profile.proportional_seats();
    let oriented;
    let p = if profile.fptp_seats() > s_pr {
        oriented = profile.mirror();
        &oriented
    } else {
        profile
    };
    let a = p.aggregate();
    let floor = a.floor();
    let frac = a - &floor;
    let floor = floor
        .to_integer()
        .to_biguint()
        .and_then(|b| b.try_into().ok())
        .unwrap_or(0usize);

    let one = Rational::from_integer(BigInt::from(1));
    let zero = Rational::zero();
    let w_floor = if floor == 0 {
        zero.clone() // p'_(0) := 1 makes the raw value −1
    } else {
        let raw = &one - rat(2) * p.order_stat(floor);
        raw.max(zero.clone())
    };
    let w_ceil = if frac > one_half() {
        let num = &one - rat(2) * p.order_stat(floor + 1);
        let den = rat(2) * &frac - &one;
        Some((num / den).max(zero))
    } else {
        None
    };
    let w_pr = weight_interval(profile, s_pr)?
        .entry_weight()
        .expect("the proportional seat count is optimal at the infinite weight");
    Ok(TransitionWeights {
        w_floor,
        w_ceil,
        w_pr,
    })
}

/// One switch of the seat schedule: crossing `weight` moves the selected
/// seat total to `seats`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScheduleStep {
    pub weight: Weight,
    pub seats: usize,
}

/// The selected seat total as a step function of the weight.
///
/// `start` is the majority-rule count at `w = 0` and `end` the proportional
/// count approached as `w` grows; `steps` lists the switches in increasing
/// weight order. Because ties resolve toward Party A, a switch takes effect
/// *at* its weight when the seat count is rising (`start ≤ end`) and just
/// *after* its weight when it is falling.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeatSchedule {
    pub start: usize,
    pub end: usize,
    pub steps: Vec<ScheduleStep>,
}

impl SeatSchedule {
    /// The selected seat total at a weight, evaluated from the recorded
    /// switch structure.
    pub fn seats_at(&self, w: &Weight) -> usize {
        let rising = self.start <= self.end;
        let mut seats = self.start;
        for step in &self.steps {
            let crossed = match (&step.weight, w) {
                (Weight::Finite(sw), Weight::Finite(wv)) => {
                    if rising {
                        wv >= sw
                    } else {
                        wv > sw
                    }
                }
                (Weight::Finite(_), Weight::Infinity) => true,
                (Weight::Infinity, Weight::Infinity) => true,
                (Weight::Infinity, Weight::Finite(_)) => false,
            };
            if !crossed {
                break;
            }
            seats = step.seats;
        }
        seats
    }

    /// The switch weights in increasing order.
    pub fn breakpoints(&self) -> Vec<Weight> {
        self.steps.iter().map(|s| s.weight.clone()).collect()
    }
}

/// Traces the selected seat total from the majority count at `w = 0` to the
/// proportional count at the infinite weight. Each intermediate seat total
/// enters at the low endpoint of its [`weight_interval`]; the number of
/// switches always equals `|end − start|`.
pub fn seat_schedule(profile: &Profile) -> Result<SeatSchedule> {
    let start = profile.fptp_seats();
    let end = profile.proportional_seats();
    let mut steps = Vec::new();
    let totals: Vec<usize> = if start <= end {
        (start + 1..=end).collect()
    } else {
        (end..start).rev().collect()
    };
    for s in totals {
        let weight = weight_interval(profile, s)?.entry_weight().ok_or_else(|| {
            Error::Domain(format!(
                "seat total {s} between the majority and proportional counts is never optimal; \
                 the forward difference lost monotonicity, which should be impossible"
            ))
        })?;
        steps.push(ScheduleStep { weight, seats: s });
    }
    debug_assert!(steps
        .windows(2)
        .all(|pair| pair[0].weight <= pair[1].weight));
    Ok(SeatSchedule { start, end, steps })
}

/// The share threshold realizing the selected allocation at weight `w`:
/// awarding exactly the districts with `p_d ≥ t` reproduces the
/// deterministic optimal rule whenever no two districts tie at the
/// boundary value.
///
/// The curve in `w` is the moving majority line `(1 ∓ w)/2` clamped against
/// the order statistic at the far side of the proportional target, and a
/// constant `p_(S_PR)` (1 when `S_PR = 0`) once the proportional count is
/// reached. On profiles with duplicated shares at the returned value the
/// `≥` comparison may award extra tied districts; the seat-total interfaces
/// ([`selected_seats`], [`crate::model::top_s_allocation`]) are exact in
/// those cases.
pub fn optimal_cutoff(profile: &Profile, w: &Weight) -> Result<Share> {
    let n = profile.len();
    let s_f = profile.fptp_seats();
    let s_pr = profile.proportional_seats();
    let underrep = s_f <= s_pr;
    let w_pr = weight_interval(profile, s_pr)?
        .entry_weight()
        .expect("the proportional seat count is optimal at the infinite weight");

    // Past the last switch the threshold sits on the proportional order
    // statistic. A rising count reaches it at the switch weight (ties to
    // A), a falling count only after it.
    let in_terminal = match (&w_pr, w) {
        (Weight::Finite(wp), Weight::Finite(wv)) => {
            if underrep {
                wv >= wp
            } else {
                wv > wp
            }
        }
        (Weight::Finite(_), Weight::Infinity) => true,
        (Weight::Infinity, Weight::Infinity) => true,
        (Weight::Infinity, Weight::Finite(_)) => false,
    };
    if in_terminal {
        let t = if s_pr == 0 {
            Rational::from_integer(BigInt::from(1))
        } else {
            profile.order_stat(s_pr).clone()
        };
        return Share::new(t);
    }

    let v = match w {
        Weight::Finite(v) => v,
        Weight::Infinity => unreachable!("the infinite weight is always terminal"),
    };
    let one = Rational::from_integer(BigInt::from(1));
    let a = profile.aggregate();
    let floor = a
        .floor()
        .to_integer()
        .to_biguint()
        .and_then(|b| b.try_into().ok())
        .unwrap_or(0usize);
    let t = if underrep {
        // Moving line (1−w)/2, pinned at p_(⌊a⌋) once the line passes it
        // (p_(0) reads as 1).
        let line = (&one - v) / rat(2);
        let pin = if floor == 0 {
            one
        } else {
            profile.order_stat(floor).clone()
        };
        line.max(pin)
    } else {
        // Mirror image: line (1+w)/2 rising toward the pin at p_(⌊a⌋+1).
        debug_assert!(floor < n, "an overrepresented profile has a < N");
        let line = (&one + v) / rat(2);
        let pin = profile.order_stat(floor + 1).clone();
        line.min(pin)
    };
    Share::new(t)
}
