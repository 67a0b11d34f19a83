//! Brute-force oracles shared by the integration tests.
//!
//! Everything here is deliberately independent of the library under test:
//! shares are plain integer numerators over one common denominator, and all
//! quantities are minimized by exhaustive enumeration (all `2^N` allocations,
//! all seat totals, all grid profiles). The library implements closed forms
//! and recurrences; these oracles implement the definitions. Tests freeze
//! oracle outputs and require the library to match them exactly.
//!
//! Arithmetic stays in `i128`. With the denominators used by the tests
//! (≤ 10^6) and N ≤ 20, every intermediate is far below overflow.

#![allow(dead_code)]

/// A fraction as (numerator, denominator), denominator > 0.
pub type Frac = (i128, i128);

/// A profile for oracle use: share of district `d` is `nums[d] / den`.
#[derive(Clone, Debug)]
pub struct OracleProfile {
    pub nums: Vec<i128>,
    pub den: i128,
}

impl OracleProfile {
    pub fn new(nums: &[i128], den: i128) -> Self {
        assert!(den > 0);
        assert!(nums.iter().all(|&n| (0..=den).contains(&n)));
        OracleProfile {
            nums: nums.to_vec(),
            den,
        }
    }

    pub fn n(&self) -> usize {
        self.nums.len()
    }

    /// `a * den`, the aggregate support scaled onto the common denominator.
    pub fn sum(&self) -> i128 {
        self.nums.iter().sum()
    }

    /// Numerators sorted descending (order statistics times `den`).
    pub fn sorted_desc(&self) -> Vec<i128> {
        let mut v = self.nums.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

pub fn reduce((n, d): Frac) -> Frac {
    assert!(d > 0);
    let g = gcd(n.abs(), d);
    if g == 0 {
        (0, 1)
    } else {
        (n / g, d / g)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Dist(x) * den` for the allocation given as a bitmask (bit d = district d).
pub fn dist_num(p: &OracleProfile, mask: u32) -> i128 {
    p.nums
        .iter()
        .enumerate()
        .map(|(d, &n)| if mask >> d & 1 == 1 { p.den - n } else { n })
        .sum()
}

/// `Agg(S) * den`.
pub fn agg_num(p: &OracleProfile, seats: usize) -> i128 {
    (p.sum() - seats as i128 * p.den).abs()
}

/// `Phi(x; w) * den * wd` for weight `w = (wn, wd)`.
pub fn phi_num(p: &OracleProfile, mask: u32, (wn, wd): Frac) -> i128 {
    dist_num(p, mask) * wd + wn * agg_num(p, mask.count_ones() as usize)
}

/// All Phi-minimizing allocations at weight `w`, with the minimal scaled Phi.
pub fn min_phi_masks(p: &OracleProfile, w: Frac) -> (Vec<u32>, i128) {
    let n = p.n();
    assert!(n <= 24, "oracle enumeration guard");
    let mut best = i128::MAX;
    let mut masks = Vec::new();
    for mask in 0..1u32 << n {
        let v = phi_num(p, mask, w);
        if v < best {
            best = v;
            masks.clear();
        }
        if v == best {
            masks.push(mask);
        }
    }
    (masks, best)
}

/// Seat totals that attain the global Phi minimum (sorted, deduplicated).
pub fn optimal_seat_set(p: &OracleProfile, w: Frac) -> Vec<usize> {
    let (masks, _) = min_phi_masks(p, w);
    let mut seats: Vec<usize> = masks.iter().map(|m| m.count_ones() as usize).collect();
    seats.sort_unstable();
    seats.dedup();
    seats
}

/// The largest Phi-minimizing seat total: the deterministic,
/// A-favoring selection the rule objects are specified to use.
pub fn largest_optimal_seats(p: &OracleProfile, w: Frac) -> usize {
    *optimal_seat_set(p, w).last().unwrap()
}

/// Minimal `Dist * den` among allocations with exactly `seats` districts.
pub fn min_dist_at_seats(p: &OracleProfile, seats: usize) -> i128 {
    let n = p.n();
    assert!(n <= 24, "oracle enumeration guard");
    let mut best = i128::MAX;
    for mask in 0..1u32 << n {
        if mask.count_ones() as usize == seats {
            best = best.min(dist_num(p, mask));
        }
    }
    best
}

/// The Pareto-efficient (Dist, Agg) pairs over all `2^N` allocations,
/// as reduced fractions, sorted by Dist.
pub fn pareto_points(p: &OracleProfile) -> Vec<(Frac, Frac)> {
    let n = p.n();
    assert!(n <= 24, "oracle enumeration guard");
    let mut pairs: Vec<(i128, i128)> = (0..1u32 << n)
        .map(|mask| (dist_num(p, mask), agg_num(p, mask.count_ones() as usize)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut result = Vec::new();
    let mut best_agg = i128::MAX;
    let mut i = 0;
    while i < pairs.len() {
        // pairs with equal dist are adjacent; only the least agg can survive
        let (dist, agg) = pairs[i];
        while i < pairs.len() && pairs[i].0 == dist {
            i += 1;
        }
        if agg < best_agg {
            best_agg = agg;
            result.push((reduce((dist, p.den)), reduce((agg, p.den))));
        }
    }
    result
}

/// Least half-L1 gerrymandering cost over the mean-preserving grid with
/// step `1/p.den`, among grid profiles where the weight-`w` rule awards at
/// least `k` seats. Returns None when no grid profile qualifies.
///
/// Sorted candidates suffice: the seat count depends only on the multiset of
/// shares, and pairing sorted baseline with sorted candidate minimizes the
/// L1 distance over district assignments.
pub fn grid_gerry_cost(p: &OracleProfile, w: Frac, k: usize) -> Option<Frac> {
    let n = p.n();
    assert!(n <= 6, "gerry oracle guard");
    let mut ctx = GerrySearch {
        den: p.den,
        sorted_baseline: p.sorted_desc(),
        total: p.sum(),
        w,
        k,
        best: None,
        parts: vec![0i128; n],
    };
    let total = ctx.total;
    let den = ctx.den;
    ctx.descend(0, total, den, 0);
    ctx.best.map(|twice| reduce((twice, 2 * p.den)))
}

struct GerrySearch {
    den: i128,
    sorted_baseline: Vec<i128>,
    total: i128,
    w: Frac,
    k: usize,
    best: Option<i128>,
    parts: Vec<i128>,
}

impl GerrySearch {
    /// Enumerates nonincreasing grid sequences summing to the baseline total,
    /// pruning branches whose accumulated L1 distance already exceeds the
    /// incumbent.
    fn descend(&mut self, idx: usize, remaining: i128, max_part: i128, twice_cost: i128) {
        if let Some(b) = self.best {
            if twice_cost >= b {
                return;
            }
        }
        let n = self.parts.len();
        if idx == n {
            debug_assert_eq!(remaining, 0);
            let r = OracleProfile {
                nums: self.parts.clone(),
                den: self.den,
            };
            if seat_count_at_least(&r, self.w, self.k) {
                self.best = Some(twice_cost);
            }
            return;
        }
        let slots = (n - idx) as i128;
        let lo = (remaining + slots - 1).div_euclid(slots).max(0); // ceil: later parts are no larger
        let hi = max_part.min(remaining);
        for v in (lo..=hi).rev() {
            self.parts[idx] = v;
            let step = (v - self.sorted_baseline[idx]).abs();
            self.descend(idx + 1, remaining - v, v, twice_cost + step);
        }
    }
}

/// Whether the largest Phi-minimizing seat total is at least `k`,
/// minimizing over seat totals directly (valid because the best allocation
/// at a fixed seat total takes the strongest districts).
fn seat_count_at_least(r: &OracleProfile, (wn, wd): Frac, k: usize) -> bool {
    let n = r.n();
    let sorted = r.sorted_desc();
    let mut prefix = 0i128;
    let mut best = i128::MAX;
    let mut best_s = 0usize;
    for s in 0..=n {
        if s > 0 {
            prefix += sorted[s - 1];
        }
        let dist = s as i128 * r.den + r.sum() - 2 * prefix;
        let phi = dist * wd + wn * agg_num(r, s);
        if phi < best {
            best = phi;
            best_s = s;
        } else if phi == best {
            best_s = s; // ties resolve to the larger seat total
        }
    }
    best_s >= k
}

/// Splitmix64: a small deterministic generator so oracle-side randomness
/// never depends on external crates.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.next_u64() % bound
    }
}

/// `n` random share numerators over `den`. With `distinct`, all numerators
/// differ pairwise and avoid the exact-half point, so tests that rely on
/// unique order statistics see a generic profile.
pub fn random_share_nums(rng: &mut Rng, n: usize, den: i128, distinct: bool) -> Vec<i128> {
    let mut nums = Vec::with_capacity(n);
    while nums.len() < n {
        let v = rng.below(den as u64 + 1) as i128;
        if distinct && (nums.contains(&v) || 2 * v == den) {
            continue;
        }
        nums.push(v);
    }
    nums
}

/// Frozen 12-district reference profile (stepped variant): the seat
/// optimum climbs 2 -> 5 across three switch weights.
pub fn reference_left() -> OracleProfile {
    OracleProfile::new(
        &[650, 580, 490, 485, 480, 470, 420, 400, 390, 380, 330, 325],
        1000,
    )
}

/// Frozen 12-district reference profile (companion variant): the seat
/// optimum climbs 4 -> 6 and proportionality needs weight 40/251.
pub fn reference_right() -> OracleProfile {
    OracleProfile::new(
        &[640, 580, 540, 501, 480, 460, 450, 440, 430, 420, 410, 400],
        1000,
    )
}

/// Frozen profile: the four-district near-proportional counterexample profile.
pub fn prop5_profile() -> OracleProfile {
    OracleProfile::new(&[925, 925, 700, 0], 1000)
}

/// Frozen profile: the six-district gerrymandering-cost fixture.
pub fn gerry_fixture() -> OracleProfile {
    OracleProfile::new(&[90, 80, 60, 10, 10, 10], 100)
}
