//! Profiles, allocations, weights, and the two misrepresentation measures.
//!
//! A [`Profile`] holds Party A's exact vote share per district. An
//! [`Allocation`] says which districts A is awarded. District
//! misrepresentation [`dist_misrep`] counts voters represented by the party
//! they voted against; statewide misrepresentation [`agg_misrep`] is the
//! seat-count distance `|a - S|` from the proportional target `a`. Their
//! weighted sum is [`phi`].
//!
//! Convention used everywhere: ties are resolved in Party A's favor. Sorting
//! ties break by district index, and a district whose share sits exactly on
//! a threshold is awarded to A.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ratio::{format_ratio, one_half, parse_ratio};

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// A vote share: an exact rational in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Share(Rational);

impl Share {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value > Rational::one() {
            return Err(Error::Domain(format!(
                "share {} outside [0, 1]",
                format_ratio(&value)
            )));
        }
        Ok(Share(value))
    }

    /// Exact share from integer vote counts: A-votes over the two-party total.
    pub fn from_votes(a_votes: u64, two_party_total: u64) -> Result<Self> {
        if two_party_total == 0 {
            return Err(Error::Domain("two-party vote total is zero".into()));
        }
        if a_votes > two_party_total {
            return Err(Error::Domain(format!(
                "{a_votes} A-votes exceed the two-party total {two_party_total}"
            )));
        }
        Ok(Share(Rational::new(
            BigInt::from(a_votes),
            BigInt::from(two_party_total),
        )))
    }

    /// Parses a decimal or `num/den` share string.
    pub fn parse(s: &str) -> Result<Self> {
        Share::new(parse_ratio(s)?)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    /// The opposing party's share, `1 - self`.
    pub fn complement(&self) -> Share {
        Share(Rational::one() - &self.0)
    }
}

impl fmt::Display for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_ratio(&self.0))
    }
}

impl fmt::Debug for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Share({})", self)
    }
}

/// A state-year of district vote shares for Party A, with the order
/// statistics and their prefix sums precomputed.
#[derive(Clone, PartialEq, Eq)]
pub struct Profile {
    shares: Vec<Share>,
    /// District indices ordered so shares are nonincreasing; equal shares
    /// keep ascending district index.
    sorted_idx: Vec<usize>,
    /// `prefix[k]` = sum of the `k` largest shares; `prefix[N]` = a.
    prefix: Vec<Rational>,
}

impl Profile {
    pub fn new(shares: Vec<Share>) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::Domain(
                "a profile needs at least one district".into(),
            ));
        }
        let mut sorted_idx: Vec<usize> = (0..shares.len()).collect();
        sorted_idx.sort_by(|&i, &j| shares[j].cmp(&shares[i]).then(i.cmp(&j)));
        let mut prefix = Vec::with_capacity(shares.len() + 1);
        prefix.push(Rational::zero());
        for &d in &sorted_idx {
            let last = prefix.last().unwrap().clone();
            prefix.push(last + shares[d].value());
        }
        Ok(Profile {
            shares,
            sorted_idx,
            prefix,
        })
    }

    /// Builds a profile from share strings.
    pub fn from_strs(shares: &[&str]) -> Result<Self> {
        Profile::new(
            shares
                .iter()
                .map(|s| Share::parse(s))
                .collect::<Result<_>>()?,
        )
    }

    /// Parses the profile text format: one district per line, either a share
    /// (`0.49` or `49/100`) or an integer pair `A-votes,two-party-total`.
    /// Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut shares = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let share = if let Some((a, total)) = line.split_once(',') {
                let a = a.trim().parse::<u64>().map_err(|e| {
                    Error::Parse(format!(
                        "line {}: vote count `{}`: {e}",
                        lineno + 1,
                        a.trim()
                    ))
                })?;
                let total = total.trim().parse::<u64>().map_err(|e| {
                    Error::Parse(format!(
                        "line {}: vote count `{}`: {e}",
                        lineno + 1,
                        total.trim()
                    ))
                })?;
                Share::from_votes(a, total)
            } else {
                Share::parse(line)
            }
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            shares.push(share);
        }
        if shares.is_empty() {
            return Err(Error::Parse("profile file contains no districts".into()));
        }
        Profile::new(shares)
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one district
    }

    pub fn shares(&self) -> &[Share] {
        &self.shares
    }

    pub fn share(&self, district: usize) -> &Share {
        &self.shares[district]
    }

    /// Aggregate support `a = N * mean`, the proportional seat target.
    pub fn aggregate(&self) -> &Rational {
        &self.prefix[self.len()]
    }

    pub fn mean(&self) -> Rational {
        self.aggregate() / Rational::from_integer(BigInt::from(self.len()))
    }

    /// Order statistic `p_(i)`, 1-based: `order_stat(1)` is the largest share.
    pub fn order_stat(&self, i: usize) -> &Rational {
        assert!(
            (1..=self.len()).contains(&i),
            "order statistic index out of range"
        );
        self.shares[self.sorted_idx[i - 1]].value()
    }

    /// District indices in nonincreasing share order (ties by index).
    pub fn sorted_indices(&self) -> &[usize] {
        &self.sorted_idx
    }

    /// Sum of the `s` largest shares.
    pub fn top_sum(&self, s: usize) -> &Rational {
        &self.prefix[s]
    }

    /// The same districts with parties relabeled: share `1 - p_d` each.
    pub fn mirror(&self) -> Profile {
        Profile::new(self.shares.iter().map(Share::complement).collect())
            .expect("mirrored shares stay in [0, 1]")
    }

    /// The constant profile with the same mean in every district.
    pub fn mean_constant(&self) -> Profile {
        let m = Share::new(self.mean()).expect("mean of shares lies in [0, 1]");
        Profile::new(vec![m; self.len()]).expect("length preserved")
    }

    /// `S_F`: the number of districts Party A wins under the fixed majority
    /// threshold (shares of exactly 1/2 count for A).
    pub fn fptp_seats(&self) -> usize {
        let half = one_half();
        (1..=self.len())
            .take_while(|&i| *self.order_stat(i) >= half)
            .count()
    }

    /// `S_PR`: the integer seat total closest to `a`, half rounded up
    /// (toward Party A).
    pub fn proportional_seats(&self) -> usize {
        let a = self.aggregate();
        let floor = a.floor().to_integer().to_usize().expect("a lies in [0, N]");
        let frac = a - a.floor();
        if frac >= one_half() && floor < self.len() {
            floor + 1
        } else {
            floor
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile[")?;
        for (i, s) in self.shares.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// An assignment of every district to one of the two parties: `true` means
/// the district goes to Party A.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    bits: Vec<bool>,
}

impl Allocation {
    pub fn new(bits: Vec<bool>) -> Self {
        Allocation { bits }
    }

    /// Allocation awarding exactly the listed districts to A.
    pub fn from_awarded(n: usize, awarded: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &d in awarded {
            if d >= n {
                return Err(Error::Domain(format!(
                    "district {d} out of range for N = {n}"
                )));
            }
            bits[d] = true;
        }
        Ok(Allocation { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn awarded(&self, district: usize) -> bool {
        self.bits[district]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `S`, the number of districts awarded to A.
    pub fn seat_total(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Districts awarded to A, ascending.
    pub fn awarded_districts(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&d| self.bits[d]).collect()
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Allocation(")?;
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        write!(f, ")")
    }
}

/// The designer's weight on statewide misrepresentation: a nonnegative
/// rational or the symbolic `INFINITY` (pure proportionality).
///
/// Ordering: finite weights by value, and every finite weight is below
/// `Infinity`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(Rational),
    Infinity,
}

impl Weight {
    pub fn finite(value: Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Domain(format!(
                "weight {} is negative",
                format_ratio(&value)
            )));
        }
        Ok(Weight::Finite(value))
    }

    pub fn zero() -> Self {
        Weight::Finite(Rational::zero())
    }

    /// Parses a weight: a nonnegative rational, or `inf` / `infinity`
    /// (case-insensitive) for the symbolic value.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Weight::Infinity);
        }
        Weight::finite(parse_ratio(t)?)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Weight::Finite(v) => Some(v),
            Weight::Infinity => None,
        }
    }
}

impl From<Rational> for Weight {
    fn from(value: Rational) -> Self {
        assert!(!value.is_negative(), "weights are nonnegative");
        Weight::Finite(value)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(v) => f.write_str(&format_ratio(v)),
            Weight::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({self})")
    }
}

/// The value of the combined objective at one allocation.
///
/// At a finite weight this is the single rational `Dist + w * Agg`. At
/// `Weight::Infinity` the objective is the pair `(Agg, Dist)` compared
/// lexicographically — proportionality first, district misrepresentation as
/// tie-break — rather than arithmetic with an infinite value. Comparisons
/// are meaningful between values computed at the same weight.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhiValue {
    Finite(Rational),
    Lexicographic { agg: Rational, dist: Rational },
}

impl PhiValue {
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            PhiValue::Finite(v) => Some(v),
            PhiValue::Lexicographic { .. } => None,
        }
    }
}

impl fmt::Debug for PhiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiValue::Finite(v) => write!(f, "Phi({})", format_ratio(v)),
            PhiValue::Lexicographic { agg, dist } => {
                write!(
                    f,
                    "Phi(agg {}, dist {})",
                    format_ratio(agg),
                    format_ratio(dist)
                )
            }
        }
    }
}

/// District misrepresentation: the mass of voters whose district seat is
/// held by the party they voted against, `Σ_d [x_d(1-p_d) + (1-x_d)p_d]`.
pub fn dist_misrep(profile: &Profile, alloc: &Allocation) -> Result<Rational> {
    if alloc.len() != profile.len() {
        return Err(Error::Dimension(format!(
            "allocation has {} districts, profile has {}",
            alloc.len(),
            profile.len()
        )));
    }
    let mut total = Rational::zero();
    for (share, &to_a) in profile.shares().iter().zip(alloc.bits()) {
        if to_a {
            total += share.complement().value();
        } else {
            total += share.value();
        }
    }
    Ok(total)
}

/// Statewide misrepresentation: `|a - S|`, the seat-count deviation from
/// exact proportionality.
pub fn agg_misrep(profile: &Profile, seat_total: usize) -> Result<Rational> {
    if seat_total > profile.len() {
        return Err(Error::Domain(format!(
            "seat total {seat_total} exceeds N = {}",
            profile.len()
        )));
    }
    let s = Rational::from_integer(BigInt::from(seat_total));
    Ok((profile.aggregate() - s).abs())
}

/// The combined objective `Dist + w * Agg` (lexicographic `(Agg, Dist)` at
/// the symbolic infinite weight).
pub fn phi(profile: &Profile, alloc: &Allocation, w: &Weight) -> Result<PhiValue> {
    let dist = dist_misrep(profile, alloc)?;
    let agg = agg_misrep(profile, alloc.seat_total())?;
    Ok(match w {
        Weight::Finite(w) => PhiValue::Finite(dist + w * agg),
        Weight::Infinity => PhiValue::Lexicographic { agg, dist },
    })
}

/// The allocation awarding Party A its `s` strongest districts (ties by
/// lowest district index); the unique-up-to-ties minimizer of
/// [`dist_misrep`] at seat total `s`.
pub fn top_s_allocation(profile: &Profile, s: usize) -> Result<Allocation> {
    if s > profile.len() {
        return Err(Error::Domain(format!(
            "seat total {s} exceeds N = {}",
            profile.len()
        )));
    }
    let mut bits = vec![false; profile.len()];
    for &d in &profile.sorted_indices()[..s] {
        bits[d] = true;
    }
    Ok(Allocation::new(bits))
}

/// Minimal district misrepresentation at seat total `s`, by the closed form
/// `S + a - 2 * (sum of the S largest shares)`.
pub fn dist_at(profile: &Profile, s: usize) -> Result<Rational> {
    if s > profile.len() {
        return Err(Error::Domain(format!(
            "seat total {s} exceeds N = {}",
            profile.len()
        )));
    }
    let s_rat = Rational::from_integer(BigInt::from(s));
    Ok(s_rat + profile.aggregate() - Rational::from_integer(BigInt::from(2)) * profile.top_sum(s))
}
