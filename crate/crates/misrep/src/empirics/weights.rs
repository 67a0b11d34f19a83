//! State-year filtering, implied-weight extraction, and report output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Profile, Rational, Weight};
use crate::optimizer::seat_schedule;
use crate::ratio::{format_ratio, ratio};

use super::clean::DistrictClass;

/// Inclusion thresholds for a state-year.
#[derive(Clone, Debug)]
pub struct FilterConfig {
    /// Minimum number of districts.
    pub min_districts: usize,
    /// Maximum tolerated fraction of nonmajor-dominated districts.
    pub nonmajor_max_frac: Rational,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_districts: 8,
            nonmajor_max_frac: ratio(1, 4),
        }
    }
}

/// A state-year that survived filtering, with its district profile.
#[derive(Clone, Debug)]
pub struct StateYearProfile {
    pub state: String,
    pub year: i32,
    pub profile: Profile,
    /// District labels in profile order: numeric labels first in numeric
    /// order, then the rest lexicographically.
    pub districts: Vec<String>,
}

/// A state-year dropped by filtering, with every reason that applied.
#[derive(Clone, Debug, Serialize)]
pub struct Exclusion {
    pub state: String,
    pub year: i32,
    pub reasons: Vec<String>,
}

fn district_sort_key(label: &str) -> (bool, u64, String) {
    match label.parse::<u64>() {
        Ok(v) => (false, v, label.to_string()),
        Err(_) => (true, 0, label.to_string()),
    }
}

/// Splits classified districts into usable state-year profiles and
/// excluded state-years. A state-year is excluded when it has too few
/// districts, too many nonmajor-dominated districts, or any district
/// whose share could not be resolved; all applicable reasons are kept.
pub fn filter_state_year(
    classes: &[DistrictClass],
    config: &FilterConfig,
) -> Result<(Vec<StateYearProfile>, Vec<Exclusion>)> {
    let mut grouped: BTreeMap<(String, i32), Vec<&DistrictClass>> = BTreeMap::new();
    for class in classes {
        grouped
            .entry((class.state.clone(), class.year))
            .or_default()
            .push(class);
    }
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for ((state, year), mut districts) in grouped {
        districts.sort_by_key(|c| district_sort_key(&c.district));
        let n = districts.len();
        let mut reasons = Vec::new();
        if n < config.min_districts {
            reasons.push(format!(
                "only {n} districts (minimum {})",
                config.min_districts
            ));
        }
        let dominated = districts.iter().filter(|c| c.nonmajor_dominated).count();
        if ratio(dominated as i64, n as i64) > config.nonmajor_max_frac {
            reasons.push(format!(
                "nonmajor-dominated in {dominated} of {n} districts (limit {})",
                format_ratio(&config.nonmajor_max_frac)
            ));
        }
        for c in districts.iter().filter(|c| c.share.is_none()) {
            let why = c.issue.as_deref().unwrap_or("share unresolved");
            reasons.push(format!("district {}: {why}", c.district));
        }
        if !reasons.is_empty() {
            excluded.push(Exclusion {
                state,
                year,
                reasons,
            });
            continue;
        }
        let shares = districts
            .iter()
            .map(|c| c.share.clone().expect("filtered above"))
            .collect();
        kept.push(StateYearProfile {
            state,
            year,
            profile: Profile::new(shares)?,
            districts: districts.iter().map(|c| c.district.clone()).collect(),
        });
    }
    Ok((kept, excluded))
}

/// The weight readings a state-year implies: the first breakpoints of its
/// seat schedule and the weight at which proportionality is reached.
#[derive(Clone, Debug)]
pub struct ImpliedWeights {
    pub state: String,
    pub year: i32,
    pub n_districts: usize,
    pub aggregate: Rational,
    pub s_fptp: usize,
    pub s_pr: usize,
    /// `R` when the winner-take-all count exceeds the vote total, `D`
    /// when it falls short, `None` when they agree exactly.
    pub overrep_party: Option<char>,
    /// The schedule has no steps: the winner-take-all and proportional
    /// counts coincide, so the state-year pins no weight.
    pub missing_point: bool,
    pub w_first: Option<Weight>,
    pub w_second: Option<Weight>,
    pub w_third: Option<Weight>,
    /// Weight of the final step, where the proportional count is reached.
    pub w_pr: Option<Weight>,
    pub w_first_capped: Option<Rational>,
    pub w_second_capped: Option<Rational>,
    pub w_third_capped: Option<Rational>,
    pub w_pr_capped: Option<Rational>,
    /// Mean of the first up-to-three breakpoints.
    pub avg3: Option<Weight>,
    pub avg3_capped: Option<Rational>,
    pub avg3_count: usize,
}

fn cap_weight(w: &Weight, cap: &Rational) -> Rational {
    match w {
        Weight::Finite(v) => v.clone().min(cap.clone()),
        Weight::Infinity => cap.clone(),
    }
}

fn mean_weight(values: &[Weight]) -> Option<Weight> {
    if values.is_empty() {
        return None;
    }
    if values.iter().any(|w| !w.is_finite()) {
        return Some(Weight::Infinity);
    }
    let sum: Rational = values.iter().map(|w| w.as_finite().unwrap().clone()).sum();
    Some(Weight::Finite(sum / ratio(values.len() as i64, 1)))
}

/// Reads the implied weights off a state-year's seat schedule, capping
/// each at `cap` for the capped columns.
pub fn implied_weights(syp: &StateYearProfile, cap: &Rational) -> Result<ImpliedWeights> {
    let p = &syp.profile;
    let schedule = seat_schedule(p)?;
    let a = p.aggregate();
    let s_f = Rational::from_integer((schedule.start as i64).into());
    let overrep_party = match s_f.cmp(a) {
        std::cmp::Ordering::Greater => Some('R'),
        std::cmp::Ordering::Less => Some('D'),
        std::cmp::Ordering::Equal => None,
    };
    let breakpoints = schedule.breakpoints();
    let first_three: Vec<Weight> = breakpoints.iter().take(3).cloned().collect();
    let avg3 = mean_weight(&first_three);
    let avg3_capped = if first_three.is_empty() {
        None
    } else {
        let sum: Rational = first_three.iter().map(|w| cap_weight(w, cap)).sum();
        Some(sum / ratio(first_three.len() as i64, 1))
    };
    let pick = |i: usize| breakpoints.get(i).cloned();
    let capped = |w: &Option<Weight>| w.as_ref().map(|w| cap_weight(w, cap));
    let (w_first, w_second, w_third) = (pick(0), pick(1), pick(2));
    let w_pr = breakpoints.last().cloned();
    Ok(ImpliedWeights {
        state: syp.state.clone(),
        year: syp.year,
        n_districts: p.len(),
        aggregate: a.clone(),
        s_fptp: schedule.start,
        s_pr: schedule.end,
        overrep_party,
        missing_point: breakpoints.is_empty(),
        w_first_capped: capped(&w_first),
        w_second_capped: capped(&w_second),
        w_third_capped: capped(&w_third),
        w_pr_capped: capped(&w_pr),
        w_first,
        w_second,
        w_third,
        w_pr,
        avg3_capped,
        avg3_count: first_three.len(),
        avg3,
    })
}

/// Report column order; one row per kept state-year.
pub const REPORT_COLUMNS: [&str; 19] = [
    "state",
    "year",
    "n_districts",
    "aggregate",
    "s_fptp",
    "s_pr",
    "overrep_party",
    "missing_point",
    "w_first",
    "w_first_capped",
    "w_second",
    "w_second_capped",
    "w_third",
    "w_third_capped",
    "w_pr",
    "w_pr_capped",
    "avg3",
    "avg3_capped",
    "avg3_count",
];

fn weight_field(w: &Option<Weight>) -> String {
    match w {
        None => String::new(),
        Some(Weight::Finite(v)) => format_ratio(v),
        Some(Weight::Infinity) => "inf".into(),
    }
}

fn ratio_field(v: &Option<Rational>) -> String {
    v.as_ref().map(format_ratio).unwrap_or_default()
}

impl ImpliedWeights {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.state.clone(),
            self.year.to_string(),
            self.n_districts.to_string(),
            format_ratio(&self.aggregate),
            self.s_fptp.to_string(),
            self.s_pr.to_string(),
            self.overrep_party.map(String::from).unwrap_or_default(),
            self.missing_point.to_string(),
            weight_field(&self.w_first),
            ratio_field(&self.w_first_capped),
            weight_field(&self.w_second),
            ratio_field(&self.w_second_capped),
            weight_field(&self.w_third),
            ratio_field(&self.w_third_capped),
            weight_field(&self.w_pr),
            ratio_field(&self.w_pr_capped),
            weight_field(&self.avg3),
            ratio_field(&self.avg3_capped),
            self.avg3_count.to_string(),
        ]
    }
}

/// Writes the report CSV with the frozen column set, in input order.
pub fn write_report(rows: &[ImpliedWeights], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    writer.write_record(REPORT_COLUMNS)?;
    for row in rows {
        writer.write_record(row.to_record())?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the exclusion log as pretty-printed JSON.
pub fn write_exclusions(exclusions: &[Exclusion], path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(exclusions)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
