//! Raw race returns: parsing, fusion handling, and district-level shares.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{Rational, Share};

/// One candidate line of a race returns file. Columns:
/// `state,year,district,candidate,party,votes,vote_class,fusion_group`.
#[derive(Clone, Debug, Deserialize)]
pub struct RaceRow {
    pub state: String,
    pub year: i32,
    pub district: String,
    pub candidate: String,
    pub party: String,
    pub votes: u64,
    /// Lines classed `blank_void_scatter` are dropped before any other
    /// processing.
    pub vote_class: String,
    /// Ballot lines sharing a nonempty group label are one fused
    /// candidacy.
    pub fusion_group: String,
}

/// One row of a presidential baseline file. Columns:
/// `state,map_id,district,pres_year,a_share`.
#[derive(Clone, Debug, Deserialize)]
pub struct BaselineRow {
    pub state: String,
    pub map_id: String,
    pub district: String,
    pub pres_year: i32,
    /// Party A's two-party share in the district, as a decimal or
    /// fraction.
    pub a_share: String,
}

/// Major-party tag; Party A is the Republican side throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PartyTag {
    Republican,
    Democratic,
    Other,
}

impl PartyTag {
    pub fn classify(party: &str) -> Self {
        match party.trim().to_ascii_lowercase().as_str() {
            "republican" | "rep" | "r" => PartyTag::Republican,
            "democratic" | "democrat" | "dem" | "d" => PartyTag::Democratic,
            _ => PartyTag::Other,
        }
    }

    pub fn is_major(self) -> bool {
        matches!(self, PartyTag::Republican | PartyTag::Democratic)
    }
}

/// `(state, year, district)`.
pub type DistrictKey = (String, i32, String);

/// A candidacy after cleaning: fusion lines are already merged.
#[derive(Clone, Debug)]
pub struct RaceLine {
    pub candidate: String,
    pub party: PartyTag,
    pub votes: u64,
}

/// Cleaned races grouped per district, in deterministic key order.
#[derive(Clone, Debug, Default)]
pub struct CleanedRaces {
    pub districts: BTreeMap<DistrictKey, Vec<RaceLine>>,
}

/// Reads one returns file, reporting the path in any error.
pub fn read_race_csv(path: &Path) -> Result<Vec<RaceRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .map(|row| row.map_err(|e| Error::Data(format!("{}: {e}", path.display()))))
        .collect()
}

/// Reads one baseline file, reporting the path in any error.
pub fn read_baseline_csv(path: &Path) -> Result<Vec<BaselineRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .map(|row| row.map_err(|e| Error::Data(format!("{}: {e}", path.display()))))
        .collect()
}

/// Drops scatter lines, rejects duplicate candidacies, merges fusion
/// groups, and groups the surviving lines per district.
///
/// A fusion group (same state, year, district, and nonempty group label)
/// must name exactly one major party; its lines collapse to a single
/// candidacy under that party with the votes summed. Groups without a
/// major party pass through line by line.
pub fn clean_races(rows: Vec<RaceRow>) -> Result<CleanedRaces> {
    let mut seen: BTreeSet<(String, i32, String, String, String)> = BTreeSet::new();
    let mut fused: BTreeMap<(DistrictKey, String), Vec<RaceRow>> = BTreeMap::new();
    let mut districts: BTreeMap<DistrictKey, Vec<RaceLine>> = BTreeMap::new();

    for row in rows {
        if row.vote_class == "blank_void_scatter" {
            continue;
        }
        let dup_key = (
            row.state.clone(),
            row.year,
            row.district.clone(),
            row.candidate.clone(),
            row.party.clone(),
        );
        if !seen.insert(dup_key) {
            return Err(Error::Data(format!(
                "duplicate line for {} {} district {}: {} ({})",
                row.state, row.year, row.district, row.candidate, row.party
            )));
        }
        let key = (row.state.clone(), row.year, row.district.clone());
        if row.fusion_group.is_empty() {
            districts.entry(key).or_default().push(RaceLine {
                candidate: row.candidate.clone(),
                party: PartyTag::classify(&row.party),
                votes: row.votes,
            });
        } else {
            fused
                .entry((key, row.fusion_group.clone()))
                .or_default()
                .push(row);
        }
    }

    for ((key, group), lines) in fused {
        let mut majors: Vec<(PartyTag, &RaceRow)> = lines
            .iter()
            .map(|l| (PartyTag::classify(&l.party), l))
            .filter(|(tag, _)| tag.is_major())
            .collect();
        majors.dedup_by_key(|(tag, _)| *tag);
        match majors.as_slice() {
            [] => {
                for l in &lines {
                    districts.entry(key.clone()).or_default().push(RaceLine {
                        candidate: l.candidate.clone(),
                        party: PartyTag::classify(&l.party),
                        votes: l.votes,
                    });
                }
            }
            [(tag, anchor)] => {
                districts.entry(key.clone()).or_default().push(RaceLine {
                    candidate: anchor.candidate.clone(),
                    party: *tag,
                    votes: lines.iter().map(|l| l.votes).sum(),
                });
            }
            _ => {
                return Err(Error::Data(format!(
                    "fusion group {group} in {} {} district {} spans both major parties",
                    key.0, key.1, key.2
                )))
            }
        }
    }

    for lines in districts.values_mut() {
        lines.sort_by(|x, y| y.votes.cmp(&x.votes).then(x.candidate.cmp(&y.candidate)));
    }
    Ok(CleanedRaces { districts })
}

/// One baseline observation for a district.
#[derive(Clone, Debug)]
pub struct BaselineEntry {
    pub map_id: String,
    pub pres_year: i32,
    pub share: Share,
}

/// Baseline observations keyed by `(state, district)`.
#[derive(Clone, Debug, Default)]
pub struct BaselineTable {
    pub entries: BTreeMap<(String, String), Vec<BaselineEntry>>,
}

pub fn build_baseline_table(rows: Vec<BaselineRow>) -> Result<BaselineTable> {
    let mut entries: BTreeMap<(String, String), Vec<BaselineEntry>> = BTreeMap::new();
    for row in rows {
        let share = Share::parse(&row.a_share).map_err(|e| {
            Error::Data(format!(
                "baseline share for {} district {} ({}): {e}",
                row.state, row.district, row.pres_year
            ))
        })?;
        entries
            .entry((row.state, row.district))
            .or_default()
            .push(BaselineEntry {
                map_id: row.map_id,
                pres_year: row.pres_year,
                share,
            });
    }
    Ok(BaselineTable { entries })
}

impl BaselineTable {
    /// Imputed Party A share for an uncontested district: the baseline
    /// observation nearest in time; equidistant observations average when
    /// they come from the same district map and refuse otherwise.
    fn impute(&self, state: &str, district: &str, year: i32) -> std::result::Result<Share, String> {
        let Some(entries) = self.entries.get(&(state.to_string(), district.to_string())) else {
            return Err("no baseline share for this district".into());
        };
        let best = entries
            .iter()
            .map(|e| (e.pres_year - year).abs())
            .min()
            .unwrap();
        let nearest: Vec<&BaselineEntry> = entries
            .iter()
            .filter(|e| (e.pres_year - year).abs() == best)
            .collect();
        let maps: BTreeSet<&str> = nearest.iter().map(|e| e.map_id.as_str()).collect();
        if maps.len() > 1 {
            return Err("equidistant baseline years straddle a map change".into());
        }
        let sum: Rational = nearest.iter().map(|e| e.share.value().clone()).sum();
        let mean = sum / Rational::from_integer((nearest.len() as i64).into());
        Ok(Share::new(mean).expect("mean of shares stays in range"))
    }
}

/// A district's resolved Party A share and its cleaning flags.
#[derive(Clone, Debug)]
pub struct DistrictClass {
    pub state: String,
    pub year: i32,
    pub district: String,
    /// `None` when the district was uncontested and imputation failed;
    /// `issue` then explains why.
    pub share: Option<Share>,
    /// Fewer than two major parties fielded a candidacy.
    pub uncontested: bool,
    /// No major-party line, or a nonmajor line out-polled every major
    /// line (major wins ties).
    pub nonmajor_dominated: bool,
    pub issue: Option<String>,
}

/// Resolves each district to a Party A share: the two-party vote split
/// where both majors ran, and the nearest baseline share otherwise.
pub fn classify_districts(cleaned: &CleanedRaces, baseline: &BaselineTable) -> Vec<DistrictClass> {
    let mut out = Vec::with_capacity(cleaned.districts.len());
    for ((state, year, district), lines) in &cleaned.districts {
        let mut r_votes = 0u64;
        let mut d_votes = 0u64;
        let mut r_present = false;
        let mut d_present = false;
        let mut major_max = 0u64;
        let mut nonmajor_max = 0u64;
        for line in lines {
            match line.party {
                PartyTag::Republican => {
                    r_votes += line.votes;
                    r_present = true;
                    major_max = major_max.max(line.votes);
                }
                PartyTag::Democratic => {
                    d_votes += line.votes;
                    d_present = true;
                    major_max = major_max.max(line.votes);
                }
                PartyTag::Other => nonmajor_max = nonmajor_max.max(line.votes),
            }
        }
        let no_major = !r_present && !d_present;
        let nonmajor_dominated = no_major || nonmajor_max > major_max;
        let uncontested = !(r_present && d_present);
        let (share, issue) = if !uncontested && r_votes + d_votes > 0 {
            (
                Some(Share::from_votes(r_votes, r_votes + d_votes).expect("valid split")),
                None,
            )
        } else if !uncontested {
            (None, Some("no countable major-party votes".to_string()))
        } else {
            match baseline.impute(state, district, *year) {
                Ok(share) => (Some(share), None),
                Err(why) => (None, Some(why)),
            }
        };
        out.push(DistrictClass {
            state: state.clone(),
            year: *year,
            district: district.clone(),
            share,
            uncontested,
            nonmajor_dominated,
            issue,
        });
    }
    debug_assert!(out.iter().all(|c| c.share.is_some() || c.issue.is_some()));
    out
}
