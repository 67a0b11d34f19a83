//! Batch pipeline from raw race returns to implied-weight readings.
//!
//! Input is one or more CSV files of congressional race returns plus a
//! presidential baseline table used to impute uncontested districts.
//! Cleaning merges fusion ballot lines, resolves each district to a
//! Party A (Republican) two-party share, filters state-years that cannot
//! support the analysis, and reads the implied objective weights off
//! each surviving state-year's seat schedule. Outputs are deterministic:
//! rows are ordered by state and year and values are exact rationals, so
//! reruns are byte-identical.

pub mod clean;
pub mod weights;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::Rational;
use crate::ratio::ratio;

pub use clean::{
    build_baseline_table, classify_districts, clean_races, read_baseline_csv, read_race_csv,
    BaselineEntry, BaselineRow, BaselineTable, CleanedRaces, DistrictClass, DistrictKey, PartyTag,
    RaceLine, RaceRow,
};
pub use weights::{
    filter_state_year, implied_weights, write_exclusions, write_report, Exclusion, FilterConfig,
    ImpliedWeights, StateYearProfile, REPORT_COLUMNS,
};

/// Settings for a batch run.
#[derive(Clone, Debug)]
pub struct EmpiricsConfig {
    pub filter: FilterConfig,
    /// Cap applied to the `*_capped` report columns.
    pub cap: Rational,
}

impl Default for EmpiricsConfig {
    fn default() -> Self {
        EmpiricsConfig {
            filter: FilterConfig::default(),
            cap: ratio(3, 5),
        }
    }
}

/// What a batch run produced and where.
#[derive(Clone, Debug)]
pub struct BatchSummary {
    pub state_years: usize,
    pub excluded: usize,
    pub report_path: PathBuf,
    pub exclusions_path: PathBuf,
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Data(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Data(format!(
            "{}: no CSV files found",
            dir.display()
        )));
    }
    Ok(files)
}

/// Runs the full pipeline: reads every race CSV under `input_dir` and
/// every baseline CSV under `baseline_dir`, writes the implied-weight
/// report to `output_path`, and writes the exclusion log next to it with
/// an `exclusions.json` extension.
pub fn batch_run(
    input_dir: &Path,
    baseline_dir: &Path,
    output_path: &Path,
    config: &EmpiricsConfig,
) -> Result<BatchSummary> {
    let mut race_rows = Vec::new();
    for path in csv_files(input_dir)? {
        race_rows.extend(read_race_csv(&path)?);
    }
    let mut baseline_rows = Vec::new();
    for path in csv_files(baseline_dir)? {
        baseline_rows.extend(read_baseline_csv(&path)?);
    }
    let cleaned = clean_races(race_rows)?;
    let baseline = build_baseline_table(baseline_rows)?;
    let classes = classify_districts(&cleaned, &baseline);
    let (kept, excluded) = filter_state_year(&classes, &config.filter)?;
    let rows = kept
        .iter()
        .map(|syp| implied_weights(syp, &config.cap))
        .collect::<Result<Vec<_>>>()?;
    write_report(&rows, output_path)?;
    let exclusions_path = output_path.with_extension("exclusions.json");
    write_exclusions(&excluded, &exclusions_path)?;
    Ok(BatchSummary {
        state_years: rows.len(),
        excluded: excluded.len(),
        report_path: output_path.to_path_buf(),
        exclusions_path,
    })
}
