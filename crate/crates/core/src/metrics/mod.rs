//! Compilation/validation rates, round attribution, sweeps, reports and
//! fine-tuning export.

mod finetune;
mod report;
mod sweep;

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::agents::{PipelineOutcome, StageRound};
use crate::api::Direction;

pub use finetune::{export_finetune, write_finetune, FinetuneExport, FinetuneOptions, FinetuneRecord, FINETUNE_SCHEMA};
pub use report::{emit_report, parse_csv_report, write_reports, CsvRow, ReportFormat};
pub use sweep::{run_sweep, GridPoint, PointResult, Provenance, RunManifest, SweepSpec, MANIFEST_FILE};

/// Exact rate; `None` when every task was skipped.
pub type Rate = Option<Ratio<u64>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionStats {
    pub direction: Direction,
    pub n_tasks: u64,
    pub n_compiled: u64,
    pub n_validated: u64,
    pub n_skipped: u64,
    /// `n_compiled / (n_tasks - n_skipped)`.
    pub compilation_rate: Rate,
    /// `n_validated / (n_tasks - n_skipped)`.
    pub validation_rate: Rate,
    /// `n_validated / n_compiled`, the alternative denominator.
    pub validated_of_compiled: Rate,
    pub round_attribution: BTreeMap<StageRound, u64>,
}

impl DirectionStats {
    pub fn attempted(&self) -> u64 {
        self.n_tasks - self.n_skipped
    }
}

fn rate(num: u64, den: u64) -> Rate {
    (den > 0).then(|| Ratio::new(num, den))
}

/// Decimal rendering with three places; `n/a` for an undefined rate.
pub fn format_rate(r: &Rate) -> String {
    match r {
        Some(r) => format!("{:.3}", *r.numer() as f64 / *r.denom() as f64),
        None => "n/a".into(),
    }
}

/// Per-direction statistics over sealed outcomes. Skipped tasks are counted
/// but excluded from the rate denominators.
pub fn aggregate(outcomes: &[PipelineOutcome]) -> BTreeMap<Direction, DirectionStats> {
    let mut grouped: BTreeMap<Direction, Vec<&PipelineOutcome>> = BTreeMap::new();
    for o in outcomes {
        grouped.entry(o.direction).or_default().push(o);
    }
    grouped.into_iter().map(|(d, os)| (d, stats_for(d, &os))).collect()
}

/// [`aggregate`], plus a warning for each expected direction without outcomes.
pub fn aggregate_expecting(
    outcomes: &[PipelineOutcome],
    expected: &[Direction],
) -> (BTreeMap<Direction, DirectionStats>, Vec<String>) {
    let stats = aggregate(outcomes);
    let warnings = expected
        .iter()
        .filter(|d| !stats.contains_key(d))
        .map(|d| {
            let msg = format!("{d}: no outcomes; statistics omitted");
            tracing::warn!("{msg}");
            msg
        })
        .collect();
    (stats, warnings)
}

/// Statistics grouped by benchmark category (`uncategorized` when absent).
pub fn aggregate_by_category(outcomes: &[PipelineOutcome]) -> BTreeMap<String, BTreeMap<Direction, DirectionStats>> {
    let mut grouped: BTreeMap<String, Vec<PipelineOutcome>> = BTreeMap::new();
    for o in outcomes {
        let key = o.category.clone().unwrap_or_else(|| "uncategorized".into());
        grouped.entry(key).or_default().push(o.clone());
    }
    grouped.into_iter().map(|(k, os)| (k, aggregate(&os))).collect()
}

fn stats_for(direction: Direction, outcomes: &[&PipelineOutcome]) -> DirectionStats {
    let n_tasks = outcomes.len() as u64;
    let counted: Vec<&&PipelineOutcome> = outcomes.iter().filter(|o| !o.is_skipped()).collect();
    let n_skipped = n_tasks - counted.len() as u64;
    let n_compiled = counted.iter().filter(|o| o.compiled).count() as u64;
    let n_validated = counted.iter().filter(|o| o.compiled && o.validated).count() as u64;
    let attempted = n_tasks - n_skipped;
    DirectionStats {
        direction,
        n_tasks,
        n_compiled,
        n_validated,
        n_skipped,
        compilation_rate: rate(n_compiled, attempted),
        validation_rate: rate(n_validated, attempted),
        validated_of_compiled: rate(n_validated, n_compiled),
        round_attribution: attribute_rounds(counted.into_iter().copied()).cells,
    }
}

/// Compile successes by the stage and round at which they first compiled.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributionTable {
    pub cells: BTreeMap<StageRound, u64>,
    pub n_compiled: u64,
}

impl AttributionTable {
    pub fn get(&self, stage_round: StageRound) -> u64 {
        self.cells.get(&stage_round).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }
}

/// Counts each compiled, non-skipped outcome once, at its `success_stage`.
pub fn attribute_rounds<'a, I>(outcomes: I) -> AttributionTable
where
    I: IntoIterator<Item = &'a PipelineOutcome>,
{
    let mut table = AttributionTable::default();
    for o in outcomes {
        if o.is_skipped() || !o.compiled {
            continue;
        }
        if let Some(sr) = o.success_stage {
            *table.cells.entry(sr).or_default() += 1;
            table.n_compiled += 1;
        }
    }
    table
}
