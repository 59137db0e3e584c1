use std::path::Path;

use rayon::prelude::*;

use super::{run_pipeline, PipelineConfig, PipelineContext, PipelineOutcome};
use crate::prompting::TranslationTask;
use crate::util::write_atomic;

/// Batch result file in the run root, one sealed outcome per line in task order.
pub const OUTCOMES_FILE: &str = "outcomes.jsonl";

/// Runs `tasks` on up to `parallelism` worker threads. Outcomes come back in
/// task order; tasks already sealed in the run directory are loaded, not rerun.
pub fn run_batch(
    tasks: &[TranslationTask],
    config: &PipelineConfig,
    ctx: &PipelineContext,
    parallelism: usize,
) -> std::io::Result<Vec<PipelineOutcome>> {
    std::fs::create_dir_all(&ctx.run_root)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(std::io::Error::other)?;
    let outcomes: Vec<PipelineOutcome> =
        pool.install(|| tasks.par_iter().map(|t| run_pipeline(t, config, ctx)).collect());

    let mut lines = String::new();
    for o in &outcomes {
        lines.push_str(&serde_json::to_string(o).expect("outcome serializes"));
        lines.push('\n');
    }
    write_atomic(&ctx.run_root.join(OUTCOMES_FILE), lines.as_bytes())?;
    Ok(outcomes)
}

pub fn load_outcomes(path: &Path) -> std::io::Result<Vec<PipelineOutcome>> {
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(std::io::Error::other))
        .collect()
}
