use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{aggregate, attribute_rounds, AttributionTable, DirectionStats};
use crate::agents::{run_batch, PipelineConfig, PipelineContext, PipelineOutcome};
use crate::api::Direction;
use crate::prompting::TranslationTask;
use crate::util::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Decoding grid. `top_p` is held fixed while temperature and max tokens vary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub temperatures: Vec<f64>,
    pub max_tokens: Vec<usize>,
    pub top_p: f64,
    pub shots: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            temperatures: vec![0.2, 0.6, 0.9],
            max_tokens: vec![5000, 10_000, 15_000],
            top_p: 0.8,
            shots: vec![0, 1, 2, 3],
        }
    }
}

impl SweepSpec {
    /// Distinct grid points in canonical order (shots, temperature, max tokens).
    pub fn points(&self) -> Vec<GridPoint> {
        let mut points = Vec::new();
        for &shots in &self.shots {
            for &temperature in &self.temperatures {
                for &max_tokens in &self.max_tokens {
                    points.push(GridPoint { temperature, max_tokens, top_p: self.top_p, shots });
                }
            }
        }
        points.sort_by(GridPoint::canonical_cmp);
        points.dedup();
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub temperature: f64,
    pub max_tokens: usize,
    pub top_p: f64,
    pub shots: usize,
}

impl GridPoint {
    pub fn of(config: &PipelineConfig) -> Self {
        GridPoint {
            temperature: config.gen.temperature,
            max_tokens: config.gen.max_tokens,
            top_p: config.gen.top_p,
            shots: config.shots,
        }
    }

    /// Directory name of the point's run.
    pub fn id(&self) -> String {
        format!("s{}_t{}_m{}_p{}", self.shots, self.temperature, self.max_tokens, self.top_p)
    }

    pub fn canonical_cmp(a: &Self, b: &Self) -> std::cmp::Ordering {
        a.shots
            .cmp(&b.shots)
            .then(a.temperature.total_cmp(&b.temperature))
            .then(a.max_tokens.cmp(&b.max_tokens))
            .then(a.top_p.total_cmp(&b.top_p))
    }

    pub fn apply(&self, base: &PipelineConfig) -> PipelineConfig {
        let mut c = base.clone();
        c.gen.temperature = self.temperature;
        c.gen.max_tokens = self.max_tokens;
        c.gen.top_p = self.top_p;
        c.shots = self.shots;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub point: GridPoint,
    /// Relative to the manifest's directory.
    pub run_dir: String,
    pub n_outcomes: usize,
    pub stats: BTreeMap<Direction, DirectionStats>,
    pub attribution: AttributionTable,
}

impl PointResult {
    pub fn from_outcomes(point: GridPoint, run_dir: String, outcomes: &[PipelineOutcome]) -> Self {
        PointResult {
            point,
            run_dir,
            n_outcomes: outcomes.len(),
            stats: aggregate(outcomes),
            attribution: attribute_rounds(outcomes),
        }
    }
}

/// Tool and environment facts recorded with a run.
pub type Provenance = BTreeMap<String, String>;

/// Self-describing record of a run or sweep. Holds no timestamps, so the
/// same inputs give the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config: serde_json::Value,
    pub provenance: Provenance,
    pub points: Vec<PointResult>,
}

impl RunManifest {
    pub fn new(run_id: impl Into<String>, config: serde_json::Value, provenance: Provenance) -> Self {
        RunManifest { run_id: run_id.into(), config, provenance, points: Vec::new() }
    }

    pub fn sort_points(&mut self) {
        self.points.sort_by(|a, b| GridPoint::canonical_cmp(&a.point, &b.point));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join(MANIFEST_FILE), self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        serde_json::from_str(&std::fs::read_to_string(path)?).map_err(std::io::Error::other)
    }
}

/// One batch per grid point, each in `<run_root>/<point id>/`. Finished
/// points are reloaded from their sealed outcomes.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    spec: &SweepSpec,
    tasks: &[TranslationTask],
    base: &PipelineConfig,
    ctx: &PipelineContext,
    parallelism: usize,
    run_id: &str,
    config_snapshot: serde_json::Value,
    provenance: Provenance,
) -> std::io::Result<RunManifest> {
    let mut manifest = RunManifest::new(run_id, config_snapshot, provenance);
    for point in spec.points() {
        let mut point_ctx = ctx.clone();
        point_ctx.run_root = ctx.run_root.join(point.id());
        let outcomes = run_batch(tasks, &point.apply(base), &point_ctx, parallelism)?;
        manifest.points.push(PointResult::from_outcomes(point, point.id(), &outcomes));
    }
    manifest.sort_points();
    manifest.write(&ctx.run_root)?;
    Ok(manifest)
}
