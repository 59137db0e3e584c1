use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::api::Direction;
use crate::corpus::{KernelTuple, SplitManifest, SplitTask};
use crate::prompting::{ShotExample, TranslationTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Test,
}

fn entries(manifest: &SplitManifest, partition: Partition) -> &[SplitTask] {
    match partition {
        Partition::Train => &manifest.train,
        Partition::Test => &manifest.test,
    }
}

/// Tasks of one split partition, restricted to `directions` (all when
/// empty), in manifest order. Entries whose tuple lacks a needed member are
/// returned as warnings.
pub fn translation_tasks(
    tuples: &[KernelTuple],
    manifest: &SplitManifest,
    directions: &[Direction],
    partition: Partition,
) -> (Vec<TranslationTask>, Vec<String>) {
    let by_id: BTreeMap<&str, &KernelTuple> = tuples.iter().map(|t| (t.benchmark_id.as_str(), t)).collect();
    let mut tasks = Vec::new();
    let mut warnings = Vec::new();
    for entry in entries(manifest, partition) {
        if !directions.is_empty() && !directions.contains(&entry.direction) {
            continue;
        }
        let d = entry.direction;
        let pair = by_id
            .get(entry.benchmark_id.as_str())
            .and_then(|t| Some((t, t.member(d.from)?, t.member(d.to)?)));
        match pair {
            Some((tuple, from, to)) => tasks.push(TranslationTask {
                task_id: TranslationTask::make_id(&entry.benchmark_id, d),
                benchmark_id: entry.benchmark_id.clone(),
                direction: d,
                source_code: from.source_text.clone(),
                target_code: to.source_text.clone(),
                category: tuple.category.clone(),
            }),
            None => warnings.push(format!("{d}.{}: not present in corpus", entry.benchmark_id)),
        }
    }
    (tasks, warnings)
}

/// Shot examples from the train partition.
pub fn shot_pool(tuples: &[KernelTuple], manifest: &SplitManifest) -> Vec<ShotExample> {
    translation_tasks(tuples, manifest, &[], Partition::Train)
        .0
        .into_iter()
        .map(|t| ShotExample {
            from_api: t.direction.from,
            to_api: t.direction.to,
            from_code: t.source_code,
            to_code: t.target_code,
            benchmark_id: t.benchmark_id,
        })
        .collect()
}
