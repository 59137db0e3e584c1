use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BenchmarkSource, CorpusError, Verification};
use crate::api::Api;

/// Directory layout rules for a benchmark tree (`<benchmark>-<suffix>/`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Directory-name suffix → API.
    pub suffixes: Vec<(String, Api)>,
    /// Basename stems of auxiliary files, compared case-insensitively.
    pub exclude_stems: Vec<String>,
    /// Extensions counted as source files. Headers are not sources.
    pub source_extensions: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            suffixes: vec![("-cuda".into(), Api::Cuda), ("-omp".into(), Api::OpenMP)],
            exclude_stems: vec!["utils".into(), "reference".into()],
            source_extensions: ["c", "cc", "cpp", "cxx", "cu"].map(String::from).to_vec(),
        }
    }
}

impl ScanConfig {
    fn classify(&self, dir_name: &str) -> Option<(String, Api)> {
        self.suffixes
            .iter()
            .filter(|(suffix, _)| dir_name.len() > suffix.len() && dir_name.ends_with(suffix.as_str()))
            .max_by_key(|(suffix, _)| suffix.len())
            .map(|(suffix, api)| (dir_name[..dir_name.len() - suffix.len()].to_string(), *api))
    }

    fn is_source(&self, path: &Path) -> bool {
        path.extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| self.source_extensions.iter().any(|s| s.eq_ignore_ascii_case(e)))
    }

    fn is_excluded(&self, path: &Path) -> bool {
        path.file_stem()
            .and_then(|s| s.to_str())
            .is_some_and(|stem| self.exclude_stems.iter().any(|x| x.eq_ignore_ascii_case(stem)))
    }
}

/// A benchmark directory whose primary-logic file could not be identified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub dir: PathBuf,
    pub reason: String,
    pub candidates: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub skipped: Vec<SkipRecord>,
    pub warnings: Vec<String>,
}

/// Collects one source per benchmark directory whose primary file is
/// unambiguous: the only source file, or the only one left after removing
/// auxiliary stems (`utils`, `reference` by default).
///
/// Output is sorted by `(benchmark_id, api)`. `token_count` is the approximate
/// count of the raw text; it is recomputed after preprocessing.
pub fn scan_benchmarks(
    root: &Path,
    apis: &BTreeSet<Api>,
    config: &ScanConfig,
) -> Result<(Vec<BenchmarkSource>, ScanReport), CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::RootMissing(root.to_path_buf()));
    }
    let mut report = ScanReport::default();
    let mut sources = Vec::new();

    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .map_err(|e| CorpusError::io(root, e))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    for dir in dirs {
        let Some(name) = dir.file_name().and_then(|n| n.to_str()) else {
            report.warnings.push(format!("{}: non UTF-8 directory name", dir.display()));
            continue;
        };
        let Some((benchmark_id, api)) = config.classify(name) else {
            continue;
        };
        if !apis.contains(&api) {
            continue;
        }
        let rel_dir = PathBuf::from(name);

        let mut files: Vec<PathBuf> = match std::fs::read_dir(&dir) {
            Ok(rd) => rd
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| p.is_file() && config.is_source(p))
                .collect(),
            Err(e) => {
                report.warnings.push(format!("{}: {e}", dir.display()));
                continue;
            }
        };
        files.sort();
        let rel = |p: &Path| rel_dir.join(p.file_name().expect("file"));

        let chosen = match files.len() {
            0 => None,
            1 => Some(files[0].clone()),
            _ => {
                let remaining: Vec<&PathBuf> = files.iter().filter(|p| !config.is_excluded(p)).collect();
                (remaining.len() == 1).then(|| remaining[0].clone())
            }
        };
        let Some(path) = chosen else {
            report.skipped.push(SkipRecord {
                dir: rel_dir.clone(),
                reason: if files.is_empty() {
                    "no source files".into()
                } else {
                    "multiple candidate source files".into()
                },
                candidates: files.iter().map(|p| rel(p)).collect(),
            });
            continue;
        };

        let text = match std::fs::read(&path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(t) => t,
                Err(_) => {
                    report.warnings.push(format!("{}: not valid UTF-8, skipped", rel(&path).display()));
                    continue;
                }
            },
            Err(e) => {
                report.warnings.push(format!("{}: unreadable ({e}), skipped", rel(&path).display()));
                continue;
            }
        };
        sources.push(BenchmarkSource {
            benchmark_id,
            api,
            main_file_path: rel(&path),
            token_count: text.len().div_ceil(4),
            source_text: text,
            verified: Verification::Unverified,
        });
    }
    sources.sort_by(|a, b| (&a.benchmark_id, a.api).cmp(&(&b.benchmark_id, b.api)));
    Ok((sources, report))
}
