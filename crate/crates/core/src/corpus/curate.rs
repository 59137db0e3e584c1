use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_tuples, prune_by_tokens, scan_benchmarks, strip_comments, BenchmarkSource, CorpusError, KernelTuple,
    ScanConfig, ScanReport, TokenCounter, TupleReport, Verification, DEFAULT_TOKEN_CUTOFF,
};
use crate::api::Api;
use crate::toolchain::{CompileStatus, DetectorConfig, Toolchain, Verdict};
use crate::util::write_atomic;

/// Name of the per-source index written next to the corpus files.
pub const CORPUS_INDEX: &str = "corpus.jsonl";
const REPORT_FILE: &str = "curate_report.json";

#[derive(Debug, Clone)]
pub struct CurateOptions {
    pub root: PathBuf,
    pub apis: BTreeSet<Api>,
    pub scan: ScanConfig,
    pub counter: TokenCounter,
    pub cutoff: usize,
    pub derive_serial: bool,
    pub verify: bool,
    pub verify_timeout: Duration,
    /// Scratch directory for verification builds; a temporary one is used when unset.
    pub workspace: Option<PathBuf>,
    pub categories: BTreeMap<String, String>,
    pub parallelism: usize,
}

impl CurateOptions {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CurateOptions {
            root: root.into(),
            apis: [Api::OpenMP, Api::Cuda].into_iter().collect(),
            scan: ScanConfig::default(),
            counter: TokenCounter::Approx,
            cutoff: DEFAULT_TOKEN_CUTOFF,
            derive_serial: true,
            verify: false,
            verify_timeout: Duration::from_secs(300),
            workspace: None,
            categories: BTreeMap::new(),
            parallelism: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub benchmark_id: String,
    pub api: Api,
    /// `compile` or `run`.
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedSource {
    pub benchmark_id: String,
    pub api: Api,
    pub token_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurateReport {
    pub counter: String,
    pub cutoff: usize,
    pub scanned: usize,
    pub scan: ScanReport,
    /// Sources whose comments could not be stripped.
    pub lex_errors: Vec<String>,
    pub pruned: Vec<PrunedSource>,
    pub tuples: TupleReport,
    pub verify_failures: Vec<VerifyFailure>,
    /// Tuples removed because verification left them without an OpenMP or
    /// CUDA member, or because their derived Serial member failed.
    pub dropped_after_verify: Vec<String>,
    pub warnings: Vec<String>,
}

/// Compiles and runs one source, returning `Unverified` when no compiler is
/// available for its API.
pub fn verify_kernel(
    source: &BenchmarkSource,
    toolchain: &dyn Toolchain,
    workspace: &Path,
    detector: &DetectorConfig,
    timeout: Duration,
) -> (Verification, Option<VerifyFailure>) {
    let fail = |stage: &str, detail: String| {
        Some(VerifyFailure {
            benchmark_id: source.benchmark_id.clone(),
            api: source.api,
            stage: stage.into(),
            detail,
        })
    };
    let compiled = toolchain.compile(&source.source_text, source.api, workspace);
    match compiled.status {
        CompileStatus::ToolchainMissing => return (Verification::Unverified, None),
        CompileStatus::Failed => return (Verification::Failed, fail("compile", compiled.diagnostics)),
        CompileStatus::Ok => {}
    }
    let detector = match detector.for_benchmark(&source.benchmark_id) {
        Ok(d) => d,
        Err(e) => return (Verification::Failed, fail("run", format!("bad detector pattern: {e}"))),
    };
    let artifact = compiled.artifact_path.expect("ok compile has an artifact");
    let run = toolchain.run(&artifact, source.api, timeout, &[], &detector);
    if run.verdict == Verdict::Pass {
        (Verification::Passed, None)
    } else {
        (Verification::Failed, fail("run", run.feedback()))
    }
}

/// Scan, strip comments, count, prune, build tuples and (optionally) verify.
pub fn curate(
    options: &CurateOptions,
    toolchain: Option<&dyn Toolchain>,
    detector: &DetectorConfig,
) -> Result<(Vec<KernelTuple>, CurateReport), CorpusError> {
    let (sources, scan) = scan_benchmarks(&options.root, &options.apis, &options.scan)?;
    let mut report = CurateReport {
        counter: options.counter.name().into(),
        cutoff: options.cutoff,
        scanned: sources.len(),
        scan,
        ..Default::default()
    };

    let mut stripped = Vec::with_capacity(sources.len());
    for mut source in sources {
        match strip_comments(&source.source_text) {
            Ok(text) => {
                source.token_count = options.counter.count(&text);
                source.source_text = text;
                stripped.push(source);
            }
            Err(e) => report
                .lex_errors
                .push(format!("{} ({}): {e}", source.main_file_path.display(), source.api)),
        }
    }

    let pruned = prune_by_tokens(stripped, options.cutoff);
    report.pruned = pruned
        .dropped
        .iter()
        .map(|s| PrunedSource { benchmark_id: s.benchmark_id.clone(), api: s.api, token_count: s.token_count })
        .collect();

    let (mut tuples, tuple_report) =
        build_tuples(pruned.kept, options.derive_serial, &options.counter, &options.categories)?;
    let derived: BTreeSet<String> = tuple_report.derived_serial.iter().cloned().collect();
    report.tuples = tuple_report;

    if options.verify {
        match toolchain {
            Some(tc) => verify_tuples(&mut tuples, &derived, tc, detector, options, &mut report)?,
            None => report.warnings.push("verification requested but no toolchain given".into()),
        }
    }
    Ok((tuples, report))
}

fn verify_tuples(
    tuples: &mut Vec<KernelTuple>,
    derived: &BTreeSet<String>,
    toolchain: &dyn Toolchain,
    detector: &DetectorConfig,
    options: &CurateOptions,
    report: &mut CurateReport,
) -> Result<(), CorpusError> {
    let scratch_holder;
    let scratch = match &options.workspace {
        Some(dir) => dir.clone(),
        None => {
            scratch_holder = tempfile::tempdir().map_err(|e| CorpusError::io(std::env::temp_dir(), e))?;
            scratch_holder.path().to_path_buf()
        }
    };

    let jobs: Vec<(usize, Api)> = tuples
        .iter()
        .enumerate()
        .flat_map(|(i, t)| t.members.keys().map(move |&api| (i, api)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<(Verification, Option<VerifyFailure>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, api)| {
                let source = &tuples[i].members[&api];
                let ws = scratch.join(&source.benchmark_id).join(api.slug());
                if let Err(e) = std::fs::create_dir_all(&ws) {
                    tracing::warn!("cannot create verification workspace {}: {e}", ws.display());
                    return (Verification::Unverified, None);
                }
                verify_kernel(source, toolchain, &ws, detector, options.verify_timeout)
            })
            .collect()
    });

    let mut missing: BTreeSet<Api> = BTreeSet::new();
    for (&(i, api), (verdict, failure)) in jobs.iter().zip(results) {
        if verdict == Verification::Unverified {
            missing.insert(api);
        }
        tuples[i].members.get_mut(&api).expect("member").verified = verdict;
        if let Some(f) = failure {
            report.verify_failures.push(f);
        }
    }
    for api in missing {
        report
            .warnings
            .push(format!("no usable {} toolchain; those sources stay unverified", api.display_name()));
    }

    tuples.retain_mut(|tuple| {
        let failed = |t: &KernelTuple, api| t.member(api).is_some_and(|m| m.verified == Verification::Failed);
        let serial_derived = derived.contains(&tuple.benchmark_id);
        if serial_derived && failed(tuple, Api::Serial) {
            report.dropped_after_verify.push(tuple.benchmark_id.clone());
            return false;
        }
        if failed(tuple, Api::OpenMP) && serial_derived {
            tuple.members.remove(&Api::Serial);
        }
        tuple.members.retain(|_, m| m.verified != Verification::Failed);
        let keep = tuple.members.contains_key(&Api::OpenMP) || tuple.members.contains_key(&Api::Cuda);
        if !keep {
            report.dropped_after_verify.push(tuple.benchmark_id.clone());
        }
        keep
    });
    Ok(())
}

/// One line of `corpus.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub api: Api,
    /// Relative to the corpus directory.
    pub path: PathBuf,
    pub token_count: usize,
    pub verified: Verification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

/// Writes `<out>/<id>/<serial|openmp|cuda>.<cpp|cu>`, the index and the report.
pub fn write_corpus(out: &Path, tuples: &[KernelTuple], report: &CurateReport) -> Result<(), CorpusError> {
    std::fs::create_dir_all(out).map_err(|e| CorpusError::io(out, e))?;
    let mut index = Vec::new();
    for tuple in tuples {
        for (api, source) in &tuple.members {
            let rel = PathBuf::from(&tuple.benchmark_id)
                .join(format!("{}.{}", api.corpus_stem(), api.file_extension()));
            let path = out.join(&rel);
            std::fs::create_dir_all(path.parent().expect("has parent")).map_err(|e| CorpusError::io(&path, e))?;
            std::fs::write(&path, &source.source_text).map_err(|e| CorpusError::io(&path, e))?;
            let record = CorpusRecord {
                id: tuple.benchmark_id.clone(),
                api: *api,
                path: rel,
                token_count: source.token_count,
                verified: source.verified,
                category: tuple.category.clone(),
            };
            writeln!(index, "{}", serde_json::to_string(&record).expect("serializes")).expect("vec write");
        }
    }
    let index_path = out.join(CORPUS_INDEX);
    write_atomic(&index_path, &index).map_err(|e| CorpusError::io(&index_path, e))?;
    let report_path = out.join(REPORT_FILE);
    let mut json = serde_json::to_string_pretty(report).expect("serializes");
    json.push('\n');
    write_atomic(&report_path, json.as_bytes()).map_err(|e| CorpusError::io(&report_path, e))
}

/// Reads a corpus directory written by [`write_corpus`].
pub fn load_corpus(dir: &Path) -> Result<Vec<KernelTuple>, CorpusError> {
    let index_path = dir.join(CORPUS_INDEX);
    let text = std::fs::read_to_string(&index_path).map_err(|e| CorpusError::io(&index_path, e))?;
    let mut tuples: BTreeMap<String, KernelTuple> = BTreeMap::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let record: CorpusRecord = serde_json::from_str(line).map_err(|e| CorpusError::Index {
            path: index_path.clone(),
            reason: format!("line {}: {e}", n + 1),
        })?;
        let path = dir.join(&record.path);
        let source_text = std::fs::read_to_string(&path).map_err(|e| CorpusError::io(&path, e))?;
        let tuple = tuples.entry(record.id.clone()).or_insert_with(|| KernelTuple {
            benchmark_id: record.id.clone(),
            members: BTreeMap::new(),
            category: record.category.clone(),
        });
        let source = BenchmarkSource {
            benchmark_id: record.id.clone(),
            api: record.api,
            main_file_path: record.path,
            source_text,
            token_count: record.token_count,
            verified: record.verified,
        };
        if let Some(prev) = tuple.members.insert(record.api, source) {
            return Err(CorpusError::DuplicateSource {
                benchmark_id: record.id,
                api: record.api,
                first: prev.main_file_path,
                second: tuple.members[&record.api].main_file_path.clone(),
            });
        }
    }
    Ok(tuples.into_values().collect())
}

/// Reads a category sidecar: either a JSON object `{id: category}` or
/// `id,category` lines.
pub fn load_categories(path: &Path) -> Result<BTreeMap<String, String>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    parse_categories(&text).map_err(|reason| CorpusError::Index { path: path.to_path_buf(), reason })
}

pub fn parse_categories(text: &str) -> Result<BTreeMap<String, String>, String> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| e.to_string());
    }
    let mut out = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (id, cat) = line.split_once(',').ok_or_else(|| format!("expected `id,category`, got `{line}`"))?;
        out.insert(id.trim().to_string(), cat.trim().to_string());
    }
    Ok(out)
}
