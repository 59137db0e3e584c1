//! Aligned cross-paradigm kernel corpus: scanning a benchmark tree,
//! preprocessing, serial derivation, pruning, verification and splitting.

mod curate;
mod scan;
mod serial;
mod split;
mod strip;
mod tokens;
mod tuples;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::api::Api;

pub use curate::{
    curate, load_categories, load_corpus, parse_categories, verify_kernel, write_corpus, CorpusRecord, CurateOptions,
    CurateReport, PrunedSource, VerifyFailure, CORPUS_INDEX,
};
pub use scan::{scan_benchmarks, ScanConfig, ScanReport, SkipRecord};
pub use serial::{derive_serial, SerialDerivation};
pub use split::{directions_of, split_corpus, tasks_for, SplitManifest, SplitRatio, SplitTask};
pub use strip::strip_comments;
pub use tokens::{count_tokens, prune_by_tokens, PruneResult, TokenCounter, Vocabulary};
pub use tuples::{build_tuples, TupleReport};

/// Default token cutoff; sources above it are excluded.
pub const DEFAULT_TOKEN_CUTOFF: usize = 7500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verification {
    #[default]
    Unverified,
    Passed,
    Failed,
}

/// One benchmark implementation in one API.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkSource {
    pub benchmark_id: String,
    pub api: Api,
    /// Path of the primary-logic file relative to the scanned root.
    pub main_file_path: PathBuf,
    pub source_text: String,
    pub token_count: usize,
    pub verified: Verification,
}

/// A benchmark's aligned implementations across APIs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelTuple {
    pub benchmark_id: String,
    pub members: BTreeMap<Api, BenchmarkSource>,
    pub category: Option<String>,
}

impl KernelTuple {
    pub fn member(&self, api: Api) -> Option<&BenchmarkSource> {
        self.members.get(&api)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("benchmark root {0} does not exist or is not a directory")]
    RootMissing(PathBuf),
    #[error("{0}")]
    Lex(#[from] crate::lexer::LexError),
    #[error(
        "token vocabulary file {path} not found; pass --vocab <file> or use --counter approx"
    )]
    VocabularyMissing { path: PathBuf },
    #[error("cannot parse vocabulary {path}: {reason}")]
    VocabularyInvalid { path: PathBuf, reason: String },
    #[error("duplicate {api} implementation of `{benchmark_id}`: {first} and {second}")]
    DuplicateSource {
        benchmark_id: String,
        api: Api,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("invalid split ratio `{0}`")]
    InvalidRatio(String),
    #[error("corpus index {path}: {reason}")]
    Index { path: PathBuf, reason: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.into(), source }
    }
}
