use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use super::{BenchmarkSource, CorpusError};

/// How source length is measured in tokens.
#[derive(Debug, Clone, Default)]
pub enum TokenCounter {
    /// `ceil(bytes / 4)`; hermetic and model-agnostic.
    #[default]
    Approx,
    /// Greedy longest-match segmentation against a tokenizer vocabulary.
    Vocab(Arc<Vocabulary>),
}

impl TokenCounter {
    pub fn count(&self, text: &str) -> usize {
        count_tokens(text, self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            TokenCounter::Approx => "approx",
            TokenCounter::Vocab(_) => "vocab",
        }
    }
}

pub fn count_tokens(text: &str, counter: &TokenCounter) -> usize {
    match counter {
        TokenCounter::Approx => text.len().div_ceil(4),
        TokenCounter::Vocab(v) => v.count(text.as_bytes()),
    }
}

/// A set of byte strings that are single tokens.
///
/// Accepted files: a JSON object mapping tokens to ids (plain or inside a
/// `tokenizer.json` under `model.vocab`), whose byte-level symbols such as
/// `Ġ` are decoded back to raw bytes; or plain text with one token per line.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: HashSet<Vec<u8>>,
    max_len: usize,
}

impl Vocabulary {
    pub fn from_tokens<I, T>(tokens: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<Vec<u8>>,
    {
        let tokens: HashSet<Vec<u8>> =
            tokens.into_iter().map(Into::into).filter(|t: &Vec<u8>| !t.is_empty()).collect();
        let max_len = tokens.iter().map(Vec::len).max().unwrap_or(0);
        Vocabulary { tokens, max_len }
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        if !path.is_file() {
            return Err(CorpusError::VocabularyMissing { path: path.to_path_buf() });
        }
        let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        Self::parse(&text).map_err(|reason| CorpusError::VocabularyInvalid {
            path: PathBuf::from(path),
            reason,
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        if text.trim_start().starts_with('{') {
            let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
            let map = value
                .pointer("/model/vocab")
                .unwrap_or(&value)
                .as_object()
                .ok_or("expected a JSON object of token -> id")?;
            let decode = byte_level_decoder();
            Ok(Self::from_tokens(map.keys().map(|k| {
                k.chars()
                    .map(|c| decode(c))
                    .collect::<Option<Vec<u8>>>()
                    .unwrap_or_else(|| k.as_bytes().to_vec())
            })))
        } else {
            Ok(Self::from_tokens(text.lines().map(|l| l.as_bytes().to_vec())))
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Greedy longest match; a byte with no matching token counts as one token.
    pub fn count(&self, bytes: &[u8]) -> usize {
        let mut pos = 0;
        let mut count = 0;
        while pos < bytes.len() {
            let longest = (1..=self.max_len.min(bytes.len() - pos))
                .rev()
                .find(|&n| self.tokens.contains(&bytes[pos..pos + n]))
                .unwrap_or(1);
            pos += longest;
            count += 1;
        }
        count
    }
}

/// Inverse of the GPT-2 byte-to-unicode table used by byte-level BPE vocabularies.
fn byte_level_decoder() -> impl Fn(char) -> Option<u8> {
    let mut table = std::collections::HashMap::new();
    let mut extra = 0u32;
    for b in 0u32..256 {
        let printable = (0x21..=0x7e).contains(&b) || (0xa1..=0xac).contains(&b) || (0xae..=0xff).contains(&b);
        let c = if printable {
            b
        } else {
            extra += 1;
            255 + extra
        };
        table.insert(char::from_u32(c).expect("valid"), b as u8);
    }
    move |c| table.get(&c).copied()
}

/// Partition of sources by token count.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PruneResult {
    pub kept: Vec<BenchmarkSource>,
    pub dropped: Vec<BenchmarkSource>,
}

/// Keeps sources whose `token_count <= cutoff`; the boundary is inclusive.
pub fn prune_by_tokens(sources: Vec<BenchmarkSource>, cutoff: usize) -> PruneResult {
    let (kept, dropped) = sources.into_iter().partition(|s| s.token_count <= cutoff);
    PruneResult { kept, dropped }
}
