//! Byte-level entry points shared by the cargo-fuzz targets and the seed
//! replay test. Each one feeds arbitrary input to a parser or decoder and
//! panics only when a round-trip or consistency property breaks.

use std::path::Path;

use crate::config::{AppConfig, BackendSpec};
use crate::corpus::{derive_serial, parse_categories, strip_comments, SplitManifest, SplitRatio, Vocabulary};
use crate::lexer::tokenize;
use crate::llm::MockBackend;
use crate::metrics::parse_csv_report;
use crate::prompting::extract_code;
use crate::toolchain::{function_definitions, kernel_guard_check, transplant_main, KernelGuard};

/// Separates the two halves of a two-input target.
pub const SPLIT_MARKER: &str = "\n//----\n";

pub type Entry = fn(&[u8]);

pub const TARGETS: &[(&str, Entry)] = &[
    ("lexer", lexer),
    ("strip_comments", strip),
    ("derive_serial", serial),
    ("transplant_main", transplant),
    ("kernel_guard", guard),
    ("extract_code", extract),
    ("mock_script", mock_script),
    ("split_manifest", split_manifest),
    ("config", config),
    ("backend_spec", backend_spec),
    ("vocab", vocab),
    ("categories", categories),
    ("csv_report", csv_report),
];

fn text(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

fn halves(s: &str) -> (&str, &str) {
    s.split_once(SPLIT_MARKER).unwrap_or((s, ""))
}

pub fn lexer(data: &[u8]) {
    let Some(src) = text(data) else { return };
    if let Ok(tokens) = tokenize(src) {
        let rebuilt: String = tokens.iter().map(|t| t.text(src)).collect();
        assert_eq!(rebuilt, src, "tokens must cover the input exactly");
    }
}

pub fn strip(data: &[u8]) {
    let Some(src) = text(data) else { return };
    if let Ok(once) = strip_comments(src) {
        let twice = strip_comments(&once).expect("stripped output lexes");
        assert_eq!(twice, once, "stripping is idempotent");
    }
}

pub fn serial(data: &[u8]) {
    let Some(src) = text(data) else { return };
    let _ = derive_serial(src);
}

pub fn transplant(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let (generated, truth) = halves(s);
    let _ = transplant_main(generated, truth);
}

pub fn guard(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let (before, after) = halves(s);
    let _ = kernel_guard_check(before, after);
    if function_definitions(before).is_ok() {
        assert_eq!(kernel_guard_check(before, before), KernelGuard::Unchanged, "a scannable source matches itself");
    }
}

pub fn extract(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(code) = extract_code(s) {
        assert!(code.len() <= s.len());
    }
}

pub fn mock_script(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let _ = MockBackend::parse_jsonl(s);
}

pub fn split_manifest(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let _ = s.trim().parse::<SplitRatio>();
    if let Ok(m) = serde_json::from_str::<SplitManifest>(s) {
        let back: SplitManifest = serde_json::from_str(&m.to_json()).expect("re-serialized manifest parses");
        assert_eq!(back, m);
    }
}

pub fn config(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(c) = AppConfig::parse(s, Path::new("fuzz.toml")) {
        let back = AppConfig::parse(&c.to_toml(), Path::new("fuzz.toml")).expect("serialized config parses");
        assert_eq!(back, c);
    }
}

pub fn backend_spec(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let _ = BackendSpec::parse(s);
}

pub fn vocab(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let _ = Vocabulary::parse(s);
}

pub fn categories(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let _ = parse_categories(s);
}

pub fn csv_report(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let _ = parse_csv_report(s);
}
