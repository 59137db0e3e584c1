use std::collections::BTreeMap;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

/// Regex patterns deciding whether a program's output reports success.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorPatterns {
    pub pass: Vec<String>,
    pub fail: Vec<String>,
}

impl Default for DetectorPatterns {
    fn default() -> Self {
        DetectorPatterns {
            pass: vec!["PASS".into(), r"Verification\s*:?\s*(pass|passed|success)".into()],
            fail: vec!["FAIL".into(), "error".into()],
        }
    }
}

/// Compiled, case-insensitive pass/fail detector.
///
/// Output passes when at least one `pass` pattern matches and no `fail`
/// pattern does. stdout and stderr are both searched.
#[derive(Debug, Clone)]
pub struct PassDetector {
    pass: Vec<Regex>,
    fail: Vec<Regex>,
}

impl PassDetector {
    pub fn new(patterns: &DetectorPatterns) -> Result<Self, regex::Error> {
        let compile = |ps: &[String]| -> Result<Vec<Regex>, regex::Error> {
            ps.iter().map(|p| RegexBuilder::new(p).case_insensitive(true).build()).collect()
        };
        Ok(PassDetector { pass: compile(&patterns.pass)?, fail: compile(&patterns.fail)? })
    }

    pub fn matches(&self, stdout: &str, stderr: &str) -> bool {
        let hit = |rs: &[Regex]| rs.iter().any(|r| r.is_match(stdout) || r.is_match(stderr));
        hit(&self.pass) && !hit(&self.fail)
    }
}

impl Default for PassDetector {
    fn default() -> Self {
        PassDetector::new(&DetectorPatterns::default()).expect("default patterns compile")
    }
}

/// Default detector plus per-benchmark overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorConfig {
    pub default: DetectorPatterns,
    pub overrides: BTreeMap<String, DetectorPatterns>,
}

impl DetectorConfig {
    pub fn for_benchmark(&self, benchmark_id: &str) -> Result<PassDetector, regex::Error> {
        PassDetector::new(self.overrides.get(benchmark_id).unwrap_or(&self.default))
    }
}
