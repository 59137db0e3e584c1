//! Compiling, running and verifying candidate programs, plus the
//! ground-truth `main` transplant used for validation.

mod detector;
mod local;
mod repair;
mod transplant;

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::api::Api;

pub use detector::{DetectorConfig, DetectorPatterns, PassDetector};
pub use local::{CompilerCommand, LocalToolchain, ToolchainConfig};
pub use repair::{repair_transplant, TransplantRepair, TransplantRepairRound};
pub use transplant::{
    find_main, function_definitions, kernel_guard_check, transplant_main, Definition, KernelGuard,
    TransplantError, TransplantOutcome, Which,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompileStatus {
    Ok,
    Failed,
    ToolchainMissing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileResult {
    pub status: CompileStatus,
    pub diagnostics: String,
    pub artifact_path: Option<PathBuf>,
    pub duration_ms: u64,
}

impl CompileResult {
    pub fn is_ok(&self) -> bool {
        self.status == CompileStatus::Ok
    }

    /// Rewrites `artifact_path` relative to `root`, for run-directory records
    /// that must not depend on where the run directory lives.
    pub fn relative_to(mut self, root: &Path) -> Self {
        if let Some(p) = &self.artifact_path {
            if let Ok(rel) = p.strip_prefix(root) {
                self.artifact_path = Some(rel.to_path_buf());
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Timeout,
    Crash,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    /// `None` when the process was killed by a signal or by the timeout.
    pub exit_code: Option<i32>,
    pub stdout: String,
    pub stderr: String,
    pub verdict: Verdict,
    pub duration_ms: u64,
}

impl RunResult {
    /// Text handed to the execution-repair agent.
    pub fn feedback(&self) -> String {
        let mut s = format!(
            "verdict: {:?}\nexit code: {}\n",
            self.verdict,
            self.exit_code.map_or("none (terminated)".to_string(), |c| c.to_string())
        );
        if !self.stdout.is_empty() {
            s.push_str("--- stdout ---\n");
            s.push_str(&self.stdout);
            if !self.stdout.ends_with('\n') {
                s.push('\n');
            }
        }
        if !self.stderr.is_empty() {
            s.push_str("--- stderr ---\n");
            s.push_str(&self.stderr);
        }
        s
    }
}

/// A compiler and runner for candidate programs.
pub trait Toolchain: Send + Sync {
    /// Compiles `source` inside `workspace`. Compile failure is data, not an error.
    fn compile(&self, source: &str, api: Api, workspace: &Path) -> CompileResult;

    fn run(
        &self,
        artifact: &Path,
        api: Api,
        timeout: Duration,
        args: &[String],
        detector: &PassDetector,
    ) -> RunResult;

    /// Default run timeout.
    fn run_timeout(&self) -> Duration {
        Duration::from_secs(300)
    }

    /// Whether `api` can be compiled on this host.
    fn available(&self, api: Api) -> bool;

    fn version(&self, api: Api) -> Option<String>;
}
