//! The translate / compile-repair / execute-repair cycle and batch runner.
//!
//! A task runs through a fixed state machine: the questioner translates,
//! the compilation agent repairs against compiler diagnostics, the ground
//! truth `main` is transplanted (with its own small repair budget), and the
//! execution agent repairs against runtime feedback.

mod batch;
mod pipeline;
mod tasks;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::api::Direction;
use crate::llm::{GenerationConfig, LlmClient, Stage};
use crate::prompting::{PromptTemplates, ShotExample};
use crate::toolchain::{CompileResult, DetectorConfig, KernelGuard, RunResult, Toolchain, Verdict};

pub use batch::{load_outcomes, run_batch, OUTCOMES_FILE};
pub use pipeline::{run_pipeline, OUTCOME_FILE, TRACE_FILE};
pub use tasks::{shot_pool, translation_tasks, Partition};

/// Largest budget accepted for any repair loop.
pub const MAX_ROUNDS: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub gen: GenerationConfig,
    /// Repair agents may decode differently from the questioner.
    pub repair_gen: Option<GenerationConfig>,
    pub shots: usize,
    pub compile_rounds: u8,
    pub exec_rounds: u8,
    pub transplant_rounds: u8,
    /// `false` runs the plain zero/few-shot baseline: no compile or
    /// execution repair.
    pub agentic: bool,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            gen: GenerationConfig::default(),
            repair_gen: None,
            shots: 0,
            compile_rounds: MAX_ROUNDS,
            exec_rounds: MAX_ROUNDS,
            transplant_rounds: MAX_ROUNDS,
            agentic: true,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.gen.validate()?;
        if let Some(g) = &self.repair_gen {
            g.validate()?;
        }
        for (name, v) in [
            ("compile_rounds", self.compile_rounds),
            ("exec_rounds", self.exec_rounds),
            ("transplant_rounds", self.transplant_rounds),
        ] {
            if v > MAX_ROUNDS {
                return Err(format!("{name} must be at most {MAX_ROUNDS}, got {v}"));
            }
        }
        Ok(())
    }

    pub fn effective_compile_rounds(&self) -> u8 {
        if self.agentic {
            self.compile_rounds
        } else {
            0
        }
    }

    pub fn effective_exec_rounds(&self) -> u8 {
        if self.agentic {
            self.exec_rounds
        } else {
            0
        }
    }

    pub fn repair_generation(&self) -> &GenerationConfig {
        self.repair_gen.as_ref().unwrap_or(&self.gen)
    }
}

/// Everything a pipeline needs besides the task and its config.
#[derive(Clone)]
pub struct PipelineContext {
    pub questioner: LlmClient,
    pub repairer: LlmClient,
    pub toolchain: Arc<dyn Toolchain>,
    pub templates: PromptTemplates,
    pub detector: DetectorConfig,
    /// Train-split examples shots are drawn from.
    pub shot_pool: Vec<ShotExample>,
    /// `runs/<run_id>`; each task writes below `<run_root>/<task_id>/`.
    pub run_root: PathBuf,
}

impl fmt::Debug for PipelineContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PipelineContext")
            .field("questioner", &self.questioner)
            .field("repairer", &self.repairer)
            .field("run_root", &self.run_root)
            .finish_non_exhaustive()
    }
}

/// One LLM call and what was done with its answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub stage: Stage,
    pub round_index: u32,
    pub prompt_hash: String,
    pub response_hash: String,
    /// Compile result of the candidate this round produced.
    pub compile: Option<CompileResult>,
    /// Compile result of the candidate with the ground-truth `main`, when it
    /// differs from `compile`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merged_compile: Option<CompileResult>,
    pub run: Option<RunResult>,
}

/// A (stage, round) position, written as `stage:round`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StageRound {
    pub stage: Stage,
    pub round: u32,
}

impl fmt::Display for StageRound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.stage, self.round)
    }
}

impl std::str::FromStr for StageRound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (stage, round) = s.split_once(':').ok_or_else(|| format!("expected `stage:round`, got `{s}`"))?;
        Ok(StageRound {
            stage: stage.parse()?,
            round: round.parse().map_err(|e| format!("bad round in `{s}`: {e}"))?,
        })
    }
}

impl Serialize for StageRound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StageRound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransplantSummary {
    pub main_replaced: bool,
    pub repair_rounds_used: u8,
    pub kernel_guard: KernelGuard,
}

/// Sealed result of one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub task_id: String,
    pub benchmark_id: String,
    pub direction: Direction,
    #[serde(default)]
    pub category: Option<String>,
    pub compiled: bool,
    pub validated: bool,
    /// Where compilation first succeeded.
    pub success_stage: Option<StageRound>,
    /// Where the run first passed.
    #[serde(default)]
    pub validated_stage: Option<StageRound>,
    pub transplant: Option<TransplantSummary>,
    pub final_verdict: Option<Verdict>,
    pub trace: Vec<RoundRecord>,
    pub skipped_reason: Option<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl PipelineOutcome {
    pub fn is_skipped(&self) -> bool {
        self.skipped_reason.is_some()
    }

    /// LLM calls made for this task.
    pub fn llm_calls(&self) -> usize {
        self.trace.len()
    }

    /// Copy with all wall-clock fields zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut o = self.clone();
        for r in &mut o.trace {
            for c in [&mut r.compile, &mut r.merged_compile].into_iter().flatten() {
                c.duration_ms = 0;
            }
            if let Some(run) = &mut r.run {
                run.duration_ms = 0;
            }
        }
        o
    }
}
