use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{kernel_guard_check, CompileResult, KernelGuard, Toolchain, TransplantOutcome};
use crate::api::Direction;
use crate::llm::{prompt_hash, CallKey, GenerationConfig, LlmClient, LlmError, Stage};
use crate::prompting::{extract_code, render_repair_prompt, PromptTemplates, RepairKind};
use crate::util::sha256_hex;

/// One repair attempt on a transplanted program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransplantRepairRound {
    pub round: u32,
    pub prompt_hash: String,
    pub response_hash: String,
    pub code: String,
    pub compile: CompileResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransplantRepair {
    pub outcome: TransplantOutcome,
    /// Compile result of the last attempt; `Ok` on success.
    pub compile: Option<CompileResult>,
    pub rounds: Vec<TransplantRepairRound>,
    /// Set when the backend failed and the loop was abandoned.
    pub error: Option<LlmError>,
}

impl TransplantRepair {
    pub fn succeeded(&self) -> bool {
        self.compile.as_ref().is_some_and(CompileResult::is_ok)
    }
}

/// Asks the repair model to fix a transplanted program that no longer
/// compiles, for up to `budget` rounds. After a successful compile the
/// kernel guard compares the repaired code against `generated` (the
/// pre-transplant candidate); `Changed` means validation must fail.
#[allow(clippy::too_many_arguments)]
pub fn repair_transplant(
    task_id: &str,
    direction: Direction,
    generated: &str,
    merged: &str,
    diagnostics: &str,
    budget: u8,
    client: &LlmClient,
    gen: &GenerationConfig,
    templates: &PromptTemplates,
    toolchain: &dyn Toolchain,
    workspace: &dyn Fn(u32) -> PathBuf,
) -> TransplantRepair {
    let mut current = merged.to_string();
    let mut diags = diagnostics.to_string();
    let mut rounds = Vec::new();
    let mut last_compile = None;

    for round in 1..=u32::from(budget) {
        let bundle = render_repair_prompt(RepairKind::Compile, &current, &diags, direction, templates);
        let key = CallKey::new(task_id, Stage::TransplantRepair, round);
        let response = match client.complete(&bundle, gen, &key) {
            Ok(r) => r,
            Err(e) => {
                return TransplantRepair {
                    outcome: outcome(current, round, KernelGuard::NotChecked),
                    compile: last_compile,
                    rounds,
                    error: Some(e),
                }
            }
        };
        let code = extract_code(&response).unwrap_or_default();
        let compile = toolchain.compile(&code, direction.to, &workspace(round));
        rounds.push(TransplantRepairRound {
            round,
            prompt_hash: prompt_hash(&bundle),
            response_hash: sha256_hex(response.as_bytes()),
            code: code.clone(),
            compile: compile.clone(),
        });
        if compile.is_ok() {
            let guard = kernel_guard_check(generated, &code);
            return TransplantRepair {
                outcome: outcome(code, round, guard),
                compile: Some(compile),
                rounds,
                error: None,
            };
        }
        diags = compile.diagnostics.clone();
        current = code;
        last_compile = Some(compile);
    }
    TransplantRepair {
        outcome: outcome(current, u32::from(budget), KernelGuard::NotChecked),
        compile: last_compile,
        rounds,
        error: None,
    }
}

fn outcome(merged_source: String, rounds: u32, guard: KernelGuard) -> TransplantOutcome {
    TransplantOutcome {
        merged_source,
        main_replaced: true,
        repair_rounds_used: rounds as u8,
        kernel_guard: guard,
    }
}
