use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{PipelineConfig, PipelineContext, PipelineOutcome, RoundRecord, StageRound, TransplantSummary};
use crate::llm::{prompt_hash, CallKey, LlmClient, Stage};
use crate::prompting::{
    extract_code, render_repair_prompt, render_translation_prompt, select_shots, PromptBundle, RepairKind,
    TranslationTask,
};
use crate::toolchain::{
    repair_transplant, transplant_main, CompileResult, CompileStatus, KernelGuard, RunResult, Verdict,
};
use crate::util::{sha256_hex, write_atomic};

/// Sealed outcome inside a task directory.
pub const OUTCOME_FILE: &str = "outcome.json";
/// Per-task trace, one [`RoundRecord`] per line, appended as rounds finish.
pub const TRACE_FILE: &str = "trace.jsonl";

/// Runs one task to completion, or returns its sealed outcome when the task
/// directory already holds one.
pub fn run_pipeline(task: &TranslationTask, config: &PipelineConfig, ctx: &PipelineContext) -> PipelineOutcome {
    let dir = ctx.run_root.join(&task.task_id);
    if let Some(sealed) = load_sealed(&dir) {
        return sealed;
    }
    // An unsealed directory is a leftover from an interrupted run.
    if dir.exists() {
        if let Err(e) = std::fs::remove_dir_all(&dir) {
            tracing::warn!("cannot clear {}: {e}", dir.display());
        }
    }
    let mut run = TaskRun {
        task,
        config,
        ctx,
        outcome: PipelineOutcome {
            task_id: task.task_id.clone(),
            benchmark_id: task.benchmark_id.clone(),
            direction: task.direction,
            category: task.category.clone(),
            compiled: false,
            validated: false,
            success_stage: None,
            validated_stage: None,
            transplant: None,
            final_verdict: None,
            trace: Vec::new(),
            skipped_reason: None,
            notes: Vec::new(),
        },
        pending: None,
        dir,
    };
    if let Err(e) = std::fs::create_dir_all(&run.dir) {
        run.skip(format!("cannot create task directory: {e}"));
    } else {
        run.execute();
    }
    run.seal()
}

fn load_sealed(dir: &Path) -> Option<PipelineOutcome> {
    let text = std::fs::read_to_string(dir.join(OUTCOME_FILE)).ok()?;
    match serde_json::from_str(&text) {
        Ok(o) => Some(o),
        Err(e) => {
            tracing::warn!("ignoring unreadable sealed outcome in {}: {e}", dir.display());
            None
        }
    }
}

struct TaskRun<'a> {
    task: &'a TranslationTask,
    config: &'a PipelineConfig,
    ctx: &'a PipelineContext,
    outcome: PipelineOutcome,
    /// Latest round, kept open so a later run result can be attached.
    pending: Option<RoundRecord>,
    dir: PathBuf,
}

/// Marker for "the task stopped"; the reason is already in the outcome.
struct Stop;

impl TaskRun<'_> {
    fn execute(&mut self) {
        let _ = self.try_execute();
    }

    fn try_execute(&mut self) -> Result<(), Stop> {
        let direction = self.task.direction;
        if !self.ctx.toolchain.available(direction.to) {
            return Err(self.skip(format!("no {} toolchain available", direction.to.display_name())));
        }
        let shots = select_shots(
            &self.ctx.shot_pool,
            direction,
            self.config.shots,
            self.config.seed,
            &self.task.benchmark_id,
        )
        .map_err(|e| self.skip(e.to_string()))?;
        let bundle =
            render_translation_prompt(self.task, &shots, &self.ctx.templates).map_err(|e| self.skip(e.to_string()))?;

        let questioner = self.ctx.questioner.clone();
        let mut code = self.ask(&questioner, Stage::Translate, 0, &bundle)?;
        let mut compile = self.compile_current(&code)?;
        let mut stage = StageRound { stage: Stage::Translate, round: 0 };

        let repairer = self.ctx.repairer.clone();
        for round in 1..=u32::from(self.config.effective_compile_rounds()) {
            if compile.is_ok() {
                break;
            }
            let bundle = render_repair_prompt(
                RepairKind::Compile,
                &code,
                &compile.diagnostics,
                direction,
                &self.ctx.templates,
            );
            code = self.ask(&repairer, Stage::CompileRepair, round, &bundle)?;
            compile = self.compile_current(&code)?;
            stage = StageRound { stage: Stage::CompileRepair, round };
        }
        if !compile.is_ok() {
            return Ok(());
        }
        self.outcome.compiled = true;
        self.outcome.success_stage = Some(stage);
        self.validate(code, &repairer)
    }

    /// Transplant, run, and repair against runtime feedback.
    fn validate(&mut self, candidate: String, repairer: &LlmClient) -> Result<(), Stop> {
        let direction = self.task.direction;
        let transplanted = match transplant_main(&candidate, &self.task.target_code) {
            Ok(t) => t,
            Err(e) => {
                self.outcome.notes.push(format!("transplant failed: {e}"));
                return Ok(());
            }
        };
        self.outcome.transplant = Some(TransplantSummary {
            main_replaced: transplanted.main_replaced,
            repair_rounds_used: 0,
            kernel_guard: KernelGuard::NotChecked,
        });
        let mut program = transplanted.merged_source;
        let merged_dir = self.round_dir(self.round_count() - 1).join("merged");
        let mut compile = self.ctx.toolchain.compile(&program, direction.to, &merged_dir);
        self.check_missing(&compile)?;
        self.pending_mut().merged_compile = Some(self.relative(&compile));

        if !compile.is_ok() {
            let base = self.round_count();
            let dir = self.dir.clone();
            let workspace = move |r: u32| dir.join(format!("round_{}", base + r as usize - 1));
            let repair = repair_transplant(
                &self.task.task_id,
                direction,
                &candidate,
                &program,
                &compile.diagnostics,
                self.config.transplant_rounds,
                repairer,
                self.config.repair_generation(),
                &self.ctx.templates,
                self.ctx.toolchain.as_ref(),
                &workspace,
            );
            for r in &repair.rounds {
                self.push(RoundRecord {
                    stage: Stage::TransplantRepair,
                    round_index: r.round,
                    prompt_hash: r.prompt_hash.clone(),
                    response_hash: r.response_hash.clone(),
                    compile: Some(self.relative(&r.compile)),
                    merged_compile: None,
                    run: None,
                });
            }
            let summary = self.outcome.transplant.as_mut().expect("set above");
            summary.repair_rounds_used = repair.rounds.len() as u8;
            summary.kernel_guard = repair.outcome.kernel_guard;
            if let Some(e) = repair.error {
                return Err(self.skip(format!("backend error during transplant repair: {e}")));
            }
            if let Some(c) = &repair.compile {
                self.check_missing(c)?;
            }
            if !repair.succeeded() {
                self.outcome.notes.push("transplanted program still fails to compile".into());
                return Ok(());
            }
            if repair.outcome.kernel_guard == KernelGuard::Changed {
                self.outcome.notes.push("transplant repair modified a kernel".into());
                return Ok(());
            }
            program = repair.outcome.merged_source;
            compile = repair.compile.expect("succeeded");
        }

        let mut run = self.run_artifact(&compile);
        let mut stage = self.last_stage();
        for round in 1..=u32::from(self.config.effective_exec_rounds()) {
            if run.verdict == Verdict::Pass {
                break;
            }
            let feedback = run.feedback();
            let bundle =
                render_repair_prompt(RepairKind::Runtime, &program, &feedback, direction, &self.ctx.templates);
            let fixed = self.ask(repairer, Stage::ExecRepair, round, &bundle)?;
            program = match transplant_main(&fixed, &self.task.target_code) {
                Ok(t) => t.merged_source,
                Err(e) => {
                    self.outcome.notes.push(format!("exec round {round}: transplant failed: {e}"));
                    fixed
                }
            };
            let compile = self.compile_current(&program)?;
            if compile.is_ok() {
                run = self.run_artifact(&compile);
            } else {
                run = RunResult {
                    exit_code: None,
                    stdout: String::new(),
                    stderr: format!("compilation failed:\n{}", compile.diagnostics),
                    verdict: Verdict::Fail,
                    duration_ms: 0,
                };
            }
            stage = StageRound { stage: Stage::ExecRepair, round };
        }
        self.outcome.final_verdict = Some(run.verdict);
        if run.verdict == Verdict::Pass {
            self.outcome.validated = true;
            self.outcome.validated_stage = Some(stage);
        }
        Ok(())
    }

    fn ask(&mut self, client: &LlmClient, stage: Stage, round: u32, bundle: &PromptBundle) -> Result<String, Stop> {
        let key = CallKey::new(&self.task.task_id, stage, round);
        let gen = match stage {
            Stage::Translate => &self.config.gen,
            _ => self.config.repair_generation(),
        };
        let dir = self.round_dir(self.round_count());
        let _ = std::fs::create_dir_all(&dir);
        let _ = std::fs::write(dir.join("prompt.txt"), bundle.transcript());
        let response = client
            .complete(bundle, gen, &key)
            .map_err(|e| self.skip(format!("backend error at {stage}:{round}: {e}")))?;
        let _ = std::fs::write(dir.join("response.txt"), &response);
        self.push(RoundRecord {
            stage,
            round_index: round,
            prompt_hash: prompt_hash(bundle),
            response_hash: sha256_hex(response.as_bytes()),
            compile: None,
            merged_compile: None,
            run: None,
        });
        Ok(extract_code(&response).unwrap_or_default())
    }

    /// Compiles `code` in the current round's directory and records it.
    fn compile_current(&mut self, code: &str) -> Result<CompileResult, Stop> {
        let dir = self.round_dir(self.round_count() - 1);
        let result = self.ctx.toolchain.compile(code, self.task.direction.to, &dir);
        self.check_missing(&result)?;
        self.pending_mut().compile = Some(self.relative(&result));
        Ok(result)
    }

    fn run_artifact(&mut self, compile: &CompileResult) -> RunResult {
        let artifact = compile.artifact_path.as_deref().expect("ok compile has an artifact");
        let run = match self.ctx.detector.for_benchmark(&self.task.benchmark_id) {
            Ok(detector) => self.ctx.toolchain.run(
                artifact,
                self.task.direction.to,
                self.ctx.toolchain.run_timeout(),
                &[],
                &detector,
            ),
            Err(e) => RunResult {
                exit_code: None,
                stdout: String::new(),
                stderr: format!("invalid detector pattern: {e}"),
                verdict: Verdict::Fail,
                duration_ms: 0,
            },
        };
        self.pending_mut().run = Some(run.clone());
        run
    }

    fn check_missing(&mut self, compile: &CompileResult) -> Result<(), Stop> {
        if compile.status == CompileStatus::ToolchainMissing {
            return Err(self.skip(format!("toolchain missing: {}", compile.diagnostics.trim())));
        }
        Ok(())
    }

    fn relative(&self, c: &CompileResult) -> CompileResult {
        c.clone().relative_to(&self.ctx.run_root)
    }

    fn round_count(&self) -> usize {
        self.outcome.trace.len() + usize::from(self.pending.is_some())
    }

    fn round_dir(&self, k: usize) -> PathBuf {
        self.dir.join(format!("round_{k}"))
    }

    fn last_stage(&self) -> StageRound {
        let r = self.pending.as_ref().or(self.outcome.trace.last()).expect("at least one round");
        StageRound { stage: r.stage, round: r.round_index }
    }

    fn pending_mut(&mut self) -> &mut RoundRecord {
        self.pending.as_mut().expect("a round is open")
    }

    /// Closes the open round (appending it to the trace file) and opens `record`.
    fn push(&mut self, record: RoundRecord) {
        self.flush();
        self.pending = Some(record);
    }

    fn flush(&mut self) {
        if let Some(record) = self.pending.take() {
            let line = serde_json::to_string(&record).expect("record serializes") + "\n";
            let appended = OpenOptions::new()
                .create(true)
                .append(true)
                .open(self.dir.join(TRACE_FILE))
                .and_then(|mut f| f.write_all(line.as_bytes()));
            if let Err(e) = appended {
                tracing::warn!("{}: cannot append trace: {e}", self.task.task_id);
            }
            self.outcome.trace.push(record);
        }
    }

    fn skip(&mut self, reason: String) -> Stop {
        tracing::warn!("{}: skipped: {reason}", self.task.task_id);
        self.outcome.skipped_reason = Some(reason);
        Stop
    }

    fn seal(mut self) -> PipelineOutcome {
        self.flush();
        let mut json = serde_json::to_string_pretty(&self.outcome).expect("outcome serializes");
        json.push('\n');
        if let Err(e) = write_atomic(&self.dir.join(OUTCOME_FILE), json.as_bytes()) {
            tracing::error!("{}: cannot seal outcome: {e}", self.task.task_id);
        }
        self.outcome
    }
}
