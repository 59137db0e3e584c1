#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use unipar::agents::PipelineContext;
use unipar::llm::{Backend, CallKey, CompletionLog, GenerationConfig, LlmClient, LlmError, MockBackend, ScriptedBehavior, Stage, UnmatchedPolicy};
use unipar::prompting::{PromptBundle, PromptTemplates, TranslationTask};
use unipar::toolchain::{CompileResult, CompileStatus, DetectorConfig, PassDetector, RunResult, Toolchain, Verdict};
use unipar::{Api, Direction};

pub fn testdata() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata")
}

pub fn mini_corpus() -> PathBuf {
    testdata().join("mini-corpus")
}

/// Ground truth used by synthetic tasks: a kernel plus a checking `main`.
pub const GT: &str = "int kernel(int x) { return x - x; }\nint main() { return kernel(3); }\n";
/// A candidate the fake toolchain compiles and runs successfully.
pub const GOOD: &str = "int kernel(int x) { return x - x; }\nint main() { return 1; }\n";
/// A candidate the fake toolchain refuses to compile.
pub const BROKEN: &str = "int kernel(int x) { BROKEN }\n";
/// A candidate that compiles but fails at run time even after the transplant.
pub const WRONG: &str = "int kernel(int x) { return WRONG; }\nint main() { return 0; }\n";

/// Compiles anything that lacks `BROKEN`; runs fail when the program
/// contains `WRONG`. Counts every call.
#[derive(Debug, Default)]
pub struct FakeToolchain {
    pub compiles: AtomicUsize,
    pub runs: AtomicUsize,
    pub missing: BTreeSet<Api>,
}

impl FakeToolchain {
    pub fn without(apis: &[Api]) -> Self {
        FakeToolchain { missing: apis.iter().copied().collect(), ..Default::default() }
    }

    pub fn compile_count(&self) -> usize {
        self.compiles.load(Ordering::SeqCst)
    }
}

impl Toolchain for FakeToolchain {
    fn compile(&self, source: &str, api: Api, workspace: &Path) -> CompileResult {
        self.compiles.fetch_add(1, Ordering::SeqCst);
        if self.missing.contains(&api) {
            return CompileResult {
                status: CompileStatus::ToolchainMissing,
                diagnostics: format!("no compiler for {api}"),
                artifact_path: None,
                duration_ms: 0,
            };
        }
        std::fs::create_dir_all(workspace).unwrap();
        if source.contains("BROKEN") {
            return CompileResult {
                status: CompileStatus::Failed,
                diagnostics: "src.cpp:1:20: error: 'BROKEN' was not declared in this scope".into(),
                artifact_path: None,
                duration_ms: 0,
            };
        }
        let artifact = workspace.join("prog.bin");
        std::fs::write(&artifact, source).unwrap();
        CompileResult { status: CompileStatus::Ok, diagnostics: String::new(), artifact_path: Some(artifact), duration_ms: 0 }
    }

    fn run(&self, artifact: &Path, _api: Api, _timeout: Duration, _args: &[String], _d: &PassDetector) -> RunResult {
        self.runs.fetch_add(1, Ordering::SeqCst);
        let program = std::fs::read_to_string(artifact).unwrap_or_default();
        let (verdict, exit_code, stdout) = if program.contains("WRONG") {
            (Verdict::Fail, Some(1), "FAIL\n")
        } else {
            (Verdict::Pass, Some(0), "PASS\n")
        };
        RunResult { exit_code, stdout: stdout.into(), stderr: String::new(), verdict, duration_ms: 0 }
    }

    fn available(&self, api: Api) -> bool {
        !self.missing.contains(&api)
    }

    fn version(&self, api: Api) -> Option<String> {
        self.available(api).then(|| "fake 1.0".into())
    }
}

/// Panics on the `limit`-th call, simulating a crash mid-batch.
pub struct CrashingBackend {
    pub inner: MockBackend,
    pub calls: AtomicUsize,
    pub limit: usize,
}

impl Backend for CrashingBackend {
    fn provider(&self) -> String {
        "mock".into()
    }

    fn send(&self, bundle: &PromptBundle, config: &GenerationConfig, key: &CallKey) -> Result<String, LlmError> {
        if self.calls.fetch_add(1, Ordering::SeqCst) + 1 >= self.limit {
            panic!("injected crash at {key}");
        }
        self.inner.send(bundle, config, key)
    }
}

pub fn fenced(code: &str) -> String {
    format!("Here is the translated code:\n```cpp\n{code}```\n")
}

pub fn entry(task_id: &str, stage: Stage, round: u32, code: &str) -> ScriptedBehavior {
    ScriptedBehavior { task_id: task_id.into(), stage, round, response: fenced(code) }
}

pub fn mock(entries: Vec<ScriptedBehavior>) -> Arc<MockBackend> {
    Arc::new(MockBackend::new(entries, UnmatchedPolicy::Error).unwrap())
}

pub fn synthetic_task(id: &str) -> TranslationTask {
    TranslationTask {
        task_id: id.into(),
        benchmark_id: id.into(),
        direction: Direction::CUDA_TO_OMP,
        source_code: "__global__ void kernel(int *x) { x[0] = 0; }\n".into(),
        target_code: GT.into(),
        category: None,
    }
}

pub fn context(backend: Arc<dyn Backend>, toolchain: Arc<dyn Toolchain>, run_root: &Path) -> (PipelineContext, Arc<CompletionLog>) {
    let log = Arc::new(CompletionLog::in_memory());
    let client = LlmClient::new(backend, log.clone());
    let ctx = PipelineContext {
        questioner: client.clone(),
        repairer: client,
        toolchain,
        templates: PromptTemplates::default(),
        detector: DetectorConfig::default(),
        shot_pool: Vec::new(),
        run_root: run_root.to_path_buf(),
    };
    (ctx, log)
}
