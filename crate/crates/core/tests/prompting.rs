mod common;

use unipar::corpus::TokenCounter;
use unipar::llm::estimate_context;
use unipar::prompting::{
    extract_code, render_repair_prompt, render_translation_prompt, select_shots, PromptError, PromptTemplates,
    RepairKind, Role, ShotExample, TranslationTask,
};
use unipar::toolchain::{RunResult, Verdict};
use unipar::{Api, Direction};

const TASK_CODE: &str = "__global__ void k(float *x) { x[threadIdx.x] = 1.0f; }";

fn golden(name: &str) -> String {
    std::fs::read_to_string(common::testdata().join("prompts").join(name)).unwrap()
}

fn task(code: &str) -> TranslationTask {
    TranslationTask {
        task_id: "cuda-to-omp.k".into(),
        benchmark_id: "k".into(),
        direction: Direction::CUDA_TO_OMP,
        source_code: code.into(),
        target_code: String::new(),
        category: None,
    }
}

fn shot(id: &str, from: &str, to: &str) -> ShotExample {
    ShotExample { from_api: Api::Cuda, to_api: Api::OpenMP, from_code: from.into(), to_code: to.into(), benchmark_id: id.into() }
}

fn three_shots() -> Vec<ShotExample> {
    vec![
        shot(
            "add",
            "__global__ void add(int *a) { a[threadIdx.x] += 1; }",
            "void add(int *a, int n) {\n#pragma omp parallel for\n  for (int i = 0; i < n; i++) a[i] += 1;\n}",
        ),
        shot(
            "scale",
            "__global__ void scale(float *v, float s) { v[threadIdx.x] *= s; }",
            "void scale(float *v, float s, int n) {\n#pragma omp parallel for\n  for (int i = 0; i < n; i++) v[i] *= s;\n}",
        ),
        shot(
            "zero",
            "__global__ void zero(double *d) { d[blockIdx.x] = 0.0; }",
            "void zero(double *d, int n) {\n#pragma omp parallel for\n  for (int i = 0; i < n; i++) d[i] = 0.0;\n}",
        ),
    ]
}

fn render(n: usize, code: &str) -> String {
    render_translation_prompt(&task(code), &three_shots()[..n], &PromptTemplates::default()).unwrap().transcript()
}

#[test]
fn zero_one_and_three_shot_goldens() {
    assert_eq!(render(0, TASK_CODE), golden("a_zero_shot_cuda_to_omp.txt"));
    assert_eq!(render(1, TASK_CODE), golden("b_one_shot_cuda_to_omp.txt"));
    assert_eq!(render(3, TASK_CODE), golden("three_shot_cuda_to_omp.txt"));
}

#[test]
fn empty_source_renders_the_skeleton() {
    assert_eq!(render(0, ""), golden("skeleton_cuda_to_omp.txt"));
}

#[test]
fn turn_arity_and_roles() {
    for n in 0..=3 {
        let bundle = render_translation_prompt(&task(TASK_CODE), &three_shots()[..n], &PromptTemplates::default()).unwrap();
        assert_eq!(bundle.turns.len(), 2 * n + 1);
        for (i, t) in bundle.turns.iter().enumerate() {
            let expected = if i % 2 == 0 { Role::Instruction } else { Role::Assistant };
            assert_eq!(t.role, expected);
        }
    }
}

#[test]
fn shot_from_another_direction_is_rejected() {
    let mut s = three_shots();
    s[0].from_api = Api::Serial;
    let err = render_translation_prompt(&task(TASK_CODE), &s[..1], &PromptTemplates::default()).unwrap_err();
    assert!(matches!(err, PromptError::ShotDirectionMismatch { .. }));
}

#[test]
fn compile_repair_golden() {
    let b = render_repair_prompt(
        RepairKind::Compile,
        "int main() { int x = 1 return x; }",
        "src.cpp:1:25: error: expected ',' or ';' before 'return'",
        Direction::CUDA_TO_OMP,
        &PromptTemplates::default(),
    );
    assert_eq!(b.transcript(), golden("c_compile_repair.txt"));
}

#[test]
fn runtime_repair_golden() {
    let run = RunResult {
        exit_code: Some(3),
        stdout: "mismatch at index 7: got 0, expected 1\nFAIL\n".into(),
        stderr: String::new(),
        verdict: Verdict::Fail,
        duration_ms: 12,
    };
    let b = render_repair_prompt(
        RepairKind::Runtime,
        "int main() { return 3; }",
        &run.feedback(),
        Direction::CUDA_TO_OMP,
        &PromptTemplates::default(),
    );
    assert_eq!(b.transcript(), golden("d_runtime_repair.txt"));
}

#[test]
fn context_estimate_is_quarter_bytes_of_transcript() {
    let b = render_translation_prompt(&task(TASK_CODE), &three_shots(), &PromptTemplates::default()).unwrap();
    let bytes = b.transcript().len();
    assert_eq!(estimate_context(&b, &TokenCounter::Approx), bytes.div_ceil(4));
}

#[test]
fn template_overrides_from_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("system.txt"), "Be brief.").unwrap();
    let t = PromptTemplates::with_overrides(dir.path()).unwrap();
    assert_eq!(t.system, "Be brief.");
    let text = render_translation_prompt(&task("x"), &[], &t).unwrap().transcript();
    assert!(text.starts_with("System: Be brief.\n"));
}

#[test]
fn extraction_prefers_fenced_code() {
    let r = "Here is the translated code:\n```cpp\nint main() {}\n```\nDone.";
    assert_eq!(extract_code(r).unwrap(), "int main() {}");
    assert_eq!(extract_code("   ").unwrap_err(), PromptError::EmptyCompletion);
}

#[test]
fn shot_selection_is_seeded_and_excludes_the_task() {
    let pool = three_shots();
    let a = select_shots(&pool, Direction::CUDA_TO_OMP, 2, 11, "add").unwrap();
    assert_eq!(a, select_shots(&pool, Direction::CUDA_TO_OMP, 2, 11, "add").unwrap());
    assert!(a.iter().all(|s| s.benchmark_id != "add"));
    assert!(matches!(
        select_shots(&pool, Direction::CUDA_TO_OMP, 3, 11, "add"),
        Err(PromptError::InsufficientShots { available: 2, .. })
    ));
}
