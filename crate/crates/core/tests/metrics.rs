mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;
use unipar::agents::{PipelineConfig, PipelineOutcome, StageRound};
use unipar::corpus::{split_corpus, BenchmarkSource, KernelTuple, SplitRatio, Verification};
use unipar::llm::{MockBackend, Stage, UnmatchedPolicy};
use unipar::metrics::{
    aggregate, aggregate_by_category, aggregate_expecting, attribute_rounds, emit_report, export_finetune,
    format_rate, parse_csv_report, run_sweep, write_finetune, FinetuneOptions, GridPoint, PointResult, ReportFormat,
    RunManifest, SweepSpec, FINETUNE_SCHEMA,
};
use unipar::{Api, Direction};

use common::{context, synthetic_task, FakeToolchain};

fn outcome(i: usize, direction: Direction, skipped: bool, compiled: bool, validated: bool, round: u32) -> PipelineOutcome {
    let stage = if round == 0 { Stage::Translate } else { Stage::CompileRepair };
    PipelineOutcome {
        task_id: format!("{direction}.b{i}"),
        benchmark_id: format!("b{i}"),
        direction,
        category: Some(if i % 2 == 0 { "Math" } else { "Data" }.into()),
        compiled: compiled && !skipped,
        validated: validated && compiled && !skipped,
        success_stage: (compiled && !skipped).then_some(StageRound { stage, round }),
        validated_stage: None,
        transplant: None,
        final_verdict: None,
        trace: Vec::new(),
        skipped_reason: skipped.then(|| "toolchain missing".into()),
        notes: Vec::new(),
    }
}

fn arb_outcomes() -> impl Strategy<Value = Vec<PipelineOutcome>> {
    prop::collection::vec((0usize..4, 0u8..10, any::<bool>(), any::<bool>(), 0u32..4), 0..60).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (d, s, c, val, r))| outcome(i, Direction::STANDARD[d], s == 0, c, val, r))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn aggregation_laws(outcomes in arb_outcomes(), seed in any::<u64>()) {
        let stats = aggregate(&outcomes);
        for (d, st) in &stats {
            let mine: Vec<&PipelineOutcome> = outcomes.iter().filter(|o| o.direction == *d).collect();
            let skipped = mine.iter().filter(|o| o.skipped_reason.is_some()).count() as u64;
            let compiled = mine.iter().filter(|o| o.skipped_reason.is_none() && o.compiled).count() as u64;
            let validated = mine.iter().filter(|o| o.skipped_reason.is_none() && o.validated).count() as u64;
            let attempted = mine.len() as u64 - skipped;
            prop_assert_eq!(st.n_tasks, mine.len() as u64);
            prop_assert_eq!((st.n_skipped, st.n_compiled, st.n_validated), (skipped, compiled, validated));
            prop_assert!(st.n_validated <= st.n_compiled);
            let expect = |n: u64| (attempted > 0).then(|| Ratio::new(n, attempted));
            prop_assert_eq!(st.compilation_rate, expect(compiled));
            prop_assert_eq!(st.validation_rate, expect(validated));
            prop_assert_eq!(st.round_attribution.values().sum::<u64>(), compiled);
        }
        prop_assert_eq!(stats.values().map(|s| s.n_tasks).sum::<u64>(), outcomes.len() as u64);

        let mut shuffled = outcomes.clone();
        let mut x = seed | 1;
        for i in (1..shuffled.len()).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            shuffled.swap(i, (x % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(aggregate(&shuffled), stats);
        prop_assert_eq!(attribute_rounds(&shuffled), attribute_rounds(&outcomes));
    }
}

#[test]
fn attribution_counts_first_success_only() {
    let mut outcomes = Vec::new();
    for i in 0..100 {
        let (compiled, round) = match i {
            0..50 => (true, 0),
            50..70 => (true, 1),
            70..80 => (true, 2),
            _ => (false, 0),
        };
        outcomes.push(outcome(i, Direction::CUDA_TO_OMP, false, compiled, false, round));
    }
    let t = attribute_rounds(&outcomes);
    assert_eq!(t.get(StageRound { stage: Stage::Translate, round: 0 }), 50);
    assert_eq!(t.get(StageRound { stage: Stage::CompileRepair, round: 1 }), 20);
    assert_eq!(t.get(StageRound { stage: Stage::CompileRepair, round: 2 }), 10);
    assert_eq!(t.total(), 80);
    let st = &aggregate(&outcomes)[&Direction::CUDA_TO_OMP];
    assert_eq!(st.compilation_rate, Some(Ratio::new(4, 5)));
    assert_eq!(format_rate(&st.compilation_rate), "0.800");
}

#[test]
fn all_skipped_direction_has_undefined_rates() {
    let outcomes = vec![outcome(0, Direction::OMP_TO_CUDA, true, false, false, 0)];
    let st = &aggregate(&outcomes)[&Direction::OMP_TO_CUDA];
    assert_eq!(st.compilation_rate, None);
    assert_eq!(format_rate(&st.validation_rate), "n/a");
    let (_, warnings) = aggregate_expecting(&outcomes, &[Direction::OMP_TO_CUDA, Direction::SERIAL_TO_OMP]);
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].contains("serial-to-omp"));
}

#[test]
fn category_breakdown() {
    let outcomes: Vec<_> = (0..6).map(|i| outcome(i, Direction::CUDA_TO_OMP, false, true, i < 3, 0)).collect();
    let by_cat = aggregate_by_category(&outcomes);
    assert_eq!(by_cat.keys().collect::<Vec<_>>(), ["Data", "Math"]);
    assert_eq!(by_cat["Math"][&Direction::CUDA_TO_OMP].n_validated, 2);
    assert_eq!(by_cat["Data"][&Direction::CUDA_TO_OMP].n_validated, 1);
}

fn small_manifest() -> RunManifest {
    let outcomes = vec![
        outcome(0, Direction::CUDA_TO_OMP, false, true, true, 0),
        outcome(1, Direction::CUDA_TO_OMP, false, true, false, 1),
        outcome(2, Direction::CUDA_TO_OMP, false, true, false, 0),
        outcome(3, Direction::CUDA_TO_OMP, false, false, false, 0),
        outcome(4, Direction::OMP_TO_CUDA, true, false, false, 0),
    ];
    let point = GridPoint { temperature: 0.2, max_tokens: 5000, top_p: 0.8, shots: 0 };
    let mut provenance = BTreeMap::new();
    provenance.insert("g++".to_string(), "g++ 13".to_string());
    let mut m = RunManifest::new("r1", serde_json::json!({"seed": 0}), provenance);
    m.points.push(PointResult::from_outcomes(point, point.id(), &outcomes));
    m
}

#[test]
fn markdown_report_rows() {
    let md = emit_report(&small_manifest(), ReportFormat::Markdown);
    assert!(md.starts_with("# Run report: r1\n"));
    assert!(md.contains("- g++: g++ 13\n"));
    assert!(md.contains("## shots=0 temperature=0.2 max_tokens=5000 top_p=0.8\n"));
    assert!(md.contains("| cuda-to-omp | 4 | 0 | 3 | 1 | 0.750 | 0.250 |\n"), "{md}");
    assert!(md.contains("| omp-to-cuda | 1 | 1 | 0 | 0 | n/a | n/a |\n"), "{md}");
    assert!(md.contains("| translate | 0 | 2 |\n"));
    assert!(md.contains("| compile_repair | 1 | 1 |\n"));
}

#[test]
fn csv_report_round_trips() {
    let m = small_manifest();
    let text = emit_report(&m, ReportFormat::Csv);
    assert!(text.starts_with("# run_id: r1\n"));
    let rows = parse_csv_report(&text).unwrap();
    assert_eq!(rows.len(), 2);
    let st = &m.points[0].stats[&Direction::CUDA_TO_OMP];
    let r = rows.iter().find(|r| r.direction == "cuda-to-omp").unwrap();
    assert_eq!((r.n_tasks, r.n_skipped, r.n_compiled, r.n_validated), (st.n_tasks, st.n_skipped, st.n_compiled, st.n_validated));
    assert_eq!((r.compilation_rate, r.validation_rate), (Some(0.75), Some(0.25)));
    assert_eq!(rows.iter().find(|r| r.direction == "omp-to-cuda").unwrap().compilation_rate, None);
    assert_eq!((r.shots, r.max_tokens, r.temperature, r.top_p), (0, 5000, 0.2, 0.8));
}

#[test]
fn reports_are_byte_stable() {
    let m = small_manifest();
    for f in ReportFormat::ALL {
        assert_eq!(emit_report(&m, f), emit_report(&m.clone(), f));
    }
    let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
    assert_eq!(back, m);
    let json: serde_json::Value = serde_json::from_str(&emit_report(&m, ReportFormat::Json)).unwrap();
    let dirs = json["points"][0]["directions"].as_array().unwrap();
    let cuda_to_omp = dirs.iter().find(|d| d["direction"] == "cuda-to-omp").unwrap();
    assert_eq!(cuda_to_omp["compilation_rate"], "0.750");
}

#[test]
fn sweep_runs_every_grid_point_and_resumes_for_free() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec { shots: vec![0], ..Default::default() };
    let tasks = vec![synthetic_task("a"), synthetic_task("b")];
    let echo = Arc::new(MockBackend::new(Vec::new(), UnmatchedPolicy::EchoInput).unwrap());
    let (ctx, log) = context(echo, Arc::new(FakeToolchain::default()), dir.path());
    let run = |ctx| {
        run_sweep(&spec, &tasks, &PipelineConfig::default(), ctx, 2, "sweep", serde_json::json!({}), BTreeMap::new()).unwrap()
    };
    let manifest = run(&ctx);
    assert_eq!(manifest.points.len(), 9);
    assert_eq!(manifest.points.iter().map(|p| p.n_outcomes).sum::<usize>(), 18);
    let calls = log.len();
    assert!(calls >= 18);
    for p in &manifest.points {
        assert!(dir.path().join(&p.run_dir).join("outcomes.jsonl").is_file());
        assert_eq!(p.point.top_p, 0.8);
    }
    let temps: Vec<f64> = manifest.points.iter().map(|p| p.point.temperature).collect();
    assert_eq!(temps, [0.2, 0.2, 0.2, 0.6, 0.6, 0.6, 0.9, 0.9, 0.9]);

    let (ctx2, log2) = context(Arc::new(MockBackend::default()), Arc::new(FakeToolchain::default()), dir.path());
    let again = run(&ctx2);
    assert_eq!(log2.len(), 0);
    assert_eq!(again, manifest);
}

fn tuple(id: &str, code_len: usize) -> KernelTuple {
    let member = |api: Api| BenchmarkSource {
        benchmark_id: id.into(),
        api,
        main_file_path: format!("{id}/{}.cpp", api.corpus_stem()).into(),
        source_text: format!("// {api}\nint main() {{ return 0; }}\n{}", "x".repeat(code_len)),
        token_count: 1,
        verified: Verification::Unverified,
    };
    KernelTuple {
        benchmark_id: id.into(),
        members: [Api::Serial, Api::OpenMP, Api::Cuda].into_iter().map(|a| (a, member(a))).collect(),
        category: None,
    }
}

#[test]
fn finetune_records_follow_the_schema() {
    let mut tuples: Vec<_> = (0..30).map(|i| tuple(&format!("k{i:02}"), 10)).collect();
    tuples.push(tuple("huge", 70_000));
    let (split, _) = split_corpus(&tuples, &Direction::STANDARD, SplitRatio::NINE_TO_ONE, 3);
    let export = export_finetune(&tuples, &split, &FinetuneOptions::default());
    assert_eq!(export.records.len(), split.train.len());

    let schema: serde_json::Value = serde_json::from_str(FINETUNE_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for line in export.to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(validator.is_valid(&v), "{line}");
    }
    let bad = serde_json::json!({"task_id": "x", "system": "", "instruction": "", "response": "", "token_estimate": -1, "over_context": 1});
    assert!(!validator.is_valid(&bad));

    let huge_in_train = split.train.iter().filter(|t| t.benchmark_id == "huge").count();
    assert_eq!(export.over_context.len(), huge_in_train);
    let r = export.records.iter().find(|r| r.task_id.ends_with(".k00") || r.task_id.ends_with(".k01")).unwrap();
    assert!(r.instruction.starts_with("Translate the following code from "));
    assert!(r.response.contains("int main()"));

    let dropping = FinetuneOptions { drop_over_context: true, ..Default::default() };
    let dropped = export_finetune(&tuples, &split, &dropping);
    assert_eq!(dropped.records.len(), split.train.len() - huge_in_train);
    assert_eq!(dropped.dropped, huge_in_train);

    let dir = tempfile::tempdir().unwrap();
    write_finetune(&export, dir.path()).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("finetune.jsonl")).unwrap(), export.to_jsonl());
    assert!(dir.path().join("finetune.schema.json").is_file());
}
