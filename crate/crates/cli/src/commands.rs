use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use unipar::agents::{
    load_outcomes, run_batch, run_pipeline, shot_pool, translation_tasks, Partition, PipelineContext,
    PipelineOutcome, OUTCOMES_FILE,
};
use unipar::config::{AppConfig, BackendSpec, CounterKind};
use unipar::corpus::{
    curate as curate_corpus, directions_of, load_categories, load_corpus, split_corpus, write_corpus, CurateOptions,
    KernelTuple, SplitManifest,
};
use unipar::llm::{CompletionLog, LlmClient, API_KEY_ENV};
use unipar::metrics::{
    emit_report, export_finetune as export, run_sweep, write_finetune, write_reports, FinetuneOptions, GridPoint,
    PointResult, Provenance, ReportFormat, RunManifest, MANIFEST_FILE,
};
use unipar::prompting::{PromptTemplates, TranslationTask};
use unipar::toolchain::{LocalToolchain, Toolchain};
use unipar::util::{sha256_hex, write_atomic};
use unipar::{Api, Direction};

use crate::{
    BackendArgs, CliError, Counter, CurateArgs, FinetuneArgs, FormatArg, Global, OnOff, PartitionArg, PipelineArgs,
    ReportArgs, RunArgs, SplitArgs, Status, SweepArgs, TranslateArgs,
};

const DEFAULT_CONFIG_FILE: &str = "unipar.toml";
const CONFIG_SNAPSHOT: &str = "config.toml";
const COMPLETIONS_FILE: &str = "completions.jsonl";

type Result<T> = std::result::Result<T, CliError>;

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Flags over config file over built-in defaults.
pub fn load_config(global: &Global) -> Result<AppConfig> {
    let mut config = match &global.config {
        Some(path) => AppConfig::load(path)?,
        None if Path::new(DEFAULT_CONFIG_FILE).is_file() => AppConfig::load(Path::new(DEFAULT_CONFIG_FILE))?,
        None => AppConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
        config.pipeline.seed = seed;
    }
    if let Some(p) = global.parallelism {
        config.parallelism = p;
    }
    if let Some(id) = &global.run_id {
        config.run_id = Some(id.clone());
    }
    config.validate()?;
    Ok(config)
}

fn toolchain(config: &AppConfig) -> LocalToolchain {
    LocalToolchain::new(config.toolchain.clone())
}

fn templates(config: &AppConfig) -> Result<PromptTemplates> {
    match &config.templates_dir {
        Some(dir) => PromptTemplates::with_overrides(dir).map_err(|e| config_error(e.to_string())),
        None => Ok(PromptTemplates::default()),
    }
}

pub fn curate(mut config: AppConfig, args: CurateArgs) -> Result<Status> {
    let c = &mut config.corpus;
    if let Some(root) = args.root {
        c.root = Some(root);
    }
    if let Some(out) = args.out {
        c.out = out;
    }
    if let Some(cutoff) = args.cutoff {
        c.cutoff = cutoff;
    }
    if let Some(counter) = args.counter {
        c.counter = match counter {
            Counter::Approx => CounterKind::Approx,
            Counter::Vocab => CounterKind::Vocab,
        };
    }
    if args.vocab.is_some() {
        c.vocab = args.vocab;
    }
    if let Some(v) = args.verify {
        c.verify = v == OnOff::On;
    }
    if args.categories.is_some() {
        c.categories = args.categories;
    }
    if args.no_derive_serial {
        c.derive_serial = false;
    }
    let root = c.root.clone().ok_or_else(|| config_error("no benchmark root: pass --root or set [corpus] root"))?;

    let mut options = CurateOptions::new(root);
    options.scan = c.scan.clone();
    options.counter = c.token_counter().map_err(|e| config_error(e.to_string()))?;
    options.cutoff = c.cutoff;
    options.derive_serial = c.derive_serial;
    options.verify = c.verify;
    options.verify_timeout = std::time::Duration::from_secs(config.toolchain.run_timeout_s);
    options.parallelism = config.parallelism;
    if let Some(path) = &c.categories {
        options.categories = load_categories(path).map_err(|e| config_error(e.to_string()))?;
    }
    let (verify, out) = (c.verify, c.out.clone());
    let tc = toolchain(&config);
    let tc_ref: Option<&dyn Toolchain> = if verify { Some(&tc) } else { None };
    let (tuples, report) = curate_corpus(&options, tc_ref, &config.detector).map_err(|e| anyhow!(e))?;
    write_corpus(&out, &tuples, &report).map_err(|e| anyhow!(e))?;

    let members: usize = tuples.iter().map(|t| t.members.len()).sum();
    println!(
        "curated {} benchmark(s), {members} source(s) into {}; {} pruned over {} tokens, {} skipped dir(s), {} verification failure(s)",
        tuples.len(),
        out.display(),
        report.pruned.len(),
        report.cutoff,
        report.scan.skipped.len(),
        report.verify_failures.len()
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Status::Ok)
}

fn load_tuples(dir: &Path) -> Result<Vec<KernelTuple>> {
    if !dir.is_dir() {
        return Err(config_error(format!("corpus directory {} not found; run `unipar curate` first", dir.display())));
    }
    load_corpus(dir).map_err(|e| CliError::Runtime(anyhow!(e)))
}

fn load_split(path: &Path) -> Result<SplitManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read split {}: {e}; run `unipar split` first", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

pub fn split(config: AppConfig, args: SplitArgs) -> Result<Status> {
    let tuples = load_tuples(args.corpus.as_deref().unwrap_or(&config.corpus.out))?;
    let ratio = match &args.ratio {
        Some(r) => r.parse().map_err(|_| config_error(format!("bad split ratio `{r}`")))?,
        None => config.split_ratio()?,
    };
    let directions = if !args.directions.is_empty() {
        args.directions
    } else if !config.split.directions.is_empty() {
        config.split.directions.clone()
    } else {
        directions_of(&tuples)
    };
    let (manifest, warnings) = split_corpus(&tuples, &directions, ratio, config.seed);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let out = args.out.unwrap_or_else(|| config.split.path.clone());
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_atomic(&out, manifest.to_json().as_bytes()).with_context(|| format!("writing {}", out.display()))?;
    println!("direction\ttrain\ttest");
    for d in &directions {
        println!("{d}\t{}\t{}", manifest.train_ids(*d).len(), manifest.test_ids(*d).len());
    }
    println!("wrote {} (ratio {ratio}, seed {})", out.display(), config.seed);
    Ok(Status::Ok)
}

fn apply_pipeline_args(config: &mut AppConfig, args: &PipelineArgs) {
    let p = &mut config.pipeline;
    if let Some(s) = args.shots {
        p.shots = s;
    }
    if let Some(t) = args.temperature {
        p.gen.temperature = t;
    }
    if let Some(t) = args.top_p {
        p.gen.top_p = t;
    }
    if let Some(m) = args.max_tokens {
        p.gen.max_tokens = m;
    }
    if let Some(m) = &args.model {
        p.gen.model_id = m.clone();
    }
    if args.baseline {
        p.agentic = false;
    }
}

fn apply_backend_args(config: &mut AppConfig, args: &BackendArgs) -> Result<()> {
    if let Some(b) = &args.backend {
        config.backends.questioner = BackendSpec::parse(b)?;
    }
    if let Some(b) = &args.repair_backend {
        config.backends.repair = Some(BackendSpec::parse(b)?);
    }
    Ok(())
}

/// Deterministic default: the same command and configuration reuse (and
/// resume) the same run directory.
fn run_id(config: &AppConfig, command: &str, extra: &str) -> String {
    config.run_id.clone().unwrap_or_else(|| {
        let digest = sha256_hex(format!("{command}\n{}\n{extra}", config.snapshot()).as_bytes());
        format!("{command}-{}", &digest[..12])
    })
}

fn context(config: &AppConfig, run_root: &Path, shots: Vec<unipar::prompting::ShotExample>) -> Result<PipelineContext> {
    let log = Arc::new(
        CompletionLog::append_to(&run_root.join(COMPLETIONS_FILE))
            .with_context(|| format!("opening completion log in {}", run_root.display()))?,
    );
    let backend = |spec: &BackendSpec| spec.build().map_err(|e| config_error(e.to_string()));
    let questioner = LlmClient::new(backend(&config.backends.questioner)?, log.clone()).with_retry(config.backends.retry.clone());
    let repairer = match &config.backends.repair {
        Some(spec) => LlmClient::new(backend(spec)?, log).with_retry(config.backends.retry.clone()),
        None => questioner.clone(),
    };
    Ok(PipelineContext {
        questioner,
        repairer,
        toolchain: Arc::new(toolchain(config)),
        templates: templates(config)?,
        detector: config.detector.clone(),
        shot_pool: shots,
        run_root: run_root.to_path_buf(),
    })
}

/// Tool versions and host facts; no timestamps, so reruns match.
fn provenance(config: &AppConfig, ctx: &PipelineContext) -> Provenance {
    let tc = toolchain(config);
    let mut p = Provenance::new();
    p.insert("unipar".into(), env!("CARGO_PKG_VERSION").into());
    p.insert("host".into(), format!("{}-{}", std::env::consts::OS, std::env::consts::ARCH));
    for api in Api::ALL {
        p.insert(format!("compiler.{}", api.slug()), tc.version(api).unwrap_or_else(|| "missing".into()));
    }
    p.insert("backend.questioner".into(), ctx.questioner.provider());
    p.insert("backend.repair".into(), ctx.repairer.provider());
    p
}

fn write_snapshot(config: &AppConfig, run_root: &Path) -> Result<()> {
    write_atomic(&run_root.join(CONFIG_SNAPSHOT), config.to_toml().as_bytes())
        .with_context(|| format!("writing config snapshot to {}", run_root.display()))?;
    Ok(())
}

fn find_task(tuples: &[KernelTuple], id: &str, direction: Option<Direction>) -> Result<TranslationTask> {
    let (direction, benchmark) = match id.split_once('.').and_then(|(d, b)| Some((d.parse::<Direction>().ok()?, b))) {
        Some((d, b)) => (d, b.to_string()),
        None => (
            direction.ok_or_else(|| config_error(format!("`{id}` is not a task id; add --direction")))?,
            id.to_string(),
        ),
    };
    let tuple = tuples
        .iter()
        .find(|t| t.benchmark_id == benchmark)
        .ok_or_else(|| config_error(format!("benchmark `{benchmark}` is not in the corpus")))?;
    let (from, to) = match (tuple.member(direction.from), tuple.member(direction.to)) {
        (Some(f), Some(t)) => (f, t),
        _ => return Err(config_error(format!("`{benchmark}` has no {direction} pair"))),
    };
    Ok(TranslationTask {
        task_id: TranslationTask::make_id(&benchmark, direction),
        benchmark_id: benchmark,
        direction,
        source_code: from.source_text.clone(),
        target_code: to.source_text.clone(),
        category: tuple.category.clone(),
    })
}

pub fn translate(mut config: AppConfig, args: TranslateArgs) -> Result<Status> {
    apply_pipeline_args(&mut config, &args.pipeline);
    apply_backend_args(&mut config, &args.backend)?;
    config.validate()?;
    let tuples = load_tuples(args.corpus.as_deref().unwrap_or(&config.corpus.out))?;
    let task = find_task(&tuples, &args.task, args.direction)?;
    let split_path = args.split.clone().unwrap_or_else(|| config.split.path.clone());
    let shots = if split_path.is_file() { shot_pool(&tuples, &load_split(&split_path)?) } else { Vec::new() };
    let run_root = config.runs_dir.join(run_id(&config, "translate", &task.task_id));
    let ctx = context(&config, &run_root, shots)?;
    write_snapshot(&config, &run_root)?;
    let outcome = run_pipeline(&task, &config.pipeline, &ctx);
    println!("{}", serde_json::to_string_pretty(&outcome).expect("outcome serializes"));
    Ok(Status::Ok)
}

struct Batch {
    tuples: Vec<KernelTuple>,
    split: SplitManifest,
    tasks: Vec<TranslationTask>,
}

fn batch_tasks(config: &AppConfig, corpus: &crate::CorpusArgs, partition: Partition) -> Result<Batch> {
    let tuples = load_tuples(corpus.corpus.as_deref().unwrap_or(&config.corpus.out))?;
    let split = load_split(corpus.split.as_deref().unwrap_or(&config.split.path))?;
    let (tasks, warnings) = translation_tasks(&tuples, &split, &corpus.directions, partition);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if tasks.is_empty() {
        return Err(config_error("no tasks selected; check --direction and the split"));
    }
    Ok(Batch { tuples, split, tasks })
}

fn count_failures(outcomes: &[PipelineOutcome]) -> usize {
    outcomes.iter().filter(|o| !o.validated).count()
}

fn print_stats(manifest: &RunManifest) {
    print!("{}", emit_report(manifest, ReportFormat::Csv).lines().filter(|l| !l.starts_with('#')).fold(
        String::new(),
        |mut s, l| {
            s.push_str(l);
            s.push('\n');
            s
        },
    ));
}

pub fn run(mut config: AppConfig, args: RunArgs) -> Result<Status> {
    apply_pipeline_args(&mut config, &args.pipeline);
    apply_backend_args(&mut config, &args.backend)?;
    config.validate()?;
    let partition = match args.partition {
        PartitionArg::Train => Partition::Train,
        PartitionArg::Test => Partition::Test,
    };
    let batch = batch_tasks(&config, &args.corpus, partition)?;
    let selection: Vec<String> = batch.tasks.iter().map(|t| t.task_id.clone()).collect();
    let id = run_id(&config, "run", &selection.join(","));
    let run_root = config.runs_dir.join(&id);
    let ctx = context(&config, &run_root, shot_pool(&batch.tuples, &batch.split))?;
    write_snapshot(&config, &run_root)?;
    tracing::info!(run_dir = %run_root.display(), tasks = batch.tasks.len(), "starting run");
    let outcomes = run_batch(&batch.tasks, &config.pipeline, &ctx, config.parallelism)
        .with_context(|| format!("running batch in {}", run_root.display()))?;

    let mut manifest = RunManifest::new(id, config.snapshot(), provenance(&config, &ctx));
    manifest.points.push(PointResult::from_outcomes(GridPoint::of(&config.pipeline), ".".into(), &outcomes));
    manifest.write(&run_root).context("writing manifest")?;
    write_reports(&manifest, &run_root).context("writing reports")?;
    print_stats(&manifest);
    println!("run directory: {}", run_root.display());
    finish(args.strict, count_failures(&outcomes))
}

fn finish(strict: bool, failures: usize) -> Result<Status> {
    Ok(if strict && failures > 0 { Status::TaskFailures(failures) } else { Status::Ok })
}

pub fn sweep(mut config: AppConfig, args: SweepArgs) -> Result<Status> {
    apply_backend_args(&mut config, &args.backend)?;
    if let Some(t) = args.temperatures {
        config.sweep.temperatures = t;
    }
    if let Some(m) = args.max_tokens {
        config.sweep.max_tokens = m;
    }
    if let Some(s) = args.shots {
        config.sweep.shots = s;
    }
    if let Some(p) = args.top_p {
        config.sweep.top_p = p;
    }
    if args.baseline {
        config.pipeline.agentic = false;
    }
    config.validate()?;
    for p in config.sweep.points() {
        p.apply(&config.pipeline).validate().map_err(config_error)?;
    }
    let batch = batch_tasks(&config, &args.corpus, Partition::Test)?;
    let selection: Vec<String> = batch.tasks.iter().map(|t| t.task_id.clone()).collect();
    let id = run_id(&config, "sweep", &selection.join(","));
    let run_root = config.runs_dir.join(&id);
    let ctx = context(&config, &run_root, shot_pool(&batch.tuples, &batch.split))?;
    write_snapshot(&config, &run_root)?;
    tracing::info!(run_dir = %run_root.display(), tasks = batch.tasks.len(), points = config.sweep.points().len(), "starting sweep");
    let manifest = run_sweep(
        &config.sweep,
        &batch.tasks,
        &config.pipeline,
        &ctx,
        config.parallelism,
        &id,
        config.snapshot(),
        provenance(&config, &ctx),
    )
    .with_context(|| format!("running sweep in {}", run_root.display()))?;
    write_reports(&manifest, &run_root).context("writing reports")?;
    print_stats(&manifest);
    println!("run directory: {}", run_root.display());
    let mut failures = 0;
    for p in &manifest.points {
        failures += count_failures(&load_outcomes(&run_root.join(&p.run_dir).join(OUTCOMES_FILE)).unwrap_or_default());
    }
    finish(args.strict, failures)
}

/// Rebuilds every point from its sealed outcomes so the reports depend only
/// on the run directory.
fn reload_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_FILE);
    let mut manifest = RunManifest::load(&path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    for p in &mut manifest.points {
        let outcomes_path = dir.join(&p.run_dir).join(OUTCOMES_FILE);
        if outcomes_path.is_file() {
            let outcomes = load_outcomes(&outcomes_path).with_context(|| format!("reading {}", outcomes_path.display()))?;
            *p = PointResult::from_outcomes(p.point, p.run_dir.clone(), &outcomes);
        }
    }
    manifest.sort_points();
    Ok(manifest)
}

pub fn report(args: ReportArgs) -> Result<Status> {
    let manifest = reload_manifest(&args.run_dir)?;
    let single = match args.format {
        FormatArg::Md => Some(ReportFormat::Markdown),
        FormatArg::Csv => Some(ReportFormat::Csv),
        FormatArg::Json => Some(ReportFormat::Json),
        FormatArg::All => None,
    };
    match (args.stdout, single) {
        (true, Some(f)) => print!("{}", emit_report(&manifest, f)),
        (true, None) => return Err(config_error("--stdout needs a single --format")),
        (false, Some(f)) => {
            let path = args.run_dir.join(f.file_name());
            write_atomic(&path, emit_report(&manifest, f).as_bytes()).context("writing report")?;
            println!("{}", path.display());
        }
        (false, None) => {
            for path in write_reports(&manifest, &args.run_dir).context("writing reports")? {
                println!("{}", path.display());
            }
        }
    }
    Ok(Status::Ok)
}

pub fn export_finetune(config: AppConfig, args: FinetuneArgs) -> Result<Status> {
    let tuples = load_tuples(args.corpus.corpus.as_deref().unwrap_or(&config.corpus.out))?;
    let split = load_split(args.corpus.split.as_deref().unwrap_or(&config.split.path))?;
    let options = FinetuneOptions {
        templates: templates(&config)?,
        counter: config.corpus.token_counter().map_err(|e| config_error(e.to_string()))?,
        context_limit: args.context_limit.unwrap_or(config.finetune.context_limit),
        drop_over_context: args.drop_over_context || config.finetune.drop_over_context,
        directions: args.corpus.directions.clone(),
    };
    let exported = export(&tuples, &split, &options);
    for w in &exported.warnings {
        eprintln!("warning: {w}");
    }
    write_finetune(&exported, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} record(s) to {} ({} over the {}-token context, {} dropped)",
        exported.records.len(),
        args.out.display(),
        exported.over_context.len(),
        options.context_limit,
        exported.dropped
    );
    Ok(Status::Ok)
}

fn backend_status(spec: &BackendSpec) -> (String, String) {
    match spec {
        BackendSpec::Mock { script: None, .. } => ("mock (echo)".into(), "ok".into()),
        BackendSpec::Mock { script: Some(p), .. } => {
            let status = if p.is_file() { "ok" } else { "missing script" };
            (format!("mock ({})", p.display()), status.into())
        }
        BackendSpec::Http(h) => {
            let key = std::env::var(API_KEY_ENV).map(|k| !k.is_empty()).unwrap_or(false);
            let status = if key { "ok".to_string() } else { format!("{API_KEY_ENV} not set") };
            (format!("http {} ({})", h.model, h.base_url), status)
        }
    }
}

pub fn verify_env(config: AppConfig) -> Result<Status> {
    let tc = toolchain(&config);
    let mut rows: Vec<[String; 4]> = Vec::new();
    for api in Api::ALL {
        let version = tc.version(api);
        let status = if version.is_some() { "ok" } else { "missing" };
        rows.push([
            api.display_name().to_string(),
            status.into(),
            config.toolchain.command(api).to_string(),
            version.unwrap_or_else(|| "-".into()),
        ]);
    }
    let repair = config.backends.repair.as_ref().unwrap_or(&config.backends.questioner);
    for (role, spec) in [("questioner", &config.backends.questioner), ("repair", repair)] {
        let (what, status) = backend_status(spec);
        rows.push([format!("backend:{role}"), status, what, "-".into()]);
    }
    let header = ["COMPONENT".to_string(), "STATUS".into(), "COMMAND/TARGET".into(), "VERSION".into()];
    let widths: Vec<usize> =
        (0..4).map(|i| rows.iter().chain([&header]).map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    for row in [&header].into_iter().chain(&rows) {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        println!("{}", line.join("  ").trim_end());
    }
    Ok(Status::Ok)
}

