mod commands;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unipar::Direction;

/// Curate Serial/OpenMP/CUDA kernel corpora and translate between them with
/// an LLM plus compiler and runtime feedback.
#[derive(Debug, Parser)]
#[command(name = "unipar", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// TOML configuration file; `unipar.toml` in the working directory is used when present.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for compiles, runs and LLM calls.
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[arg(long, global = true)]
    pub run_id: Option<String>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan a benchmark tree and write the curated corpus.
    Curate(CurateArgs),
    /// Split the corpus into train and test tasks per direction.
    Split(SplitArgs),
    /// Translate one task and print its outcome.
    Translate(TranslateArgs),
    /// Translate every test task of the split.
    Run(RunArgs),
    /// Run the decoding grid.
    Sweep(SweepArgs),
    /// Regenerate reports for a run directory.
    Report(ReportArgs),
    /// Write instruction-tuning records for the train split.
    ExportFinetune(FinetuneArgs),
    /// Print compiler and backend availability.
    VerifyEnv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Counter {
    Approx,
    Vocab,
}

#[derive(Debug, Args)]
pub struct CurateArgs {
    /// Benchmark tree.
    #[arg(long)]
    pub root: Option<PathBuf>,
    /// Output corpus directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, value_enum)]
    pub counter: Option<Counter>,
    /// Token vocabulary for `--counter vocab`.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Compile and run every kept source.
    #[arg(long, value_enum)]
    pub verify: Option<OnOff>,
    /// `id,category` lines or a JSON object.
    #[arg(long)]
    pub categories: Option<PathBuf>,
    /// Do not derive Serial members from OpenMP sources.
    #[arg(long)]
    pub no_derive_serial: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Curated corpus directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Split manifest (JSON).
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Restrict to these directions (repeatable), e.g. cuda-to-omp.
    #[arg(long = "direction")]
    pub directions: Vec<Direction>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// `9:1` or a train fraction such as `0.9`.
    #[arg(long)]
    pub ratio: Option<String>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "direction")]
    pub directions: Vec<Direction>,
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    /// `mock:<script.jsonl>`, `echo`, `http` or `http:<model>`.
    #[arg(long)]
    pub backend: Option<String>,
    /// Backend for the repair agents; defaults to `--backend`.
    #[arg(long)]
    pub repair_backend: Option<String>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub top_p: Option<f64>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    #[arg(long)]
    pub model: Option<String>,
    /// Plain translation without compile or execution repair.
    #[arg(long)]
    pub baseline: bool,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    /// Task id (`cuda-to-omp.vecadd`) or benchmark id with `--direction`.
    pub task: String,
    #[arg(long = "direction")]
    pub direction: Option<Direction>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Split manifest providing shot examples.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionArg {
    Train,
    Test,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value = "test")]
    pub partition: PartitionArg,
    /// Exit 1 when any task is not validated.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Comma-separated temperatures.
    #[arg(long, value_delimiter = ',')]
    pub temperatures: Option<Vec<f64>>,
    /// Comma-separated max-token settings.
    #[arg(long, value_delimiter = ',')]
    pub max_tokens: Option<Vec<usize>>,
    /// Comma-separated shot counts.
    #[arg(long, value_delimiter = ',')]
    pub shots: Option<Vec<usize>>,
    #[arg(long)]
    pub top_p: Option<f64>,
    #[arg(long)]
    pub baseline: bool,
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Md,
    Csv,
    Json,
    All,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory holding `manifest.json`.
    pub run_dir: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub format: FormatArg,
    /// Print the report instead of writing files (single format only).
    #[arg(long)]
    pub stdout: bool,
}

#[derive(Debug, Args)]
pub struct FinetuneArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Output directory.
    #[arg(long, default_value = "finetune")]
    pub out: PathBuf,
    #[arg(long)]
    pub context_limit: Option<usize>,
    /// Leave out records over the context limit.
    #[arg(long)]
    pub drop_over_context: bool,
}

/// Errors the CLI maps to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit 2.
    Config(String),
    /// Anything else that stops the command: exit 1.
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<unipar::config::ConfigError> for CliError {
    fn from(e: unipar::config::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Success, or task-level failures under `--strict`.
pub enum Status {
    Ok,
    TaskFailures(usize),
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_env("UNIPAR_LOG")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .try_init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.global.verbose);
    let result = (|| {
        let config = commands::load_config(&cli.global)?;
        match cli.command {
            Command::Curate(a) => commands::curate(config, a),
            Command::Split(a) => commands::split(config, a),
            Command::Translate(a) => commands::translate(config, a),
            Command::Run(a) => commands::run(config, a),
            Command::Sweep(a) => commands::sweep(config, a),
            Command::Report(a) => commands::report(a),
            Command::ExportFinetune(a) => commands::export_finetune(config, a),
            Command::VerifyEnv => commands::verify_env(config),
        }
    })();
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::TaskFailures(n)) => {
            eprintln!("{n} task(s) not validated");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
