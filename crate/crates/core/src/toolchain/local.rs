use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::{CompileResult, CompileStatus, PassDetector, RunResult, Toolchain, Verdict};
use crate::api::Api;
use crate::util::Semaphore;

/// One compiler invocation. `{src}` and `{out}` are substituted; the
/// command is split on whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompilerCommand {
    pub cmd: String,
}

impl From<&str> for CompilerCommand {
    fn from(cmd: &str) -> Self {
        CompilerCommand { cmd: cmd.into() }
    }
}

/// Compiler commands per API and execution limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolchainConfig {
    pub serial: CompilerCommand,
    pub openmp: CompilerCommand,
    pub cuda: CompilerCommand,
    pub compile_timeout_s: u64,
    pub run_timeout_s: u64,
    /// Per-stream capture cap in bytes.
    pub output_cap: usize,
    /// Concurrent GPU executions allowed.
    pub gpu_slots: usize,
}

impl Default for ToolchainConfig {
    fn default() -> Self {
        ToolchainConfig {
            serial: "g++ -O2 {src} -o {out}".into(),
            openmp: "g++ -O2 -fopenmp {src} -o {out}".into(),
            cuda: "nvcc -O2 {src} -o {out}".into(),
            compile_timeout_s: 120,
            run_timeout_s: 300,
            output_cap: 4 * 1024 * 1024,
            gpu_slots: 1,
        }
    }
}

impl ToolchainConfig {
    pub fn command(&self, api: Api) -> &str {
        match api {
            Api::Serial => &self.serial.cmd,
            Api::OpenMP => &self.openmp.cmd,
            Api::Cuda => &self.cuda.cmd,
        }
    }
}

/// Runs the configured compilers as subprocesses.
#[derive(Debug)]
pub struct LocalToolchain {
    config: ToolchainConfig,
    gpu: Semaphore,
}

impl LocalToolchain {
    pub fn new(config: ToolchainConfig) -> Self {
        let gpu = Semaphore::new(config.gpu_slots);
        LocalToolchain { config, gpu }
    }

    pub fn config(&self) -> &ToolchainConfig {
        &self.config
    }

    fn program(&self, api: Api) -> Option<String> {
        self.config.command(api).split_whitespace().next().map(str::to_string)
    }
}

impl Default for LocalToolchain {
    fn default() -> Self {
        LocalToolchain::new(ToolchainConfig::default())
    }
}

impl Toolchain for LocalToolchain {
    fn compile(&self, source: &str, api: Api, workspace: &Path) -> CompileResult {
        let started = Instant::now();
        let elapsed = |s: Instant| s.elapsed().as_millis() as u64;
        let fail = |status, diagnostics: String| CompileResult {
            status,
            diagnostics,
            artifact_path: None,
            duration_ms: elapsed(started),
        };

        if let Err(e) = std::fs::create_dir_all(workspace) {
            return fail(CompileStatus::Failed, format!("cannot create workspace: {e}"));
        }
        let src_name = format!("src.{}", api.file_extension());
        if let Err(e) = std::fs::write(workspace.join(&src_name), source) {
            return fail(CompileStatus::Failed, format!("cannot write source: {e}"));
        }
        let argv: Vec<String> = self
            .config
            .command(api)
            .split_whitespace()
            .map(|w| w.replace("{src}", &src_name).replace("{out}", "bin"))
            .collect();
        let Some((program, args)) = argv.split_first() else {
            return fail(CompileStatus::ToolchainMissing, format!("no compiler configured for {api}"));
        };

        let child = Command::new(program)
            .args(args)
            .current_dir(workspace)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn();
        let child = match child {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return fail(CompileStatus::ToolchainMissing, format!("{program}: not found"));
            }
            Err(e) => return fail(CompileStatus::Failed, format!("{program}: {e}")),
        };
        let timeout = Duration::from_secs(self.config.compile_timeout_s);
        let out = supervise(child, timeout, self.config.output_cap);

        let mut diagnostics = out.stdout;
        diagnostics.push_str(&out.stderr);
        if out.timed_out {
            diagnostics.push_str(&format!("\ncompiler timed out after {}s\n", timeout.as_secs()));
        }
        let _ = std::fs::write(workspace.join("compile.log"), &diagnostics);

        let artifact = workspace.join("bin");
        let ok = !out.timed_out && out.status.is_some_and(|s| s.success()) && artifact.is_file();
        CompileResult {
            status: if ok { CompileStatus::Ok } else { CompileStatus::Failed },
            diagnostics,
            artifact_path: ok.then_some(artifact),
            duration_ms: elapsed(started),
        }
    }

    fn run(
        &self,
        artifact: &Path,
        api: Api,
        timeout: Duration,
        args: &[String],
        detector: &PassDetector,
    ) -> RunResult {
        let _slot = (api == Api::Cuda).then(|| self.gpu.acquire());
        let started = Instant::now();
        let workdir = artifact.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        // The child starts in `workdir`, so a relative artifact path would not resolve.
        let exe = std::path::absolute(artifact).unwrap_or_else(|_| artifact.to_path_buf());
        let child = Command::new(&exe)
            .args(args)
            .current_dir(&workdir)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn();
        let child = match child {
            Ok(c) => c,
            Err(e) => {
                return RunResult {
                    exit_code: None,
                    stdout: String::new(),
                    stderr: format!("cannot execute {}: {e}", artifact.display()),
                    verdict: Verdict::Crash,
                    duration_ms: started.elapsed().as_millis() as u64,
                }
            }
        };
        let out = supervise(child, timeout, self.config.output_cap);
        let duration_ms = started.elapsed().as_millis() as u64;
        let exit_code = out.status.and_then(|s| s.code());
        let verdict = if out.timed_out {
            Verdict::Timeout
        } else {
            match exit_code {
                None => Verdict::Crash,
                Some(0) if detector.matches(&out.stdout, &out.stderr) => Verdict::Pass,
                Some(_) => Verdict::Fail,
            }
        };
        let log = format!(
            "exit: {exit_code:?}\nverdict: {verdict:?}\n--- stdout ---\n{}\n--- stderr ---\n{}\n",
            out.stdout, out.stderr
        );
        let _ = std::fs::write(workdir.join("run.log"), log);
        RunResult { exit_code, stdout: out.stdout, stderr: out.stderr, verdict, duration_ms }
    }

    fn run_timeout(&self) -> Duration {
        Duration::from_secs(self.config.run_timeout_s)
    }

    fn available(&self, api: Api) -> bool {
        self.version(api).is_some()
    }

    fn version(&self, api: Api) -> Option<String> {
        let program = self.program(api)?;
        let out = Command::new(&program)
            .arg("--version")
            .stdin(Stdio::null())
            .output()
            .ok()?;
        if !out.status.success() {
            return None;
        }
        let text = String::from_utf8_lossy(&out.stdout);
        // nvcc prints its release on the last non-empty line; gcc/clang on the first.
        let line = if api == Api::Cuda {
            text.lines().rev().find(|l| !l.trim().is_empty())
        } else {
            text.lines().next()
        };
        Some(line.unwrap_or(&program).trim().to_string())
    }
}

struct Supervised {
    status: Option<ExitStatus>,
    timed_out: bool,
    stdout: String,
    stderr: String,
}

/// Waits for `child` with a deadline, draining both pipes on helper threads
/// and keeping at most `cap` bytes of each.
fn supervise(mut child: std::process::Child, timeout: Duration, cap: usize) -> Supervised {
    let drain = |pipe: Option<Box<dyn Read + Send>>| {
        std::thread::spawn(move || {
            let mut kept = Vec::new();
            if let Some(mut pipe) = pipe {
                let mut buf = [0u8; 8192];
                while let Ok(n) = pipe.read(&mut buf) {
                    if n == 0 {
                        break;
                    }
                    let room = cap.saturating_sub(kept.len());
                    kept.extend_from_slice(&buf[..n.min(room)]);
                }
            }
            String::from_utf8_lossy(&kept).into_owned()
        })
    };
    let out = drain(child.stdout.take().map(|p| Box::new(p) as Box<dyn Read + Send>));
    let err = drain(child.stderr.take().map(|p| Box::new(p) as Box<dyn Read + Send>));

    let (status, timed_out) = match child.wait_timeout(timeout) {
        Ok(Some(status)) => (Some(status), false),
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            (None, true)
        }
        Err(_) => {
            let _ = child.kill();
            (child.wait().ok(), false)
        }
    };
    Supervised {
        status,
        timed_out,
        stdout: out.join().unwrap_or_default(),
        stderr: err.join().unwrap_or_default(),
    }
}
