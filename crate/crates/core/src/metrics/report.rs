use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{format_rate, RunManifest};
use crate::util::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json];

    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "report.md",
            ReportFormat::Csv => "report.csv",
            ReportFormat::Json => "report.json",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub fn emit_report(manifest: &RunManifest, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => markdown(manifest),
        ReportFormat::Csv => csv_report(manifest),
        ReportFormat::Json => json_report(manifest),
    }
}

/// Writes all three formats into `dir`; returns the paths written.
pub fn write_reports(manifest: &RunManifest, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    ReportFormat::ALL
        .iter()
        .map(|&f| {
            let path = dir.join(f.file_name());
            write_atomic(&path, emit_report(manifest, f).as_bytes()).map(|_| path)
        })
        .collect()
}

fn point_label(p: &super::GridPoint) -> String {
    format!("shots={} temperature={} max_tokens={} top_p={}", p.shots, p.temperature, p.max_tokens, p.top_p)
}

fn markdown(m: &RunManifest) -> String {
    let mut s = format!("# Run report: {}\n\n## Provenance\n\n", m.run_id);
    for (k, v) in &m.provenance {
        let _ = writeln!(s, "- {k}: {v}");
    }
    s.push_str("\n## Configuration\n\n```json\n");
    s.push_str(&serde_json::to_string_pretty(&m.config).expect("json value"));
    s.push_str("\n```\n");
    for p in &m.points {
        let _ = write!(s, "\n## {}\n\n", point_label(&p.point));
        s.push_str("| Direction | Tasks | Skipped | Compiled | Validated | Compilation rate | Validation rate |\n");
        s.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
        for st in p.stats.values() {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                st.direction,
                st.n_tasks,
                st.n_skipped,
                st.n_compiled,
                st.n_validated,
                format_rate(&st.compilation_rate),
                format_rate(&st.validation_rate)
            );
        }
        s.push_str("\n| Stage | Round | Newly compiled |\n|---|---:|---:|\n");
        for (sr, n) in &p.attribution.cells {
            let _ = writeln!(s, "| {} | {} | {n} |", sr.stage, sr.round);
        }
    }
    s
}

const CSV_HEADER: [&str; 12] = [
    "point",
    "shots",
    "temperature",
    "max_tokens",
    "top_p",
    "direction",
    "n_tasks",
    "n_skipped",
    "n_compiled",
    "n_validated",
    "compilation_rate",
    "validation_rate",
];

fn csv_report(m: &RunManifest) -> String {
    let mut out = format!("# run_id: {}\n", m.run_id);
    for (k, v) in &m.provenance {
        let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for p in &m.points {
        for st in p.stats.values() {
            w.write_record([
                p.point.id(),
                p.point.shots.to_string(),
                p.point.temperature.to_string(),
                p.point.max_tokens.to_string(),
                p.point.top_p.to_string(),
                st.direction.to_string(),
                st.n_tasks.to_string(),
                st.n_skipped.to_string(),
                st.n_compiled.to_string(),
                st.n_validated.to_string(),
                format_rate(&st.compilation_rate),
                format_rate(&st.validation_rate),
            ])
            .expect("in-memory write");
        }
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
    out
}

/// Numeric content of one CSV report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub point: String,
    pub shots: usize,
    pub temperature: f64,
    pub max_tokens: usize,
    pub top_p: f64,
    pub direction: String,
    pub n_tasks: u64,
    pub n_skipped: u64,
    pub n_compiled: u64,
    pub n_validated: u64,
    /// `None` for `n/a`.
    #[serde(deserialize_with = "rate_field")]
    pub compilation_rate: Option<f64>,
    #[serde(deserialize_with = "rate_field")]
    pub validation_rate: Option<f64>,
}

fn rate_field<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    let s = String::deserialize(d)?;
    if s == "n/a" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(serde::de::Error::custom)
}

pub fn parse_csv_report(text: &str) -> Result<Vec<CsvRow>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

fn json_report(m: &RunManifest) -> String {
    let points: Vec<_> = m
        .points
        .iter()
        .map(|p| {
            let directions: Vec<_> = p
                .stats
                .values()
                .map(|st| {
                    json!({
                        "direction": st.direction,
                        "n_tasks": st.n_tasks,
                        "n_skipped": st.n_skipped,
                        "n_compiled": st.n_compiled,
                        "n_validated": st.n_validated,
                        "compilation_rate": format_rate(&st.compilation_rate),
                        "validation_rate": format_rate(&st.validation_rate),
                        "validated_of_compiled": format_rate(&st.validated_of_compiled),
                        "round_attribution": st.round_attribution,
                    })
                })
                .collect();
            json!({"point": p.point, "id": p.point.id(), "directions": directions, "attribution": p.attribution})
        })
        .collect();
    let report = json!({
        "run_id": m.run_id,
        "provenance": m.provenance,
        "config": m.config,
        "points": points,
    });
    serde_json::to_string_pretty(&report).expect("json value") + "\n"
}
