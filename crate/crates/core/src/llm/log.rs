use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use super::CompletionRecord;

/// Append-only record of every completion call. Appends are serialised
/// through one lock; with a file attached each record is one JSON line.
#[derive(Debug)]
pub struct CompletionLog {
    inner: Mutex<Inner>,
}

#[derive(Debug)]
struct Inner {
    records: Vec<CompletionRecord>,
    file: Option<File>,
}

impl CompletionLog {
    pub fn in_memory() -> Self {
        CompletionLog { inner: Mutex::new(Inner { records: Vec::new(), file: None }) }
    }

    /// Opens `path` for appending. Existing lines are not loaded.
    pub fn append_to(path: &Path) -> std::io::Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(CompletionLog { inner: Mutex::new(Inner { records: Vec::new(), file: Some(file) }) })
    }

    pub fn append(&self, record: CompletionRecord) {
        let mut inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(file) = inner.file.as_mut() {
            let mut line = serde_json::to_string(&record).expect("record serializes");
            line.push('\n');
            if let Err(e) = file.write_all(line.as_bytes()).and_then(|_| file.flush()) {
                tracing::error!("completion log write failed: {e}");
            }
        }
        inner.records.push(record);
    }

    /// Records appended through this handle, in order.
    pub fn records(&self) -> Vec<CompletionRecord> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).records.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn read_file(path: &Path) -> std::io::Result<Vec<CompletionRecord>> {
        let reader = BufReader::new(File::open(path)?);
        let mut out = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(std::io::Error::other)?);
        }
        Ok(out)
    }
}
