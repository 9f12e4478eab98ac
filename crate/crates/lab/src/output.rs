use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{LabError, LabResult};

/// Files produced by a command, kept in memory until the run has succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    /// tolerance violations (exit code 1 when non-empty)
    pub violations: Vec<String>,
    /// one-line summary for the terminal
    pub summary: String,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> LabResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| LabError::Config(format!("json: {e}")))?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    /// One compact JSON record per line.
    pub fn jsonl<T: Serialize>(&mut self, name: &str, records: &[T]) -> LabResult<()> {
        let mut bytes = Vec::new();
        for r in records {
            serde_json::to_writer(&mut bytes, r).map_err(|e| LabError::Config(format!("json: {e}")))?;
            bytes.push(b'\n');
        }
        self.add(name, bytes);
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> LabResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| LabError::Config(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Config(format!("csv: {e}")))?;
        self.add(name, bytes);
        Ok(())
    }

    pub fn violation(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn write_to(&self, dir: &Path) -> LabResult<()> {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| LabError::io(path, e))?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}
