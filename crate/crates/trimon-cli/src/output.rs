//! Report serialization: complex matrices as [re, im] pairs (row-major),
//! numeric CSV tables, output-directory plumbing.

use crate::error::{CliError, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use trimon_core::linalg::{CMatrix, CVector};

pub fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

pub fn state_json(v: &CVector) -> Value {
    let entries: Vec<[f64; 2]> = (0..v.len()).map(|i| [v[i].re, v[i].im]).collect();
    json!(entries)
}

pub struct OutputDir {
    pub path: PathBuf,
}

impl OutputDir {
    pub fn create(path: &Path) -> Result<Self> {
        std::fs::create_dir_all(path).map_err(|e| CliError::config_io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
        })
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        let file = self.path.join(name);
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Config(format!("serializing {name}: {e}")))?;
        std::fs::write(&file, text + "\n").map_err(|e| CliError::config_io(&file, e))?;
        Ok(file)
    }

    pub fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> Result<PathBuf> {
        let file = self.path.join(name);
        let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(&file, text).map_err(|e| CliError::config_io(&file, e))?;
        Ok(file)
    }

    pub fn read_json_if_present(&self, name: &str) -> Option<Value> {
        let file = self.path.join(name);
        let text = std::fs::read_to_string(file).ok()?;
        serde_json::from_str(&text).ok()
    }
}
