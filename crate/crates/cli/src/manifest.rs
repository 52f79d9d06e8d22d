// SPDX-License-Identifier: Apache-2.0

//! Provenance record written next to every CSV.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub resolved_config: Value,
    pub seeds: Vec<u64>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub oracle_error_bounds: Value,
    pub output: String,
    pub rows: usize,
}

impl RunManifest {
    pub fn new(command: Vec<String>, resolved_config: Value, started_unix: f64) -> Self {
        Self {
            tool: "qeff",
            version: env!("CARGO_PKG_VERSION"),
            command,
            resolved_config,
            seeds: Vec::new(),
            started_unix,
            finished_unix: started_unix,
            oracle_error_bounds: Value::Object(Default::default()),
            output: String::new(),
            rows: 0,
        }
    }
}

pub fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// `out/fig1_s1.csv` -> `out/fig1_s1.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_next_to_csv() {
        assert_eq!(
            manifest_path(Path::new("a/fig1_s0.1.csv")),
            PathBuf::from("a/fig1_s0.1.manifest.json")
        );
    }
}
