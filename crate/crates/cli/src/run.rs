//! One directory per run, named by command and config hash, holding the
//! resolved config, report files and a manifest. Every file records the
//! config hash and seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;

pub struct RunDir {
    pub path: PathBuf,
    hash: String,
    seed: u64,
    files: Vec<String>,
}

impl RunDir {
    pub fn create(root: &Path, command: &str, config: &ExperimentConfig) -> Result<Self> {
        let hash = config.hash();
        let path = root.join(format!("{command}-{}", &hash[..12]));
        fs::create_dir_all(&path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut run = Self { path, hash, seed: config.seed, files: Vec::new() };
        run.json("config.json", config)?;
        Ok(run)
    }

    /// Writes `{config_sha256, seed, report}`.
    pub fn json(&mut self, name: &str, report: &impl Serialize) -> Result<()> {
        let doc = json!({ "config_sha256": self.hash, "seed": self.seed, "report": report });
        self.write(name, serde_json::to_string_pretty(&doc)?.as_bytes())
    }

    /// CSV with a leading `#` provenance line.
    pub fn csv(&mut self, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
        let mut text = format!("# config_sha256={} seed={}\n{header}\n", self.hash, self.seed);
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.path.join(name), bytes).with_context(|| format!("cannot write {name}"))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, command: &str, checks: &BTreeMap<String, bool>, warnings: &[String], workers: usize) -> Result<PathBuf> {
        let manifest = json!({
            "command": command,
            "config_sha256": self.hash,
            "seed": self.seed,
            "workers": workers,
            "version": env!("CARGO_PKG_VERSION"),
            "files": self.files,
            "checks": checks,
            "passed": checks.values().all(|&ok| ok),
            "warnings": warnings,
        });
        self.write("manifest.json", serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        Ok(self.path)
    }
}

/// Reads the `report` field of a JSON file written by [`RunDir::json`].
pub fn read_report<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut doc: serde_json::Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(doc["report"].take())?)
}
