//! Reproducibility record written next to the results of every command.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::to_json;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub input: String,
    pub input_sha256: String,
    pub seed: u64,
    pub version: String,
    /// The command line options that shaped the results.
    pub options: BTreeMap<String, String>,
    /// Seconds per method (or per phase, such as `sweep`).
    pub wall_time: BTreeMap<String, f64>,
    /// Result files, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, input: &Path, input_sha256: &str, seed: u64) -> Self {
        RunManifest {
            command: command.into(),
            input: input.display().to_string(),
            input_sha256: input_sha256.into(),
            seed,
            version: VERSION.into(),
            options: BTreeMap::new(),
            wall_time: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn option(&mut self, name: &str, value: impl ToString) {
        self.options.insert(name.into(), value.to_string());
    }

    pub fn file_name(&self) -> String {
        format!("{}-manifest.json", self.command)
    }
}

/// Collects the files of one command inside the output directory and
/// records each of them in the manifest.
pub struct OutputDir {
    root: PathBuf,
    pub manifest: RunManifest,
}

impl OutputDir {
    pub fn create(root: &Path, manifest: RunManifest) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), manifest })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, contents)?;
        if !self.manifest.outputs.iter().any(|o| o == name) {
            self.manifest.outputs.push(name.into());
        }
        Ok(path)
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        let path = self.root.join(self.manifest.file_name());
        std::fs::write(&path, to_json(&self.manifest))?;
        Ok(path)
    }
}
