use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_SCHEMA: &str = "plgnet.manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct FileRecord {
    pub path: String,
    /// Absent for outputs carrying timings.
    pub sha256: Option<String>,
    pub deterministic: bool,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub schema: &'static str,
    pub command: &'static str,
    pub tool_version: &'static str,
    pub config: serde_json::Value,
    pub seeds: serde_json::Value,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the files of one run and writes them plus the manifest.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    config: serde_json::Value,
    seeds: serde_json::Value,
    inputs: Vec<FileRecord>,
    outputs: Vec<FileRecord>,
    pub warnings: Vec<String>,
}

impl Run {
    pub fn new(dir: &Path, command: &'static str, config: serde_json::Value) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config,
            seeds: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn set_seeds(&mut self, seeds: serde_json::Value) {
        self.seeds = seeds;
    }

    /// Reads an input file and records its hash under the path as given.
    pub fn read_input(&mut self, path: &Path) -> std::io::Result<Vec<u8>> {
        let bytes = fs::read(path)?;
        self.inputs.push(FileRecord {
            path: path.to_string_lossy().into_owned(),
            sha256: Some(sha256_hex(&bytes)),
            deterministic: true,
        });
        Ok(bytes)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8], deterministic: bool) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.outputs.push(FileRecord {
            path: name.to_string(),
            sha256: deterministic.then(|| sha256_hex(bytes)),
            deterministic,
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T, deterministic: bool) -> std::io::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        self.write(name, text.as_bytes(), deterministic)
    }

    pub fn finish(self) -> std::io::Result<()> {
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA,
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config: self.config,
            seeds: self.seeds,
            inputs: self.inputs,
            outputs: self.outputs,
            warnings: self.warnings,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(self.dir.join(MANIFEST_FILE), text)
    }
}
