//! Run manifests: what was run, with which seeds, and a SHA-256 for every
//! file written.

use std::{
    fs,
    path::{Path, PathBuf},
    time::Instant,
};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.txt";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub code_version: String,
    pub master_seed: u64,
    /// Per-replica (graph or run) seeds, in replica order.
    pub seeds: Vec<u64>,
    pub workers: usize,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn load(dir: &Path) -> std::io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }

    /// Re-hashes every listed output; returns one message per mismatch.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        let mut problems = Vec::new();
        for o in &self.outputs {
            match fs::read(dir.join(&o.path)) {
                Ok(bytes) => {
                    if bytes.len() as u64 != o.bytes {
                        problems.push(format!("{}: {} bytes, manifest says {}", o.path, bytes.len(), o.bytes));
                    }
                    let h = sha256_hex(&bytes);
                    if h != o.sha256 {
                        problems.push(format!("{}: sha256 {h}, manifest says {}", o.path, o.sha256));
                    }
                }
                Err(e) => problems.push(format!("{}: {e}", o.path)),
            }
        }
        match fs::read(dir.join(CONFIG_FILE)) {
            Ok(bytes) if sha256_hex(&bytes) == self.config_digest => {}
            Ok(_) => problems.push(format!("{CONFIG_FILE}: digest does not match config_digest")),
            Err(e) => problems.push(format!("{CONFIG_FILE}: {e}")),
        }
        problems
    }
}

/// Writes files into the output directory and remembers their hashes.
pub struct OutputDir {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
    started: Instant,
}

impl OutputDir {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), outputs: Vec::new(), started: Instant::now() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.outputs.retain(|o| o.path != name);
        self.outputs.push(OutputEntry { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Writes `config.txt` and `manifest.json`; the config is not listed as an
    /// output since `config_digest` already covers it.
    pub fn finish(self, command: &str, config_text: &str, master_seed: u64, seeds: Vec<u64>, workers: usize) -> std::io::Result<RunManifest> {
        fs::write(self.dir.join(CONFIG_FILE), config_text)?;
        let manifest = RunManifest {
            command: command.to_string(),
            config_digest: sha256_hex(config_text.as_bytes()),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            seeds,
            workers,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        let mut s = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        s.push('\n');
        fs::write(self.dir.join(MANIFEST_FILE), s)?;
        Ok(manifest)
    }
}
