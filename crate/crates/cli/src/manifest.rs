//! Run manifests: every artifact-producing command writes exactly one,
//! recording the command line, config hash, seed, input and output digests,
//! and wall-clock time, so any run can be audited and reproduced.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub versions: Versions,
    pub wall_clock_ms: u128,
    pub outputs: Vec<FileDigest>,
    pub extra: serde_json::Value,
}

#[derive(Serialize)]
pub struct Versions {
    pub acidmatch: &'static str,
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub struct ManifestBuilder {
    command: String,
    started: Instant,
    config_hash: Option<String>,
    seed: Option<u64>,
    inputs: Vec<FileDigest>,
    outputs: Vec<PathBuf>,
    extra: serde_json::Value,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            started: Instant::now(),
            config_hash: None,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            extra: serde_json::Value::Null,
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn config(&mut self, path: &Path) -> Result<&mut Self> {
        self.config_hash = Some(sha256_hex(path)?);
        Ok(self)
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(path)?,
        });
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.to_path_buf());
        self
    }

    pub fn extra(&mut self, extra: serde_json::Value) -> &mut Self {
        self.extra = extra;
        self
    }

    /// Digest outputs and write `manifest.json` into `out_dir`.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let outputs = self
            .outputs
            .iter()
            .map(|p| {
                Ok(FileDigest {
                    path: p.display().to_string(),
                    sha256: sha256_hex(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let manifest = RunManifest {
            command: self.command.clone(),
            argv: std::env::args().collect(),
            config_hash: self.config_hash.clone(),
            seed: self.seed,
            inputs: self
                .inputs
                .iter()
                .map(|d| FileDigest {
                    path: d.path.clone(),
                    sha256: d.sha256.clone(),
                })
                .collect(),
            versions: Versions {
                acidmatch: env!("CARGO_PKG_VERSION"),
            },
            wall_clock_ms: self.started.elapsed().as_millis(),
            outputs,
            extra: self.extra.clone(),
        };
        let path = out_dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
