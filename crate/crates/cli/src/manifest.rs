use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Embedded in every output so a run can be repeated exactly.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: &'static str,
    pub timestamp: String,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            command: command.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            inputs: Vec::new(),
        }
    }

    /// Reads an input file, recording its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }
}

/// Where results go: always stdout, and files under `dir` when given.
pub struct Sink {
    pub dir: Option<PathBuf>,
}

impl Sink {
    pub fn emit(
        &self,
        name: &str,
        manifest: &RunManifest,
        result: &impl Serialize,
        csv: Option<&str>,
    ) -> Result<()> {
        let doc = serde_json::json!({ "manifest": manifest, "result": result });
        let text = serde_json::to_string_pretty(&doc)?;
        let mut out = std::io::stdout().lock();
        match writeln!(out, "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        }
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            fs::write(dir.join(format!("{name}.json")), format!("{text}\n"))?;
            if let Some(csv) = csv {
                let header = format!("# manifest {}\n", serde_json::to_string(manifest)?);
                fs::write(dir.join(format!("{name}.csv")), header + csv)?;
            }
        }
        Ok(())
    }

    /// Witness files are written even without `--out`.
    pub fn witness(
        &self,
        name: &str,
        manifest: &RunManifest,
        payload: &impl Serialize,
    ) -> Result<PathBuf> {
        let dir = self.dir.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        let path = dir.join(format!("{name}.json"));
        let doc = serde_json::json!({ "manifest": manifest, "witness": payload });
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(path)
    }
}
