use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};

/// Crate version plus the source revision when built from a git checkout.
pub fn version_string() -> String {
    match option_env!("RYDBERG_CZ_GIT_REV") {
        Some(rev) if !rev.is_empty() => format!("{}-g{rev}", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Formats a float for CSV: shortest round-trip representation, '.' decimal.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

/// A CSV table accumulated in memory and written at once.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Record written next to every result set; together with the embedded
/// config it is enough to repeat the run.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub samples: usize,
    pub paper_scale: bool,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub config: RunConfig,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            version: version_string(),
            command: command.to_string(),
            config_sha256: config_hash(cfg),
            seed: cfg.sampling.seed,
            samples: cfg.sampling.samples,
            paper_scale: cfg.sampling.paper_scale,
            files: Vec::new(),
            notes: Vec::new(),
            config: cfg.clone(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(dir.join("manifest.toml"), text)?;
        Ok(())
    }
}

/// Output directory that tracks the files written into it.
pub struct OutDir {
    pub path: PathBuf,
    pub manifest: Manifest,
}

impl OutDir {
    pub fn create(path: PathBuf, command: &str, cfg: &RunConfig) -> Result<Self> {
        fs::create_dir_all(&path)?;
        Ok(Self { path, manifest: Manifest::new(command, cfg) })
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        t.write(&self.path.join(name))?;
        self.manifest.files.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.path.join(name), body)?;
        self.manifest.files.push(name.to_string());
        Ok(())
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.manifest.notes.push(s.into());
    }

    pub fn finish(self) -> Result<PathBuf> {
        self.manifest.write(&self.path)?;
        Ok(self.path)
    }
}
