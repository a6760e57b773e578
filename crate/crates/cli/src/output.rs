use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

/// Floats with 17 significant digits; `-0` prints as `0`.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
    /// SHA-256 of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, inputs: &[PathBuf]) -> CliResult<Self> {
        let mut digests = BTreeMap::new();
        for path in inputs {
            let bytes = fs::read(path)?;
            digests.insert(
                path.display().to_string(),
                hex::encode(Sha256::digest(&bytes)),
            );
        }
        Ok(Self {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            inputs: digests,
        })
    }
}

/// Writes `text` to `out` (stdout when absent) and, for files, the manifest
/// next to it as `<out>.manifest.json`.
pub fn emit(text: &str, out: Option<&Path>, manifest: &RunManifest) -> CliResult<()> {
    match out {
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
        Some(path) => {
            fs::write(path, text)?;
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
            fs::write(PathBuf::from(name), json + "\n")?;
        }
    }
    Ok(())
}
