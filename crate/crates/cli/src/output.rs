//! CSV writers, file checksums and the run manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// 17 significant digits, enough to round-trip any f64.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A CSV file with a fixed header; rows are written as they come.
pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
    columns: usize,
}

impl CsvOut {
    pub fn create<S: AsRef<str>>(path: PathBuf, header: &[S]) -> Result<Self, CliError> {
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut writer = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(BufWriter::new(file));
        writer.write_record(header.iter().map(|h| h.as_ref()))?;
        Ok(Self {
            path,
            writer,
            columns: header.len(),
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<(), CliError> {
        debug_assert_eq!(fields.len(), self.columns, "row width in {}", self.path.display());
        self.writer.write_record(fields.iter().map(|f| f.as_ref()))?;
        Ok(())
    }

    /// Floats only, each in [`float`] format.
    pub fn floats(&mut self, values: &[f64]) -> Result<(), CliError> {
        let fields: Vec<String> = values.iter().map(|&v| float(v)).collect();
        self.row(&fields)
    }

    /// Final marker row of a run that stopped early. It is a single field
    /// starting with `#` so readers can skip it as a comment.
    pub fn truncation_marker(&mut self, reason: &str) -> Result<(), CliError> {
        self.writer
            .write_record([format!("# truncated: {reason}")])?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.flush()?;
        Ok(self.path)
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    /// Named RNG streams used by the run, e.g. the shared ensemble path.
    pub streams: BTreeMap<String, u64>,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub status: String,
    /// File name to SHA-256 of its bytes.
    pub outputs: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

/// Collects output files and writes `manifest.json` once at the end.
pub struct Run {
    pub dir: PathBuf,
    command: String,
    config_sha256: String,
    seed: u64,
    started: Instant,
    started_unix: u64,
    outputs: Vec<PathBuf>,
    pub streams: BTreeMap<String, u64>,
    pub notes: Vec<String>,
}

impl Run {
    pub fn start(dir: &Path, command: &str, canonical_config: &str, seed: u64) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let config_path = dir.join("config.effective.toml");
        std::fs::write(&config_path, canonical_config).map_err(|e| CliError::io(&config_path, e))?;
        Ok(Self {
            dir: dir.to_owned(),
            command: command.to_owned(),
            config_sha256: sha256_hex(canonical_config.as_bytes()),
            seed,
            started: Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: vec![config_path],
            streams: BTreeMap::new(),
            notes: vec![],
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv<S: AsRef<str>>(&self, name: &str, header: &[S]) -> Result<CsvOut, CliError> {
        CsvOut::create(self.path(name), header)
    }

    pub fn record(&mut self, path: PathBuf) {
        if !self.outputs.contains(&path) {
            self.outputs.push(path);
        }
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.record(path);
        Ok(())
    }

    pub fn finish(self, status: &str) -> Result<(), CliError> {
        let mut outputs = BTreeMap::new();
        for p in &self.outputs {
            let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
            let name = p
                .strip_prefix(&self.dir)
                .unwrap_or(p)
                .to_string_lossy()
                .into_owned();
            outputs.insert(name, sha256_hex(&bytes));
        }
        let manifest = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: self.config_sha256,
            seed: self.seed,
            streams: self.streams,
            started_unix: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            status: status.to_owned(),
            outputs,
            notes: self.notes,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}
