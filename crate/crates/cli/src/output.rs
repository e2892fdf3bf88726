use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "MANIFEST.csv";
const MANIFEST_HEADER: [&str; 11] = [
    "file",
    "scenario",
    "scenario_sha256",
    "subcommand",
    "core_version",
    "cli_version",
    "rtol",
    "atol",
    "escape_radius",
    "complete",
    "unix_time",
];

/// Per-run settings recorded next to every output file.
pub struct RunInfo {
    pub scenario: String,
    pub scenario_sha256: String,
    pub subcommand: &'static str,
    pub rtol: f64,
    pub atol: f64,
    pub escape_radius: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Output directory of one run. Data files carry no timestamps; the
/// manifest row written by [`Output::finish`] does.
pub struct Output {
    dir: PathBuf,
    info: RunInfo,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, info: RunInfo) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            info,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file_name(&self, ext: &str) -> String {
        format!("{}.{}.{ext}", self.info.scenario, self.info.subcommand)
    }

    pub fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let name = self.file_name("csv");
        let path = self.dir.join(&name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.files.push(name);
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> Result<PathBuf, CliError> {
        let name = self.file_name("json");
        let path = self.dir.join(&name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name);
        Ok(path)
    }

    /// Appends one manifest row per written file.
    pub fn finish(self, complete: bool) -> Result<(), CliError> {
        let path = self.dir.join(MANIFEST);
        let fresh = !path.exists();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| CliError::io(&path, e))?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        if fresh {
            w.write_record(MANIFEST_HEADER).map_err(io)?;
        }
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let info = &self.info;
        for f in &self.files {
            w.write_record([
                f.as_str(),
                &info.scenario,
                &info.scenario_sha256,
                info.subcommand,
                impulsive_duffing::VERSION,
                env!("CARGO_PKG_VERSION"),
                &format!("{:e}", info.rtol),
                &format!("{:e}", info.atol),
                &format!("{:e}", info.escape_radius),
                if complete { "true" } else { "false" },
                &now.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        let mut inner = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        inner.flush().map_err(|e| CliError::io(&path, e))
    }
}
