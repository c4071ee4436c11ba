use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use skylane::ScenarioConfig;

/// Writes result files into one directory without ever replacing an existing file.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    /// First free name among `stem.ext`, `stem-v2.ext`, `stem-v3.ext`, ...
    pub fn versioned(&self, stem: &str, ext: &str) -> PathBuf {
        let base = self.root.join(format!("{stem}.{ext}"));
        if !base.exists() {
            return base;
        }
        (2..)
            .map(|v| self.root.join(format!("{stem}-v{v}.{ext}")))
            .find(|p| !p.exists())
            .expect("unbounded version range")
    }

    pub fn write(&mut self, stem: &str, ext: &str, contents: &[u8]) -> io::Result<PathBuf> {
        let path = self.versioned(stem, ext);
        let mut file = fs::OpenOptions::new().write(true).create_new(true).open(&path)?;
        file.write_all(contents)?;
        log::info!("wrote {}", path.display());
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, stem: &str, value: &T) -> io::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        text.push('\n');
        self.write(stem, "json", text.as_bytes())
    }

    /// Records the manifest for everything written so far.
    pub fn finish(mut self, command: &str, config: &ScenarioConfig) -> io::Result<PathBuf> {
        let outputs =
            self.written.iter().map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned()).collect();
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            master_seed: config.master_seed,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            outputs,
            config: config.clone(),
        };
        self.write_json("manifest", &manifest)
    }
}

/// Everything needed to rerun a command bit-for-bit; `config` is fully resolved.
#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub master_seed: u64,
    pub timestamp_unix: u64,
    pub outputs: Vec<String>,
    pub config: ScenarioConfig,
}

pub fn csv_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}
