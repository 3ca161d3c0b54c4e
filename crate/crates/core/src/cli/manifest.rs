//! Output directory bookkeeping and the run manifest.
//!
//! Any stale `manifest.json` is removed before work starts and the new one is
//! written through a temporary file and a rename, so a manifest on disk always
//! describes a finished run.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub threads: usize,
    pub config: serde_json::Value,
    pub verdict: String,
    pub exit_code: i32,
    /// Named wall-clock timings in seconds.
    pub timings: serde_json::Map<String, serde_json::Value>,
    pub files: Vec<FileEntry>,
    /// Modelling choices the outputs depend on.
    #[serde(default)]
    pub notes: Vec<String>,
    pub complete: bool,
}

pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
    notes: Vec<String>,
    started: Instant,
    pub timings: serde_json::Map<String, serde_json::Value>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(io(root))?;
        let m = root.join(MANIFEST);
        if m.exists() {
            fs::remove_file(&m).map_err(io(&m))?;
        }
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new(), notes: Vec::new(), started: Instant::now(), timings: Default::default() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Registers a file written by other code.
    pub fn register(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.path(name);
        write_atomic(&p, bytes)?;
        self.register(name);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn time(&mut self, name: &str, seconds: f64) {
        self.timings.insert(name.to_string(), serde_json::json!(seconds));
    }

    /// Hashes every registered file and writes the manifest last.
    pub fn finish(mut self, command: &str, config: serde_json::Value, verdict: &str, exit_code: i32) -> Result<Manifest> {
        let total = self.started.elapsed().as_secs_f64();
        self.time("total_seconds", total);
        let mut files = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let p = self.root.join(name);
            let bytes = fs::read(&p).map_err(io(&p))?;
            files.push(FileEntry { path: name.clone(), bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) });
        }
        let manifest = Manifest {
            tool: "hallmild".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            threads: rayon::current_num_threads(),
            config,
            verdict: verdict.into(),
            exit_code,
            timings: self.timings,
            files,
            notes: self.notes,
            complete: true,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.root.join(MANIFEST), text.as_bytes())?;
        Ok(manifest)
    }
}

/// Write to `<path>.tmp`, sync, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(io(&tmp))?;
        f.write_all(bytes).map_err(io(&tmp))?;
        f.sync_all().map_err(io(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io(path))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let p = dir.join(MANIFEST);
    let text = fs::read_to_string(&p).map_err(io(&p))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))
}
