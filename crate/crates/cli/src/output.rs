use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use extbeam_core::{BeamParams, IntegratorConfig};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::args::Command;

/// Everything needed to rerun a command and get the same bytes back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub invocation: Command,
    pub params: Option<BeamParams>,
    pub config: Option<IntegratorConfig>,
    pub seed: Option<u64>,
    pub output_path: String,
    pub files: Vec<String>,
    pub complete: bool,
    pub error: Option<String>,
    pub result: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(invocation: &Command, prefix: &Path) -> Self {
        Self {
            command: invocation.name().to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            invocation: invocation.clone(),
            params: None,
            config: None,
            seed: None,
            output_path: prefix.display().to_string(),
            files: Vec::new(),
            complete: true,
            error: None,
            result: None,
        }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// `prefix` with `suffix` appended to its file name.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Write through a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Collects the artifacts of one run; files land only in [`Sink::finish`].
pub struct Sink {
    prefix: Option<PathBuf>,
    manifest: Option<RunManifest>,
    pending: Vec<(PathBuf, Vec<u8>)>,
}

impl Sink {
    pub fn new(invocation: &Command, prefix: Option<&Path>) -> Self {
        Self {
            prefix: prefix.map(Path::to_path_buf),
            manifest: prefix.map(|p| RunManifest::new(invocation, p)),
            pending: Vec::new(),
        }
    }

    pub fn manifest(&mut self) -> Option<&mut RunManifest> {
        self.manifest.as_mut()
    }

    /// Queue `bytes` as `PREFIX{suffix}`, or print them when there is no prefix
    /// and `to_stdout` is set.
    pub fn emit(&mut self, suffix: &str, bytes: Vec<u8>, to_stdout: bool) -> io::Result<()> {
        match &self.prefix {
            Some(prefix) => {
                let path = with_suffix(prefix, suffix);
                if let Some(m) = &mut self.manifest {
                    m.files.push(path.display().to_string());
                }
                self.pending.push((path, bytes));
            }
            None if to_stdout => io::stdout().lock().write_all(&bytes)?,
            None => {}
        }
        Ok(())
    }

    pub fn finish(self) -> io::Result<()> {
        for (path, bytes) in &self.pending {
            write_atomic(path, bytes)?;
        }
        if let (Some(prefix), Some(manifest)) = (&self.prefix, &self.manifest) {
            let mut text = serde_json::to_vec_pretty(manifest)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            text.push(b'\n');
            write_atomic(&with_suffix(prefix, ".manifest.json"), &text)?;
        }
        Ok(())
    }
}
