use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory whose files are written atomically and recorded for the manifest.
pub struct Output {
    dir: PathBuf,
    written: BTreeMap<String, String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            written: BTreeMap::new(),
        })
    }

    /// Temp file in the target directory, then rename over `name`.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        tmp.write_all(bytes).map_err(|e| CliError::io(&target, e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(&target, e))?;
        tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
        self.written.insert(name.to_string(), sha256_hex(bytes));
        log::info!("wrote {}", target.display());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("output values serialize");
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        for r in rows {
            w.write_record(r).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        self.write(name, &bytes)
    }

    pub fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<u8>) -> std::result::Result<(), csv::Error>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::io(&self.dir.join(name), e))?;
        self.write(name, &buf)
    }

    /// Writes `manifest.json`: inputs with content hashes, the effective
    /// config and every output written so far. No timestamps or host data.
    pub fn finish(mut self, command: &str, config: Value, inputs: &[PathBuf]) -> Result<()> {
        let mut input_list = Vec::new();
        for path in inputs {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            input_list.push(json!({ "path": path.display().to_string(), "sha256": sha256_hex(&bytes) }));
        }
        let outputs: Vec<Value> = self
            .written
            .iter()
            .map(|(file, hash)| json!({ "file": file, "sha256": hash }))
            .collect();
        let manifest = json!({
            "tool": "exagg",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "inputs": input_list,
            "outputs": outputs,
        });
        self.write_json("manifest.json", &manifest)
    }
}

pub fn fixed(x: f64, decimals: usize) -> String {
    format!("{x:.decimals$}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
