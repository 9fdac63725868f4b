//! Run directories and their manifests.
//!
//! Each invocation writes into a fresh `OUT/<subcommand>_seed<seed>_<timestamp>/`
//! directory, so every output file belongs to exactly one `manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::params::Params;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every parameter the subcommand read, with defaults filled in.
    pub config: BTreeMap<String, Value>,
    pub seed: u64,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
    /// SHA-256 over `blob <len>\0<content>`, where the content is the
    /// subcommand, the resolved config, and any input files.
    pub input_hash: String,
    pub checks: Vec<CheckRecord>,
}

pub struct Run {
    subcommand: String,
    params: Params,
    root: PathBuf,
    name: String,
    dir: Option<PathBuf>,
    used: BTreeMap<String, Value>,
    inputs: Vec<u8>,
    outputs: Vec<String>,
    checks: Vec<CheckRecord>,
    started: String,
}

fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl Run {
    pub fn new(subcommand: &str, params: Params, root: PathBuf) -> Self {
        let seed = params.seed.unwrap_or(0);
        let stamp = Utc::now().format("%Y%m%dT%H%M%S%3fZ");
        Run {
            subcommand: subcommand.to_string(),
            name: format!("{subcommand}_seed{seed}_{stamp}"),
            params,
            root,
            dir: None,
            used: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            checks: Vec::new(),
            started: timestamp(),
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn record(&mut self, key: &str, value: impl Serialize) {
        self.used.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn seed(&mut self) -> u64 {
        let s = self.params.seed.unwrap_or(0);
        self.record("seed", s);
        s
    }

    pub fn tolerance(&mut self, name: &str, default: f64) -> f64 {
        let v = self.params.tolerance.get(name).copied().unwrap_or(default);
        self.record(&format!("tolerance.{name}"), v);
        v
    }

    /// Rejects tolerance names the subcommand does not use.
    pub fn allow_tolerances(&self, names: &[&str]) -> CliResult<()> {
        match self.params.tolerance.keys().find(|k| !names.contains(&k.as_str())) {
            Some(k) => Err(CliError::Usage(format!(
                "{} has no tolerance `{k}` (known: {})",
                self.subcommand,
                names.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn add_input(&mut self, bytes: &[u8]) {
        self.inputs.extend_from_slice(bytes);
    }

    /// The run directory, created on first use.
    pub fn dir(&mut self) -> CliResult<PathBuf> {
        if let Some(d) = &self.dir {
            return Ok(d.clone());
        }
        let mut dir = self.root.join(&self.name);
        let mut k = 1;
        while dir.exists() {
            dir = self.root.join(format!("{}_{k}", self.name));
            k += 1;
        }
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        self.dir = Some(dir.clone());
        Ok(dir)
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.dir()?.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(carleman_core::Error::from)? + "\n";
        self.write(name, text)
    }

    /// Records a file some library routine wrote inside the run directory.
    pub fn register(&mut self, path: &Path) -> CliResult<()> {
        let dir = self.dir()?;
        let rel = path.strip_prefix(&dir).unwrap_or(path);
        self.outputs.push(rel.to_string_lossy().replace('\\', "/"));
        Ok(())
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        let detail = detail.into();
        println!("{name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
        self.checks.push(CheckRecord {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn input_hash(&self) -> String {
        let mut content = serde_json::to_vec(&(&self.subcommand, &self.used)).expect("serializable");
        content.extend_from_slice(&self.inputs);
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", content.len()).as_bytes());
        h.update(&content);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Writes `manifest.json` and returns the exit code implied by the checks.
    pub fn finish(mut self) -> CliResult<i32> {
        let manifest = RunManifest {
            subcommand: self.subcommand.clone(),
            config: self.used.clone(),
            seed: self.params.seed.unwrap_or(0),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started.clone(),
            finished: timestamp(),
            outputs: self.outputs.clone(),
            input_hash: self.input_hash(),
            checks: self.checks.clone(),
        };
        let path = self.dir()?.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(carleman_core::Error::from)? + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        println!("run directory: {}", self.dir()?.display());
        Ok(if self.checks.iter().all(|c| c.pass) { 0 } else { 1 })
    }
}
