//! Flag and config-file parameters. Config files are flat JSON objects whose
//! keys mirror the long flags (`R_list` for `--R-list`); flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    /// Lattice dimension.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Window half-width (for normstar: the largest |j|_inf scanned).
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Carleman radius.
    #[arg(long = "R", global = true)]
    pub r: Option<f64>,
    /// Comma-separated list of radii (for kbessel: orders j).
    #[arg(long = "R-list", global = true, value_delimiter = ',')]
    pub r_list: Option<Vec<f64>>,
    /// Explicit weight strength; overrides the c R log R rule.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Constant in alpha = c R log R.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Sup-norm bound of the potential.
    #[arg(long = "L", global = true)]
    pub l: Option<f64>,
    /// Bound on the solution norm.
    #[arg(long = "A", global = true)]
    pub a: Option<f64>,
    /// Decay rate mu.
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    #[arg(long = "beta-max", global = true)]
    pub beta_max: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Time step of the trapezoidal scheme.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", global = true)]
    pub t: Option<f64>,
    /// Subcommand-specific mode (see each subcommand's help).
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Extra lattice beyond the counterexample diamond.
    #[arg(long, global = true)]
    pub margin: Option<i64>,
    /// Saved counterexample sidecar (`.json`) for verify-counterexample.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Flat JSON file of parameters; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory that receives the run directories.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    /// Override a check tolerance, e.g. `--tolerance commutator=1e-10`.
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    pub tolerance: Vec<String>,
}

/// Parameters after merging the config file under the flags.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub r: Option<f64>,
    pub r_list: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub l: Option<f64>,
    pub a: Option<f64>,
    pub mu: Option<f64>,
    pub beta_max: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub t: Option<f64>,
    pub mode: Option<String>,
    pub margin: Option<i64>,
    pub input: Option<PathBuf>,
    pub tolerance: BTreeMap<String, f64>,
}

fn field<T: DeserializeOwned>(key: &str, v: &Value) -> CliResult<Option<T>> {
    serde_json::from_value(v.clone())
        .map(Some)
        .map_err(|e| CliError::config(key, e.to_string()))
}

/// Reads a flat JSON config. Unknown keys and ill-typed values are errors
/// that name the key.
pub fn load_config(path: &Path) -> CliResult<Params> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage(format!("{}: expected a JSON object", path.display())));
    };
    params_from_map(&map)
}

pub fn params_from_map(map: &Map<String, Value>) -> CliResult<Params> {
    let mut p = Params::default();
    for (key, v) in map {
        match key.as_str() {
            "d" => p.d = field(key, v)?,
            "M" => p.m = field(key, v)?,
            "R" => p.r = field(key, v)?,
            "R_list" => p.r_list = field(key, v)?,
            "alpha" => p.alpha = field(key, v)?,
            "c" => p.c = field(key, v)?,
            "L" => p.l = field(key, v)?,
            "A" => p.a = field(key, v)?,
            "mu" => p.mu = field(key, v)?,
            "beta_max" => p.beta_max = field(key, v)?,
            "trials" => p.trials = field(key, v)?,
            "seed" => p.seed = field(key, v)?,
            "dt" => p.dt = field(key, v)?,
            "T" => p.t = field(key, v)?,
            "mode" => p.mode = field(key, v)?,
            "margin" => p.margin = field(key, v)?,
            "input" => p.input = field(key, v)?,
            "tolerance" => p.tolerance = field(key, v)?.unwrap_or_default(),
            _ => return Err(CliError::config(key, "unknown key")),
        }
    }
    Ok(p)
}

fn parse_tolerance(s: &str) -> CliResult<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--tolerance expects NAME=VALUE, got `{s}`")))?;
    let v: f64 = value
        .parse()
        .map_err(|_| CliError::Usage(format!("--tolerance {name}: `{value}` is not a number")))?;
    if !(v >= 0.0) {
        return Err(CliError::Usage(format!("--tolerance {name} must be nonnegative")));
    }
    Ok((name.to_string(), v))
}

impl ParamArgs {
    pub fn resolve(&self) -> CliResult<Params> {
        let mut p = match &self.config {
            Some(path) => load_config(path)?,
            None => Params::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => { $( if self.$f.is_some() { p.$f = self.$f.clone(); } )* };
        }
        over!(d, m, r, r_list, alpha, c, l, a, mu, beta_max, trials, seed, dt, t, mode, margin, input);
        for s in &self.tolerance {
            let (name, v) = parse_tolerance(s)?;
            p.tolerance.insert(name, v);
        }
        Ok(p)
    }
}
