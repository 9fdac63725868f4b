use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::stepper::{EvolutionConfig, Stepper};
use crate::error::{Error, Result};
use crate::lattice::io::write_field;
use crate::lattice::{LatticeField, Potential};
use crate::numeric::{LogScalar, QuadratureRule};

/// Stored time levels of one evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub config: EvolutionConfig,
    /// Times of the stored snapshots.
    pub times: Vec<f64>,
    pub snapshots: Vec<LatticeField>,
    /// `||u(t_n)||` at every time level, stored or not.
    pub norm_log: Vec<f64>,
    /// Factor applied by [`normalize_observation`]; 1 for a raw run.
    pub scale: f64,
}

impl Trajectory {
    pub fn final_field(&self) -> &LatticeField {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    /// Largest `| ||u(t_n)|| / ||u(0)|| - 1 |` over all levels.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.norm_log[0];
        self.norm_log
            .iter()
            .map(|n| (n / n0 - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest relative change of the norm in a single step.
    pub fn max_step_drift(&self) -> f64 {
        self.norm_log
            .windows(2)
            .map(|w| (w[1] / w[0] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Trapezoidal rule on the stored times.
    pub fn time_rule(&self) -> QuadratureRule {
        QuadratureRule::trapezoid(&self.times)
    }

    pub fn scaled(&self, s: f64) -> Trajectory {
        Trajectory {
            config: self.config.clone(),
            times: self.times.clone(),
            snapshots: self.snapshots.iter().map(|u| u.scale(s)).collect(),
            norm_log: self.norm_log.iter().map(|n| n * s.abs()).collect(),
            scale: self.scale * s,
        }
    }

    /// Writes one binary field per snapshot plus `manifest.json` into `dir`.
    pub fn export(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.snapshots.len());
        for (n, u) in self.snapshots.iter().enumerate() {
            let name = format!("snapshot_{n:06}.field");
            let mut buf = Vec::new();
            write_field(u, &mut buf)?;
            fs::write(dir.join(&name), buf)?;
            files.push(name);
        }
        let manifest = TrajectoryManifest {
            dt: self.config.dt,
            t_final: self.config.t_final,
            scheme: "trapezoidal_unitary".into(),
            dimension: self.config.window.dim(),
            half_width: self.config.window.half_width(),
            store_stride: self.config.store_stride,
            potential_sup_norm: self.config.potential.sup_norm(),
            potential_hash: potential_hash(&self.config.potential),
            scale: self.scale,
            times: self.times.clone(),
            files,
        };
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: String,
    pub dimension: usize,
    pub half_width: usize,
    pub store_stride: usize,
    pub potential_sup_norm: f64,
    pub potential_hash: String,
    pub scale: f64,
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

/// SHA-256 of the potential values in little-endian `(re, im)` order.
pub fn potential_hash(v: &Potential) -> String {
    let mut h = Sha256::new();
    for z in v.values() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn run(u0: &LatticeField, cfg: &EvolutionConfig, h: f64) -> Result<Trajectory> {
    if *u0.window() != cfg.window {
        return Err(Error::InvalidParameter("initial datum lives on a different window".into()));
    }
    let bm = u0.boundary_mass();
    if bm >= 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "initial datum has relative boundary mass {bm:e}, needs < 1e-12"
        )));
    }
    let stepper = Stepper::new(cfg.window, cfg.potential.clone(), h);
    let steps = cfg.steps();
    let mut times = vec![if h > 0.0 { 0.0 } else { cfg.t_final }];
    let mut snapshots = vec![u0.clone()];
    let mut norm_log = Vec::with_capacity(steps + 1);
    norm_log.push(u0.norm());
    let mut u = u0.clone();
    for n in 1..=steps {
        u = stepper.step(&u, n)?;
        norm_log.push(u.norm());
        if n % cfg.store_stride == 0 || n == steps {
            let t = if h > 0.0 { cfg.time(n) } else { cfg.time(steps - n) };
            times.push(t);
            snapshots.push(u.clone());
        }
    }
    Ok(Trajectory {
        config: cfg.clone(),
        times,
        snapshots,
        norm_log,
        scale: 1.0,
    })
}

/// Advances `i u_t + Delta_d u + V u = 0` from `t = 0` to `t = T`.
pub fn evolve(u0: &LatticeField, cfg: &EvolutionConfig) -> Result<Trajectory> {
    run(u0, cfg, cfg.dt)
}

/// Runs the conjugate scheme from `u(T)` back to `t = 0`.
///
/// Snapshot times decrease along the returned trajectory.
pub fn evolve_backward(u_final: &LatticeField, cfg: &EvolutionConfig) -> Result<Trajectory> {
    run(u_final, cfg, -cfg.dt)
}

/// Which quantity the observation integral over `[3/8, 5/8]` measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    /// `|u_0(t)|^2`, the value at the lattice origin.
    #[default]
    OriginSite,
    /// `||u(t)||^2`, the full lattice norm.
    FullNorm,
}

pub const OBSERVATION_WINDOW: (f64, f64) = (0.375, 0.625);

/// `int_{3/8}^{5/8} |obs(t)|^2 dt` by the trapezoidal rule on stored times.
pub fn observation_integral(traj: &Trajectory, obs: Observation) -> Result<LogScalar> {
    let (a, b) = OBSERVATION_WINDOW;
    let eps = 1e-9;
    let idx: Vec<usize> = (0..traj.times.len())
        .filter(|&n| traj.times[n] >= a - eps && traj.times[n] <= b + eps)
        .collect();
    let (Some(&first), Some(&last)) = (idx.first(), idx.last()) else {
        return Err(Error::InvalidParameter("no stored snapshots inside [3/8, 5/8]".into()));
    };
    if (traj.times[first] - a).abs() > eps || (traj.times[last] - b).abs() > eps {
        return Err(Error::InvalidParameter(
            "stored snapshots must include t = 3/8 and t = 5/8".into(),
        ));
    }
    let times: Vec<f64> = idx.iter().map(|&n| traj.times[n]).collect();
    let rule = QuadratureRule::trapezoid(&times);
    let origin = traj.config.window.origin();
    let terms: Vec<LogScalar> = idx
        .iter()
        .zip(rule.weights())
        .map(|(&n, &q)| {
            let u = &traj.snapshots[n];
            let v = match obs {
                Observation::OriginSite => LogScalar::from_f64(u.values()[origin].norm_sqr()),
                Observation::FullNorm => {
                    let sq: Vec<LogScalar> =
                        u.values().iter().map(|z| LogScalar::from_f64(z.norm_sqr())).collect();
                    LogScalar::sum(&sq)
                }
            };
            v * LogScalar::from_f64(q)
        })
        .collect();
    Ok(LogScalar::sum(&terms))
}

/// Rescales so that the observation integral is exactly one.
pub fn normalize_observation(traj: &Trajectory, obs: Observation) -> Result<Trajectory> {
    let integral = observation_integral(traj, obs)?;
    if integral.is_zero() || integral.log_mag() < 1e-300f64.ln() {
        return Err(Error::ZeroObservation {
            log_value: integral.log_mag(),
        });
    }
    let s = (-0.5 * integral.log_mag()).exp();
    if !s.is_finite() {
        return Err(Error::Overflow {
            log_mag: -0.5 * integral.log_mag(),
        });
    }
    if s == 1.0 {
        return Ok(traj.clone());
    }
    Ok(traj.scaled(s))
}
