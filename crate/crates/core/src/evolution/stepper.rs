use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::BandedLu;
use crate::error::{Error, Result};
use crate::lattice::{discrete_laplacian, LatticeField, LatticeWindow, Potential};
use crate::numeric::pairwise_sum;

const RESIDUAL_TOL: f64 = 1e-12;
const REFINEMENTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    TrapezoidalUnitary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub window: LatticeWindow,
    pub potential: Potential,
    /// Keep every `store_stride`-th time level as a snapshot.
    pub store_stride: usize,
}

impl EvolutionConfig {
    pub fn new(window: LatticeWindow, potential: Potential, dt: f64, t_final: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= 0.01 * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!("time step {dt} must lie in (0, 0.01]")));
        }
        let n = t_final / dt;
        if !(t_final > 0.0) || (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "final time {t_final} is not an integer multiple of dt = {dt}"
            )));
        }
        if *potential.window() != window {
            return Err(Error::InvalidParameter("potential lives on a different window".into()));
        }
        Ok(EvolutionConfig {
            dt,
            t_final,
            scheme: Scheme::TrapezoidalUnitary,
            window,
            potential,
            store_stride: 1,
        })
    }

    pub fn free(window: LatticeWindow, dt: f64, t_final: f64) -> Result<Self> {
        Self::new(window, Potential::zero(window), dt, t_final)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.store_stride = stride.max(1);
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.t_final / self.steps() as f64
    }
}

/// `H u = Delta_d u + V u` on the window.
pub fn apply_hamiltonian(u: &LatticeField, v: &Potential) -> LatticeField {
    let mut out = discrete_laplacian(u);
    for ((o, &x), &p) in out.values_mut().iter_mut().zip(u.values()).zip(v.values()) {
        *o += p * x;
    }
    out
}

fn norm(v: &[Complex64]) -> f64 {
    let sq: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&sq).sqrt()
}

/// One trapezoidal step `(I - c H) u_new = (I + c H) u_old` with `c = i h / 2`.
///
/// A negative `h` gives the conjugate scheme that runs time backwards.
#[derive(Clone, Debug)]
pub struct Stepper {
    window: LatticeWindow,
    potential: Potential,
    c: Complex64,
    lu: BandedLu,
}

impl Stepper {
    pub fn new(window: LatticeWindow, potential: Potential, h: f64) -> Self {
        let c = Complex64::new(0.0, 0.5 * h);
        let d = window.dim();
        let band = window.stride(0);
        let strides: Vec<usize> = (0..d).map(|k| window.stride(k)).collect();
        let entry = |i: usize, j: usize| {
            if i == j {
                return Complex64::new(1.0, 0.0) - c * (potential.values()[i] - 2.0 * d as f64);
            }
            let off = i.abs_diff(j);
            for (k, &s) in strides.iter().enumerate() {
                if off == s {
                    let fwd = j > i;
                    if window.neighbor(i, k, fwd) == Some(j) {
                        return -c;
                    }
                }
            }
            Complex64::new(0.0, 0.0)
        };
        let lu = BandedLu::factor(window.len(), band, entry);
        Stepper {
            window,
            potential,
            c,
            lu,
        }
    }

    fn apply(&self, u: &[Complex64], sign: f64) -> Result<Vec<Complex64>> {
        let field = LatticeField::from_values(self.window, u.to_vec())?;
        let hu = apply_hamiltonian(&field, &self.potential);
        Ok(u.iter()
            .zip(hu.values())
            .map(|(&x, &y)| x + self.c * sign * y)
            .collect())
    }

    pub fn step(&self, u: &LatticeField, index: usize) -> Result<LatticeField> {
        let rhs = self.apply(u.values(), 1.0)?;
        let scale = norm(&rhs).max(f64::MIN_POSITIVE);
        let mut x = self.lu.solve(&rhs);
        let mut residual = f64::INFINITY;
        for _ in 0..=REFINEMENTS {
            let ax = self.apply(&x, -1.0)?;
            let r: Vec<Complex64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            residual = norm(&r) / scale;
            if residual <= RESIDUAL_TOL {
                break;
            }
            let dx = self.lu.solve(&r);
            for (xi, di) in x.iter_mut().zip(dx) {
                *xi += di;
            }
        }
        if !(residual <= RESIDUAL_TOL) {
            return Err(Error::SolverDivergence { residual, step: index });
        }
        LatticeField::from_values(self.window, x)
    }
}
