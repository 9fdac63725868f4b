use serde_json::{json, Value};

use super::profile::TimeProfile;
use crate::numeric::LogScalar;

/// Carleman weight `exp(alpha |j / R + phi(t) e_1|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSpec {
    pub alpha: f64,
    pub r: f64,
    pub phi: TimeProfile,
    pub d: usize,
    /// Constant `c` of the rule `alpha = c R log R`, when one was configured.
    pub c_rule: Option<f64>,
}

impl WeightSpec {
    pub fn new(alpha: f64, r: f64, phi: TimeProfile, d: usize) -> Self {
        assert!(alpha >= 0.0 && r > 0.0 && d >= 1);
        WeightSpec {
            alpha,
            r,
            phi,
            d,
            c_rule: None,
        }
    }

    /// `alpha = c R log R`.
    pub fn from_rule(c: f64, r: f64, phi: TimeProfile, d: usize) -> Self {
        let mut s = Self::new(c * r * r.ln(), r, phi, d);
        s.c_rule = Some(c);
        s
    }

    /// Whether `alpha >= c R log R` for the configured `c`.
    pub fn in_evolution_regime(&self) -> bool {
        match self.c_rule {
            Some(c) => self.alpha >= c * self.r * self.r.ln() * (1.0 - 1e-15),
            None => false,
        }
    }

    /// `alpha |j / R + phi(t) e_1|^2`.
    pub fn exponent(&self, j: &[i64], t: f64) -> f64 {
        let phi = self.phi.value(t);
        j.iter()
            .enumerate()
            .map(|(k, &c)| {
                let x = c as f64 / self.r + if k == 0 { phi } else { 0.0 };
                x * x
            })
            .sum::<f64>()
            * self.alpha
    }

    pub fn params(&self) -> Value {
        json!({
            "alpha": self.alpha,
            "R": self.r,
            "d": self.d,
            "c_rule": self.c_rule,
            "phi": self.phi.kind,
        })
    }
}

pub fn weight_at(j: &[i64], t: f64, spec: &WeightSpec) -> LogScalar {
    LogScalar::from_log(spec.exponent(j, t))
}
