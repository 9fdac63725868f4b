use serde::{Deserialize, Serialize};

use super::log_scalar::LogScalar;
use crate::error::{Error, Result};

/// Abscissa used when regressing `-log lambda(R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecayModel {
    #[serde(rename = "R_logR")]
    RLogR,
    #[serde(rename = "R_sq")]
    RSq,
    #[serde(rename = "R_linear")]
    RLinear,
}

impl DecayModel {
    pub const ALL: [DecayModel; 3] = [DecayModel::RLogR, DecayModel::RSq, DecayModel::RLinear];

    pub fn abscissa(self, r: f64) -> f64 {
        match self {
            DecayModel::RLogR => r * r.ln(),
            DecayModel::RSq => r * r,
            DecayModel::RLinear => r,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            DecayModel::RLogR => "R_logR",
            DecayModel::RSq => "R_sq",
            DecayModel::RLinear => "R_linear",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent_constant: f64,
    pub intercept: f64,
    /// RMS of the log-residuals.
    pub residual: f64,
    pub model_tag: DecayModel,
}

/// Fits `-log lambda = c * m(R) + b` by least squares.
pub fn fit_decay(rows: &[(f64, LogScalar)], model: DecayModel) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, l)| l.sign() > 0 && l.log_mag().is_finite())
        .map(|&(r, l)| (model.abscissa(r), -l.log_mag()))
        .collect();
    if usable.len() < 3 || usable.len() < rows.len() {
        return Err(Error::InsufficientData {
            needed: rows.len().max(3),
            got: usable.len(),
        });
    }
    let x0 = usable[0].0;
    if usable.iter().all(|&(x, _)| x == x0) {
        return Err(Error::DegenerateFit);
    }
    let design: Vec<Vec<f64>> = usable.iter().map(|&(x, _)| vec![x, 1.0]).collect();
    let rhs: Vec<f64> = usable.iter().map(|&(_, y)| y).collect();
    let coef = least_squares(&design, &rhs)?;
    let residual = rms_residual(&design, &rhs, &coef);
    Ok(FitResult {
        exponent_constant: coef[0],
        intercept: coef[1],
        residual,
        model_tag: model,
    })
}

/// Root-mean-square of `design * coef - rhs`.
pub fn rms_residual(design: &[Vec<f64>], rhs: &[f64], coef: &[f64]) -> f64 {
    let ss: f64 = design
        .iter()
        .zip(rhs)
        .map(|(row, y)| {
            let pred: f64 = row.iter().zip(coef).map(|(a, c)| a * c).sum();
            (pred - y).powi(2)
        })
        .sum();
    (ss / rhs.len() as f64).sqrt()
}

/// Dense least squares `min |A x - b|` via Householder QR.
///
/// Columns are scaled to unit norm first so that abscissae of very
/// different magnitude (R^2 against a constant) stay well conditioned.
pub fn least_squares(design: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = design.len();
    let n = design.first().map_or(0, Vec::len);
    if m < n || n == 0 {
        return Err(Error::InsufficientData { needed: n.max(1), got: m });
    }
    let mut a: Vec<Vec<f64>> = design.to_vec();
    let mut b = rhs.to_vec();
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
            if s > 0.0 { s } else { 1.0 }
        })
        .collect();
    for row in a.iter_mut() {
        for j in 0..n {
            row[j] /= scale[j];
        }
    }
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return Err(Error::DegenerateFit);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                a[i][j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            b[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    for j in 0..n {
        x[j] /= scale[j];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64, rs: impl Iterator<Item = f64>) -> Vec<(f64, LogScalar)> {
        rs.map(|r| (r, LogScalar::from_log(-f(r)))).collect()
    }

    #[test]
    fn exact_r_log_r() {
        let data = rows(|r| 2.0 * r * r.ln(), (5..=30).map(f64::from));
        let fit = fit_decay(&data, DecayModel::RLogR).unwrap();
        assert!((fit.exponent_constant - 2.0).abs() < 1e-10 * 2.0);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn gaussian_prefers_square_model() {
        let data = rows(|r| r * r, (10..=40).map(f64::from));
        let wrong = fit_decay(&data, DecayModel::RLogR).unwrap();
        let right = fit_decay(&data, DecayModel::RSq).unwrap();
        assert!(wrong.residual > right.residual);
    }

    #[test]
    fn equal_abscissae_are_degenerate() {
        let data = vec![(4.0, LogScalar::from_log(-1.0)); 4];
        assert!(matches!(fit_decay(&data, DecayModel::RLinear), Err(Error::DegenerateFit)));
    }

    #[test]
    fn too_few_rows() {
        let data = rows(|r| r, [3.0, 4.0].into_iter());
        assert!(matches!(fit_decay(&data, DecayModel::RLinear), Err(Error::InsufficientData { .. })));
        let mut data = rows(|r| r, [3.0, 4.0, 5.0, 6.0].into_iter());
        data[1].1 = LogScalar::ZERO;
        assert!(matches!(fit_decay(&data, DecayModel::RLinear), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn three_parameter_solve() {
        let design: Vec<Vec<f64>> = (1..=10)
            .map(|j| {
                let x = j as f64 * 20.0;
                vec![x * x.ln(), x, 1.0]
            })
            .collect();
        let rhs: Vec<f64> = design.iter().map(|r| 1.5 * r[0] - 0.25 * r[1] + 3.0).collect();
        let c = least_squares(&design, &rhs).unwrap();
        assert!((c[0] - 1.5).abs() < 1e-10 && (c[1] + 0.25).abs() < 1e-9 && (c[2] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn residual_nonnegative() {
        let data = rows(|r| r.sqrt() + (r * 0.7).sin(), (3..20).map(f64::from));
        for m in DecayModel::ALL {
            assert!(fit_decay(&data, m).unwrap().residual >= 0.0);
        }
    }
}
