use serde::{Deserialize, Serialize};

use super::hiding::ln_sinh;

/// `ln [sinh(2a/R^2) sinh^2(2a/(sqrt(d) R))]`.
pub fn absorption_log_lhs(alpha: f64, r: f64, d: usize) -> f64 {
    ln_sinh(2.0 * alpha / (r * r)) + 2.0 * ln_sinh(2.0 * alpha / ((d as f64).sqrt() * r))
}

/// `sinh(2a/R^2) sinh^2(2a/(sqrt(d) R)) >= L^2`, evaluated in logs.
pub fn absorption_threshold(alpha: f64, r: f64, l: f64, d: usize) -> bool {
    absorption_log_lhs(alpha, r, d) >= 2.0 * l.ln()
}

/// `ln [sqrt(2 c log R) R^{2c/sqrt(d) - 1/2}]`, the large-R size of the
/// Carleman left-side factor at `alpha = c R log R`.
pub fn growth_factor_log(c: f64, r: f64, d: usize) -> f64 {
    0.5 * (2.0 * c * r.ln()).ln() + (2.0 * c / (d as f64).sqrt() - 0.5) * r.ln()
}

/// How `phi(R)` grows in `alpha = c R phi(R)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiGrowth {
    Log,
    SqrtLog,
    Constant(f64),
}

impl PhiGrowth {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            PhiGrowth::Log => r.ln(),
            PhiGrowth::SqrtLog => r.ln().sqrt(),
            PhiGrowth::Constant(v) => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub r: f64,
    pub phi_r: f64,
    pub alpha: f64,
    pub log_lhs: f64,
    pub log_growth: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub growth: PhiGrowth,
    pub c: f64,
    pub l: f64,
    pub d: usize,
    pub rows: Vec<ThresholdRow>,
    /// Smallest scanned `R` from which every later row holds.
    pub r0: Option<f64>,
    /// Smallest scanned `R` from which every later row fails.
    pub fails_from: Option<f64>,
}

pub fn phi_rate_scan(growth: PhiGrowth, c: f64, l: f64, d: usize, r_list: &[f64]) -> ThresholdScan {
    let rows: Vec<ThresholdRow> = r_list
        .iter()
        .map(|&r| {
            let phi_r = growth.eval(r);
            let alpha = c * r * phi_r;
            let log_lhs = absorption_log_lhs(alpha, r, d);
            ThresholdRow {
                r,
                phi_r,
                alpha,
                log_lhs,
                log_growth: growth_factor_log(c, r, d),
                holds: log_lhs >= 2.0 * l.ln(),
            }
        })
        .collect();
    let tail_start = |want: bool| -> Option<f64> {
        let k = rows.iter().rposition(|row| row.holds != want).map_or(0, |i| i + 1);
        rows.get(k).map(|row| row.r)
    };
    ThresholdScan {
        growth,
        c,
        l,
        d,
        r0: tail_start(true),
        fails_from: tail_start(false),
        rows,
    }
}

/// Logarithmically spaced radii `10^{lo} .. 10^{hi}` with `per_decade` points per decade.
pub fn log_radii(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi - lo) * per_decade as f64).round() as usize;
    (0..=n)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_r_squared_eventually_holds() {
        for &l in &[1.0, 10.0, 1e3] {
            let r = 50.0;
            assert!(absorption_threshold(r * r, r, l, 1));
        }
    }

    #[test]
    fn growth_factor_increases_when_exponent_positive() {
        let c = 1.0;
        let d = 1;
        assert!(2.0 * c / (d as f64).sqrt() > 0.5);
        let mut prev = growth_factor_log(c, 10.0, d);
        for k in 2..8 {
            let g = growth_factor_log(c, 10f64.powi(k), d);
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn scan_tail_bookkeeping() {
        let s = phi_rate_scan(PhiGrowth::Log, 1.0, 1.0, 1, &log_radii(1.0, 6.0, 2));
        assert!(s.rows.iter().all(|r| r.holds));
        assert_eq!(s.r0, Some(10.0));
        assert_eq!(s.fails_from, None);
    }
}
