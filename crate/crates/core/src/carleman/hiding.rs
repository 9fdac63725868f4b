use serde::{Deserialize, Serialize};

use super::profile::TimeProfile;

/// `ln sinh(x)` for `x > 0`, accurate for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh(x)` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}

/// Both sides of the two hiding inequalities at one grid value `s = |j/R + phi|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HidingRow {
    pub s: f64,
    /// `ln [sinh(2a/R^2) sinh^2(2a s/R)]`, the common left side.
    pub log_lhs: f64,
    /// `ln [(8 a ||phi'|| / R) cosh(a/R^2) cosh(2a s/R)]`.
    pub log_rhs_first: f64,
    /// `ln [2 a ||phi''|| s]`.
    pub log_rhs_second: f64,
}

impl HidingRow {
    pub fn first_holds(&self) -> bool {
        self.log_lhs >= self.log_rhs_first
    }

    pub fn second_holds(&self) -> bool {
        self.log_lhs >= self.log_rhs_second
    }
}

pub fn hiding_row(alpha: f64, r: f64, s: f64, sup_d1: f64, sup_d2: f64) -> HidingRow {
    let log_lhs = ln_sinh(2.0 * alpha / (r * r)) + 2.0 * ln_sinh(2.0 * alpha * s / r);
    let log_rhs_first =
        (8.0 * alpha * sup_d1 / r).ln() + ln_cosh(alpha / (r * r)) + ln_cosh(2.0 * alpha * s / r);
    let log_rhs_second = (2.0 * alpha * sup_d2 * s).ln();
    HidingRow {
        s,
        log_lhs,
        log_rhs_first,
        log_rhs_second,
    }
}

/// The sufficient reductions used for the two regimes `alpha >= R^2` and
/// `alpha <= R^2`, evaluated at a given `alpha = c R log R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reductions {
    /// `e^{a/R^2 + 2a s/R} >= 16 (a/R) ||phi'||` at every grid point.
    pub first_large_alpha: bool,
    /// `e^{2a s/R} >= 8 R ||phi'||`.
    pub first_small_alpha: bool,
    /// `R^{4 c s} >= R^2 ||phi''|| s`.
    pub second_small_alpha: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HidingReport {
    pub r: f64,
    pub sup_d1: f64,
    pub sup_d2: f64,
    /// Smallest `c` (to bisection precision, rounded up) for which each
    /// inequality holds on the whole grid; 0 when the inequality is vacuous.
    pub c_min_first: f64,
    pub c_min_second: f64,
    pub c_min: f64,
    pub vacuous: bool,
    pub reductions: Reductions,
    pub rows: Vec<HidingRow>,
}

/// `n` equally spaced values of `s` in `[lo, hi]`.
pub fn hiding_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

fn minimal_c(holds: impl Fn(f64) -> bool) -> f64 {
    let mut hi = 0.01;
    while !holds(hi) {
        hi *= 2.0;
        assert!(hi < 1e6, "no finite constant found");
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn hiding_inequalities(r: f64, phi: &TimeProfile, grid: &[f64]) -> HidingReport {
    assert!(grid.iter().all(|&s| s >= 1.0), "grid values must be at least 1");
    let (d1, d2) = (phi.sup_d1, phi.sup_d2);
    let alpha = |c: f64| c * r * r.ln();
    let rows_at = |c: f64| -> Vec<HidingRow> {
        grid.iter().map(|&s| hiding_row(alpha(c), r, s, d1, d2)).collect()
    };
    let c_first = if d1 == 0.0 {
        0.0
    } else {
        minimal_c(|c| rows_at(c).iter().all(HidingRow::first_holds))
    };
    let c_second = if d2 == 0.0 {
        0.0
    } else {
        minimal_c(|c| rows_at(c).iter().all(HidingRow::second_holds))
    };
    let c_min = c_first.max(c_second);
    let a = alpha(c_min);
    let reductions = Reductions {
        first_large_alpha: grid
            .iter()
            .all(|&s| a / (r * r) + 2.0 * a * s / r >= (16.0 * a * d1 / r).ln()),
        first_small_alpha: grid.iter().all(|&s| 2.0 * a * s / r >= (8.0 * r * d1).ln()),
        second_small_alpha: grid
            .iter()
            .all(|&s| 4.0 * c_min * s * r.ln() >= (r * r * d2 * s).ln()),
    };
    HidingReport {
        r,
        sup_d1: d1,
        sup_d2: d2,
        c_min_first: c_first,
        c_min_second: c_second,
        c_min,
        vacuous: d1 == 0.0 && d2 == 0.0,
        reductions,
        rows: rows_at(c_min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_hyperbolics() {
        for &x in &[1e-3, 0.5, 3.0, 19.9, 20.1, 300.0] {
            if x < 700.0 {
                assert!((ln_sinh(x) - x.sinh().ln()).abs() < 1e-13 * (1.0 + x));
                assert!((ln_cosh(x) - x.cosh().ln()).abs() < 1e-13 * (1.0 + x));
            }
        }
        assert!((ln_cosh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn first_inequality_at_alpha_r_squared() {
        // with alpha = R^2 and s = 1 the large-alpha reduction is a direct comparison
        let r = 10.0;
        let alpha = r * r;
        let lhs = alpha / (r * r) + 2.0 * alpha / r;
        let rhs = (16.0 * alpha / r * 48.0f64).ln();
        assert!(lhs >= rhs);
        let row = hiding_row(alpha, r, 1.0, 48.0, 1.0);
        assert!(row.first_holds());
    }

    #[test]
    fn constant_profile_is_vacuous() {
        let rep = hiding_inequalities(10.0, &TimeProfile::constant(3.0), &hiding_grid(20, 1.0, 5.0));
        assert!(rep.vacuous);
        assert_eq!(rep.c_min, 0.0);
    }

    #[test]
    fn reported_constant_satisfies_both() {
        let rep = hiding_inequalities(20.0, &TimeProfile::paper_phi(), &hiding_grid(200, 1.0, 5.0));
        assert!(rep.rows.iter().all(|r| r.first_holds() && r.second_holds()));
        let alpha = 0.99 * rep.c_min * 20.0 * 20f64.ln();
        let (d1, d2) = (rep.sup_d1, rep.sup_d2);
        let below: Vec<_> = hiding_grid(200, 1.0, 5.0)
            .into_iter()
            .map(|s| hiding_row(alpha, 20.0, s, d1, d2))
            .collect();
        assert!(below.iter().any(|r| !r.first_holds() || !r.second_holds()));
    }
}
