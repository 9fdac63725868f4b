use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `||j||_* = sum_k |j_k| log(|j_k| + 1)`.
pub fn norm_star(j: &[i64]) -> f64 {
    j.iter().map(|&c| c.abs() as f64 * (c.abs() as f64 + 1.0).ln()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStarReport {
    pub d: usize,
    pub j_max: i64,
    pub points: u64,
    /// Extremes of `|j| log(|j|+1) / ||j||_*`.
    pub sup_ratio: f64,
    pub inf_ratio: f64,
    pub argsup: Vec<i64>,
    pub arginf: Vec<i64>,
    /// Smallest `c_d` with `||j||_*/c_d <= |j| log(|j|+1) <= c_d ||j||_*`.
    pub c_d: f64,
}

#[derive(Clone, Copy)]
struct Extremes {
    sup: (f64, u64),
    inf: (f64, u64),
}

impl Extremes {
    const EMPTY: Extremes = Extremes {
        sup: (f64::NEG_INFINITY, u64::MAX),
        inf: (f64::INFINITY, u64::MAX),
    };

    fn merge(a: Extremes, b: Extremes) -> Extremes {
        // ties go to the smaller index so the result is independent of scheduling
        let sup = if b.sup.0 > a.sup.0 || (b.sup.0 == a.sup.0 && b.sup.1 < a.sup.1) { b.sup } else { a.sup };
        let inf = if b.inf.0 < a.inf.0 || (b.inf.0 == a.inf.0 && b.inf.1 < a.inf.1) { b.inf } else { a.inf };
        Extremes { sup, inf }
    }
}

/// Exhaustive scan of `0 < |j|_inf <= j_max`.
///
/// Both norms depend only on `|j_k|`, so the scan runs over the closed
/// nonnegative orthant, which visits every value the full cube produces.
pub fn norm_star_equivalence(d: usize, j_max: i64) -> Result<NormStarReport> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidParameter(format!("dimension {d} outside 1..=3")));
    }
    if j_max < 10 {
        return Err(Error::InvalidParameter(format!("j_max = {j_max} must be at least 10")));
    }
    let side = (j_max + 1) as u64;
    let total = side.pow(d as u32);
    let star: Vec<f64> = (0..=j_max).map(|n| n as f64 * (n as f64 + 1.0).ln()).collect();
    let decode = |mut idx: u64| {
        let mut j = vec![0i64; d];
        for slot in j.iter_mut().rev() {
            *slot = (idx % side) as i64;
            idx /= side;
        }
        j
    };
    let ext = (1..total)
        .into_par_iter()
        .fold(
            || Extremes::EMPTY,
            |acc, idx| {
                let mut rest = idx;
                let mut n2 = 0u128;
                let mut s = 0.0;
                for _ in 0..d {
                    let c = (rest % side) as usize;
                    rest /= side;
                    n2 += (c * c) as u128;
                    s += star[c];
                }
                let r = (n2 as f64).sqrt();
                let ratio = r * (r + 1.0).ln() / s;
                Extremes::merge(
                    acc,
                    Extremes {
                        sup: (ratio, idx),
                        inf: (ratio, idx),
                    },
                )
            },
        )
        .reduce(|| Extremes::EMPTY, Extremes::merge);
    Ok(NormStarReport {
        d,
        j_max,
        points: total - 1,
        sup_ratio: ext.sup.0,
        inf_ratio: ext.inf.0,
        argsup: decode(ext.sup.1),
        arginf: decode(ext.inf.1),
        c_d: ext.sup.0.max(1.0 / ext.inf.0),
    })
}
