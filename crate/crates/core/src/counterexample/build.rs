use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::lattice::{LatticeField, LatticeWindow, Potential};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    /// The five-row formula transcribed as written.
    LiteralPaper,
    /// The formula with the twelve ring values re-solved for exact harmonicity.
    Repaired,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub r: i64,
    pub margin: i64,
    pub mode: ValueMode,
}

impl CounterexampleSpec {
    pub fn new(r: i64, mode: ValueMode) -> Self {
        CounterexampleSpec { r, margin: 60, mode }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 8 {
            return Err(Error::InvalidParameter(format!("R = {} must be at least 8", self.r)));
        }
        if self.margin < 1 {
            return Err(Error::InvalidParameter("margin must be positive".into()));
        }
        Ok(())
    }

    /// Square window of half-width `R + margin`, which contains `|j_2| <= 2R` once `margin >= R`.
    pub fn half_width(&self) -> i64 {
        (self.r + self.margin).max(2 * self.r)
    }

    /// `|j_1| + |j_2 - R|`.
    pub fn diamond_distance(&self, j: (i64, i64)) -> i64 {
        j.0.abs() + (j.1 - self.r).abs()
    }

    pub fn in_diamond(&self, j: (i64, i64)) -> bool {
        self.diamond_distance(j) <= 2
    }
}

/// The five-row definition, zero on the diamond.
pub fn formula_value(r: i64, j: (i64, i64)) -> Dyadic {
    let (a, b) = (j.0.abs(), j.1);
    if a + (b - r).abs() <= 2 {
        return Dyadic::zero();
    }
    if b <= r - 3 {
        Dyadic::pow2(1, -(a + b.abs()))
    } else if b >= r + 3 {
        Dyadic::pow2(1, -(a + b.abs() - 6))
    } else if (b - r).abs() == 2 {
        Dyadic::pow2(-1, -(a + r - 5))
    } else if (b - r).abs() == 1 {
        Dyadic::pow2(1, -(a + r - 6))
    } else {
        Dyadic::pow2(-1, -(a + r - 6))
    }
}

/// The twelve sites with `|j_1| + |j_2 - R| = 3`, in a fixed order.
pub fn ring_sites(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(12);
    for a in -3i64..=3 {
        let b = 3 - a.abs();
        out.push((a, r + b));
        if b != 0 {
            out.push((a, r - b));
        }
    }
    out.sort();
    out
}

/// Sites of the diamond, in a fixed order.
pub fn diamond_sites(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in -2i64..=2 {
        for b in -(2 - a.abs())..=(2 - a.abs()) {
            out.push((a, r + b));
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepairCertificate {
    pub sites: Vec<(i64, i64)>,
    pub literal_values: Vec<Dyadic>,
    pub repaired_values: Vec<Dyadic>,
    /// Exponent shift applied to the anchor site `(2, R + 1)`.
    pub anchor_shift: i64,
    /// Sum of squared exponent shifts over the ring.
    pub cost: i64,
    pub rank: usize,
    pub augmented_rank: usize,
}

fn rational(d: &Dyadic) -> BigRational {
    d.to_rational()
}

/// Row-reduces `[a | b]`, returning the solution or both ranks when it is not unique.
fn exact_solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> std::result::Result<Vec<BigRational>, (usize, usize)> {
    let rows = a.len();
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = BigRational::one() / a[row][col].clone();
        for c in col..cols {
            a[row][c] = &a[row][c] * &inv;
        }
        b[row] = &b[row] * &inv;
        for i in 0..rows {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in col..cols {
                    let t = &f * &a[row][c];
                    a[i][c] = &a[i][c] - &t;
                }
                let t = &f * &b[row];
                b[i] = &b[i] - &t;
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let rank = pivots.len();
    let augmented = rank + usize::from((rank..rows).any(|i| !b[i].is_zero()));
    if augmented > rank || rank < cols {
        return Err((rank, augmented));
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Ok(x)
}

/// Solves for ring values making `Delta u = 0` on the diamond, symmetric under
/// `j_1 -> -j_1` and `j_2 -> 2R - j_2`, with one anchor value fixed. The anchor
/// exponent is chosen to minimise the total exponent shift from the formula.
pub fn repair_ring(r: i64) -> Result<RepairCertificate> {
    let sites = ring_sites(r);
    let index: BTreeMap<(i64, i64), usize> = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let literal: Vec<Dyadic> = sites.iter().map(|&s| formula_value(r, s)).collect();
    let n = sites.len();
    let mut base_rows: Vec<Vec<BigRational>> = Vec::new();
    let mut base_rhs: Vec<BigRational> = Vec::new();
    for &(a, b) in &diamond_sites(r) {
        let mut row = vec![BigRational::zero(); n];
        let mut any = false;
        for nb in [(a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)] {
            if let Some(&k) = index.get(&nb) {
                row[k] += BigRational::one();
                any = true;
            }
        }
        if any {
            base_rows.push(row);
            base_rhs.push(BigRational::zero());
        }
    }
    for &(a, b) in &sites {
        for mirror in [(-a, b), (a, 2 * r - b)] {
            let (i, k) = (index[&(a, b)], index[&mirror]);
            if i < k {
                let mut row = vec![BigRational::zero(); n];
                row[i] = BigRational::one();
                row[k] = -BigRational::one();
                base_rows.push(row);
                base_rhs.push(BigRational::zero());
            }
        }
    }
    let anchor = index[&(2, r + 1)];
    let mut best: Option<RepairCertificate> = None;
    let mut last_failure = (0, 0);
    for shift in [0i64, -1, 1, -2, 2, -3, 3, -4, 4] {
        let mut rows = base_rows.clone();
        let mut rhs = base_rhs.clone();
        let mut row = vec![BigRational::zero(); n];
        row[anchor] = BigRational::one();
        rows.push(row);
        let target = &literal[anchor] * &Dyadic::pow2(1, shift);
        rhs.push(rational(&target));
        let x = match exact_solve(rows.clone(), rhs) {
            Ok(x) => x,
            Err(ranks) => {
                last_failure = ranks;
                continue;
            }
        };
        let values = x.iter().map(Dyadic::from_rational).collect::<Result<Vec<_>>>()?;
        let mut cost = 0i64;
        let mut ok = true;
        for (v, p) in values.iter().zip(&literal) {
            match (v.power_of_two(), p.power_of_two()) {
                (Some(ev), Some(ep)) if v.signum() == p.signum() => cost += (ev - ep).pow(2),
                _ => ok = false,
            }
        }
        if !ok {
            continue;
        }
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(RepairCertificate {
                sites: sites.clone(),
                literal_values: literal.clone(),
                repaired_values: values,
                anchor_shift: shift,
                cost,
                rank: n,
                augmented_rank: n,
            });
        }
    }
    best.ok_or(Error::RepairInfeasible {
        rank: last_failure.0,
        augmented_rank: last_failure.1,
    })
}

/// The exact field together with its potential on the verification window.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub spec: CounterexampleSpec,
    pub repair: Option<RepairCertificate>,
    overrides: BTreeMap<(i64, i64), Dyadic>,
}

impl Counterexample {
    /// Exact value at any site of `Z^2`.
    pub fn value(&self, j: (i64, i64)) -> Dyadic {
        if self.spec.in_diamond(j) {
            return Dyadic::zero();
        }
        match self.overrides.get(&j) {
            Some(v) => v.clone(),
            None => formula_value(self.spec.r, j),
        }
    }

    pub fn laplacian(&self, j: (i64, i64)) -> Dyadic {
        let (a, b) = j;
        let mut s = &self.value(j) * &Dyadic::new(-4, 0);
        for nb in [(a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)] {
            s = &s + &self.value(nb);
        }
        s
    }

    /// `V_j = -Delta u_j / u_j` where `u_j != 0`, and 0 elsewhere.
    pub fn potential(&self, j: (i64, i64)) -> Result<Dyadic> {
        let u = self.value(j);
        if u.is_zero() {
            return Ok(Dyadic::zero());
        }
        (-&self.laplacian(j)).div_pow2(&u)
    }

    pub fn window(&self) -> LatticeWindow {
        LatticeWindow::new(2, self.spec.half_width() as usize).expect("valid window")
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> {
        let m = self.spec.half_width();
        (-m..=m).flat_map(move |a| (-m..=m).map(move |b| (a, b)))
    }

    pub fn to_field(&self) -> LatticeField {
        LatticeField::from_fn(self.window(), |j| Complex64::new(self.value((j[0], j[1])).to_f64(), 0.0))
    }

    pub fn to_potential(&self) -> Result<Potential> {
        let w = self.window();
        let vals = self
            .sites()
            .map(|j| Ok(Complex64::new(self.potential(j)?.to_f64(), 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Potential::new(w, vals)
    }
}

pub fn build_counterexample(spec: CounterexampleSpec) -> Result<Counterexample> {
    spec.validate()?;
    let (repair, overrides) = match spec.mode {
        ValueMode::LiteralPaper => (None, BTreeMap::new()),
        ValueMode::Repaired => {
            let cert = repair_ring(spec.r)?;
            let overrides = cert
                .sites
                .iter()
                .copied()
                .zip(cert.repaired_values.iter().cloned())
                .collect();
            (Some(cert), overrides)
        }
    };
    Ok(Counterexample {
        spec,
        repair,
        overrides,
    })
}
