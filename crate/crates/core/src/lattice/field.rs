use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::window::LatticeWindow;
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, LogScalar, QuadratureRule};

/// One complex value per site of a window.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    window: LatticeWindow,
    values: Vec<Complex64>,
}

impl LatticeField {
    pub fn zeros(window: LatticeWindow) -> Self {
        LatticeField {
            window,
            values: vec![Complex64::new(0.0, 0.0); window.len()],
        }
    }

    pub fn from_values(window: LatticeWindow, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                window.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { node: i as f64 });
        }
        Ok(LatticeField { window, values })
    }

    pub fn from_fn(window: LatticeWindow, f: impl Fn(&[i64]) -> Complex64) -> Self {
        let mut site = vec![0; window.dim()];
        let values = (0..window.len())
            .map(|i| {
                window.site_into(i, &mut site);
                f(&site)
            })
            .collect();
        LatticeField { window, values }
    }

    pub fn delta(window: LatticeWindow) -> Self {
        let mut f = Self::zeros(window);
        f.values[window.origin()] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, j: &[i64]) -> Complex64 {
        self.window
            .index(j)
            .map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn scale(&self, s: f64) -> Self {
        LatticeField {
            window: self.window,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `sum_j conj(u_j) v_j`.
    pub fn inner(&self, other: &LatticeField) -> Complex64 {
        assert_eq!(self.window, other.window);
        let re: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.conj() * b).re)
            .collect();
        let im: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.conj() * b).im)
            .collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    }

    /// Squared mass in the shell `max_k |j_k| > M - 2`, relative to the total.
    pub fn boundary_mass(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        let cut = self.window.half_width() as i64 - 2;
        let sq: Vec<f64> = (0..self.values.len())
            .map(|i| {
                if self.window.sup_norm(i) > cut {
                    self.values[i].norm_sqr()
                } else {
                    0.0
                }
            })
            .collect();
        pairwise_sum(&sq) / total
    }
}

/// A lattice potential together with its exact sup-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    window: LatticeWindow,
    values: Vec<Complex64>,
    sup_norm: f64,
}

impl Potential {
    pub fn new(window: LatticeWindow, values: Vec<Complex64>) -> Result<Self> {
        let field = LatticeField::from_values(window, values)?;
        let sup_norm = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(Potential {
            window,
            values: field.values,
            sup_norm,
        })
    }

    pub fn zero(window: LatticeWindow) -> Self {
        Potential {
            window,
            values: vec![Complex64::new(0.0, 0.0); window.len()],
            sup_norm: 0.0,
        }
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

/// `(Delta_d u)_j = sum_k (u_{j+e_k} + u_{j-e_k} - 2 u_j)` with zero padding.
pub fn discrete_laplacian(u: &LatticeField) -> LatticeField {
    let w = u.window;
    let d = w.dim();
    let values = (0..w.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = u.values[i] * (-2.0 * d as f64);
            for k in 0..d {
                if let Some(n) = w.neighbor(i, k, true) {
                    acc += u.values[n];
                }
                if let Some(n) = w.neighbor(i, k, false) {
                    acc += u.values[n];
                }
            }
            acc
        })
        .collect();
    LatticeField { window: w, values }
}

/// `(sum_j w_j^2 |u_j|^2)^{1/2}` evaluated in the log domain.
pub fn weighted_l2(u: &LatticeField, weight: impl Fn(&[i64]) -> LogScalar) -> LogScalar {
    weighted_sq(u, |s, _| weight(s)).sqrt()
}

fn weighted_sq(u: &LatticeField, weight: impl Fn(&[i64], usize) -> LogScalar) -> LogScalar {
    let w = u.window;
    let mut site = vec![0; w.dim()];
    let terms: Vec<LogScalar> = (0..w.len())
        .map(|i| {
            w.site_into(i, &mut site);
            let wt = weight(&site, i);
            LogScalar::from_f64(u.values[i].norm_sqr()) * wt * wt
        })
        .collect();
    LogScalar::sum(&terms)
}

/// `(int sum_j w_j(t)^2 |u_j(t)|^2 dt)^{1/2}` where the slices sit on the
/// nodes of `rule`.
pub fn weighted_l2_spacetime(
    slices: &[LatticeField],
    rule: &QuadratureRule,
    weight: impl Fn(&[i64], f64) -> LogScalar,
) -> LogScalar {
    assert_eq!(slices.len(), rule.len());
    let terms: Vec<LogScalar> = slices
        .iter()
        .zip(rule.nodes().iter().zip(rule.weights()))
        .map(|(u, (&t, &q))| weighted_sq(u, |s, _| weight(s, t)) * LogScalar::from_f64(q))
        .collect();
    LogScalar::sum(&terms).sqrt()
}

fn check_ring(w: &LatticeWindow, r: f64) -> Result<()> {
    if r + 1.0 >= w.half_width() as f64 {
        return Err(Error::RingOutsideWindow {
            radius: r,
            needed: r + 1.0,
            half_width: w.half_width(),
        });
    }
    Ok(())
}

/// Whether `R - 2 <= |j| <= R + 1` for a site with squared norm `n2`.
pub fn in_ring(n2: i64, r: f64) -> bool {
    let n2 = n2 as f64;
    let lo = (r - 2.0).max(0.0);
    n2 >= lo * lo && n2 <= (r + 1.0) * (r + 1.0)
}

fn ring_sq(u: &LatticeField, r: f64) -> LogScalar {
    let terms: Vec<LogScalar> = (0..u.values.len())
        .filter(|&i| in_ring(u.window.norm_sq(i), r))
        .map(|i| LogScalar::from_f64(u.values[i].norm_sqr()))
        .collect();
    LogScalar::sum(&terms)
}

/// Mass of one time slice on the ring `R - 2 <= |j| <= R + 1`.
pub fn ring_mass(u: &LatticeField, r: f64) -> Result<LogScalar> {
    check_ring(&u.window, r)?;
    Ok(ring_sq(u, r).sqrt())
}

/// Time-integrated ring mass for slices sampled on the nodes of `rule`.
pub fn ring_mass_spacetime(slices: &[LatticeField], rule: &QuadratureRule, r: f64) -> Result<LogScalar> {
    assert_eq!(slices.len(), rule.len());
    let Some(first) = slices.first() else {
        return Ok(LogScalar::ZERO);
    };
    check_ring(&first.window, r)?;
    let terms: Vec<LogScalar> = slices
        .iter()
        .zip(rule.weights())
        .map(|(u, &q)| ring_sq(u, r) * LogScalar::from_f64(q))
        .collect();
    Ok(LogScalar::sum(&terms).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn laplacian_of_constant_vanishes_inside() {
        let w = LatticeWindow::new(2, 4).unwrap();
        let lap = discrete_laplacian(&LatticeField::from_fn(w, |_| c(3.0)));
        for i in 0..w.len() {
            if w.sup_norm(i) < 4 {
                assert_eq!(lap.values()[i], c(0.0));
            }
        }
    }

    #[test]
    fn laplacian_of_delta() {
        let w = LatticeWindow::new(1, 5).unwrap();
        let lap = discrete_laplacian(&LatticeField::delta(w));
        assert_eq!(lap.get(&[0]), c(-2.0));
        assert_eq!(lap.get(&[1]), c(1.0));
        assert_eq!(lap.get(&[-1]), c(1.0));
        assert_eq!(lap.get(&[2]), c(0.0));
    }

    #[test]
    fn linear_field_is_harmonic() {
        let w = LatticeWindow::new(2, 5).unwrap();
        let lap = discrete_laplacian(&LatticeField::from_fn(w, |j| c(j[0] as f64)));
        for i in 0..w.len() {
            if w.sup_norm(i) < 5 {
                assert_eq!(lap.values()[i], c(0.0));
            }
        }
    }

    #[test]
    fn weighted_norms() {
        let w = LatticeWindow::new(2, 12).unwrap();
        let delta = LatticeField::delta(w);
        assert_eq!(weighted_l2(&delta, |_| LogScalar::ONE).to_f64(), 1.0);
        let alpha = 2000.0;
        let r = 10.0;
        let gauss = |j: &[i64]| {
            let s: f64 = j.iter().map(|&x| (x as f64 / r).powi(2)).sum();
            LogScalar::from_log(alpha * s)
        };
        assert_eq!(weighted_l2(&delta, gauss).to_f64(), 1.0);
        let mut far = LatticeField::zeros(w);
        far.values_mut()[w.index(&[10, 0]).unwrap()] = c(0.5);
        let got = weighted_l2(&far, gauss);
        assert!((got.log_mag() - (alpha + 0.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn ring_counting() {
        let w = LatticeWindow::new(1, 10).unwrap();
        let ones = LatticeField::from_fn(w, |_| c(1.0));
        assert!((ring_mass(&ones, 5.0).unwrap().to_f64() - 8f64.sqrt()).abs() < 1e-15);
        assert!(ring_mass(&LatticeField::delta(w), 5.0).unwrap().is_zero());
        assert!(matches!(ring_mass(&ones, 9.0), Err(Error::RingOutsideWindow { .. })));
    }

    #[test]
    fn spacetime_ring_with_constant_slices() {
        let w = LatticeWindow::new(1, 10).unwrap();
        let ones = LatticeField::from_fn(w, |_| c(1.0));
        let rule = QuadratureRule::trapezoid(&[0.0, 0.5, 1.0]);
        let slices = vec![ones.clone(), ones.clone(), ones];
        let got = ring_mass_spacetime(&slices, &rule, 5.0).unwrap();
        assert!((got.to_f64() - 8f64.sqrt()).abs() < 1e-14);
    }

    fn field(d: usize, m: usize) -> impl Strategy<Value = LatticeField> {
        let w = LatticeWindow::new(d, m).unwrap();
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), w.len()).prop_map(move |v| {
            LatticeField::from_values(w, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn laplacian_symmetric(u in field(2, 3), v in field(2, 3)) {
            let l = discrete_laplacian(&u).inner(&v);
            let r = u.inner(&discrete_laplacian(&v));
            prop_assert!((l - r).norm() < 1e-12 * (1.0 + u.norm() * v.norm()));
        }

        #[test]
        fn laplacian_spectrum_in_gershgorin_disc(u in field(2, 3)) {
            let q = -u.inner(&discrete_laplacian(&u)).re;
            let n = u.norm_sqr();
            prop_assert!(q >= -1e-12 * n && q <= 8.0 * n * (1.0 + 1e-12));
        }

        #[test]
        fn ring_partition_bounded_by_total(u in field(1, 40)) {
            let rings: f64 = (0..9).map(|k| 3.0 + 4.0 * k as f64)
                .map(|r| ring_mass(&u, r).unwrap().to_f64().powi(2)).sum();
            prop_assert!(rings <= u.norm_sqr() * (1.0 + 1e-12));
        }
    }
}
