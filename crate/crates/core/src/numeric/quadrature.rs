use num_complex::Complex64;

use super::log_scalar::LogScalar;
use super::sum::pairwise_sum;
use crate::error::{Error, Result};

/// How a rule was built, kept so the rule can be refined by node doubling.
#[derive(Clone, Debug, PartialEq)]
enum Recipe {
    GaussLegendre { per_panel: usize, breaks: Vec<f64> },
    Trapezoid,
}

/// Nodes and positive weights on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
    degree: usize,
    recipe: Recipe,
}

/// Legendre polynomial `P_n(z)` and its derivative.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

impl QuadratureRule {
    /// `n`-point Gauss-Legendre rule on `[a, b]`, exact to degree `2n - 1`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Self {
        Self::composite(n, &[a, b])
    }

    /// Gauss-Legendre with `per_panel` nodes on each interval between
    /// consecutive `breaks`.
    pub fn composite(per_panel: usize, breaks: &[f64]) -> Self {
        assert!(per_panel >= 1 && breaks.len() >= 2);
        let (x, w) = legendre_nodes(per_panel);
        let mut nodes = Vec::with_capacity(per_panel * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in breaks.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            assert!(hi > lo, "breakpoints must increase");
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            a: breaks[0],
            b: *breaks.last().unwrap(),
            degree: 2 * per_panel - 1,
            recipe: Recipe::GaussLegendre {
                per_panel,
                breaks: breaks.to_vec(),
            },
        }
    }

    /// `panels` equal panels on `[a, b]`, with extra breakpoints merged in.
    pub fn composite_uniform(per_panel: usize, panels: usize, a: f64, b: f64, extra: &[f64]) -> Self {
        let mut breaks: Vec<f64> = (0..=panels)
            .map(|i| a + (b - a) * i as f64 / panels as f64)
            .collect();
        breaks.extend(extra.iter().copied().filter(|&x| x > a && x < b));
        breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
        breaks.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * (b - a));
        Self::composite(per_panel, &breaks)
    }

    /// Trapezoidal rule on the given increasing sample times.
    pub fn trapezoid(times: &[f64]) -> Self {
        assert!(times.len() >= 2);
        let n = times.len();
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = times[i + 1] - times[i];
            assert!(h > 0.0, "sample times must increase");
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        QuadratureRule {
            nodes: times.to_vec(),
            weights,
            a: times[0],
            b: times[n - 1],
            degree: 1,
            recipe: Recipe::Trapezoid,
        }
    }

    /// Same family with twice the nodes per panel, if the rule supports it.
    pub fn refined(&self) -> Option<QuadratureRule> {
        match &self.recipe {
            Recipe::GaussLegendre { per_panel, breaks } => {
                Some(Self::composite(2 * per_panel, breaks))
            }
            Recipe::Trapezoid => None,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weighted sum of precomputed node values.
    pub fn apply(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.nodes.len());
        let terms: Vec<f64> = values.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        pairwise_sum(&terms)
    }

    fn eval_real<F: Fn(f64) -> f64>(&self, f: &F) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { node: t });
            }
            terms.push(v * w);
        }
        Ok(pairwise_sum(&terms))
    }
}

/// Integral value with the node-doubling error estimate, when available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: Option<f64>,
}

/// Integrates a real function; the error estimate is the difference to the
/// rule with doubled nodes per panel.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> Result<Integral<f64>> {
    let value = rule.eval_real(&f)?;
    let error = match rule.refined() {
        Some(fine) => Some((fine.eval_real(&f)? - value).abs()),
        None => None,
    };
    Ok(Integral { value, error })
}

pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    rule: &QuadratureRule,
) -> Result<Integral<Complex64>> {
    let re = integrate(|t| f(t).re, rule)?;
    let im = integrate(|t| f(t).im, rule)?;
    let error = match (re.error, im.error) {
        (Some(a), Some(b)) => Some(a.hypot(b)),
        _ => None,
    };
    Ok(Integral {
        value: Complex64::new(re.value, im.value),
        error,
    })
}

/// Integrates a positive function given through its logarithm.
pub fn integrate_log<F: Fn(f64) -> f64>(log_f: F, rule: &QuadratureRule) -> Result<LogScalar> {
    let mut terms = Vec::with_capacity(rule.len());
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let l = log_f(t);
        if l.is_nan() || l == f64::INFINITY {
            return Err(Error::NonFinite { node: t });
        }
        terms.push(LogScalar::from_log(l + w.ln()));
    }
    Ok(LogScalar::sum(&terms))
}

/// Log-domain integral of a unimodal positive integrand over `[lo, hi]`,
/// using `panels` equal Gauss-Legendre panels, refined until doubling the
/// panel count changes the log value by less than `tol`.
pub fn integrate_log_adaptive<F: Fn(f64) -> f64>(
    log_f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<LogScalar> {
    let mut panels = 16;
    let mut prev = integrate_log(&log_f, &QuadratureRule::composite_uniform(20, panels, lo, hi, &[]))?;
    loop {
        panels *= 2;
        let next = integrate_log(&log_f, &QuadratureRule::composite_uniform(20, panels, lo, hi, &[]))?;
        if (next.log_mag() - prev.log_mag()).abs() < tol || panels >= 4096 {
            return Ok(next);
        }
        prev = next;
    }
}
