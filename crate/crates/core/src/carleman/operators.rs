use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::weight::WeightSpec;
use crate::lattice::LatticeWindow;
use crate::numeric::{Dd, DdComplex, QuadratureRule};

/// Polynomial bump `((t - a)(b - t))^3`, scaled to peak at 1, zero outside `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
}

impl Bump {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(b > a);
        Bump { a, b }
    }

    /// `(psi, psi')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t <= self.a || t >= self.b {
            return (0.0, 0.0);
        }
        let c = 4.0 / (self.b - self.a).powi(2);
        let p = c * (t - self.a) * (self.b - t);
        let dp = c * (self.a + self.b - 2.0 * t);
        (p * p * p, 3.0 * p * p * dp)
    }
}

/// Value and time derivative of a field at one instant, in double-double.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: Vec<DdComplex>,
    pub dt: Vec<DdComplex>,
}

/// `f_j(t) = sum_k psi_k(t) h^k_j`: a finite sum of time bumps times
/// fixed spatial profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    window: LatticeWindow,
    components: Vec<(Bump, Vec<Complex64>)>,
}

impl TestFunction {
    pub fn new(window: LatticeWindow, components: Vec<(Bump, Vec<Complex64>)>) -> Self {
        assert!(components.iter().all(|(_, h)| h.len() == window.len()));
        TestFunction { window, components }
    }

    /// Random bumps with endpoints on the grid `k / panels` inside `(0, 1)`,
    /// and complex Gaussian profiles on the sites with `max_k |j_k| <= support`.
    pub fn random<R: Rng>(
        window: LatticeWindow,
        support: usize,
        n_components: usize,
        panels: usize,
        rng: &mut R,
    ) -> Self {
        let components = (0..n_components)
            .map(|_| {
                let bump = random_bump(panels, rng);
                let h = (0..window.len())
                    .map(|i| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        if window.sup_norm(i) as usize <= support {
                            Complex64::new(re, im)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                (bump, h)
            })
            .collect();
        TestFunction { window, components }
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn components(&self) -> &[(Bump, Vec<Complex64>)] {
        &self.components
    }

    pub fn jet(&self, t: f64) -> Jet {
        let n = self.window.len();
        let mut value = vec![DdComplex::ZERO; n];
        let mut dt = vec![DdComplex::ZERO; n];
        for (bump, h) in &self.components {
            let (p, dp) = bump.eval(t);
            if p == 0.0 && dp == 0.0 {
                continue;
            }
            let (p, dp) = (Dd::from_f64(p), Dd::from_f64(dp));
            for i in 0..n {
                let hi = DdComplex::from_complex(h[i]);
                value[i] += hi.scale(p);
                dt[i] += hi.scale(dp);
            }
        }
        Jet { value, dt }
    }
}

/// Bump with grid-aligned endpoints that overlaps `(1/4, 3/4)` by at least
/// one grid cell.
pub(crate) fn random_bump<R: Rng>(panels: usize, rng: &mut R) -> Bump {
    let p = panels as i64;
    let quarter = p / 4;
    loop {
        let a = rng.random_range(1..p / 2);
        let b = rng.random_range(a + 4..p);
        if b > quarter + 1 && a < 3 * quarter - 1 {
            return Bump::new(a as f64 / p as f64, b as f64 / p as f64);
        }
    }
}

const NONE: usize = usize::MAX;

/// Operator coefficients at one quadrature node. Arrays indexed by
/// `site * d + k` hold the hopping factors along axis `k`.
#[derive(Clone, Debug)]
pub struct NodeCoefficients {
    pub t: f64,
    pub weight: f64,
    pub phi: (f64, f64, f64),
    /// `cosh`/`sinh` of `(2 alpha / R)((j_k +- 1/2) / R + phi delta_{1k})`.
    cp: Vec<Dd>,
    sp: Vec<Dd>,
    cm: Vec<Dd>,
    sm: Vec<Dd>,
    /// `sinh^2((2 alpha / R)(j_k / R + phi delta_{1k}))`.
    sh0_sq: Vec<Dd>,
    /// `-2 alpha (j_1 / R + phi) phi'`, the coefficient of `i f` in `A`.
    diag: Vec<Dd>,
    /// Its time derivative `-2 alpha (phi'^2 + (j_1 / R + phi) phi'')`.
    ddiag: Vec<Dd>,
    /// `(2 alpha / R) phi'`, the time derivative of the axis-1 hopping argument.
    adot: Dd,
    /// `exp(W_j - W_{j +- e_k})` and `d W_j / dt` for the direct conjugation.
    fwd: Vec<Dd>,
    bwd: Vec<Dd>,
    wdot: Vec<Dd>,
}

/// Coefficients of `S`, `A` and the direct conjugation on every node of a
/// time rule, shared by all trials of a check.
pub struct OperatorTables {
    window: LatticeWindow,
    spec: WeightSpec,
    rule: QuadratureRule,
    nbr: Vec<[usize; 2]>,
    nodes: Vec<NodeCoefficients>,
    sinh_2a_r2: Dd,
}

impl OperatorTables {
    pub fn new(window: LatticeWindow, spec: WeightSpec, rule: QuadratureRule) -> Self {
        let d = window.dim();
        assert_eq!(d, spec.d, "window and weight dimensions differ");
        let nbr: Vec<[usize; 2]> = (0..window.len() * d)
            .map(|ik| {
                let (i, k) = (ik / d, ik % d);
                [
                    window.neighbor(i, k, true).unwrap_or(NONE),
                    window.neighbor(i, k, false).unwrap_or(NONE),
                ]
            })
            .collect();
        let nodes = rule
            .nodes()
            .par_iter()
            .zip(rule.weights().par_iter())
            .map(|(&t, &w)| node_coefficients(&window, &spec, &nbr, t, w))
            .collect();
        let r = Dd::from_f64(spec.r);
        let sinh_2a_r2 = (Dd::from_f64(2.0 * spec.alpha) / (r * r)).sinh();
        OperatorTables {
            window,
            spec,
            rule,
            nbr,
            nodes,
            sinh_2a_r2,
        }
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[NodeCoefficients] {
        &self.nodes
    }

    fn dim(&self) -> usize {
        self.window.dim()
    }

    /// `S f` at one node.
    pub fn apply_s(&self, node: &NodeCoefficients, f: &Jet) -> Vec<DdComplex> {
        let d = self.dim();
        let two_d = Dd::from_f64(-2.0 * d as f64);
        (0..self.window.len())
            .map(|i| {
                let mut acc = f.dt[i].mul_i() + f.value[i].scale(two_d);
                for k in 0..d {
                    let ik = i * d + k;
                    let [up, down] = self.nbr[ik];
                    if up != NONE {
                        acc += f.value[up].scale(node.cp[ik]);
                    }
                    if down != NONE {
                        acc += f.value[down].scale(node.cm[ik]);
                    }
                }
                acc
            })
            .collect()
    }

    /// `A v` at one node (no time derivative involved).
    pub fn apply_a(&self, node: &NodeCoefficients, v: &[DdComplex]) -> Vec<DdComplex> {
        let d = self.dim();
        (0..self.window.len())
            .map(|i| {
                let mut acc = v[i].mul_i().scale(node.diag[i]);
                for k in 0..d {
                    let ik = i * d + k;
                    let [up, down] = self.nbr[ik];
                    if up != NONE {
                        acc = acc - v[up].scale(node.sp[ik]);
                    }
                    if down != NONE {
                        acc += v[down].scale(node.sm[ik]);
                    }
                }
                acc
            })
            .collect()
    }

    /// `(A f, d/dt (A f))` from the jet of `f`, using the closed-form time
    /// derivatives of the coefficients of `A`.
    pub fn apply_a_jet(&self, node: &NodeCoefficients, f: &Jet) -> Jet {
        let d = self.dim();
        let value = self.apply_a(node, &f.value);
        let a_ft = self.apply_a(node, &f.dt);
        let dt = (0..self.window.len())
            .map(|i| {
                let mut acc = f.value[i].mul_i().scale(node.ddiag[i]) + a_ft[i];
                let ik = i * d;
                let [up, down] = self.nbr[ik];
                if up != NONE {
                    acc = acc - f.value[up].scale(node.cp[ik] * node.adot);
                }
                if down != NONE {
                    acc += f.value[down].scale(node.cm[ik] * node.adot);
                }
                acc
            })
            .collect();
        Jet { value, dt }
    }

    /// `e^{W} (i d/dt + Delta_d)(e^{-W} f)` from the weight exponents directly.
    pub fn conjugate_direct(&self, node: &NodeCoefficients, f: &Jet) -> Vec<DdComplex> {
        let d = self.dim();
        let two_d = Dd::from_f64(-2.0 * d as f64);
        (0..self.window.len())
            .map(|i| {
                let mut acc = (f.dt[i] - f.value[i].scale(node.wdot[i])).mul_i()
                    + f.value[i].scale(two_d);
                for k in 0..d {
                    let ik = i * d + k;
                    let [up, down] = self.nbr[ik];
                    if up != NONE {
                        acc += f.value[up].scale(node.fwd[ik]);
                    }
                    if down != NONE {
                        acc += f.value[down].scale(node.bwd[ik]);
                    }
                }
                acc
            })
            .collect()
    }

    /// `(S A - A S) f` at one node, by composing the operators on jets.
    pub fn commutator_composed(&self, node: &NodeCoefficients, f: &Jet) -> Vec<DdComplex> {
        let sa = self.apply_s(node, &self.apply_a_jet(node, f));
        let as_ = self.apply_a(node, &self.apply_s(node, f));
        sa.into_iter().zip(as_).map(|(x, y)| x - y).collect()
    }

    /// The four terms of the closed-form commutator at one node.
    pub fn commutator_terms(&self, node: &NodeCoefficients, f: &[DdComplex]) -> [Dd; 4] {
        let d = self.dim();
        let four_s = self.sinh_2a_r2.mul_f64(4.0);
        let mut t1 = Dd::ZERO;
        let mut t2 = Dd::ZERO;
        let mut t3 = Dd::ZERO;
        let mut t4 = Dd::ZERO;
        for i in 0..self.window.len() {
            let m2 = f[i].norm_sqr();
            for k in 0..d {
                let ik = i * d + k;
                t1 += node.sh0_sq[ik] * m2;
                let [up, down] = self.nbr[ik];
                let fu = if up != NONE { f[up] } else { DdComplex::ZERO };
                let fd = if down != NONE { f[down] } else { DdComplex::ZERO };
                t2 += (fu - fd).norm_sqr().mul_f64(0.25);
            }
            t3 = t3 - node.ddiag[i] * m2;
            let up = self.nbr[i * d][0];
            if up != NONE {
                // Im(f_{j+e_1} conj(f_j))
                let p = f[up] * f[i].conj();
                t4 += node.cp[i * d] * p.im;
            }
        }
        // sites just outside the window see a nonzero neighbour only if f
        // touches the window edge, which the checks exclude
        [four_s * t1, four_s * t2, t3, node.adot.mul_f64(4.0) * t4]
    }
}

fn node_coefficients(
    window: &LatticeWindow,
    spec: &WeightSpec,
    nbr: &[[usize; 2]],
    t: f64,
    weight: f64,
) -> NodeCoefficients {
    let d = window.dim();
    let n = window.len();
    let (phi, dphi, ddphi) = spec.phi.eval(t);
    let alpha = Dd::from_f64(spec.alpha);
    let r = Dd::from_f64(spec.r);
    let two_a_r = alpha.mul_f64(2.0) / r;
    let phi_dd = Dd::from_f64(phi);
    let half = Dd::from_f64(0.5);
    let coord = |c: i64, k: usize| -> Dd {
        let x = Dd::from_f64(c as f64) / r;
        if k == 0 {
            x + phi_dd
        } else {
            x
        }
    };
    let mut cp = vec![Dd::ZERO; n * d];
    let mut sp = vec![Dd::ZERO; n * d];
    let mut cm = vec![Dd::ZERO; n * d];
    let mut sm = vec![Dd::ZERO; n * d];
    let mut sh0_sq = vec![Dd::ZERO; n * d];
    let mut diag = vec![Dd::ZERO; n];
    let mut ddiag = vec![Dd::ZERO; n];
    let mut wdot = vec![Dd::ZERO; n];
    let mut w = vec![Dd::ZERO; n];
    let mut site = vec![0i64; d];
    let dphi_dd = Dd::from_f64(dphi);
    let ddphi_dd = Dd::from_f64(ddphi);
    for i in 0..n {
        window.site_into(i, &mut site);
        let mut wi = Dd::ZERO;
        for k in 0..d {
            let x = coord(site[k], k);
            wi += x.sqr();
            let shift = half / r;
            let ap = two_a_r * (x + shift);
            let am = two_a_r * (x - shift);
            cp[i * d + k] = ap.cosh();
            sp[i * d + k] = ap.sinh();
            cm[i * d + k] = am.cosh();
            sm[i * d + k] = am.sinh();
            sh0_sq[i * d + k] = (two_a_r * x).sinh().sqr();
        }
        w[i] = alpha * wi;
        let x1 = coord(site[0], 0);
        diag[i] = -(alpha.mul_f64(2.0) * x1 * dphi_dd);
        ddiag[i] = -(alpha.mul_f64(2.0) * (dphi_dd.sqr() + x1 * ddphi_dd));
        wdot[i] = alpha.mul_f64(2.0) * x1 * dphi_dd;
    }
    let mut fwd = vec![Dd::ZERO; n * d];
    let mut bwd = vec![Dd::ZERO; n * d];
    for ik in 0..n * d {
        let i = ik / d;
        let [up, down] = nbr[ik];
        if up != NONE {
            fwd[ik] = (w[i] - w[up]).exp();
        }
        if down != NONE {
            bwd[ik] = (w[i] - w[down]).exp();
        }
    }
    NodeCoefficients {
        t,
        weight,
        phi: (phi, dphi, ddphi),
        cp,
        sp,
        cm,
        sm,
        sh0_sq,
        diag,
        ddiag,
        adot: two_a_r * dphi_dd,
        fwd,
        bwd,
        wdot,
    }
}

/// `sum_j u_j conj(v_j)`.
pub fn pairing(u: &[DdComplex], v: &[DdComplex]) -> DdComplex {
    u.iter().zip(v).fold(DdComplex::ZERO, |acc, (a, b)| acc + *a * b.conj())
}

pub fn norm_sqr(u: &[DdComplex]) -> Dd {
    u.iter().fold(Dd::ZERO, |acc, a| acc + a.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleman::profile::TimeProfile;

    #[test]
    fn bump_vanishes_outside_and_peaks_at_one() {
        let b = Bump::new(0.25, 0.75);
        assert_eq!(b.eval(0.1), (0.0, 0.0));
        assert_eq!(b.eval(0.5), (1.0, 0.0));
        let e = 1e-6;
        let fd = (b.eval(0.4 + e).0 - b.eval(0.4 - e).0) / (2.0 * e);
        assert!((fd - b.eval(0.4).1).abs() < 1e-8);
    }

    #[test]
    fn alpha_zero_gives_laplacian_and_vanishing_a() {
        let w = LatticeWindow::new(2, 4).unwrap();
        let spec = WeightSpec::new(0.0, 4.0, TimeProfile::paper_phi(), 2);
        let rule = QuadratureRule::gauss_legendre(3, 0.3, 0.4);
        let tables = OperatorTables::new(w, spec, rule);
        let mut rng = crate::rng::trial_rng(3, 0);
        let f = TestFunction::random(w, 3, 2, 32, &mut rng);
        for node in tables.nodes() {
            let jet = f.jet(node.t);
            let a = tables.apply_a(node, &jet.value);
            assert!(a.iter().all(|z| z.to_complex().norm() == 0.0));
            let s = tables.apply_s(node, &jet);
            let vals: Vec<Complex64> = jet.value.iter().map(|z| z.to_complex()).collect();
            let lap = crate::lattice::discrete_laplacian(
                &crate::lattice::LatticeField::from_values(w, vals).unwrap(),
            );
            for i in 0..w.len() {
                let want = jet.dt[i].to_complex() * Complex64::i() + lap.values()[i];
                assert!((s[i].to_complex() - want).norm() < 1e-13);
            }
        }
    }
}
