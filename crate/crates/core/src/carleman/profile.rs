use serde::{Deserialize, Serialize};

/// Smooth step `h(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})`, with its first
/// two derivatives. Constant outside `(0, 1)`.
pub fn smooth_step(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let r = 1.0 - s;
    let q = (1.0 - 2.0 * s) / (s * r);
    let h = 1.0 / (1.0 + q.exp());
    // h (1 - h) = 1 / (4 cosh^2(q / 2)), written to avoid overflow
    let hh = if q.abs() > 700.0 {
        0.0
    } else {
        let c = (0.5 * q).cosh();
        0.25 / (c * c)
    };
    let p = 1.0 / (s * s) + 1.0 / (r * r);
    let dp = -2.0 / (s * s * s) + 2.0 / (r * r * r);
    let d1 = hh * p;
    let d2 = d1 * (1.0 - 2.0 * h) * p + hh * dp;
    (h, d1, d2)
}

/// Maximises `f` on `[lo, hi]`: a coarse scan brackets the peak, golden
/// section refines it.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = 2000;
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + step * i as f64)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-13 * (1.0 + a.abs()) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    f(0.5 * (a + b)).max(f(best))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum ProfileKind {
    /// 0 on `[0, 1/4] u [3/4, 1]`, 3 on `[3/8, 5/8]`, smooth steps between.
    PaperPhi,
    Constant(f64),
    Zero,
}

/// Time profile `phi` with closed-form derivatives and their sup-norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeProfile {
    pub kind: ProfileKind,
    pub sup_d1: f64,
    pub sup_d2: f64,
}

const RISE: (f64, f64) = (0.25, 0.375);
const FALL: (f64, f64) = (0.625, 0.75);

impl TimeProfile {
    pub fn paper_phi() -> Self {
        let sup_h1 = golden_max(|s| smooth_step(s).1.abs(), 0.0, 1.0);
        let sup_h2 = golden_max(|s| smooth_step(s).2.abs(), 0.0, 1.0);
        TimeProfile {
            kind: ProfileKind::PaperPhi,
            sup_d1: 24.0 * sup_h1,
            sup_d2: 192.0 * sup_h2,
        }
    }

    pub fn constant(c: f64) -> Self {
        TimeProfile {
            kind: ProfileKind::Constant(c),
            sup_d1: 0.0,
            sup_d2: 0.0,
        }
    }

    pub fn zero() -> Self {
        TimeProfile {
            kind: ProfileKind::Zero,
            sup_d1: 0.0,
            sup_d2: 0.0,
        }
    }

    /// `(phi, phi', phi'')` at time `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self.kind {
            ProfileKind::Zero => (0.0, 0.0, 0.0),
            ProfileKind::Constant(c) => (c, 0.0, 0.0),
            ProfileKind::PaperPhi => {
                if t > RISE.0 && t < RISE.1 {
                    let (h, h1, h2) = smooth_step(8.0 * (t - RISE.0));
                    (3.0 * h, 24.0 * h1, 192.0 * h2)
                } else if t >= RISE.1 && t <= FALL.0 {
                    (3.0, 0.0, 0.0)
                } else if t > FALL.0 && t < FALL.1 {
                    let (h, h1, h2) = smooth_step(8.0 * (FALL.1 - t));
                    (3.0 * h, -24.0 * h1, 192.0 * h2)
                } else {
                    (0.0, 0.0, 0.0)
                }
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.eval(t).1
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.eval(t).2
    }

    /// Times where the profile switches between closed forms.
    pub fn breakpoints(&self) -> &'static [f64] {
        match self.kind {
            ProfileKind::PaperPhi => &[RISE.0, RISE.1, FALL.0, FALL.1],
            _ => &[],
        }
    }

    /// Exact range of `phi` over `[a, b]`, using monotonicity between breakpoints.
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let mut lo = self.value(a).min(self.value(b));
        let mut hi = self.value(a).max(self.value(b));
        for &p in self.breakpoints() {
            if p > a && p < b {
                lo = lo.min(self.value(p));
                hi = hi.max(self.value(p));
            }
        }
        (lo, hi)
    }

    pub fn is_stationary(&self) -> bool {
        !matches!(self.kind, ProfileKind::PaperPhi)
    }
}

/// Radial cutoffs: `theta_R` is 1 on `|x| <= R - 1` and 0 on `|x| >= R`;
/// `mu` is 0 on `|x| <= 1` and 1 on `|x| >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSet {
    pub r: f64,
    pub smoothing_tag: SmoothingTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingTag {
    ExpGluing,
}

impl CutoffSet {
    pub fn new(r: f64) -> Self {
        CutoffSet {
            r,
            smoothing_tag: SmoothingTag::ExpGluing,
        }
    }

    /// `(theta, theta', theta'')` as functions of the radius.
    pub fn theta(&self, radius: f64) -> (f64, f64, f64) {
        let (h, h1, h2) = smooth_step(radius - (self.r - 1.0));
        (1.0 - h, -h1, -h2)
    }

    /// `(mu, mu', mu'')` as functions of the radius.
    pub fn mu(&self, radius: f64) -> (f64, f64, f64) {
        smooth_step(radius - 1.0)
    }
}
