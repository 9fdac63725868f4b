use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ln_factorial, BesselEval, BesselMethod};
use crate::error::{Error, Result};
use crate::numeric::{integrate, DdComplex, Dd, Integral, LogScalar, QuadratureRule};

/// `ln I_m(x)` for `x > 0` from the ascending series, summed relative to
/// its largest term.
fn log_series(m: u64, x: f64) -> f64 {
    let lh = (0.5 * x).ln();
    let mut log_t = m as f64 * lh - ln_factorial(m);
    let mut logs = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut k = 0u64;
    loop {
        logs.push(log_t);
        peak = peak.max(log_t);
        // terms decrease once k(m+k) > x^2/4; stop 40 e-folds below the peak
        let ratio = 2.0 * lh - ((k + 1) as f64).ln() - ((m + k + 1) as f64).ln();
        if ratio < 0.0 && log_t < peak - 40.0 {
            break;
        }
        log_t += ratio;
        k += 1;
    }
    let mut acc = crate::numeric::CompensatedSum::new();
    for l in &logs {
        acc.add((l - peak).exp());
    }
    peak + acc.value().ln()
}

fn order_sign(m: i64, x: f64) -> (u64, i8) {
    let n = m.unsigned_abs();
    let sign = if x < 0.0 && n % 2 == 1 { -1 } else { 1 };
    (n, sign)
}

/// `I_m(x)` in the log domain; valid for every real `x`.
pub fn bessel_i_log(m: i64, x: f64) -> LogScalar {
    let (n, sign) = order_sign(m, x);
    if x == 0.0 {
        return if n == 0 { LogScalar::ONE } else { LogScalar::ZERO };
    }
    LogScalar::new(log_series(n, x.abs()), sign)
}

/// `I_m(x)` as an ordinary float.
pub fn bessel_i(m: i64, x: f64) -> Result<f64> {
    let v = bessel_i_log(m, x);
    if v.log_mag() > 709.0 {
        return Err(Error::Overflow { log_mag: v.log_mag() });
    }
    Ok(v.to_f64())
}

/// `I_m(x) = (1/pi) int_0^pi e^{x cos theta} cos(m theta) d theta`, evaluated on
/// the contour shifted by `i asinh(m/x)`, which runs through the saddle
/// point and removes the cancellation of the real-axis integrand.
///
/// The value is returned as `exp(shift) * integral` so that large arguments
/// do not overflow; the error estimate is relative to `exp(shift)`.
pub fn bessel_i_integral(m: i64, x: f64) -> Result<(f64, Integral<f64>)> {
    let (n, sign) = order_sign(m, x);
    let x = x.abs();
    if x == 0.0 {
        let v = if n == 0 { 1.0 } else { 0.0 };
        return Ok((0.0, Integral { value: v, error: Some(0.0) }));
    }
    let nf = n as f64;
    let tau = (nf / x).asinh();
    let (ch, sh) = (tau.cosh(), tau.sinh());
    let shift = x * ch - nf * tau;
    // resolve the Gaussian peak of width ~ 1/sqrt(x cosh tau) at s = 0
    let width = 1.0 / (x * ch).sqrt();
    let panels = ((PI / width).ceil() as usize).clamp(4, 512);
    let rule = QuadratureRule::composite_uniform(24, panels, 0.0, PI, &[]);
    let f = |s: f64| (x * ch * (s.cos() - 1.0)).exp() * (nf * s - x * s.sin() * sh).cos() / PI;
    let mut r = integrate(f, &rule)?;
    if sign < 0 {
        r.value = -r.value;
    }
    Ok((shift, r))
}

/// Evaluates `I_m(x)` by the requested route.
pub fn bessel_i_eval(m: i64, x: f64, method: BesselMethod) -> Result<BesselEval> {
    let value = match method {
        BesselMethod::Series => bessel_i(m, x)?,
        BesselMethod::Integral => {
            let (shift, r) = bessel_i_integral(m, x)?;
            let v = LogScalar::from_f64(r.value) * LogScalar::from_log(shift);
            if v.log_mag() > 709.0 {
                return Err(Error::Overflow { log_mag: v.log_mag() });
            }
            v.to_f64()
        }
        BesselMethod::Asymptotic => {
            let (n, sign) = order_sign(m, x);
            (bessel_i_asymptotic(n, x.abs()) * LogScalar::new(0.0, sign)).to_f64()
        }
    };
    Ok(BesselEval {
        order: m as f64,
        argument: Complex64::new(x, 0.0),
        value: Complex64::new(value, 0.0),
        method_tag: method,
    })
}

/// Leading large-order behaviour `(2 pi n)^{-1/2} (e z / 2)^n e^{-n log n}`.
pub fn bessel_i_asymptotic(n: u64, z: f64) -> LogScalar {
    debug_assert!(n >= 1 && z > 0.0);
    let nf = n as f64;
    LogScalar::from_log(nf * (1.0 + (0.5 * z).ln()) - nf * nf.ln() - 0.5 * (2.0 * PI * nf).ln())
}

/// Ascending series `sum (z/2)^{n+2k} / (k! (n+k)!)` for complex `z`,
/// accumulated in double-double.
pub fn bessel_i_complex_series(n: u64, z: Complex64) -> Complex64 {
    let half = DdComplex::from_complex(z * 0.5);
    let q = half * half;
    let mut term = DdComplex::new(Dd::ONE, Dd::ZERO);
    for k in 1..=n {
        term = (term * half).scale(Dd::ONE / Dd::from_f64(k as f64));
    }
    let mut sum = term;
    let mut k = 0u64;
    loop {
        k += 1;
        let denom = Dd::from_f64(k as f64) * Dd::from_f64((n + k) as f64);
        term = (term * q).scale(Dd::ONE / denom);
        sum += term;
        let t = term.to_complex().norm();
        if k as f64 > 0.5 * z.norm() && t <= 1e-34 * sum.to_complex().norm().max(f64::MIN_POSITIVE) {
            break;
        }
        if t == 0.0 {
            break;
        }
    }
    sum.to_complex()
}
