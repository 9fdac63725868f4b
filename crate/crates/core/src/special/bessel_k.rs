use crate::numeric::{quadrature::integrate_log_adaptive, LogScalar};

/// `ln cosh(y)` without overflow.
fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt` in the log domain.
///
/// The integrand is log-concave with its peak near `asinh(nu / x)`; the
/// range is cut where it has dropped 45 e-folds below the peak.
pub fn bessel_k(nu: f64, x: f64) -> LogScalar {
    assert!(x > 0.0, "K_nu needs a positive argument");
    let nu = nu.abs();
    let log_f = |t: f64| -x * t.cosh() + ln_cosh(nu * t);
    let mut peak_t = (nu / x).asinh();
    // a few Newton steps on x sinh t = nu tanh(nu t)
    for _ in 0..30 {
        let g = x * peak_t.sinh() - nu * (nu * peak_t).tanh();
        let dg = x * peak_t.cosh() - nu * nu / (nu * peak_t).cosh().powi(2);
        if dg <= 0.0 {
            break;
        }
        let step = g / dg;
        peak_t = (peak_t - step).max(0.0);
        if step.abs() < 1e-14 {
            break;
        }
    }
    let peak = log_f(peak_t);
    let mut hi = peak_t + 1.0;
    while log_f(hi) > peak - 45.0 {
        hi += 0.5 * (hi - peak_t).max(0.5);
    }
    integrate_log_adaptive(log_f, 0.0, hi, 1e-15).expect("K integrand is finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_in_order() {
        assert_eq!(bessel_k(2.5, 0.7), bessel_k(-2.5, 0.7));
    }

    #[test]
    fn half_integer_closed_form() {
        // K_{1/2}(x) = sqrt(pi / (2x)) e^{-x}
        for &x in &[0.2, 1.0, 5.0, 30.0] {
            let want = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            let got = bessel_k(0.5, x).to_f64();
            assert!(((got - want) / want).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn recurrence_in_order() {
        // K_{nu+1}(x) = K_{nu-1}(x) + (2 nu / x) K_nu(x)
        let x = 2.0 / std::f64::consts::E;
        for nu in [1.0, 5.0, 20.0, 60.0] {
            let l = bessel_k(nu + 1.0, x);
            let r = bessel_k(nu - 1.0, x) + LogScalar::from_f64(2.0 * nu / x) * bessel_k(nu, x);
            assert!((l.log_mag() - r.log_mag()).abs() < 1e-12, "nu={nu}");
        }
    }
}
