use num_complex::Complex64;

use super::bessel_i::bessel_i_complex_series;
use crate::numeric::Dd;

/// Double-double alternating series; reliable while `|z|` is moderate.
fn series(n: u64, z: f64) -> f64 {
    let half = Dd::from_f64(0.5 * z);
    let q = half * half;
    let mut term = Dd::ONE;
    for k in 1..=n {
        term = term * half / Dd::from_f64(k as f64);
    }
    let mut sum = term;
    let mut k = 0u64;
    loop {
        k += 1;
        term = -(term * q / (Dd::from_f64(k as f64) * Dd::from_f64((n + k) as f64)));
        sum += term;
        if term.to_f64() == 0.0
            || (k as f64 > 0.5 * z.abs() && term.to_f64().abs() < 1e-33 * sum.to_f64().abs())
        {
            break;
        }
    }
    sum.to_f64()
}

/// Backward recurrence normalised by `J_0 + 2 sum J_{2k} = 1`, for `z > 0`.
fn miller(n: u64, z: f64) -> f64 {
    let top = n.max(z as u64) + 30 + (40.0 * (n.max(z as u64) as f64)).sqrt() as u64;
    let top = top + top % 2;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0f64;
    let mut wanted = 0.0f64;
    for k in (1..=top).rev() {
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if k - 1 == n {
            wanted = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += cur;
    wanted / norm
}

/// Bessel function of the first kind for integer order and real argument.
pub fn bessel_j(n: i64, z: f64) -> f64 {
    let m = n.unsigned_abs();
    let parity = if m % 2 == 1 { -1.0 } else { 1.0 };
    let order_sign = if n < 0 { parity } else { 1.0 };
    let arg_sign = if z < 0.0 { parity } else { 1.0 };
    let a = z.abs();
    if a == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let v = if a <= 25.0 { series(m, a) } else { miller(m, a) };
    order_sign * arg_sign * v
}

/// `J_n(z) = i^n I_n(-i z)`, evaluated with the complex series for `I`.
pub fn bessel_j_via_i(n: u64, z: f64) -> Complex64 {
    let i_pow = match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    i_pow * bessel_i_complex_series(n, Complex64::new(0.0, -z))
}
