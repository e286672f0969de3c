//! Bessel functions of real order and real argument.
//!
//! * `J`: power series for `x <= 8`; above that Miller's backward recurrence,
//!   normalised with the Neumann series `(x/2)^v = sum_k (v + 2k) Gamma(v + k)/k! J_{v+2k}(x)`.
//! * `I`: power series.
//! * `K`: for `x > 2`, Steed's continued fraction followed by forward recurrence in the
//!   order. For `x <= 2` it uses `K_v = pi/2 (I_{-v} - I_v) / sin(v pi)` at non-integer
//!   order. At integer order it uses the symmetric limit `v -> n +/- eps` with
//!   `eps = 1e-6` and one Richardson step. Rounding in `I_{-v} - I_v` limits that
//!   branch to roughly 1e-9 relative accuracy.

use super::gamma::{gamma_fn, ln_gamma, rgamma};
use crate::error::{Error, Result};

const SERIES_MAX_X: f64 = 8.0;

fn is_integer(v: f64) -> bool {
    v == v.round()
}

/// Bessel function of the first kind `J_nu(x)`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(Error::domain(format!("bessel_j of non-finite input (nu={nu}, x={x})")));
    }
    if x < 0.0 {
        if is_integer(nu) {
            let s = if (nu.abs() as i64) % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(s * bessel_j(nu, -x)?);
        }
        return Err(Error::domain("bessel_j at negative argument needs integer order"));
    }
    if nu < 0.0 && is_integer(nu) {
        let s = if (nu.abs() as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(s * bessel_j(-nu, x)?);
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain("bessel_j is unbounded at 0 for negative non-integer order"))
        };
    }
    if x <= SERIES_MAX_X || x < 0.5 * nu {
        return j_series(nu, x);
    }
    j_miller(nu, x)
}

fn j_series(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    // leading term (x/2)^nu / Gamma(nu + 1), computed in logs for large orders
    let lead = if nu + 1.0 > 0.0 {
        let (lg, _) = ln_gamma(nu + 1.0)?;
        (nu * half.ln() - lg).exp()
    } else {
        half.powf(nu) * rgamma(nu + 1.0)
    };
    let mut term = lead;
    let mut sum = term;
    for k in 0..500 {
        let kf = k as f64;
        term *= -q / ((kf + 1.0) * (kf + 1.0 + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && kf + 1.0 > q.sqrt() && kf + 1.0 + nu > 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::nonconv("bessel_j series", format!("nu={nu}, x={x}")))
}

fn j_miller(nu: f64, x: f64) -> Result<f64> {
    // base order in (0, 1]; target index may be -1 or lower for negative orders
    let nu0 = nu - nu.ceil() + 1.0;
    let target = (nu - nu0).round() as i64;
    let top = ((x + 12.0 * x.cbrt() + 40.0).ceil() as i64).max(target + 40) as usize;
    let mut raw = vec![0.0f64; top + 2];
    raw[top] = 1e-30;
    for k in (1..=top).rev() {
        let a = nu0 + k as f64;
        raw[k - 1] = 2.0 * a / x * raw[k] - raw[k + 1];
        if raw[k - 1].abs() > 1e200 {
            for r in raw[k - 1..].iter_mut() {
                *r *= 1e-200;
            }
        }
    }
    // Neumann normalisation
    let mut norm = 0.0;
    let mut g = 0.0; // Gamma(nu0 + j) / j!
    let mut j = 0usize;
    while 2 * j <= top {
        let c = if j == 0 {
            gamma_fn(nu0 + 1.0)?
        } else {
            if j == 1 {
                g = gamma_fn(nu0 + 1.0)?;
            } else {
                let jf = (j - 1) as f64;
                g *= (nu0 + jf) / (jf + 1.0);
            }
            (nu0 + 2.0 * j as f64) * g
        };
        norm += c * raw[2 * j];
        j += 1;
    }
    let scale = (0.5 * x).powf(nu0) / norm;
    if target >= 0 {
        return Ok(raw[target as usize] * scale);
    }
    // downward recurrence below the base order: J_{a-1} = (2a/x) J_a - J_{a+1}
    let mut upper = raw[1] * scale;
    let mut cur = raw[0] * scale;
    let mut a = nu0;
    let mut idx = 0i64;
    while idx > target {
        let next = 2.0 * a / x * cur - upper;
        upper = cur;
        cur = next;
        a -= 1.0;
        idx -= 1;
    }
    Ok(cur)
}

/// `J'_nu(x)` from the recurrence `J'_nu = (nu/x) J_nu - J_{nu+1}`.
pub fn bessel_j_derivative(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::domain("bessel_j_derivative at x = 0"));
    }
    Ok(nu / x * bessel_j(nu, x)? - bessel_j(nu + 1.0, x)?)
}

/// Modified Bessel function of the first kind `I_nu(x)`, `x >= 0`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_i needs x >= 0 (nu={nu}, x={x})")));
    }
    if nu < 0.0 && is_integer(nu) {
        return bessel_i(-nu, x);
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain("bessel_i is unbounded at 0 for negative non-integer order"))
        };
    }
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    let lead = if nu + 1.0 > 0.0 {
        let (lg, _) = ln_gamma(nu + 1.0)?;
        (nu * half.ln() - lg).exp()
    } else {
        half.powf(nu) * rgamma(nu + 1.0)
    };
    let mut term = lead;
    let mut sum = term;
    for k in 0..5000 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + nu));
        sum += term;
        if !sum.is_finite() {
            return Err(Error::nonconv("bessel_i series", "overflow"));
        }
        if term.abs() <= 1e-17 * sum.abs() && kf + 1.0 > q.sqrt() && kf + 1.0 + nu > 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::nonconv("bessel_i series", format!("nu={nu}, x={x}")))
}

/// Modified Bessel function of the second kind `K_nu(x)`, `x > 0`. Even in `nu`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_k needs x > 0 (nu={nu}, x={x})")));
    }
    let nu = nu.abs();
    if x > 2.0 {
        return Ok(k_steed(nu, x));
    }
    Ok(k_temme(nu, x))
}

/// `zeta(n)` for integer `2 <= n < 80`: partial sum plus Euler–Maclaurin tail, tabulated once.
fn zeta_int(n: i32) -> f64 {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        const N: f64 = 100.0;
        (0..80)
            .map(|n: i32| {
                if n < 2 {
                    return f64::NAN;
                }
                let nf = n as f64;
                let head: f64 = (1..100).rev().map(|k| (k as f64).powi(-n)).sum();
                head + N.powf(1.0 - nf) / (nf - 1.0) + 0.5 * N.powi(-n) + nf / 12.0 * N.powi(-n - 1)
                    - nf * (nf + 1.0) * (nf + 2.0) / 720.0 * N.powi(-n - 3)
            })
            .collect()
    })[n as usize]
}

/// `(ln Gamma(1 + m), ln Gamma(1 - m), (ln Gamma(1 + m) - ln Gamma(1 - m)) / (2 m))` for `|m| <= 1/2`,
/// from the Taylor series of `ln Gamma(1 + z)`; the odd part is summed without division.
fn ln_gamma_pair(m: f64) -> (f64, f64, f64) {
    let (mut even, mut odd_over) = (0.0, -EULER_GAMMA);
    let mut pk = m;
    for k in 2..80 {
        pk *= m;
        let term = zeta_int(k) / k as f64;
        if k % 2 == 0 {
            even += term * pk;
        } else {
            // pk = m^k, contribution to odd / m is m^(k-1)
            odd_over -= term * pk / m;
        }
        if term * pk.abs() < 1e-18 {
            break;
        }
    }
    // ln Gamma(1 + m) = odd(m) + even(m), odd(m) = m * odd_over
    let odd = m * odd_over;
    (even + odd, even - odd, odd_over)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Temme's series for `K_nu` at `x <= 2`: `K_mu`, `K_{mu+1}` with `|mu| <= 1/2`, then upward recurrence.
fn k_temme(nu: f64, x: f64) -> f64 {
    let nl = (nu + 0.5).floor();
    let xmu = nu - nl;
    let xmu2 = xmu * xmu;
    let x2 = 0.5 * x;
    let pimu = std::f64::consts::PI * xmu;
    let fact = if xmu == 0.0 { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = xmu * d;
    let fact2 = if e == 0.0 { 1.0 } else { e.sinh() / e };
    let (lgp, lgm, half_diff) = ln_gamma_pair(xmu);
    let gampl = (-lgp).exp();
    let gammi = (-lgm).exp();
    // gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) = gampl * expm1(D) / (2 mu), D = 2 mu half_diff
    let big_d = 2.0 * xmu * half_diff;
    let ratio = if big_d == 0.0 { 1.0 } else { big_d.exp_m1() / big_d };
    let gam1 = gampl * ratio * half_diff;
    let gam2 = 0.5 * (gammi + gampl);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..500 {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - xmu2);
        c *= dd / fi;
        p /= fi - xmu;
        q /= fi + xmu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    let xi2 = 2.0 / x;
    let mut kmu = sum;
    let mut k1 = sum1 * xi2;
    for i in 1..=(nl as i64) {
        let next = (xmu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    kmu
}

fn k_steed(nu: f64, x: f64) -> f64 {
    let nl = (nu + 0.5).floor();
    let xmu = nu - nl;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - xmu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let mut kmu = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let mut k1 = kmu * (xmu + x + 0.5 - h) * xi;
    for i in 1..=(nl as i64) {
        let next = (xmu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    kmu
}

/// First `n` positive zeros of `J_nu`, `nu > -1`, in increasing order.
pub fn bessel_j_zeros(nu: f64, n: usize) -> Result<Vec<f64>> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::domain(format!("bessel_j_zeros needs nu > -1, got {nu}")));
    }
    let mut zeros = Vec::with_capacity(n);
    let mut x_prev = 1e-6;
    let mut f_prev = bessel_j(nu, x_prev)?;
    while zeros.len() < n {
        let step = if x_prev < 0.05 { x_prev * 0.5 } else { 0.05 };
        let x = x_prev + step;
        let f = bessel_j(nu, x)?;
        if f == 0.0 {
            zeros.push(x);
        } else if f.signum() != f_prev.signum() && f_prev != 0.0 {
            zeros.push(bisect(|t| bessel_j(nu, t), x_prev, x, f_prev)?);
        }
        x_prev = x;
        f_prev = f;
    }
    Ok(zeros)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let s_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_forms() {
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x, K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
        for &x in &[0.3, 2.0, 7.9, 8.1, 25.0, 90.0] {
            let j = bessel_j(0.5, x).unwrap();
            let e = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
            assert!((j - e).abs() < 1e-13, "J at {x}: {j} vs {e}");
            let jm = bessel_j(-0.5, x).unwrap();
            let em = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.cos();
            assert!((jm - em).abs() < 1e-13, "J_-1/2 at {x}: {jm} vs {em}");
            let k = bessel_k(0.5, x).unwrap();
            let ek = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k - ek).abs() <= 1e-13 * ek, "K at {x}: {k} vs {ek}");
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_switch() {
        for &nu in &[0.0, 0.25, 1.0, 2.5, -0.4] {
            let a = j_series(nu, 8.0).unwrap();
            let b = j_miller(nu, 8.0).unwrap();
            assert!((a - b).abs() < 1e-13, "nu={nu}: {a} vs {b}");
        }
    }

    #[test]
    fn k_branches_agree_at_switch() {
        for &nu in &[0.0, 0.2, 1.0 / 3.0, 0.5, 1.0, 1.5, 2.7, 3.0] {
            let a = k_temme(nu, 2.0);
            let b = k_steed(nu, 2.0);
            assert!((a - b).abs() < 1e-13 * b, "nu={nu}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_scan_rejects_bad_order() {
        assert!(bessel_j_zeros(-1.0, 3).is_err());
    }
}
