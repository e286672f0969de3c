//! Two-parameter Mittag-Leffler function `E_{a,b}(z) = sum_k z^k / Gamma(a k + b)` on the
//! real line.
//!
//! Evaluation strategy for `z < 0`:
//! * power series while `|z|^(1/a) <= 3`, where the alternating sum is well conditioned;
//! * for `|z| >= 50` and `a <= 1`, the algebraic asymptotic expansion
//!   `-sum_{k>=1} z^(-k) / Gamma(b - a k)`;
//! * in between (for `0 < a < 1`, `b < 1 + a`) the real-line integral representation
//!   obtained by collapsing the Hankel contour onto the negative axis.

use super::gamma::{ln_gamma, rgamma, sin_pi, cos_pi};
use super::quad::{integrate_with_breaks, Tolerance};
use super::SeriesControl;
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 3.0;
const ASYMPTOTIC_FROM: f64 = 50.0;

/// `ln |1/Gamma(a)|` split into a smooth envelope and a bounded signed factor.
pub(crate) fn rgamma_envelope(a: f64) -> (f64, f64) {
    if a > 0.0 {
        let (lg, _) = ln_gamma(a).expect("positive argument");
        (-lg, 1.0)
    } else {
        // 1/Gamma(a) = Gamma(1 - a) sin(pi a) / pi
        let (lg, _) = ln_gamma(1.0 - a).expect("positive argument");
        (lg - std::f64::consts::PI.ln(), sin_pi(a))
    }
}

/// Sums `sum_k exp(env_k) * factor_k`, stopping once the smooth envelope is decreasing
/// and negligible. Returns the sum and the estimated absolute rounding error.
pub(crate) fn envelope_series<F: FnMut(usize) -> (f64, f64)>(
    mut term: F,
    ctl: SeriesControl,
    routine: &str,
) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut prev_env = f64::INFINITY;
    let mut quiet = 0;
    for k in 0..ctl.max_terms {
        let (env, factor) = term(k);
        let mag = env.exp();
        let t = mag * factor;
        if !t.is_finite() {
            return Err(Error::nonconv(routine, format!("term {k} overflowed")));
        }
        sum += t;
        err += mag * f64::EPSILON * (2.0 + env.abs());
        let negligible = mag <= ctl.tol * sum.abs() || mag < 1e-300;
        if env < prev_env && negligible {
            quiet += 1;
            if quiet >= 2 {
                if err > ctl.cancellation_limit {
                    return Err(Error::nonconv(
                        routine,
                        format!("cancellation: rounding error estimate {err:.2e} exceeds limit"),
                    ));
                }
                return Ok((sum, err));
            }
        } else {
            quiet = 0;
        }
        prev_env = env;
    }
    Err(Error::nonconv(routine, format!("series not converged after {} terms", ctl.max_terms)))
}

/// `E_{alpha,beta}(z)` with default series controls.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    mittag_leffler_with(alpha, beta, z, SeriesControl::default())
}

/// `E_{alpha,beta}(z)` for `alpha > 0` and real `z`.
pub fn mittag_leffler_with(alpha: f64, beta: f64, z: f64, ctl: SeriesControl) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() || !beta.is_finite() || z.is_nan() {
        return Err(Error::domain(format!("Mittag-Leffler needs alpha > 0 and finite arguments (alpha={alpha}, beta={beta}, z={z})")));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if alpha == 1.0 && beta == 1.0 {
        return Ok(z.exp());
    }
    if z > 0.0 {
        return series(alpha, beta, z, ctl);
    }
    let x = -z;
    if x.powf(1.0 / alpha) <= SERIES_LIMIT {
        return series(alpha, beta, z, ctl);
    }
    if alpha <= 1.0 && x >= ASYMPTOTIC_FROM {
        if let Some(v) = asymptotic(alpha, beta, z) {
            return Ok(v);
        }
    }
    if alpha < 1.0 && beta < 1.0 + alpha {
        return hankel_integral(alpha, beta, x);
    }
    if alpha == 1.0 && beta == beta.round() && beta >= 1.0 {
        // E_{1,k+1}(z) = (E_{1,k}(z) - 1/Gamma(k)) / z, stable for |z| > 1
        let mut e = z.exp();
        let mut k = 1.0;
        while k < beta {
            e = (e - rgamma(k)) / z;
            k += 1.0;
        }
        return Ok(e);
    }
    series(alpha, beta, z, ctl)
}

fn series(alpha: f64, beta: f64, z: f64, ctl: SeriesControl) -> Result<f64> {
    let lz = z.abs().ln();
    let neg = z < 0.0;
    let (sum, _) = envelope_series(
        |k| {
            let (env, f) = rgamma_envelope(alpha * k as f64 + beta);
            let sign = if neg && k % 2 == 1 { -1.0 } else { 1.0 };
            (k as f64 * lz + env, sign * f)
        },
        ctl,
        "mittag_leffler series",
    )?;
    Ok(sum)
}

fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let inv = 1.0 / z;
    let mut sum = 0.0f64;
    let mut pw = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..400 {
        pw *= inv;
        let t = -pw * rgamma(beta - alpha * k as f64);
        let mag = t.abs();
        if mag == 0.0 {
            continue;
        }
        if mag > last {
            // the expansion started to diverge before reaching full accuracy
            return if last <= 1e-16 * sum.abs() { Some(sum) } else { None };
        }
        sum += t;
        last = mag;
        if mag <= 1e-17 * sum.abs() {
            return Some(sum);
        }
    }
    None
}

fn hankel_integral(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let s1 = sin_pi(1.0 - beta);
    let s2 = sin_pi(1.0 - beta + alpha);
    let c = cos_pi(alpha);
    let p = (1.0 - beta) / alpha;
    let inv_a = 1.0 / alpha;
    let pref = 1.0 / (alpha * pi);
    let kernel = |chi: f64| -> f64 {
        if chi <= 0.0 {
            return 0.0;
        }
        let e = (-chi.powf(inv_a)).exp();
        if e == 0.0 {
            return 0.0;
        }
        let num = chi * s1 + x * s2;
        let den = chi * chi + 2.0 * chi * x * c + x * x;
        pref * chi.powf(p) * e * num / den
    };
    let mut breaks = vec![1.0, 40f64.powf(alpha)];
    if c < 0.0 {
        breaks.push(-x * c);
    }
    integrate_with_breaks(kernel, 0.0, f64::INFINITY, &breaks, Tolerance::new(1e-15, 1e-13))
        .check("mittag_leffler integral")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_exponential_and_cosh() {
        for &z in &[-5.0, -1.0, 0.3, 2.0] {
            assert!((mittag_leffler(1.0, 1.0, z).unwrap() - f64::exp(z)).abs() < 1e-14);
            // E_2(z^2) = cosh(z)
            let c = mittag_leffler(2.0, 1.0, z * z).unwrap();
            assert!((c - z.cosh()).abs() < 1e-12 * z.cosh());
        }
    }

    #[test]
    fn regimes_agree_at_the_switch_points() {
        // series vs integral just around |z|^(1/a) = 3 and integral vs asymptotic at 50
        for &(a, b) in &[(0.5, 1.0), (0.5, 0.5), (1.0 / 3.0, 1.0), (0.8, 1.0), (0.9, 0.9)] {
            let z0 = -(SERIES_LIMIT.powf(a));
            let s = series(a, b, z0, SeriesControl::default()).unwrap();
            let h = hankel_integral(a, b, -z0).unwrap();
            assert!((s - h).abs() < 1e-12, "a={a} b={b}: series {s} vs integral {h}");
            let x = ASYMPTOTIC_FROM;
            let h = hankel_integral(a, b, x).unwrap();
            let s = asymptotic(a, b, -x).unwrap();
            assert!((s - h).abs() < 1e-13, "a={a} b={b}: asymptotic {s} vs integral {h}");
        }
    }

    #[test]
    fn rejects_bad_order() {
        assert!(mittag_leffler(0.0, 1.0, -1.0).is_err());
        assert!(mittag_leffler(-0.5, 1.0, -1.0).is_err());
    }
}
