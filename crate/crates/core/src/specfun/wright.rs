//! Wright function `W_{lambda,mu}(z) = sum_k z^k / (k! Gamma(lambda k + mu))`, `lambda > -1`.
//!
//! The series is entire but alternates for `z < 0`; once the largest term makes the
//! estimated rounding error exceed [`SeriesControl::cancellation_limit`] the routine
//! reports non-convergence instead of returning a degraded value.

use super::gamma::{ln_gamma, sin_pi};
use super::mittag_leffler::{envelope_series, rgamma_envelope};
use super::SeriesControl;
use super::quad::{integrate, Tolerance};
use crate::error::{Error, Result};

/// `W_{lambda,mu}(z)` with default series controls.
pub fn wright_w(lambda: f64, mu: f64, z: f64) -> Result<f64> {
    wright_w_with(lambda, mu, z, SeriesControl::default())
}

pub fn wright_w_with(lambda: f64, mu: f64, z: f64, ctl: SeriesControl) -> Result<f64> {
    if !(lambda > -1.0) || !lambda.is_finite() || !mu.is_finite() || !z.is_finite() {
        return Err(Error::domain(format!(
            "Wright function needs lambda > -1 and finite arguments (lambda={lambda}, mu={mu}, z={z})"
        )));
    }
    if z == 0.0 {
        return Ok(super::gamma::rgamma(mu));
    }
    let lz = z.abs().ln();
    let neg = z < 0.0;
    let (sum, _) = envelope_series(
        |k| {
            let kf = k as f64;
            let (lf, _) = ln_gamma(kf + 1.0).expect("positive");
            let (env, f) = rgamma_envelope(lambda * kf + mu);
            let sign = if neg && k % 2 == 1 { -1.0 } else { 1.0 };
            (kf * lz - lf + env, sign * f)
        },
        ctl,
        "wright_w series",
    )?;
    Ok(sum)
}

/// M-Wright function `M_nu(z) = W_{-nu,1-nu}(-z)` for `0 < nu < 1`, `z >= 0`.
///
/// Small arguments use the series. Once `z^(1/(1-nu))` exceeds 3 the alternating series
/// loses digits, so the routine switches to the positive integral
/// `z^(nu/(1-nu)) / (pi (1-nu)) int_0^pi A(u) exp(-z^(1/(1-nu)) A(u)) du` with
/// `A(u) = sin(nu u)^(nu/(1-nu)) sin((1-nu) u) / sin(u)^(1/(1-nu))`.
pub fn m_wright(nu: f64, z: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("M-Wright function needs 0 < nu < 1 and z >= 0 (nu={nu}, z={z})")));
    }
    let p = 1.0 / (1.0 - nu);
    let zp = z.powf(p);
    if zp <= 3.0 {
        return wright_w(-nu, 1.0 - nu, -z);
    }
    let ln_a = |u: f64| -> f64 {
        let v = u / std::f64::consts::PI;
        nu * p * sin_pi(nu * v).ln() + sin_pi((1.0 - nu) * v).ln() - p * sin_pi(v).ln()
    };
    let a0 = nu.powf(nu * p) * (1.0 - nu);
    let q = integrate(
        |u| {
            if u <= 0.0 {
                return a0 * (-zp * a0).exp();
            }
            if u >= std::f64::consts::PI {
                return 0.0;
            }
            let a = ln_a(u).exp();
            let e = -zp * a;
            if e < -745.0 { 0.0 } else { a * e.exp() }
        },
        0.0,
        std::f64::consts::PI,
        Tolerance::new(0.0, 1e-13),
    )
    .check("m_wright integral")?;
    Ok(z.powf(nu * p) * q / (std::f64::consts::PI * (1.0 - nu)))
}
