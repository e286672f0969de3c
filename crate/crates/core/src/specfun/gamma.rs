//! Gamma and Beta functions on the real line, and the complex log-Gamma used by
//! the Mellin–Barnes contour integrals.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Returns true when `x` is a non-positive integer, i.e. a pole of the Gamma function.
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Gamma function on the real line. Fails at the poles `0, -1, -2, ...`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if is_gamma_pole(x) {
        return Err(Error::Pole { what: "Gamma".into(), at: x });
    }
    Ok(libm::tgamma(x))
}

/// `ln |Gamma(x)|` together with the sign of `Gamma(x)`.
pub fn ln_gamma(x: f64) -> Result<(f64, f64)> {
    if is_gamma_pole(x) {
        return Err(Error::Pole { what: "log-Gamma".into(), at: x });
    }
    let (v, s) = libm::lgamma_r(x);
    Ok((v, if s < 0 { -1.0 } else { 1.0 }))
}

/// `1 / Gamma(x)`, an entire function; returns exactly zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x > 0.0 && x < 170.0 || x < 0.0 && x > -170.0 {
        return 1.0 / libm::tgamma(x);
    }
    let (v, s) = libm::lgamma_r(x);
    let sign = if s < 0 { -1.0 } else { 1.0 };
    sign * (-v).exp()
}

/// `ln |1/Gamma(x)|` and its sign; the magnitude is `-inf` at the poles.
pub fn ln_rgamma(x: f64) -> (f64, f64) {
    if is_gamma_pole(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (v, s) = libm::lgamma_r(x);
    (-v, if s < 0 { -1.0 } else { 1.0 })
}

/// Euler Beta function `B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)` for `a, b > 0`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("beta needs positive arguments, got ({a}, {b})")));
    }
    let (la, _) = ln_gamma(a)?;
    let (lb, _) = ln_gamma(b)?;
    let (lab, _) = ln_gamma(a + b)?;
    Ok((la + lb - lab).exp())
}

/// `sin(pi x)` with exact argument reduction, so that it vanishes at integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = x - 2.0 * (0.5 * x).round(); // r in [-1, 1]
    let (r, sign) = if r < 0.0 { (-r, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (std::f64::consts::PI * r).sin()
}

/// `cos(pi x)` with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

const BERNOULLI_TERMS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

fn ln_gamma_stirling(w: Complex64) -> Complex64 {
    let half_ln_2pi = 0.918_938_533_204_672_8;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in BERNOULLI_TERMS {
        corr += c * p;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + half_ln_2pi + corr
}

/// Logarithm of `sin(pi z)` for complex `z`, valid modulo `2 pi i`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    if z.im.abs() < 1.0 {
        let s = Complex64::new(sin_pi(z.re) * (pi * z.im).cosh(), cos_pi(z.re) * (pi * z.im).sinh());
        return s.ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i), with |e^{2 i pi z}| = e^{-2 pi y} small
    let i = Complex64::i();
    let e2 = (2.0 * i * pi * z).exp();
    -i * pi * z + (1.0 - e2).ln() - Complex64::new(2.0f64.ln(), std::f64::consts::FRAC_PI_2) + i * pi
}

/// Complex log-Gamma, returned modulo `2 pi i` (only `exp` of sums of these values is
/// ever used). Fails at the poles of Gamma.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_gamma_pole(z.re) {
        return Err(Error::Pole { what: "complex Gamma".into(), at: z.re });
    }
    if z.re < 0.5 {
        let ln_pi = std::f64::consts::PI.ln();
        let refl = ln_gamma_complex(1.0 - z)?;
        return Ok(ln_pi - ln_sin_pi(z) - refl);
    }
    // shift up until |w| is large enough for the Stirling series
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 16.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(ln_gamma_stirling(w) - shift)
}

/// Complex Gamma function.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_complex(z)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_log_gamma_matches_real_gamma() {
        for &x in &[0.1, 0.5, 1.0, 1.75, 3.3, 10.5, 40.2, -0.3, -2.7, -10.25] {
            let g = gamma_complex(Complex64::new(x, 0.0)).unwrap();
            let r = gamma_fn(x).unwrap();
            assert!((g.re - r).abs() <= 1e-13 * r.abs(), "x={x}: {g} vs {r}");
            assert!(g.im.abs() <= 1e-13 * r.abs());
        }
    }

    #[test]
    fn complex_gamma_recurrence_and_reflection() {
        for &(a, b) in &[(0.3, 2.0), (-1.7, 5.0), (2.5, -40.0), (0.75, 120.0)] {
            let z = Complex64::new(a, b);
            let g0 = gamma_complex(z).unwrap();
            let g1 = gamma_complex(z + 1.0).unwrap();
            assert!((g1 - z * g0).norm() <= 1e-12 * g1.norm(), "recurrence at {z}");
        }
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
        for &y in &[0.5, 3.0, 20.0, 100.0] {
            let g = gamma_complex(Complex64::new(0.5, y)).unwrap();
            let exact = std::f64::consts::PI / (std::f64::consts::PI * y).cosh();
            assert!((g.norm_sqr() - exact).abs() <= 1e-11 * exact, "y={y}");
        }
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for k in -20..20 {
            assert_eq!(sin_pi(k as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((cos_pi(1.0) + 1.0).abs() < 1e-16);
    }

    #[test]
    fn reciprocal_gamma_vanishes_at_poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(200.5) * 0.0).abs() == 0.0);
        assert!(gamma_fn(-2.0).is_err());
    }
}
