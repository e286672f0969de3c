//! Mellin transforms, Mellin convolutions and H-function evaluation against closed forms.

use fracdiff::laws::{gg_density, gg_mellin, h_fox, l_fox, GGLaw};
use fracdiff::mellin::*;
use fracdiff::specfun::quad::{integrate, Tolerance};
use fracdiff::specfun::{bessel_k, gamma_fn};
use proptest::prelude::*;

const TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 2000 };

fn gg(gamma: f64, mu: f64) -> impl Fn(f64) -> fracdiff::Result<f64> {
    let law = GGLaw::new(gamma, mu).unwrap();
    move |x| gg_density(law, x, 1.0, false)
}

#[test]
fn numeric_transform_of_gamma_densities() {
    let v = mellin_numeric(gg(1.0, 1.0), 2.0, None, TOL).unwrap();
    assert!((v - 1.0).abs() < 1e-9);
    let v = mellin_numeric(gg(-2.0, 0.7), 1.0, None, TOL).unwrap();
    assert!((v - 1.0).abs() < 1e-9);
    let v = mellin_numeric(gg(1.0, 2.0), 1.75, None, TOL).unwrap();
    assert!((v - 1.608_359_421_985_545_7).abs() < 1e-9, "{v}");
    let strip = GGLaw::new(1.0, 2.0).unwrap().mellin_strip();
    assert!(mellin_numeric(gg(1.0, 2.0), -1.5, Some(strip), TOL).is_err());
}

#[test]
fn convolution_closed_forms() {
    // exponential times inverse exponential: density 1/(1+x)^2
    let v = mellin_convolve(gg(1.0, 1.0), gg(-1.0, 1.0), 1.0, TOL).unwrap();
    assert!((v - 0.25).abs() < 1e-10, "{v}");
    for &x in &[0.1, 3.0] {
        let v = mellin_convolve(gg(1.0, 1.0), gg(-1.0, 1.0), x, TOL).unwrap();
        assert!((v - 1.0 / ((1.0 + x) * (1.0 + x))).abs() < 1e-10);
    }
    // two half-gamma laws: (2/pi) K_0(2)
    let v = mellin_convolve(gg(1.0, 0.5), gg(1.0, 0.5), 1.0, TOL).unwrap();
    assert!((v - 0.072_507_091_343_870_25).abs() < 1e-9, "{v}");
    assert!((2.0 / std::f64::consts::PI * bessel_k(0.0, 2.0).unwrap() - 0.072_507_091_343_870_25).abs() < 2e-10);
}

#[test]
fn convolution_against_narrow_unit_mass() {
    // a sharply peaked law at 1 (gamma with large index, rescaled) nearly reproduces f1
    let mu = 1.0e4;
    let narrow = GGLaw::new(1.0, mu).unwrap();
    let peak = move |s: f64| gg_density(narrow, s, 1.0 / mu, false);
    for &x in &[0.5, 1.0, 2.0] {
        let v = mellin_convolve(gg(1.0, 2.0), peak, x, TOL).unwrap();
        let f1 = gg(1.0, 2.0)(x).unwrap();
        assert!((v - f1).abs() < 1e-4, "x={x}: {v} vs {f1}");
    }
}

#[test]
fn convolution_transform_factorises() {
    for &(g1, m1, g2, m2) in &[(1.0, 1.5, -1.0, 2.0), (2.0, 0.5, 1.0, 1.0), (1.0, 0.5, 1.0, 0.5)] {
        for &eta in &[0.8, 1.3] {
            let lhs = mellin_numeric(
                |x| mellin_convolve(gg(g1, m1), gg(g2, m2), x, TOL),
                eta,
                None,
                Tolerance::new(1e-10, 1e-9),
            )
            .unwrap();
            let rhs = gg_mellin(GGLaw::new(g1, m1).unwrap(), 1.0, eta, false).unwrap()
                * gg_mellin(GGLaw::new(g2, m2).unwrap(), 1.0, eta, false).unwrap();
            assert!((lhs - rhs).abs() < 1e-6, "({g1},{m1})*({g2},{m2}) eta={eta}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn tail_integral_rule() {
    // M[int_x^inf f](eta) = M[f](eta + 1) / eta
    for &mu in &[0.5, 2.0] {
        let f = gg(1.0, mu);
        // log scale keeps the x^(mu-1) singularity at the origin harmless
        let tail = |x: f64| -> fracdiff::Result<f64> {
            integrate(
                |u: f64| {
                    let s = u.exp();
                    if s.is_finite() { s * f(s).unwrap() } else { 0.0 }
                },
                x.ln(),
                f64::INFINITY,
                TOL,
            )
            .check("tail")
        };
        for &eta in &[0.5, 1.5] {
            let lhs = mellin_numeric(tail, eta, None, Tolerance::new(1e-10, 1e-9)).unwrap();
            let rhs = gg_mellin(GGLaw::new(1.0, mu).unwrap(), 1.0, eta + 1.0, false).unwrap() / eta;
            assert!((lhs - rhs).abs() < 1e-7, "mu={mu} eta={eta}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn scaling_and_power_rules() {
    let f = gg(2.0, 1.5);
    for &eta in &[0.6, 1.0, 2.2] {
        let base = mellin_numeric(&f, eta, None, TOL).unwrap();
        let a = 2.5f64;
        let scaled = mellin_numeric(|x| f(a * x), eta, None, TOL).unwrap();
        assert!((scaled - a.powf(-eta) * base).abs() < 1e-8);
        let c = 0.7;
        let weighted = mellin_numeric(|x: f64| Ok(x.powf(c) * f(x)?), eta, None, TOL).unwrap();
        let moved = mellin_numeric(&f, eta + c, None, TOL).unwrap();
        assert!((weighted - moved).abs() < 1e-8);
    }
}

#[test]
fn kernel_values() {
    let l = l_fox(0.5).unwrap();
    let h = h_fox(0.5).unwrap();
    assert!((fox_h_mellin(&l, 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((fox_h_mellin(&l, 0.5).unwrap() - 1.446_409_084_632_077_1).abs() < 1e-14);
    assert!((fox_h_mellin(&h, 0.5).unwrap() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
    // removable point: Gamma((1-eta)/nu) / (nu Gamma(1-eta)) tends to 1 at eta = 1
    assert!((fox_h_mellin(&h, 1.0).unwrap() - 1.0).abs() < 1e-9);
    assert!(fox_h_mellin(&h, 1.5).is_err());
    let exp = FoxH::new(1, 0, vec![], vec![(0.0, 1.0)], None).unwrap();
    assert!(matches!(fox_h_mellin(&exp, -1.0), Err(fracdiff::Error::Domain(_))));
}

#[test]
fn contour_evaluation() {
    let v = fox_h_eval(&l_fox(0.5).unwrap(), 1.0).unwrap();
    assert!((v - 0.439_391_289_467_722_4).abs() < 1e-10, "{v}");
    let v = fox_h_eval(&h_fox(0.5).unwrap(), 1.0).unwrap();
    assert!((v - 0.219_695_644_733_861_2).abs() < 1e-10, "{v}");
    let exp = FoxH::new(1, 0, vec![], vec![(0.0, 1.0)], None).unwrap();
    for &x in &[0.01, 0.5, 3.0, 20.0] {
        let v = fox_h_eval(&exp, x).unwrap();
        assert!((v - (-x).exp()).abs() < 1e-10, "x={x}");
    }
}

#[test]
fn shift_property() {
    // H(x) = x^{-c} H_c(x)
    for h in [l_fox(0.5).unwrap(), h_fox(1.0 / 3.0).unwrap()] {
        let s = h.shifted(1.0).unwrap();
        for &x in &[0.3, 1.0, 2.5] {
            let a = fox_h_eval(&h, x).unwrap();
            let b = fox_h_eval(&s, x).unwrap() / x;
            assert!((a - b).abs() < 1e-8, "x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn contour_and_kernel_round_trip() {
    for nu in [0.5, 1.0 / 3.0] {
        let l = l_fox(nu).unwrap();
        for &eta in &[0.5, 1.5, 2.5] {
            let num = mellin_numeric(|x| fox_h_eval(&l, x), eta, None, Tolerance::new(1e-10, 1e-9)).unwrap();
            let exact = fox_h_mellin(&l, eta).unwrap();
            assert!((num - exact).abs() < 1e-6, "l nu={nu} eta={eta}: {num} vs {exact}");
        }
        let h = h_fox(nu).unwrap();
        for &eta in &[0.2, 0.7, 1.0 + 0.5 * nu] {
            let num = mellin_numeric(|x| fox_h_eval(&h, x), eta, None, Tolerance::new(1e-10, 1e-9)).unwrap();
            let exact = fox_h_mellin(&h, eta).unwrap();
            assert!((num - exact).abs() < 1e-6, "h nu={nu} eta={eta}: {num} vs {exact}");
        }
    }
}

#[test]
fn json_round_trip() {
    let h = h_fox(0.25).unwrap();
    let text = serde_json::to_string(&h).unwrap();
    let back: FoxH = serde_json::from_str(&text).unwrap();
    assert_eq!(back, h);
    let bad = r#"{"m":1,"n":0,"p":0,"q":1,"upper":[],"lower":[[0.0,1.0]],"strip":[-1.0,null]}"#;
    assert!(serde_json::from_str::<FoxH>(bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gamma_kernel_matches_gamma_ratio(mu in 0.9f64..4.0, eta in 0.2f64..3.0) {
        // g^1_mu(x, 1) is x^{mu-1} e^{-x} / Gamma(mu) = H^{1,0}_{0,1}[x | (mu-1, 1)] / Gamma(mu)
        let h = FoxH::new(1, 0, vec![], vec![(mu - 1.0, 1.0)], None).unwrap();
        let exact = gamma_fn(eta + mu - 1.0).unwrap();
        prop_assert!(((fox_h_mellin(&h, eta).unwrap() - exact) / exact).abs() < 1e-12);
    }
}
