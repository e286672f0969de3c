//! Densities of the laws module against closed forms and mpmath reference values
//! (30 digits; products of gammas via Meijer G, index 1/3 via the Bessel-K form).

use fracdiff::laws::*;
use fracdiff::specfun::quad::{integrate_fallible, Tolerance};
use fracdiff::specfun::{bessel_k, mittag_leffler};
use proptest::prelude::*;
use std::f64::consts::PI;

const ROUTES: [Method; 3] = [Method::Conv, Method::Foxh, Method::Wright];

/// `int_0^inf f(x) dx` on the log scale; points where `x` under- or overflows contribute nothing.
fn log_integral<F: Fn(f64) -> fracdiff::Result<f64>>(f: F, centre: f64) -> f64 {
    integrate_fallible(
        |u: f64| {
            let x = u.exp();
            if x == 0.0 || !x.is_finite() {
                return Ok(0.0);
            }
            Ok(x * f(x)?)
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &[centre],
        Tolerance::new(1e-14, 1e-11),
    )
    .unwrap()
    .value
}

#[test]
fn generalized_gamma_examples() {
    let exp = GGLaw::new(1.0, 1.0).unwrap();
    assert!((gg_density(exp, 1.0, 1.0, false).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    let inv = GGLaw::new(-1.0, 0.5).unwrap();
    assert!((gg_density(inv, 1.0, 1.0, false).unwrap() - 0.207_553_748_710_297_35).abs() < 1e-14);
    let half = GGLaw::new(2.0, 0.5).unwrap();
    // tilde law at t = 4 uses scale 2
    let v = gg_density(half, 1.0, 4.0, true).unwrap();
    assert!((v - 0.439_391_289_467_722_4).abs() < 1e-14, "{v}");
    let m = gg_mellin(GGLaw::new(1.0, 2.0).unwrap(), 1.0, 1.75, false).unwrap();
    assert!((m - 1.608_359_421_985_545_7).abs() < 1e-13, "{m}");
}

#[test]
fn generalized_gamma_normalisation() {
    for &(g, mu) in &[(1.0, 0.5), (2.0, 1.5), (-1.0, 2.0), (-2.0, 0.7), (3.0, 1.0 / 3.0)] {
        let law = GGLaw::new(g, mu).unwrap();
        for &t in &[0.5f64, 2.0] {
            for tilde in [false, true] {
                let total = log_integral(|x| gg_density(law, x, t, tilde), t.ln());
                assert!((total - 1.0).abs() < 1e-10, "g={g} mu={mu} t={t} tilde={tilde}: {total}");
            }
        }
    }
}

#[test]
fn half_index_routes_agree_with_closed_forms() {
    for &t in &[0.3, 1.0, 2.5] {
        for &x in &[0.05, 0.4, 1.0, 3.0] {
            let h = h_density(0.5, x, t, Method::Closed).unwrap();
            let l = l_density(0.5, x, t, Method::Closed).unwrap();
            for m in ROUTES {
                let hm = h_density(0.5, x, t, m).unwrap();
                let lm = l_density(0.5, x, t, m).unwrap();
                assert!((hm - h).abs() < 1e-8, "h {m:?} x={x} t={t}: {hm} vs {h}");
                assert!((lm - l).abs() < 1e-8, "l {m:?} x={x} t={t}: {lm} vs {l}");
            }
        }
    }
    assert!((h_density(0.5, 1.0, 1.0, Method::Closed).unwrap() - 0.219_695_644_733_861_2).abs() < 1e-15);
}

fn h_third(x: f64) -> f64 {
    1.0 / (3.0 * PI) * x.powf(-1.5) * bessel_k(1.0 / 3.0, 2.0 / (27f64.sqrt() * x.sqrt())).unwrap()
}

#[test]
fn third_index_reference_values() {
    let refs = [
        (0.05, 1.569_286_500_825_573_4, 0.719_829_066_517_068_1),
        (0.3, 0.447_752_402_205_358_94, 0.627_527_517_489_592_8),
        (1.0, 0.132_079_826_568_834_2, 0.396_239_479_706_502_6),
        (4.0, 0.026_877_482_634_247_088, 0.020_505_597_311_995_4),
    ];
    for (x, h, l) in refs {
        assert!((h_third(x) - h).abs() < 1e-8 * h);
        for m in ROUTES {
            let hm = h_density(1.0 / 3.0, x, 1.0, m).unwrap();
            let lm = l_density(1.0 / 3.0, x, 1.0, m).unwrap();
            assert!((hm - h).abs() < 1e-7, "h {m:?} x={x}: {hm} vs {h}");
            assert!((lm - l).abs() < 1e-7, "l {m:?} x={x}: {lm} vs {l}");
        }
    }
    for m in ROUTES {
        let v = l_density(1.0 / 3.0, 0.7, 2.0, m).unwrap();
        assert!((v - 0.426_341_287_256_769_65).abs() < 1e-7, "{m:?}: {v}");
        let v = h_density(1.0 / 3.0, 0.2, 0.5, m).unwrap();
        assert!((v - 0.626_404_798_955_845_3).abs() < 1e-7, "{m:?}: {v}");
    }
}

#[test]
fn other_indices_cross_routes() {
    // conv is available for 1/4 and 1/5; foxh and wright for any index
    for &nu in &[0.25, 0.2] {
        for &(x, t) in &[(0.3, 1.0), (1.2, 0.7), (2.0, 2.0)] {
            let c = l_density(nu, x, t, Method::Conv).unwrap();
            let f = l_density(nu, x, t, Method::Foxh).unwrap();
            let w = l_density(nu, x, t, Method::Wright).unwrap();
            assert!((c - f).abs() < 1e-7 && (c - w).abs() < 1e-7, "l nu={nu}: {c} {f} {w}");
            let c = h_density(nu, x, t, Method::Conv).unwrap();
            let f = h_density(nu, x, t, Method::Foxh).unwrap();
            assert!((c - f).abs() < 1e-7, "h nu={nu}: {c} {f}");
        }
    }
    for &nu in &[0.3, 0.7, 0.85] {
        let f = l_density(nu, 0.8, 1.3, Method::Foxh).unwrap();
        let w = l_density(nu, 0.8, 1.3, Method::Wright).unwrap();
        assert!((f - w).abs() < 1e-7, "nu={nu}: {f} vs {w}");
    }
}

#[test]
fn laplace_transform_in_space() {
    for &nu in &[0.5, 1.0 / 3.0] {
        for &lambda in &[0.5, 1.0, 2.0] {
            for &t in &[0.5, 1.0, 2.0] {
                let q = log_integral(|x| Ok((-lambda * x).exp() * h_density(nu, x, t, best_method(nu))?), 0.0);
                let exact = (-t * lambda.powf(nu)).exp();
                assert!((q - exact).abs() < 1e-9, "nu={nu} lambda={lambda} t={t}: {q} vs {exact}");
            }
        }
    }
}

#[test]
fn laplace_transform_in_time() {
    for &nu in &[0.5, 1.0 / 3.0] {
        for &lambda in &[0.5, 1.0, 2.0] {
            for &t in &[0.5, 1.0, 2.0] {
                let q = log_integral(|x| Ok((-lambda * x).exp() * l_density(nu, x, t, best_method(nu))?), 0.0);
                let exact = mittag_leffler(nu, 1.0, -lambda * t.powf(nu)).unwrap();
                assert!((q - exact).abs() < 1e-9, "nu={nu} lambda={lambda} t={t}: {q} vs {exact}");
            }
        }
    }
}

#[test]
fn subordinator_mellin_transforms() {
    // mean of l_{1/2}(., 1) is 2/sqrt(pi)
    assert!((l_mellin(0.5, 1.0, 2.0).unwrap() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12);
    assert!((l_mellin(0.5, 1.0, 0.5).unwrap() - 1.446_409_084_632_077_1).abs() < 1e-10);
    assert!((h_mellin(0.5, 1.0, 0.5).unwrap() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-10);
    assert!((h_mellin(0.3, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-9);
    assert!(h_mellin(0.5, 1.0, 1.5).is_err());
    assert!(l_mellin(0.5, 1.0, 0.0).is_err());
}

#[test]
fn duality_between_subordinator_and_inverse() {
    // x h(x, t) = nu t l(t, x)
    for &nu in &[0.5, 1.0 / 3.0, 0.25] {
        for &(x, t) in &[(0.4, 1.0), (1.5, 0.6), (2.0, 3.0)] {
            let lhs = x * h_density(nu, x, t, Method::Foxh).unwrap() / nu;
            let rhs = t * l_density(nu, t, x, Method::Foxh).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "nu={nu} x={x} t={t}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn ratio_law() {
    assert!((ratio_density(0.5, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
    for &nu in &[0.3, 0.5, 0.8] {
        for &x in &[0.2, 1.7, 5.0] {
            // the ratio and its reciprocal share the law
            let a = x * x * ratio_density(nu, x).unwrap();
            let b = ratio_density(nu, 1.0 / x).unwrap();
            assert!((a - b).abs() < 1e-14 * b.max(1.0));
        }
        let total = log_integral(|x| ratio_density(nu, x), 0.0);
        assert!((total - 1.0).abs() < 1e-10, "nu={nu}: {total}");
    }
}

#[test]
fn mixed_law_reference_values() {
    let v = f_nu_beta(0.5, 0.5, 1.0, 1.0).unwrap();
    assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-9, "{v}");
    let v = f_nu_beta(0.5, 1.0 / 3.0, 1.0, 1.0).unwrap();
    assert!((v - 0.147_073_999_421_069_56).abs() < 1e-8, "{v}");
    let v = f_nu_beta(0.5, 1.0 / 3.0, 0.4, 2.0).unwrap();
    assert!((v - 0.313_220_033_283_051_5).abs() < 1e-8, "{v}");
    let v = f_nu_beta(0.5, 1.0, 0.7, 1.3).unwrap();
    assert!((v - h_density(0.5, 0.7, 1.3, Method::Closed).unwrap()).abs() < 1e-15);
}

#[test]
fn index_sets() {
    let p = index_set(IndexKind::P, 2, 3, 2).unwrap();
    let names: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    assert_eq!(names, ["1/3,2/3", "2/3,1/3"]);
    let p = index_set(IndexKind::P, 4, 5, 24).unwrap();
    assert!(p.iter().any(|v| v.to_string() == "1/5,2/5,3/5,4/5"));
    assert!(p.iter().any(|v| v.to_string() == "24/5,1/5,1/5,1/5"));
    assert!(p.iter().all(|v| v.in_product_set(5, 24)));
    let s = index_set(IndexKind::S, 3, 2, 4).unwrap();
    assert_eq!(s.len(), 3);
    assert!(s.iter().all(|v| v.in_sum_set(2, 4)));
    let v: MuVector = "1/3,2/3".parse().unwrap();
    assert!(v.in_product_set(3, 2) && !v.in_product_set(3, 3) && v.in_product_set(6, 8));
}

#[test]
fn products_of_gamma_variables() {
    let v = compose_density(1.0, &[0.5, 0.5], 1.0, 1.0).unwrap();
    // integer-order K is accurate to ~2e-9 relative
    assert!((v - 0.072_507_091_343_870_25).abs() < 2e-10, "{v}");
    let cases: [(&[f64], [f64; 4]); 4] = [
        (&[1.0 / 3.0, 0.5, 2.0], [10.362_320_451_609_611, 0.341_999_324_095_702_1, 0.065_813_960_191_456_75, 0.014_033_822_796_157_967]),
        (&[0.2, 0.4, 0.6, 0.8], [6.219_980_888_010_017, 0.062_086_053_541_634_79, 0.007_771_355_388_519_054, 0.001_256_415_423_345_572_5]),
        (&[4.8, 0.2, 0.2, 0.2], [3.610_724_450_351_592, 0.042_931_469_810_713_965, 0.006_437_090_607_006_489, 0.001_258_212_322_444_168_7]),
        (&[0.5, 1.5, 2.0, 0.25], [9.550_660_005_572_21, 0.268_486_973_689_238_44, 0.052_941_375_660_445_73, 0.012_444_412_812_737_737]),
    ];
    for (mu, refs) in cases {
        for (w, r) in [0.01, 0.3, 1.0, 2.5].into_iter().zip(refs) {
            let v = compose_density(1.0, mu, w, 1.0).unwrap();
            assert!(((v - r) / r).abs() < 1e-8, "mu={mu:?} w={w}: {v} vs {r}");
        }
    }
}

#[test]
fn product_law_mellin_factorises() {
    let mu = [1.0 / 3.0, 0.5, 2.0];
    for &(g, t, eta) in &[(1.0, 1.0f64, 1.5), (2.0, 0.7, 1.5), (-1.0, 1.3, 0.9), (3.0, 2.0, 1.2)] {
        let q = log_integral(|x| Ok(x.powf(eta - 1.0) * compose_density(g, &mu, x, t)?), t.ln());
        let exact = compose_mellin(g, &mu, t, eta).unwrap();
        assert!(((q - exact) / exact).abs() < 1e-8, "g={g} t={t} eta={eta}: {q} vs {exact}");
    }
}

#[test]
fn invariance_gap_rejects_mismatched_products() {
    let a: MuVector = "1/3,2/3".parse().unwrap();
    let b: MuVector = "1/3,1/3".parse().unwrap();
    assert!(matches!(compose_invariance_gap(&a, &b, &[(1.0, 1.0)]), Err(fracdiff::Error::Membership(_))));
    // a permutation leaves the law unchanged
    let c: MuVector = "2/3,1/3".parse().unwrap();
    assert!(compose_invariance_gap(&a, &c, &[(0.5, 1.0), (1.0, 2.0)]).unwrap() < 1e-15);
}

#[test]
fn additive_semigroup() {
    for &g in &[1.0, 2.0] {
        for &(m1, m2) in &[(0.5, 0.5), (1.0, 2.5), (0.3, 1.7)] {
            for &(x, t) in &[(0.5, 1.0), (2.0, 1.5)] {
                let r = additive_semigroup_residual(g, m1, m2, x, t).unwrap();
                assert!(r.abs() < 1e-9, "g={g} mu=({m1},{m2}) x={x} t={t}: {r}");
            }
        }
    }
}

#[test]
fn tabulation_csv() {
    let rows = tabulate(Tabulated::H { nu: 0.5 }, &[0.5, 1.0], &[1.0], None).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,value,method"));
    assert!(lines.next().unwrap().ends_with(",closed"));
    assert_eq!(lines.count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn products_commute(m1 in 0.2f64..3.0, m2 in 0.2f64..3.0, m3 in 0.2f64..3.0, x in 0.05f64..4.0) {
        let a = compose_density(1.0, &[m1, m2, m3], x, 1.0).unwrap();
        let b = compose_density(1.0, &[m3, m1, m2], x, 1.0).unwrap();
        prop_assert!((a - b).abs() < 1e-8 * a.max(1e-3));
    }

    #[test]
    fn inverse_subordinator_is_self_similar(nu in 0.2f64..0.8, x in 0.1f64..3.0, t in 0.2f64..3.0) {
        let lhs = l_density(nu, x, t, Method::Wright).unwrap();
        let rhs = t.powf(-nu) * l_density(nu, x * t.powf(-nu), 1.0, Method::Wright).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}
