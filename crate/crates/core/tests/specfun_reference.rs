//! Special functions against reference values computed independently with mpmath at
//! 40 significant digits (direct high-precision series or closed forms), plus
//! property-based identities.

use fracdiff::specfun::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn gamma_reference_values() {
    let cases = [
        (1.75, 0.919_062_526_848_883_233_85),
        (0.1, 9.513_507_698_668_731_836_3),
        (7.3, 1_271.423_633_663_909_273_1),
        (33.3, 7.487_577_596_522_706_608e35),
        (49.9, 4.118_011_034_253_058_041_9e62),
        (-0.5, -3.544_907_701_811_032_054_6),
        (-2.7, -0.931_082_784_838_963_780_99),
        (-20.3, -6.435_466_204_989_351_202_5e-19),
        (-49.5, 7.322_269_689_234_127_035_2e-64),
    ];
    for (x, want) in cases {
        let got = gamma_fn(x).unwrap();
        assert!(rel(got, want) <= 1e-13, "Gamma({x}) = {got}, want {want}");
    }
}

#[test]
fn gamma_poles_are_errors() {
    for x in [0.0, -1.0, -7.0] {
        assert!(gamma_fn(x).is_err());
    }
}

#[test]
fn mittag_leffler_reference_values() {
    let cases = [
        (0.5, 1.0, -1.0, 0.427_583_576_155_807_004_41),
        (0.5, 1.0, -5.0, 0.110_704_637_733_068_626_37),
        (0.5, 0.5, -2.0, 0.053_398_230_926_744_799_218),
        (1.0 / 3.0, 1.0, -2.0, 0.284_813_938_386_565_531_3),
        (0.75, 1.0, -10.0, 0.030_643_250_976_059_637_773),
        (0.5, 1.0, -100.0, 0.005_641_613_782_989_432_903_6),
        (0.9, 1.0, -20.0, 0.005_749_507_816_109_112_583_6),
        (0.9, 0.9, -7.0, 0.003_751_442_312_425_129_111_5),
        (0.25, 1.0, -3.0, 0.219_004_427_560_406_799_25),
        (0.5, 1.0, 2.0, 108.940_904_389_977_972_41),
    ];
    for (a, b, z, want) in cases {
        let got = mittag_leffler(a, b, z).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "E_({a},{b})({z}) = {got}, want {want}");
    }
}

#[test]
fn wright_reference_values() {
    let cases = [
        (-0.5, 0.5, -1.0, 0.439_391_289_467_722_397_05),
        (-1.0 / 3.0, 2.0 / 3.0, -1.5, 0.268_389_128_079_981_139_23),
        (-0.25, 0.75, -2.0, 0.161_251_083_454_585_855_91),
        (0.5, 1.0, 1.3, 3.657_388_473_101_932_962_5),
    ];
    for (l, m, z, want) in cases {
        let got = wright_w(l, m, z).unwrap();
        assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0), "W_({l},{m})({z}) = {got}, want {want}");
    }
}

#[test]
fn bessel_j_reference_values() {
    let cases = [
        (0.0, 0.5, 0.938_469_807_240_812_904_23),
        (0.0, 10.0, -0.245_935_764_451_348_335_2),
        (0.0, 25.5, 0.144_062_157_546_847_861_73),
        (1.0, 40.0, 0.126_038_318_037_584_999_21),
        (0.3, 12.0, -0.058_942_057_108_976_807_179),
        (-0.6, 9.0, -0.256_997_002_073_352_529_85),
        (2.5, 100.0, 0.038_325_919_332_375_405_594),
        (0.0, 150.0, -0.000_774_090_375_394_291_246_95),
    ];
    for (nu, x, want) in cases {
        let got = bessel_j(nu, x).unwrap();
        assert!((got - want).abs() <= 1e-12, "J_{nu}({x}) = {got}, want {want}");
    }
}

#[test]
fn bessel_k_and_i_reference_values() {
    let k_cases = [
        (0.5, 1.0, 0.461_068_504_447_894_558_44, 1e-13),
        (0.0, 2.0, 0.113_893_872_749_533_435_65, 5e-9),
        (0.0, 0.1, 2.427_069_024_702_016_612_5, 5e-9),
        (1.0, 0.5, 1.656_441_120_003_300_893_7, 5e-9),
        (1.0 / 3.0, 0.7, 0.696_530_060_504_096_862_2, 1e-13),
        (2.0, 3.0, 0.061_510_458_471_742_037_657, 1e-13),
        (0.2, 30.0, 2.133_876_720_547_502_804_6e-14, 1e-13),
        (3.0, 1.5, 1.833_803_702_474_579_349, 5e-9),
    ];
    for (nu, x, want, tol) in k_cases {
        let got = bessel_k(nu, x).unwrap();
        assert!(rel(got, want) <= tol, "K_{nu}({x}) = {got}, want {want}");
        assert_eq!(got, bessel_k(-nu, x).unwrap());
    }
    let i_cases = [
        (0.5, 1.0, 0.937_674_888_245_487_646_72),
        (-0.3, 2.0, 2.237_401_233_598_894_143_4),
        (2.0, 15.0, 295_899.383_701_886_359_96),
    ];
    for (nu, x, want) in i_cases {
        let got = bessel_i(nu, x).unwrap();
        assert!(rel(got, want) <= 1e-13, "I_{nu}({x}) = {got}, want {want}");
    }
}

#[test]
fn bessel_zero_reference_values() {
    let z = bessel_j_zeros(0.0, 50).unwrap();
    assert!((z[0] - 2.404_825_557_695_772_77).abs() < 1e-12);
    assert!((z[1] - 5.520_078_110_286_310_65).abs() < 1e-12);
    assert!((z[2] - 8.653_727_912_911_012_22).abs() < 1e-12);
    assert!((z[49] - 156.295_034_268_533_524).abs() < 1e-10);
    // J_{1/2} and J_{-1/2} are elementary: zeros at k pi and (k - 1/2) pi
    let z = bessel_j_zeros(0.5, 5).unwrap();
    let zm = bessel_j_zeros(-0.5, 5).unwrap();
    for k in 0..5 {
        let pi = std::f64::consts::PI;
        assert!((z[k] - (k as f64 + 1.0) * pi).abs() < 1e-12);
        assert!((zm[k] - (k as f64 + 0.5) * pi).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-13);
    }

    #[test]
    fn mittag_leffler_is_monotone_on_negative_axis(a in 0.1f64..1.0, x in 0.0f64..80.0, dx in 0.01f64..5.0) {
        let e1 = mittag_leffler(a, 1.0, -x).unwrap();
        let e2 = mittag_leffler(a, 1.0, -(x + dx)).unwrap();
        prop_assert!(e1 > 0.0 && e1 <= 1.0 + 1e-14);
        prop_assert!(e2 <= e1 + 1e-13, "E({}) = {} < E({}) = {}", -x, e1, -(x + dx), e2);
    }

    #[test]
    fn modified_bessel_wronskian(nu in 0.0f64..3.0, x in 0.1f64..20.0) {
        // I_v K_{v+1} + I_{v+1} K_v = 1/x
        let w = bessel_i(nu, x).unwrap() * bessel_k(nu + 1.0, x).unwrap()
            + bessel_i(nu + 1.0, x).unwrap() * bessel_k(nu, x).unwrap();
        prop_assert!((w * x - 1.0).abs() <= 1e-8, "Wronskian defect {}", w * x - 1.0);
    }

    #[test]
    fn bessel_j_three_term_recurrence(nu in 0.0f64..5.0, x in 0.5f64..120.0) {
        let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "defect {}", lhs - rhs);
    }

    #[test]
    fn bessel_zeros_are_roots(nu in -0.9f64..3.0) {
        let zs = bessel_j_zeros(nu, 6).unwrap();
        for w in zs.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        for z in zs {
            prop_assert!(bessel_j(nu, z).unwrap().abs() <= 1e-10);
        }
    }
}
