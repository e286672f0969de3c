//! Samplers against closed-form distribution functions, the analytic densities, and each other.

use fracdiff::laws::{best_method, f_nu_beta, h_density, l_density, MuVector};
use fracdiff::montecarlo::*;
use fracdiff::solvers::{g_nu_beta_density, GRoute};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Gamma};
use statrs::function::erf::{erf, erfc};

const N: usize = 100_000;

fn spec(stream: u64) -> RngSpec {
    RngSpec::new(0, stream)
}

fn levy_cdf(t: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| if x > 0.0 { erfc(t / (2.0 * x.sqrt())) } else { 0.0 }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn gamma_and_reciprocal_gamma() {
    let xs = spec(1).draw(N, |r| sample_g(2.0, 1.0, r)).unwrap();
    assert!((mean(&xs) - 2.0).abs() <= 0.02);
    // E X^(1/2) = Gamma(2.5) / Gamma(2)
    let m = xs.iter().map(|x| x.sqrt()).sum::<f64>() / N as f64;
    let want = 1.329_340_388_179_137;
    assert!((m - want).abs() <= 0.01 * want);
    let law = Gamma::new(2.0, 1.0).unwrap();
    assert!(ks_distance(&xs, |x| law.cdf(x)).unwrap() <= 0.005);

    let es = spec(2).draw(N, |r| sample_e(0.5, 1.0, r)).unwrap();
    let half = Gamma::new(0.5, 1.0).unwrap();
    let e_cdf = |x: f64| if x > 0.0 { half.sf(1.0 / x) } else { 0.0 };
    assert!(ks_distance(&es, e_cdf).unwrap() <= 0.005);
    // E(ct) has the law of c E(t)
    let c = 3.0;
    let scaled = spec(3).draw(N, |r| sample_e(0.5, c, r)).unwrap();
    let base: Vec<f64> = spec(4).draw(N, |r| sample_e(0.5, 1.0, r)).unwrap().into_iter().map(|x| c * x).collect();
    assert!(ks_two_sample(&scaled, &base).unwrap() <= 0.01);
    // upper tail at the analytic 90th percentile
    let q = 1.0 / half.inverse_cdf(0.1);
    let frac = es.iter().filter(|&&x| x > q).count() as f64 / N as f64;
    assert!((frac - 0.1).abs() <= 0.01, "{frac}");
}

#[test]
fn stable_subordinator() {
    let xs = spec(10).draw(1_000_000, |r| sample_subordinator(0.5, 1.0, r)).unwrap();
    let lap = xs.iter().map(|x| (-x).exp()).sum::<f64>() / xs.len() as f64;
    assert!((lap - (-1.0f64).exp()).abs() <= 0.003, "{lap}");
    assert!(ks_distance(&xs, levy_cdf(1.0)).unwrap() <= 0.003);
    let t = 2.0;
    // two samples of 1e6: the 99% two-sample quantile is 0.0023
    let at_t = spec(11).draw(xs.len(), |r| sample_subordinator(0.5, t, r)).unwrap();
    let scaled: Vec<f64> = xs.iter().map(|x| t * t * x).collect();
    assert!(ks_two_sample(&at_t, &scaled).unwrap() <= 0.005);
}

#[test]
fn inverse_subordinator() {
    let xs = spec(20).draw(N, |r| sample_inverse(0.5, 1.0, r)).unwrap();
    // t^nu / Gamma(1 + nu)
    assert!((mean(&xs) - std::f64::consts::FRAC_2_SQRT_PI).abs() <= 0.01);
    assert!(ks_distance(&xs, |x| if x > 0.0 { erf(x / 2.0) } else { 0.0 }).unwrap() <= 0.005);
    let at_t = spec(21).draw(N, |r| sample_inverse(0.5, 4.0, r)).unwrap();
    let scaled: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
    assert!(ks_two_sample(&at_t, &scaled).unwrap() <= 0.005);
}

#[test]
fn chains_match_the_stable_laws() {
    let t = 1.0;
    let single = CompositionChain::new(ChainKind::Subordinator, MuVector::new(2, vec![1]).unwrap(), t).unwrap();
    let a = spec(30).draw(N, |r| sample_chain(&single, r)).unwrap();
    let b = spec(31).draw(N, |r| sample_subordinator(0.5, t, r)).unwrap();
    assert!(ks_two_sample(&a, &b).unwrap() <= 0.005);

    let fwd = CompositionChain::new(ChainKind::Subordinator, MuVector::new(3, vec![1, 2]).unwrap(), t).unwrap();
    let rev = CompositionChain::new(ChainKind::Subordinator, MuVector::new(3, vec![2, 1]).unwrap(), t).unwrap();
    let c = spec(32).draw(N, |r| sample_chain(&fwd, r)).unwrap();
    let d = spec(33).draw(N, |r| sample_chain(&rev, r)).unwrap();
    let k = spec(34).draw(N, |r| sample_subordinator(1.0 / 3.0, t, r)).unwrap();
    assert!(ks_two_sample(&c, &k).unwrap() <= 0.01);
    assert!(ks_two_sample(&c, &d).unwrap() <= 0.01);

    let inv = CompositionChain::new(ChainKind::Inverse, MuVector::new(3, vec![1, 2]).unwrap(), 1.5).unwrap();
    let e = spec(35).draw(N, |r| sample_chain(&inv, r)).unwrap();
    let l = spec(36).draw(N, |r| sample_inverse(1.0 / 3.0, 1.5, r)).unwrap();
    assert!(ks_two_sample(&e, &l).unwrap() <= 0.01);

    let bad = MuVector::new(3, vec![1, 1]).unwrap();
    assert!(matches!(CompositionChain::new(ChainKind::Inverse, bad, 1.0), Err(fracdiff::Error::Membership(_))));
}

#[test]
fn ks_statistic() {
    let law = Gamma::new(1.0, 1.0).unwrap();
    let xs = spec(40).draw(N, |r| sample_g(1.0, 1.0, r)).unwrap();
    assert!(ks_distance(&xs, |x| law.cdf(x)).unwrap() <= 0.006);
    let atom = vec![1.5; 200];
    assert_eq!(ks_distance(&atom, |x| if x >= 1.5 { 1.0 } else { 0.0 }).unwrap(), 0.0);
    // Exp(1) against the Exp(rate 2) distribution function: sup gap 1/4 at ln 2
    let rate2 = |x: f64| if x > 0.0 { 1.0 - (-2.0 * x).exp() } else { 0.0 };
    assert!(ks_distance(&xs, rate2).unwrap() >= 0.2);
    assert!(ks_distance(&[], rate2).is_err());
    assert_eq!(ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
}

#[test]
fn analytic_densities_against_samples() {
    let third = 1.0 / 3.0;
    let m = best_method(third);
    type Density = Box<dyn Fn(f64) -> fracdiff::Result<f64>>;
    let cases: Vec<(&str, Density, Vec<f64>)> = vec![
        (
            "h_1/3",
            Box::new(move |x| h_density(third, x, 1.0, m)),
            spec(50).draw(N, |r| sample_subordinator(third, 1.0, r)).unwrap(),
        ),
        (
            "l_1/3",
            Box::new(move |x| l_density(third, x, 1.0, m)),
            spec(51).draw(N, |r| sample_inverse(third, 1.0, r)).unwrap(),
        ),
        (
            "f_1/2,1/2",
            Box::new(|x| f_nu_beta(0.5, 0.5, x, 1.0)),
            spec(52).draw(N, |r| sample_clock(0.5, 0.5, 1.0, r)).unwrap(),
        ),
        (
            "g_1/2,1",
            Box::new(|x| g_nu_beta_density(2.0, 0.5, 1.0, x, 1.0, GRoute::MellinInversion)),
            spec(53).draw(N, |r| sample_time_changed_gamma(2.0, 0.5, 1.0, 1.0, r)).unwrap(),
        ),
    ];
    for (name, density, xs) in cases {
        let cdf = TabulatedCdf::from_density(density, 1e-8, 1e8, 800).unwrap();
        let d = ks_distance(&xs, |x| cdf.eval(x)).unwrap();
        assert!(d <= 0.01, "{name}: KS {d}, mass {}", cdf.mass());
    }
}

#[test]
fn equalities_in_law() {
    // reciprocal-gamma and gamma times commute
    let a = spec(60).draw(N, |r| {
        let s = sample_g(1.5, 1.0, r)?;
        sample_e(0.7, s, r)
    })
    .unwrap();
    let b = spec(61).draw(N, |r| {
        let s = sample_e(0.7, 1.0, r)?;
        sample_g(1.5, s, r)
    })
    .unwrap();
    assert!(ks_two_sample(&a, &b).unwrap() <= 0.01);
    // equal indices: the clock is t times a ratio of two unit subordinator draws
    let t = 2.0;
    let c = spec(62).draw(N, |r| sample_clock(0.4, 0.4, t, r)).unwrap();
    let d = spec(63).draw(N, |r| Ok(t * sample_subordinator(0.4, 1.0, r)? / sample_subordinator(0.4, 1.0, r)?)).unwrap();
    assert!(ks_two_sample(&c, &d).unwrap() <= 0.01);
}

#[test]
fn moment_scaling() {
    let times = [0.5, 1.0, 2.0, 4.0];
    for &(nu, beta, r) in &[(1.0, 1.0, 1.0), (0.5, 1.0, 0.25), (1.0, 0.5, 1.0)] {
        let fit = moment_scaling_check(1.0, nu, beta, r, &times, N, spec(70)).unwrap();
        assert!((fit.slope - fit.expected).abs() <= 0.05, "({nu},{beta},{r}): {fit:?}");
    }
    let err = moment_scaling_check(1.0, 0.5, 1.0, 1.0, &times, N, spec(71)).unwrap_err();
    assert!(matches!(err, fracdiff::Error::InfiniteMoment(_)), "{err:?}");
}

#[test]
fn streams_are_reproducible() {
    let f = |r: &mut rand_chacha::ChaCha8Rng| sample_clock(0.5, 0.7, 1.0, r);
    let a = spec(80).draw(20_000, f).unwrap();
    let b = spec(80).draw(20_000, f).unwrap();
    let c = spec(81).draw(20_000, f).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    // the prefix of a longer draw is the shorter draw
    let long = spec(80).draw(30_000, f).unwrap();
    assert_eq!(&long[..20_000], &a[..]);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| spec(80).draw(20_000, f).unwrap());
    assert_eq!(serial, a);
}

#[test]
fn tabulated_cdf_mass() {
    let cdf = TabulatedCdf::from_density(|x| l_density(0.5, x, 1.0, fracdiff::laws::Method::Closed), 1e-6, 50.0, 200).unwrap();
    assert!((cdf.mass() - 1.0).abs() < 1e-9);
    assert!((cdf.eval(2.0) - erf(1.0)).abs() < 1e-3);
    assert!(TabulatedCdf::from_density(|_| Ok(1.0), 2.0, 1.0, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn samples_are_positive(nu in 0.05f64..1.0, beta in 0.05f64..1.0, t in 0.01f64..10.0, seed in 0u64..1000) {
        let mut rng = RngSpec::new(seed, 0).rng();
        for _ in 0..50 {
            let v = sample_clock(nu, beta, t, &mut rng).unwrap();
            prop_assert!(v >= 0.0 && v.is_finite());
        }
    }

    #[test]
    fn ks_is_a_distance(seed in 0u64..1000) {
        let xs = RngSpec::new(seed, 1).draw(500, |r| sample_g(1.0, 1.0, r)).unwrap();
        let d = ks_distance(&xs, |x| 1.0 - (-x).exp()).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}
