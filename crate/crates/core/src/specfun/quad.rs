//! Numerical integration used throughout the crate.
//!
//! * [`integrate`] is a globally adaptive 21-point Gauss–Kronrod rule. Infinite
//!   endpoints are mapped onto a finite interval with `x = a + c (1 - s)/s`, `c = max(|a|, 1)`.
//! * [`tanh_sinh`] is the double-exponential rule. The integrand receives the exact
//!   distances to both endpoints, so weak endpoint singularities are resolved
//!   without cancellation.
//! * [`gauss_legendre`] returns fixed nodes for panel rules on smooth integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Upper bound on the number of subintervals (Gauss–Kronrod) or refinement levels (tanh-sinh).
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Quadrature {
    /// Returns the value, turning a non-converged or non-finite result into an error.
    pub fn check(self, routine: &str) -> Result<f64> {
        if !self.value.is_finite() {
            return Err(Error::nonconv(routine, "integrand produced a non-finite value"));
        }
        if !self.converged {
            return Err(Error::nonconv(
                routine,
                format!(
                    "quadrature error estimate {:.3e} after {} evaluations (value {:.6e})",
                    self.error, self.evaluations, self.value
                ),
            ));
        }
        Ok(self.value)
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Globally adaptive Gauss–Kronrod quadrature over the consecutive intervals given by
/// `points` (all finite, increasing).
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Quadrature {
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0usize;
    for w in points.windows(2) {
        let (v, e) = gk21(&mut f, w[0], w[1]);
        evals += 21;
        total += v;
        total_err += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    let mut converged = total_err <= tol.target(total);
    while !converged && heap.len() < tol.max_intervals {
        if !total.is_finite() {
            break;
        }
        let seg = heap.pop().expect("non-empty");
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) || (seg.b - seg.a).abs() <= 4.0 * f64::EPSILON * mid.abs() {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk21(&mut f, seg.a, mid);
        let (v2, e2) = gk21(&mut f, mid, seg.b);
        evals += 42;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // re-sum to keep running totals free of drift
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
        converged = total_err <= tol.target(total);
    }
    total = heap.iter().map(|s| s.value).sum();
    total_err = heap.iter().map(|s| s.error).sum();
    Quadrature {
        value: total,
        error: total_err,
        evaluations: evals,
        converged: converged && total.is_finite(),
    }
}

/// Integrates `f` over `[a, b]`, where either bound may be infinite.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Quadrature {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Like [`integrate`] but with interior break points where the integrand is known to
/// have features (kinks, peaks). Breaks outside `(a, b)` are ignored.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Quadrature {
    breaks_dyn(&mut f, a, b, breaks, tol)
}

fn breaks_dyn(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    }
    if a > b {
        let mut q = breaks_dyn(f, b, a, breaks, tol);
        q.value = -q.value;
        return q;
    }
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b && p.is_finite()).collect();
    inner.sort_by(|x, y| x.total_cmp(y));
    inner.dedup();
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            let mut pts = vec![a];
            pts.extend(inner);
            pts.push(b);
            gauss_kronrod(f, &pts, tol)
        }
        (true, false) => {
            // finite pieces up to the last break, then a mapped tail
            let start = inner.last().copied().unwrap_or(a);
            let mut head = Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true };
            if start > a {
                let mut pts = vec![a];
                pts.extend(inner.iter().copied());
                head = gauss_kronrod(&mut *f, &pts, tol);
            }
            // map scale follows the start point so algebraic tails stay spread over (0, 1)
            let c = start.abs().max(1.0);
            let tail = gauss_kronrod(
                |s: f64| {
                    let x = start + c * (1.0 - s) / s;
                    let v = f(x);
                    if v == 0.0 { 0.0 } else { c * v / (s * s) }
                },
                &[0.0, 1.0],
                tol,
            );
            combine(head, tail)
        }
        (false, true) => {
            let neg: Vec<f64> = inner.iter().map(|p| -p).collect();
            breaks_dyn(&mut |x: f64| f(-x), -b, f64::INFINITY, &neg, tol)
        }
        (false, false) => {
            let split = inner.first().copied().unwrap_or(0.0);
            let left_breaks: Vec<f64> = inner.iter().copied().filter(|&p| p < split).collect();
            let right_breaks: Vec<f64> = inner.iter().copied().filter(|&p| p > split).collect();
            let lq = breaks_dyn(f, f64::NEG_INFINITY, split, &left_breaks, tol);
            let rq = breaks_dyn(f, split, f64::INFINITY, &right_breaks, tol);
            combine(lq, rq)
        }
    }
}

fn combine(a: Quadrature, b: Quadrature) -> Quadrature {
    Quadrature {
        value: a.value + b.value,
        error: a.error + b.error,
        evaluations: a.evaluations + b.evaluations,
        converged: a.converged && b.converged,
    }
}

/// Runs [`integrate_with_breaks`] on a fallible integrand. The first error raised by the
/// integrand aborts the result.
pub fn integrate_fallible<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Quadrature> {
    let mut failure: Option<Error> = None;
    let q = integrate_with_breaks(
        |x| {
            if failure.is_some() {
                return 0.0;
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        a,
        b,
        breaks,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

/// Double-exponential (tanh-sinh) quadrature on a finite interval.
///
/// The integrand is called as `f(x, x - a, b - x)`; both gaps are computed without
/// subtraction, so kernels such as `(b - x)^(-alpha)` stay accurate next to the endpoint.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Quadrature {
    assert!(a.is_finite() && b.is_finite() && b > a, "tanh_sinh needs a finite increasing interval");
    let len = b - a;
    let half = 0.5 * len;
    let c = a + half;
    let pi2 = std::f64::consts::FRAC_PI_2;
    let max_level = tol.max_intervals.clamp(3, 12);
    let mut evals = 1usize;
    let mut sum = pi2 * f(c, half, half);

    // Sum over the nodes t = k h for the given k values, returning the weighted sum.
    let mut node_pair = |t: f64, evals: &mut usize| -> Option<f64> {
        let u = pi2 * t.sinh();
        let e2u = (2.0 * u).exp();
        let gap = len / (e2u + 1.0);
        if !(gap > f64::MIN_POSITIVE * 16.0) || !e2u.is_finite() {
            return None;
        }
        let cu = u.cosh();
        let w = pi2 * t.cosh() / (cu * cu);
        let far = len - gap;
        let vr = f(b - gap, far, gap);
        let vl = f(a + gap, gap, far);
        *evals += 2;
        Some(w * (vr + vl))
    };

    let t_max = 6.5;
    let mut h = 1.0;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_max {
            break;
        }
        match node_pair(t, &mut evals) {
            Some(v) => sum += v,
            None => break,
        }
        k += 1;
    }
    let mut estimate = sum * h * half;
    let mut error = f64::INFINITY;
    let mut converged = false;
    for _level in 1..=max_level {
        h *= 0.5;
        let mut k = 1;
        let mut added = 0.0;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            match node_pair(t, &mut evals) {
                Some(v) => added += v,
                None => break,
            }
            k += 2;
        }
        sum += added;
        let next = sum * h * half;
        error = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        // the rule converges quadratically, so the last difference overstates the error
        if error <= tol.target(estimate) {
            converged = true;
            break;
        }
    }
    Quadrature {
        value: estimate,
        error,
        evaluations: evals,
        converged,
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Shared 20-point Gauss–Legendre rule.
pub(crate) fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Integral of `d^(-alpha) g(d)` over `0 < d < len` (with `len` possibly infinite),
/// where `g` is regular at `d = 0`.
///
/// Near the singular end the substitution `u = d^(1 - alpha)` removes the kernel, which
/// keeps the rule accurate for `alpha` close to 1. The remainder is handled by
/// tanh-sinh on finite pieces (so `g` may itself be weakly singular at `d = len`) and by
/// the mapped Gauss–Kronrod rule on an infinite tail.
pub fn weakly_singular<G: FnMut(f64) -> f64>(alpha: f64, mut g: G, len: f64, scale: f64, tol: Tolerance) -> Quadrature {
    assert!(alpha < 1.0, "kernel exponent must be integrable");
    if alpha <= 0.0 && len.is_finite() {
        return tanh_sinh(|_, d, _| d.powf(-alpha) * g(d), 0.0, len, tol);
    }
    let p = 1.0 - alpha;
    let cut = if len.is_finite() { 0.5 * len } else { scale };
    let umax = cut.powf(p);
    let inv_p = 1.0 / p;
    let head = gauss_kronrod(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            g(u.powf(inv_p)) * inv_p
        },
        &[0.0, 0.25 * umax, umax],
        tol,
    );
    let tail = if len.is_finite() {
        tanh_sinh(|_, _, to_end| {
            let d = len - to_end;
            d.powf(-alpha) * g(d)
        }, cut, len, tol)
    } else {
        integrate(|d| if d <= 0.0 { 0.0 } else { d.powf(-alpha) * g(d) }, cut, f64::INFINITY, tol)
    };
    combine(head, tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_polynomial_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, Tolerance::default());
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((q.value - exact).abs() < 1e-13, "{} vs {}", q.value, exact);
        assert!(q.converged);
    }

    #[test]
    fn semi_infinite_exponential() {
        let q = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, Tolerance::default());
        assert!((q.value - 1.0).abs() < 1e-12);
        let q = integrate(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, Tolerance::default());
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // integral of x^(-1/2) (1-x)^(-1/2) over (0,1) is pi
        let q = tanh_sinh(|_, da, db| da.powf(-0.5) * db.powf(-0.5), 0.0, 1.0, Tolerance::default());
        assert!((q.value - std::f64::consts::PI).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn weakly_singular_near_unit_exponent() {
        // integral of d^(-0.999) over (0,1) is 1000
        let q = weakly_singular(0.999, |_| 1.0, 1.0, 1.0, Tolerance::default());
        assert!((q.value - 1000.0).abs() < 1e-9, "{}", q.value);
        // integral of d^(-1/2) e^(-d) over (0, inf) is sqrt(pi)
        let q = weakly_singular(0.5, |d: f64| (-d).exp(), f64::INFINITY, 1.0, Tolerance::default());
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let (x, w) = gauss_legendre(20);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
    }
}
