//! Exact marginal samplers and the statistics used to compare them with the densities.
//!
//! * `G_mu(t)`: gamma with shape `mu` and scale `t`; `E_mu(t) = t / Gamma(mu)`.
//! * `h^nu_t = t^(1/nu) X` with `X` from Kanter's representation; `L^nu_t = (t / X)^nu`.
//! * composition chains `E_mu1(E_mu2(...((nu t)^(1/nu))))` and `[G_mu1(G_mu2(...))]^nu`.
//!
//! Every generator is a ChaCha8 stream selected by `(seed, stream_id)`; bulk draws are split
//! into fixed chunks at fixed word offsets, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laws::MuVector;
use crate::solvers::log_log_slope;
use crate::specfun::quad::{integrate_fallible, Tolerance};

/// Seed and stream of a reproducible generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

/// Samples per chunk of a bulk draw.
const CHUNK: usize = 8192;

impl RngSpec {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngSpec { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }

    /// Generator for chunk `k` of a bulk draw: the same stream, `2^40` words further on per chunk.
    fn chunk_rng(&self, k: usize) -> ChaCha8Rng {
        let mut r = self.rng();
        r.set_word_pos((k as u128) << 40);
        r
    }

    /// `n` draws of `f`, generated chunk by chunk in parallel and returned in chunk order.
    pub fn draw<F>(&self, n: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
    {
        let chunks = n.div_ceil(CHUNK);
        let parts: Result<Vec<Vec<f64>>> = (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut rng = self.chunk_rng(k);
                let len = CHUNK.min(n - k * CHUNK);
                (0..len).map(|_| f(&mut rng)).collect()
            })
            .collect();
        Ok(parts?.concat())
    }
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_index(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0, 1], got {v}")));
    }
    Ok(())
}

fn gamma_variate<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> Result<f64> {
    let g = Gamma::new(mu, 1.0).map_err(|e| Error::domain(format!("gamma sampler: {e}")))?;
    Ok(g.sample(rng))
}

/// Draw of `G_mu(t)`: gamma with shape `mu`, scale `t`.
pub fn sample_g<R: Rng + ?Sized>(mu: f64, t: f64, rng: &mut R) -> Result<f64> {
    check_pos("mu", mu)?;
    check_pos("t", t)?;
    Ok(t * gamma_variate(mu, rng)?)
}

/// Draw of `E_mu(t)`, the reciprocal of a gamma variate scaled by `t`.
pub fn sample_e<R: Rng + ?Sized>(mu: f64, t: f64, rng: &mut R) -> Result<f64> {
    check_pos("mu", mu)?;
    check_pos("t", t)?;
    Ok(t / gamma_variate(mu, rng)?)
}

/// Unit-time positive stable variate with `E exp(-lambda X) = exp(-lambda^nu)` (Kanter).
fn kanter<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break std::f64::consts::PI * u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let w = 1.0 - nu;
    // ln A(u) = (nu/w) ln sin(nu u) + ln sin(w u) - (1/w) ln sin(u)
    let ln_a = nu / w * (nu * u).sin().ln() + (w * u).sin().ln() - (u.sin().ln()) / w;
    ((ln_a - e.ln()) * w / nu).exp()
}

/// Draw of the stable subordinator at time `t`; `nu = 1` is the identity clock.
pub fn sample_subordinator<R: Rng + ?Sized>(nu: f64, t: f64, rng: &mut R) -> Result<f64> {
    check_index("nu", nu)?;
    check_pos("t", t)?;
    if nu == 1.0 {
        return Ok(t);
    }
    Ok(t.powf(1.0 / nu) * kanter(nu, rng))
}

/// Draw of the inverse subordinator at time `t`: `(t / X)^nu` with `X` the unit-time stable draw.
pub fn sample_inverse<R: Rng + ?Sized>(nu: f64, t: f64, rng: &mut R) -> Result<f64> {
    check_index("nu", nu)?;
    check_pos("t", t)?;
    if nu == 1.0 {
        return Ok(t);
    }
    Ok((t / kanter(nu, rng)).powf(nu))
}

/// Draw of the clock `F^{nu,beta}_t`: the subordinator of index `nu` run at an inverse time of index `beta`.
pub fn sample_clock<R: Rng + ?Sized>(nu: f64, beta: f64, t: f64, rng: &mut R) -> Result<f64> {
    let s = sample_inverse(beta, t, rng)?;
    sample_subordinator(nu, s, rng)
}

/// Draw of `G_mu(F^{nu,beta}_t)`.
pub fn sample_time_changed_gamma<R: Rng + ?Sized>(mu: f64, nu: f64, beta: f64, t: f64, rng: &mut R) -> Result<f64> {
    let s = sample_clock(nu, beta, t, rng)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    sample_g(mu, s, rng)
}

/// Which side of the subordinator/inverse pair a chain reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Subordinator,
    Inverse,
}

/// Nested composition of reciprocal-gamma (or gamma) processes.
///
/// For `nu = 1/(n+1)` and `mu` in the product class over `n+1` with product `n!`,
/// the subordinator chain has the law of `h^nu_t` and the inverse chain that of `L^nu_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionChain {
    pub kind: ChainKind,
    pub mu: MuVector,
    pub t: f64,
}

impl CompositionChain {
    pub fn new(kind: ChainKind, mu: MuVector, t: f64) -> Result<Self> {
        check_pos("t", t)?;
        let n = mu.len() as u64;
        let target: u64 = (1..=n).product();
        if !mu.in_product_set(n + 1, target) {
            return Err(Error::Membership(format!(
                "{:?}/{} is not a vector over {} with numerator product {}",
                mu.numerators(),
                mu.kappa(),
                n + 1,
                target
            )));
        }
        Ok(CompositionChain { kind, mu, t })
    }

    /// Stability index `1/(n+1)` reproduced by the chain.
    pub fn nu(&self) -> f64 {
        1.0 / (self.mu.len() + 1) as f64
    }
}

/// One draw of a composition chain. The innermost process (last entry of `mu`) runs first.
pub fn sample_chain<R: Rng + ?Sized>(chain: &CompositionChain, rng: &mut R) -> Result<f64> {
    let nu = chain.nu();
    let mus = chain.mu.values();
    match chain.kind {
        ChainKind::Subordinator => {
            let mut s = (nu * chain.t).powf(1.0 / nu);
            for &m in mus.iter().rev() {
                s = sample_e(m, s, rng)?;
            }
            Ok(s)
        }
        ChainKind::Inverse => {
            let mut s = chain.t * nu.powf(-1.0 / nu);
            for &m in mus.iter().rev() {
                s = sample_g(m, s, rng)?;
            }
            Ok(s.powf(nu))
        }
    }
}

/// `sup_x |F_n(x) - F(x)|` over the sample, with ties and atoms of `F` handled through the
/// left limits `F(x-)`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("KS distance of an empty sample"));
    }
    let mut xs = samples.to_vec();
    if xs.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let (below, at) = (i as f64 / n, j as f64 / n);
        d = d.max((at - cdf(v)).abs()).max((below - cdf(v.next_down())).abs());
        i = j;
    }
    Ok(d)
}

/// Two-sample KS statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("KS distance of an empty sample"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Distribution function tabulated from a density on a logarithmic grid and interpolated
/// linearly in `ln x`; mass below the first node is integrated separately.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    ln_nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn from_density<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(Error::domain("tabulated CDF needs 0 < lo < hi and at least two nodes"));
        }
        let tol = Tolerance::new(1e-13, 1e-10);
        let (a, b) = (lo.ln(), hi.ln());
        let ln_nodes: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
        let mut g = |u: f64| -> Result<f64> {
            let x = u.exp();
            if x == 0.0 {
                return Ok(0.0);
            }
            Ok(x * f(x)?)
        };
        let mut acc = integrate_fallible(&mut g, f64::NEG_INFINITY, a, &[], tol)?.check("tabulated CDF head")?;
        let mut values = Vec::with_capacity(n);
        values.push(acc);
        for w in ln_nodes.windows(2) {
            acc += integrate_fallible(&mut g, w[0], w[1], &[], tol)?.check("tabulated CDF")?;
            values.push(acc);
        }
        Ok(TabulatedCdf { ln_nodes, values })
    }

    /// Total mass captured up to the last node.
    pub fn mass(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let u = x.ln();
        let n = self.ln_nodes.len();
        if u <= self.ln_nodes[0] {
            return self.values[0] * (u - self.ln_nodes[0]).exp().min(1.0);
        }
        if u >= self.ln_nodes[n - 1] {
            return self.values[n - 1];
        }
        let i = self.ln_nodes.partition_point(|&v| v <= u) - 1;
        let s = (u - self.ln_nodes[i]) / (self.ln_nodes[i + 1] - self.ln_nodes[i]);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }
}

/// Empirical `E[X^r]` with a divergence test on block means: the sample is cut into 64 and
/// into 8 contiguous blocks, and a median block mean that grows by more than `growth` with
/// the eightfold block size signals an infinite moment (for a finite mean both medians
/// settle near it; for tail index `a < 1` they grow like `size^(1/a - 1)`).
pub fn empirical_moment(samples: &[f64], r: f64, growth: f64) -> Result<f64> {
    let n = samples.len();
    if n < 64 {
        return Err(Error::domain("moment estimate needs at least 64 samples"));
    }
    let powers: Vec<f64> = samples.iter().map(|x| x.powf(r)).collect();
    let median_block_mean = |blocks: usize| {
        let size = n / blocks;
        let mut means: Vec<f64> = powers.chunks_exact(size).take(blocks).map(|c| c.iter().sum::<f64>() / size as f64).collect();
        means.sort_by(f64::total_cmp);
        0.5 * (means[blocks / 2 - 1] + means[blocks / 2])
    };
    let (small, large) = (median_block_mean(64), median_block_mean(8));
    let mean = powers.iter().sum::<f64>() / n as f64;
    if !mean.is_finite() || large > growth * small {
        return Err(Error::InfiniteMoment(format!(
            "order {r}: median block means {small:.4e} (n/64) and {large:.4e} (n/8) keep growing with block size"
        )));
    }
    Ok(mean)
}

/// Result of a moment-scaling fit.
#[derive(Debug, Clone, Serialize)]
pub struct MomentFit {
    pub times: Vec<f64>,
    pub moments: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
}

/// Least-squares slope of `ln E[G_mu(F^{nu,beta}_t)^r]` against `ln t` from `n` draws per time,
/// each time on its own stream `rng.stream_id + k`. The expected slope is `beta r / nu`.
pub fn moment_scaling_check(mu: f64, nu: f64, beta: f64, r: f64, times: &[f64], n: usize, rng: RngSpec) -> Result<MomentFit> {
    check_pos("mu", mu)?;
    check_pos("r", r)?;
    check_index("nu", nu)?;
    check_index("beta", beta)?;
    let mut moments = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let spec = RngSpec::new(rng.seed, rng.stream_id + k as u64);
        let xs = spec.draw(n, |g| sample_time_changed_gamma(mu, nu, beta, t, g))?;
        moments.push(empirical_moment(&xs, r, 1.5)?);
    }
    let slope = log_log_slope(times, &moments)?;
    Ok(MomentFit { times: times.to_vec(), moments, slope, expected: beta * r / nu })
}

/// Named samplers exposed to the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    G,
    E,
    Subordinator,
    Inverse,
    Clock,
    TimeChangedGamma,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g" => SamplerKind::G,
            "e" => SamplerKind::E,
            "h" | "subordinator" => SamplerKind::Subordinator,
            "l" | "inverse" => SamplerKind::Inverse,
            "f" | "clock" => SamplerKind::Clock,
            "g_nu_beta" => SamplerKind::TimeChangedGamma,
            _ => return Err(Error::Unsupported(format!("unknown sampler '{s}' (g|e|h|l|f|g_nu_beta)"))),
        })
    }
}
