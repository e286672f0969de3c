//! Probability laws: generalized gamma densities, stable subordinator and inverse
//! subordinator densities, the ratio law, the mixed law `f_{nu,beta}`, and
//! Mellin-convolution products of generalized gamma variables.
//!
//! Time conventions:
//! * `g^gamma_mu(x, t) = |gamma| (x/t)^(gamma mu - 1) exp(-(x/t)^gamma) / (t Gamma(mu))`,
//!   the law of `t Z^(1/gamma)` with `Z ~ Gamma(mu, 1)`;
//! * the n-fold product law `compose_density(gamma, mu, x, t)` is the law of
//!   `t (Z_1 ... Z_n)^(1/gamma)`, whose Mellin transform is
//!   `t^(eta-1) prod Gamma((eta-1)/gamma + mu_j) / Gamma(mu_j)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{FoxH, MellinStrip};
use crate::specfun::quad::{integrate_fallible, integrate_with_breaks, Tolerance};
use crate::specfun::{bessel_k, cos_pi, ln_gamma, m_wright, sin_pi};

/// Generalized gamma law with shape `gamma != 0` and index `mu > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GGLaw {
    pub gamma: f64,
    pub mu: f64,
}

impl GGLaw {
    pub fn new(gamma: f64, mu: f64) -> Result<Self> {
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::domain(format!("generalized gamma needs gamma != 0, got {gamma}")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain(format!("generalized gamma needs mu > 0, got {mu}")));
        }
        Ok(GGLaw { gamma, mu })
    }

    /// Weight `w(x) = x^(gamma mu - 1)`.
    pub fn weight(&self, x: f64) -> f64 {
        x.powf(self.gamma * self.mu - 1.0)
    }

    /// Density; `tilde` selects `g~(x, t) = g(x, t^(1/gamma))`.
    pub fn density(&self, x: f64, t: f64, tilde: bool) -> Result<f64> {
        gg_density(*self, x, t, tilde)
    }

    /// Admissible Mellin arguments: `(eta - 1)/gamma + mu > 0`.
    pub fn mellin_strip(&self) -> MellinStrip {
        let edge = 1.0 - self.gamma * self.mu;
        if self.gamma > 0.0 {
            MellinStrip { lower: edge, upper: f64::INFINITY }
        } else {
            MellinStrip { lower: f64::NEG_INFINITY, upper: edge }
        }
    }
}

fn check_xt(x: f64, t: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() || !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("densities need x > 0 and t > 0 (x={x}, t={t})")));
    }
    Ok(())
}

/// `ln Q^gamma_mu(z)` up to the sign of gamma, for `z > 0`.
fn ln_q(gamma: f64, mu: f64, z: f64) -> f64 {
    let (lg, _) = ln_gamma(mu).expect("mu > 0");
    gamma.abs().ln() + (gamma * mu - 1.0) * z.ln() - z.powf(gamma) - lg
}

/// Generalized gamma density `g^gamma_mu(x, t)` (or its tilde variant).
pub fn gg_density(law: GGLaw, x: f64, t: f64, tilde: bool) -> Result<f64> {
    check_xt(x, t)?;
    let scale = if tilde { t.powf(1.0 / law.gamma) } else { t };
    let z = x / scale;
    if z.is_infinite() || (z == 0.0 && law.gamma < 0.0) {
        return Ok(0.0);
    }
    Ok((ln_q(law.gamma, law.mu, z) - scale.ln()).exp())
}

/// Mellin transform of `g^gamma_mu(., t)`: `Gamma((eta-1)/gamma + mu)/Gamma(mu)` times
/// `t^(eta-1)` for the plain law or `t^((eta-1)/gamma)` for the tilde law.
pub fn gg_mellin(law: GGLaw, t: f64, eta: f64, tilde: bool) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    let arg = (eta - 1.0) / law.gamma + law.mu;
    if !(arg > 0.0) {
        let s = law.mellin_strip();
        return Err(Error::domain(format!(
            "eta = {eta} outside the Mellin strip ({}, {}) of g^{}_{}",
            s.lower, s.upper, law.gamma, law.mu
        )));
    }
    let power = if tilde { (eta - 1.0) / law.gamma } else { eta - 1.0 };
    let (a, _) = ln_gamma(arg)?;
    let (b, _) = ln_gamma(law.mu)?;
    Ok((a - b + power * t.ln()).exp())
}

/// Stable subordinator / inverse subordinator indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorSpec {
    pub nu: f64,
    #[serde(default = "unit")]
    pub beta: f64,
}

fn unit() -> f64 {
    1.0
}

impl SubordinatorSpec {
    pub fn new(nu: f64, beta: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) || !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain(format!("indices must lie in (0, 1] (nu={nu}, beta={beta})")));
        }
        Ok(SubordinatorSpec { nu, beta })
    }
}

/// Time-stretching pair `psi_m(s) = m s^(1/m)` and its inverse `phi_m(t) = (t/m)^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeStretch {
    pub m: u32,
}

impl TimeStretch {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain("time stretch needs m >= 2"));
        }
        Ok(TimeStretch { m })
    }
    pub fn psi(&self, s: f64) -> f64 {
        let m = self.m as f64;
        m * s.powf(1.0 / m)
    }
    pub fn phi(&self, t: f64) -> f64 {
        let m = self.m as f64;
        (t / m).powf(m)
    }
}

/// A vector of positive rationals `upsilon_j / kappa` sharing one denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MuVector {
    kappa: u64,
    numerators: Vec<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl MuVector {
    pub fn new(kappa: u64, numerators: Vec<u64>) -> Result<Self> {
        if kappa == 0 || numerators.is_empty() || numerators.contains(&0) {
            return Err(Error::domain("mu vectors need kappa >= 1 and positive integer numerators"));
        }
        Ok(MuVector { kappa, numerators })
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }
    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }
    pub fn len(&self) -> usize {
        self.numerators.len()
    }
    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.numerators.iter().map(|&u| u as f64 / self.kappa as f64).collect()
    }

    /// Rewrites the entries over the denominator `kappa`, if they are multiples of `1/kappa`.
    pub fn over(&self, kappa: u64) -> Option<MuVector> {
        if !kappa.is_multiple_of(self.kappa) {
            return None;
        }
        let f = kappa / self.kappa;
        Some(MuVector { kappa, numerators: self.numerators.iter().map(|u| u * f).collect() })
    }

    /// Membership in the product class: numerators over `kappa` multiply to `target`.
    pub fn in_product_set(&self, kappa: u64, target: u64) -> bool {
        self.over(kappa).is_some_and(|v| v.numerators.iter().try_fold(1u64, |a, &b| a.checked_mul(b)) == Some(target))
    }

    /// Membership in the sum class: numerators over `kappa` add up to `target`.
    pub fn in_sum_set(&self, kappa: u64, target: u64) -> bool {
        self.over(kappa).is_some_and(|v| v.numerators.iter().sum::<u64>() == target)
    }
}

impl fmt::Display for MuVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.numerators.iter().map(|u| format!("{u}/{}", self.kappa)).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MuVector {
    type Err = Error;
    /// Parses `"u1/k,...,un/k"`; integer entries and mixed denominators are brought to a
    /// common denominator.
    fn from_str(s: &str) -> Result<Self> {
        let mut fracs = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (num, den) = match part.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part, "1"),
            };
            let num: u64 = num.parse().map_err(|_| Error::Parse(format!("bad numerator in '{part}'")))?;
            let den: u64 = den.parse().map_err(|_| Error::Parse(format!("bad denominator in '{part}'")))?;
            if num == 0 || den == 0 {
                return Err(Error::Parse(format!("entries must be positive fractions, got '{part}'")));
            }
            fracs.push((num, den));
        }
        let lcm = fracs.iter().fold(1u64, |l, &(_, d)| l / gcd(l, d) * d);
        MuVector::new(lcm, fracs.iter().map(|&(n, d)| n * (lcm / d)).collect())
    }
}

impl Serialize for MuVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MuVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Product (`P`) or sum (`S`) index class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexKind {
    P,
    S,
}

/// All ordered tuples of `n` positive integers with product (`P`) or sum (`S`) equal to
/// `target`, as vectors over `kappa`, in lexicographic order.
pub fn index_set(kind: IndexKind, n: usize, kappa: u64, target: u64) -> Result<Vec<MuVector>> {
    if n == 0 || kappa == 0 || target == 0 {
        return Err(Error::domain("index sets need n, kappa, target >= 1"));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(kind: IndexKind, n: usize, rest: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == n {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        let slots_left = (n - cur.len() - 1) as u64;
        for v in 1..=rest {
            let next = match kind {
                IndexKind::P => {
                    if !rest.is_multiple_of(v) {
                        continue;
                    }
                    rest / v
                }
                IndexKind::S => {
                    if rest < v + slots_left {
                        break;
                    }
                    rest - v
                }
            };
            cur.push(v);
            rec(kind, n, next, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(kind, n, target, &mut cur, &mut raw);
    for nums in raw {
        out.push(MuVector::new(kappa, nums)?);
    }
    Ok(out)
}

/// Evaluation route for the subordinator densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Elementary closed form (index 1/2 only).
    Closed,
    /// Product of generalized gamma variables (index 1/(n+1), n <= 4).
    Conv,
    /// Mellin–Barnes integral of the H-function representation.
    Foxh,
    /// M-Wright function (series, or its positive integral form for large arguments).
    Wright,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Conv => "conv",
            Method::Foxh => "foxh",
            Method::Wright => "wright",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Method::Closed),
            "conv" => Ok(Method::Conv),
            "foxh" => Ok(Method::Foxh),
            "wright" => Ok(Method::Wright),
            _ => Err(Error::Parse(format!("unknown method '{s}' (closed|conv|foxh|wright)"))),
        }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!("stable index must lie in (0, 1), got {nu}")));
    }
    Ok(())
}

/// `n` with `nu = 1/(n+1)`, for `n <= 4`.
fn conv_depth(nu: f64) -> Result<usize> {
    let m = (1.0 / nu).round();
    if (1.0 / nu - m).abs() > 1e-12 || !(2.0..=5.0).contains(&m) {
        return Err(Error::Unsupported(format!(
            "the product route needs nu = 1/(n+1) with n <= 4, got nu = {nu}"
        )));
    }
    Ok(m as usize - 1)
}

fn conv_indices(nu: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| j as f64 * nu).collect()
}

/// H-function of the stable subordinator: `h_nu(x, 1) = H(x)`.
pub fn h_fox(nu: f64) -> Result<FoxH> {
    check_nu(nu)?;
    FoxH::new(0, 1, vec![(1.0 - 1.0 / nu, 1.0 / nu)], vec![(0.0, 1.0)], None)?.with_coefficient(1.0 / nu)
}

/// H-function of the inverse subordinator: `l_nu(x, 1) = H(x)`.
pub fn l_fox(nu: f64) -> Result<FoxH> {
    check_nu(nu)?;
    FoxH::new(1, 0, vec![(1.0 - nu, nu)], vec![(0.0, 1.0)], None)
}

/// Density of the stable subordinator with Laplace exponent `lambda^nu` at time `t`.
pub fn h_density(nu: f64, x: f64, t: f64, method: Method) -> Result<f64> {
    check_nu(nu)?;
    check_xt(x, t)?;
    match method {
        Method::Closed => {
            if nu != 0.5 {
                return Err(Error::Unsupported(format!("closed form exists for nu = 1/2 only, got {nu}")));
            }
            let ln_c = (2.0 * std::f64::consts::PI.sqrt()).ln();
            Ok((t.ln() - ln_c - 1.5 * x.ln() - t * t / (4.0 * x)).exp())
        }
        Method::Conv => {
            let n = conv_depth(nu)?;
            let stretch = TimeStretch::new(n as u32 + 1)?;
            let tau = stretch.phi(t);
            // the law is concentrated at the origin (or escaped to infinity) beyond f64 range
            if tau == 0.0 || !tau.is_finite() {
                return Ok(0.0);
            }
            compose_density(-1.0, &conv_indices(nu, n), x, tau)
        }
        Method::Foxh => {
            let s = t.powf(-1.0 / nu);
            Ok(s * h_fox(nu)?.eval(x * s)?)
        }
        // x h(x, t) = nu t l(t, x)
        Method::Wright => Ok(nu * t / x * l_density(nu, t, x, Method::Wright)?),
    }
}

/// Density of the inverse (first-passage) process of the stable subordinator.
pub fn l_density(nu: f64, x: f64, t: f64, method: Method) -> Result<f64> {
    check_nu(nu)?;
    check_xt(x, t)?;
    match method {
        Method::Closed => {
            if nu != 0.5 {
                return Err(Error::Unsupported(format!("closed form exists for nu = 1/2 only, got {nu}")));
            }
            Ok((-x * x / (4.0 * t)).exp() / (std::f64::consts::PI * t).sqrt())
        }
        Method::Conv => {
            let n = conv_depth(nu)?;
            let stretch = TimeStretch::new(n as u32 + 1)?;
            let tau = stretch.psi(t);
            if tau == 0.0 || !tau.is_finite() {
                return Ok(0.0);
            }
            compose_density((n + 1) as f64, &conv_indices(nu, n), x, tau)
        }
        Method::Foxh => {
            let s = t.powf(-nu);
            Ok(s * l_fox(nu)?.eval(x * s)?)
        }
        Method::Wright => {
            let s = t.powf(-nu);
            Ok(s * m_wright(nu, x * s)?)
        }
    }
}

/// Most accurate available route: closed form, then product form, then H-function.
pub fn best_method(nu: f64) -> Method {
    if nu == 0.5 {
        Method::Closed
    } else if conv_depth(nu).is_ok() {
        Method::Conv
    } else {
        Method::Foxh
    }
}

/// Mellin transform of `h_nu(., t)`, defined for `eta < 1 + nu`.
pub fn h_mellin(nu: f64, t: f64, eta: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(eta < 1.0 + nu) {
        return Err(Error::domain(format!("eta = {eta} outside the strip (-inf, {})", 1.0 + nu)));
    }
    Ok(crate::mellin::fox_h_mellin(&h_fox(nu)?, eta)? * t.powf((eta - 1.0) / nu))
}

/// Mellin transform of `l_nu(., t)`, defined for `eta > 0`.
pub fn l_mellin(nu: f64, t: f64, eta: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(eta > 0.0) {
        return Err(Error::domain(format!("eta = {eta} outside the strip (0, inf)")));
    }
    Ok(crate::mellin::fox_h_mellin(&l_fox(nu)?, eta)? * t.powf(nu * (eta - 1.0)))
}

/// Density of the ratio of two independent copies of the stable subordinator at a common time.
pub fn ratio_density(nu: f64, x: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(x >= 0.0) {
        return Err(Error::domain(format!("ratio density needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if nu < 1.0 { f64::INFINITY } else { 0.0 });
    }
    if x > 1.0 {
        // the ratio and its reciprocal share the law; keeps x^(2 nu) finite
        return Ok(ratio_density(nu, 1.0 / x)? / (x * x));
    }
    let xn = x.powf(nu);
    Ok(x.powf(nu - 1.0) * sin_pi(nu) / (std::f64::consts::PI * (1.0 + 2.0 * xn * cos_pi(nu) + xn * xn)))
}

/// Law of the subordinator evaluated at an independent inverse-subordinator time:
/// `int_0^inf h_nu(x, s) l_beta(s, t) ds`. `beta = 1` reduces to `h_nu(x, t)`.
pub fn f_nu_beta(nu: f64, beta: f64, x: f64, t: f64) -> Result<f64> {
    check_nu(nu)?;
    check_xt(x, t)?;
    if beta == 1.0 {
        return h_density(nu, x, t, best_method(nu));
    }
    check_nu(beta)?;
    let (mh, ml) = (best_method(nu), best_method(beta));
    // the integrand peaks where s^(1/nu) ~ x and s ~ t^beta
    let mut breaks = vec![x.powf(nu), t.powf(beta)];
    breaks.retain(|v| v.is_finite() && *v > 0.0);
    let lb: Vec<f64> = breaks.iter().map(|v| v.ln()).collect();
    integrate_fallible(
        |u| {
            let s = u.exp();
            if s == 0.0 || !s.is_finite() {
                return Ok(0.0);
            }
            let l = l_density(beta, s, t, ml)?;
            if l == 0.0 {
                return Ok(0.0);
            }
            Ok(s * h_density(nu, x, s, mh)? * l)
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &lb,
        Tolerance::new(1e-14, 1e-10),
    )?
    .check("f_nu_beta")
}

const COMPOSE_TOL: Tolerance = Tolerance { abs: 1e-300, rel: 1e-12, max_intervals: 4000 };

/// Density of `Z ~ Gamma(mu, 1)`.
fn gamma_unit(mu: f64, w: f64) -> f64 {
    if w <= 0.0 || !w.is_finite() {
        return 0.0;
    }
    ln_q(1.0, mu, w).exp()
}

/// Density of `Z_1 Z_2` for independent unit gammas:
/// `2 w^((m1+m2)/2 - 1) K_{m1-m2}(2 sqrt w) / (Gamma(m1) Gamma(m2))`.
fn gamma_pair(m1: f64, m2: f64, w: f64) -> Result<f64> {
    if w <= 0.0 || !w.is_finite() {
        return Ok(0.0);
    }
    let z = 2.0 * w.sqrt();
    if z > 1400.0 {
        return Ok(0.0);
    }
    let (g1, _) = ln_gamma(m1)?;
    let (g2, _) = ln_gamma(m2)?;
    let lw = w.ln();
    if w < 1e-20 {
        // K_nu(z) ~ Gamma(nu)/2 (z/2)^-nu + Gamma(-nu)/2 (z/2)^nu, which K itself would overflow
        let nu = (m1 - m2).abs();
        let lo = m1.min(m2);
        if nu == 0.0 {
            return Ok(2.0 * ((lo - 1.0) * lw - g1 - g2).exp() * (-0.5 * lw - 0.577_215_664_901_532_9));
        }
        let lead = (ln_gamma(nu)?.0 + (lo - 1.0) * lw - g1 - g2).exp();
        if nu.fract() == 0.0 {
            return Ok(lead);
        }
        let ratio = crate::specfun::gamma_fn(-nu)? / crate::specfun::gamma_fn(nu)? * (nu * lw).exp();
        return Ok(lead * (1.0 + ratio));
    }
    let k = bessel_k(m1 - m2, z)?;
    Ok(2.0 * (((m1 + m2) / 2.0 - 1.0) * lw - g1 - g2).exp() * k)
}

/// Mellin convolution of two densities of positive variables on the log scale:
/// density of `A B` at `w` is `int f_A(w e^-u) f_B(e^u) du`.
fn product_density<FA, FB>(fa: FA, fb: FB, w: f64) -> Result<f64>
where
    FA: Fn(f64) -> Result<f64>,
    FB: Fn(f64) -> Result<f64>,
{
    let lw = w.ln();
    let breaks = [0.5 * lw, lw, 0.0, -2.0, 2.0];
    integrate_fallible(
        |u| {
            let b = fb(u.exp())?;
            if b == 0.0 {
                return Ok(0.0);
            }
            Ok(fa((lw - u).exp())? * b)
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &breaks,
        COMPOSE_TOL,
    )?
    .check("compose_density")
}

/// Density at `w` of a product of independent unit gammas with indices `mu` (length <= 4).
pub fn gamma_product_density(mu: &[f64], w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::domain(format!("product density needs w > 0, got {w}")));
    }
    match mu {
        [m] => Ok(gamma_unit(*m, w)),
        [m1, m2] => gamma_pair(*m1, *m2, w),
        [m1, m2, m3] => product_density(|v| Ok(gamma_unit(*m1, v)), |v| gamma_pair(*m2, *m3, v), w),
        [m1, m2, m3, m4] => product_density(|v| gamma_pair(*m1, *m2, v), |v| gamma_pair(*m3, *m4, v), w),
        _ => Err(Error::Unsupported(format!("products of {} factors are not supported (max 4)", mu.len()))),
    }
}

/// n-fold Mellin convolution of generalized gamma laws with shape `gamma` and indices
/// `mu`: the density at `x` of `t (Z_1 ... Z_n)^(1/gamma)`, `Z_j ~ Gamma(mu_j, 1)`.
pub fn compose_density(gamma: f64, mu: &[f64], x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::domain("compose_density needs gamma != 0"));
    }
    if mu.is_empty() || mu.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(Error::domain("compose_density needs positive indices"));
    }
    let r = x / t;
    let w = r.powf(gamma);
    if w == 0.0 || !w.is_finite() {
        return Ok(0.0);
    }
    let fw = gamma_product_density(mu, w)?;
    Ok(fw * gamma.abs() * w / (r * t))
}

/// Mellin transform of [`compose_density`]: `t^(eta-1) prod Gamma((eta-1)/gamma + mu_j)/Gamma(mu_j)`.
pub fn compose_mellin(gamma: f64, mu: &[f64], t: f64, eta: f64) -> Result<f64> {
    let mut acc = (eta - 1.0) * t.ln();
    for &m in mu {
        let arg = (eta - 1.0) / gamma + m;
        if !(arg > 0.0) {
            return Err(Error::domain(format!("eta = {eta} outside the Mellin strip")));
        }
        acc += ln_gamma(arg)?.0 - ln_gamma(m)?.0;
    }
    Ok(acc.exp())
}

/// Largest pointwise gap between the product laws of two index vectors from the same
/// product class, over a grid of `(x, t)` points.
pub fn compose_invariance_gap(mu1: &MuVector, mu2: &MuVector, points: &[(f64, f64)]) -> Result<f64> {
    if mu1.len() != mu2.len() {
        return Err(Error::Membership(format!("vectors of different length: {mu1} vs {mu2}")));
    }
    let kappa = mu1.kappa() / gcd(mu1.kappa(), mu2.kappa()) * mu2.kappa();
    let (a, b) = (mu1.over(kappa).unwrap(), mu2.over(kappa).unwrap());
    let pa: u128 = a.numerators().iter().map(|&v| v as u128).product();
    let pb: u128 = b.numerators().iter().map(|&v| v as u128).product();
    if pa != pb {
        return Err(Error::Membership(format!(
            "{mu1} and {mu2} have numerator products {pa} and {pb} over {kappa}"
        )));
    }
    let (v1, v2) = (mu1.values(), mu2.values());
    let mut gap: f64 = 0.0;
    for &(x, t) in points {
        let d = (compose_density(1.0, &v1, x, t)? - compose_density(1.0, &v2, x, t)?).abs();
        gap = gap.max(d);
    }
    Ok(gap)
}

/// Residual of the additive semigroup law at `(x, t)`: for `gamma = 1` the sum of
/// independent `g^1_{mu1}(., t)` and `g^1_{mu2}(., t)` variables has law `g^1_{mu1+mu2}(., t)`;
/// for `gamma = 2` the same holds for the root of the sum of squares.
pub fn additive_semigroup_residual(gamma: f64, mu1: f64, mu2: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    let (l1, l2, l12) = (GGLaw::new(gamma, mu1)?, GGLaw::new(gamma, mu2)?, GGLaw::new(gamma, mu1 + mu2)?);
    let target = gg_density(l12, x, t, false)?;
    let lhs = if gamma == 1.0 {
        additive_convolution(|s| gg_density(l1, s, t, false), |s| gg_density(l2, s, t, false), x)?
    } else if gamma == 2.0 {
        // densities of the squares, convolved, then mapped back through r = sqrt(u)
        let sq = |law: GGLaw, u: f64| -> Result<f64> { Ok(gg_density(law, u.sqrt(), t, false)? / (2.0 * u.sqrt())) };
        let u = x * x;
        2.0 * x * additive_convolution(|s| sq(l1, s), |s| sq(l2, s), u)?
    } else {
        return Err(Error::Unsupported(format!("the additive semigroup holds for gamma in {{1, 2}}, got {gamma}")));
    };
    Ok(lhs - target)
}

/// `int_0^x f1(x - s) f2(s) ds`, with both endpoint singularities handled by splitting at `x/2`.
pub fn additive_convolution<F1, F2>(f1: F1, f2: F2, x: f64) -> Result<f64>
where
    F1: Fn(f64) -> Result<f64>,
    F2: Fn(f64) -> Result<f64>,
{
    let h = 0.5 * x;
    let tol = Tolerance::new(1e-15, 1e-12);
    let mut err = None;
    let mut wrap = |v: Result<f64>| match v {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    // substitute s = h e^{-v} near each end so power singularities become exponential decay
    let a = integrate_with_breaks(
        |v: f64| {
            let s = h * (-v).exp();
            if s == 0.0 {
                return 0.0;
            }
            let p = wrap(f2(s));
            if p == 0.0 { 0.0 } else { s * p * wrap(f1(x - s)) }
        },
        0.0,
        f64::INFINITY,
        &[1.0, 5.0],
        tol,
    );
    let b = integrate_with_breaks(
        |v: f64| {
            let s = h * (-v).exp();
            if s == 0.0 {
                return 0.0;
            }
            let p = wrap(f1(s));
            if p == 0.0 { 0.0 } else { s * p * wrap(f2(x - s)) }
        },
        0.0,
        f64::INFINITY,
        &[1.0, 5.0],
        tol,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(a.check("additive_convolution")? + b.check("additive_convolution")?)
}

/// Which density a tabulation row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum Tabulated {
    Gg { gamma: f64, mu: f64, tilde: bool },
    H { nu: f64 },
    L { nu: f64 },
    Ratio { nu: f64 },
    Fnb { nu: f64, beta: f64 },
}

/// One tabulated density value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub x: f64,
    pub t: f64,
    pub value: f64,
    pub method: String,
}

/// Tabulates a density over the product grid `xs x ts`.
pub fn tabulate(what: Tabulated, xs: &[f64], ts: &[f64], method: Option<Method>) -> Result<Vec<Row>> {
    let mut rows = Vec::with_capacity(xs.len() * ts.len());
    for &t in ts {
        for &x in xs {
            let (value, m) = match what {
                Tabulated::Gg { gamma, mu, tilde } => (gg_density(GGLaw::new(gamma, mu)?, x, t, tilde)?, "closed"),
                Tabulated::H { nu } => {
                    let m = method.unwrap_or_else(|| best_method(nu));
                    (h_density(nu, x, t, m)?, m.as_str())
                }
                Tabulated::L { nu } => {
                    let m = method.unwrap_or_else(|| best_method(nu));
                    (l_density(nu, x, t, m)?, m.as_str())
                }
                Tabulated::Ratio { nu } => (ratio_density(nu, x / t)? / t, "closed"),
                Tabulated::Fnb { nu, beta } => (f_nu_beta(nu, beta, x, t)?, "quadrature"),
            };
            rows.push(Row { x, t, value, method: m.to_string() });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with header `x,t,value,method`.
pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_vector_parsing() {
        let v: MuVector = "1/3,2/3".parse().unwrap();
        assert_eq!(v.kappa(), 3);
        assert_eq!(v.numerators(), &[1, 2]);
        assert_eq!(v.to_string(), "1/3,2/3");
        let w: MuVector = "1/2, 1/3, 1".parse().unwrap();
        assert_eq!(w.to_string(), "3/6,2/6,6/6");
        assert!("0/3".parse::<MuVector>().is_err());
        assert!("a/3".parse::<MuVector>().is_err());
    }

    #[test]
    fn time_stretch_inverse_pair() {
        let s = TimeStretch::new(3).unwrap();
        assert!((s.phi(s.psi(0.7)) - 0.7).abs() < 1e-15);
        assert!((s.phi(1.0) - 1.0 / 27.0).abs() < 1e-17);
        assert!(TimeStretch::new(1).is_err());
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(GGLaw::new(0.0, 1.0).is_err());
        assert!(GGLaw::new(1.0, 0.0).is_err());
        let l = GGLaw::new(1.0, 1.0).unwrap();
        assert!(gg_density(l, 0.0, 1.0, false).is_err());
        assert!(gg_density(l, 1.0, -1.0, false).is_err());
        assert!(gg_mellin(l, 1.0, -0.5, false).is_err());
        assert!(h_density(0.3, 1.0, 1.0, Method::Closed).is_err());
        assert!(h_density(0.3, 1.0, 1.0, Method::Conv).is_err());
        assert!(compose_density(1.0, &[0.5; 5], 1.0, 1.0).is_err());
        assert!(additive_semigroup_residual(3.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }
}
