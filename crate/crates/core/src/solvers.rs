//! Solution operators built on the laws module.
//!
//! * `subordinated_solution`: `u(x, t) = int_0^inf g~^gamma_mu(x, s) l_nu(s, t) ds` on the half-line;
//! * `BvpSolution`: the eigenfunction series on `(0, 1)` for
//!   `^cD^nu_t m = G* m`, `m(1, t) = 0`, `m(x, 0) = m_0(x)`, with
//!   `G* f = gamma^-2 d/dx (x^(gamma mu - gamma + 1) d/dx (f / w))` and `w(x) = x^(gamma mu - 1)`;
//! * `g_nu_beta_density`: the law of `G_mu` run at the clock `F^{nu,beta}_t`, by three routes;
//! * `OperatorA`: `A f = -D^nu_{0+}( x^(mu - 1 + nu) D^nu_{0-}( x^(1 - mu) f ) )`;
//! * residuals of the Mellin identities satisfied by these objects.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac_calc::{caputo, geometric_nodes, mellin_multiplier, rl_left, rl_right, GridFunction, Head, Operand, PowerLaw, Side};
use crate::laws::{best_method, f_nu_beta, gg_density, gg_mellin, h_density, l_density, GGLaw};
use crate::mellin::{inverse_mellin, mellin_numeric, saddle_abscissa, FoxH, MellinStrip};
use crate::specfun::quad::{integrate_fallible, integrate_with_breaks, Tolerance};
use crate::specfun::{bessel_j, bessel_j_zeros, bessel_k, gamma_complex, gamma_fn, ln_gamma, mittag_leffler, rgamma};

const OUTER_TOL: Tolerance = Tolerance { abs: 1e-14, rel: 1e-10, max_intervals: 4000 };

fn check_xt(x: f64, t: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() || !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("need x > 0 and t > 0 (x={x}, t={t})")));
    }
    Ok(())
}

fn check_index(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0, 1], got {v}")));
    }
    Ok(())
}

/// `int_0^inf f(s) ds` on the log scale; `centres` are likely peak locations (positive).
fn log_scale_integral<F: FnMut(f64) -> Result<f64>>(mut f: F, centres: &[f64], tol: Tolerance, what: &str) -> Result<f64> {
    let breaks: Vec<f64> = centres.iter().filter(|c| **c > 0.0 && c.is_finite()).map(|c| c.ln()).collect();
    integrate_fallible(
        |u| {
            let s = u.exp();
            if s == 0.0 || !s.is_finite() {
                return Ok(0.0);
            }
            Ok(s * f(s)?)
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &breaks,
        tol,
    )?
    .check(what)
}

// ---------------------------------------------------------------------------------------
// Half-line problem

/// `int_0^inf g~^gamma_mu(x, s) l_nu(s, t) ds`, with `g~(x, s) = g(x, s^(1/gamma))`.
/// At `nu = 1` the inverse subordinator is the identity clock and the generalized gamma
/// density is returned.
pub fn subordinated_solution(gamma: f64, mu: f64, nu: f64, x: f64, t: f64) -> Result<f64> {
    check_xt(x, t)?;
    check_index("nu", nu)?;
    let law = GGLaw::new(gamma, mu)?;
    if nu == 1.0 {
        return gg_density(law, x, t, true);
    }
    let m = best_method(nu);
    // l_nu(., t) sits at s ~ t^nu, g~(x, .) at s ~ x^gamma
    log_scale_integral(
        |s| {
            let l = l_density(nu, s, t, m)?;
            if l == 0.0 {
                return Ok(0.0);
            }
            Ok(gg_density(law, x, s, true)? * l)
        },
        &[t.powf(nu), x.powf(gamma)],
        OUTER_TOL,
        "subordinated_solution",
    )
}

/// Time-Laplace transform of [`subordinated_solution`] for `gamma = 1`: quadrature value and
/// the closed form `2 w(x) lambda^(nu (mu+1)/2 - 1) x^((1-mu)/2) K_{1-mu}(2 sqrt(x) lambda^(nu/2)) / Gamma(mu)`.
pub fn subordinated_laplace(mu: f64, nu: f64, x: f64, lambda: f64) -> Result<(f64, f64)> {
    check_xt(x, lambda)?;
    let quad = log_scale_integral(
        |t| {
            let e = (-lambda * t).exp();
            if e == 0.0 {
                return Ok(0.0);
            }
            Ok(e * subordinated_solution(1.0, mu, nu, x, t)?)
        },
        &[1.0 / lambda, x.powf(1.0 / nu)],
        Tolerance::new(1e-12, 1e-9),
        "subordinated_laplace",
    )?;
    let w = x.powf(mu - 1.0);
    let closed = 2.0 * w * lambda.powf(nu * (mu + 1.0) / 2.0 - 1.0) * x.powf((1.0 - mu) / 2.0)
        * bessel_k(1.0 - mu, 2.0 * x.sqrt() * lambda.powf(nu / 2.0))?
        / gamma_fn(mu)?;
    Ok((quad, closed))
}

// ---------------------------------------------------------------------------------------
// Sturm–Liouville problem on (0, 1)

/// Initial datum of the boundary-value problem.
#[derive(Debug, Clone)]
pub enum Datum {
    /// `m_0 = 1`.
    One,
    /// `m_0 = w psi_1`, the first eigenmode times the weight.
    FirstMode,
    /// `m_0 = sin^2(pi x)`.
    Bump,
    /// Sampled values, interpolated.
    Sampled(GridFunction),
}

impl FromStr for Datum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Datum::One),
            "first-mode" => Ok(Datum::FirstMode),
            "bump" => Ok(Datum::Bump),
            _ => Err(Error::Unsupported(format!("unknown initial datum '{s}' (one|first-mode|bump)"))),
        }
    }
}

impl Datum {
    pub fn name(&self) -> &'static str {
        match self {
            Datum::One => "one",
            Datum::FirstMode => "first-mode",
            Datum::Bump => "bump",
            Datum::Sampled(_) => "sampled",
        }
    }

    /// Reads `node,value` rows (header optional) into a sampled datum.
    pub fn from_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
        let (mut nodes, mut values) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() < 2 {
                return Err(Error::Parse("datum rows need two columns: node,value".into()));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                // the origin is covered by the grid's own head rule
                (Ok(x), Ok(_)) if x <= 0.0 => continue,
                (Ok(x), Ok(v)) => {
                    nodes.push(x);
                    values.push(v);
                }
                _ if nodes.is_empty() => continue,
                _ => return Err(Error::Parse(format!("bad datum row: {:?}", rec))),
            }
        }
        Ok(Datum::Sampled(GridFunction::new(nodes, values, -1.0)?))
    }
}

/// Problem data for the series solution.
#[derive(Debug, Clone)]
pub struct BVPSpec {
    pub gamma: f64,
    pub mu: f64,
    pub nu: f64,
    pub datum: Datum,
    pub n_terms: usize,
}

impl BVPSpec {
    /// Validates the parameters. Only `gamma > 0` is accepted: for `gamma < 0` the map
    /// `x -> x^(gamma/2)` sends `(0, 1)` onto `(1, inf)`, where the Bessel eigenfunctions are
    /// not orthogonal and the expansion does not exist.
    pub fn new(gamma: f64, mu: f64, nu: f64, datum: Datum, n_terms: usize) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!(
                "the eigenfunction expansion on (0, 1) needs gamma > 0, got {gamma}"
            )));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain(format!("mu must be positive, got {mu}")));
        }
        check_index("nu", nu)?;
        if n_terms == 0 {
            return Err(Error::domain("n_terms must be at least 1"));
        }
        Ok(BVPSpec { gamma, mu, nu, datum, n_terms })
    }
}

/// Zeros and norms of the eigenfunctions `psi_k(x) = x^(gamma (1-mu)/2) J_{mu-1}(k x^(gamma/2))`,
/// together with the expansion coefficients of a datum once projected.
#[derive(Debug, Clone, Serialize)]
pub struct EigenSystem {
    #[serde(skip)]
    pub gamma: f64,
    #[serde(skip)]
    pub mu: f64,
    /// Bessel order `mu - 1`.
    pub order: f64,
    pub zeros: Vec<f64>,
    /// `||psi_k||^2_w = J'_{mu-1}(k)^2 / gamma`.
    pub norms: Vec<f64>,
    pub coefficients: Vec<f64>,
}

type BasisKey = (u64, u64, usize);

/// Zeros and norms per basis.
type BasisCache = RwLock<HashMap<BasisKey, Arc<(Vec<f64>, Vec<f64>)>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Zeros and norms for `(gamma, mu, n)`, computed once and shared.
pub fn eigen_system(gamma: f64, mu: f64, n: usize) -> Result<EigenSystem> {
    if !(gamma > 0.0) || !(mu > 0.0) || n == 0 {
        return Err(Error::domain(format!("eigen system needs gamma > 0, mu > 0, n >= 1 (gamma={gamma}, mu={mu}, n={n})")));
    }
    let key = (gamma.to_bits(), mu.to_bits(), n);
    let hit = basis_cache().read().expect("cache lock").get(&key).cloned();
    let basis = match hit {
        Some(b) => b,
        None => {
            let order = mu - 1.0;
            let zeros = bessel_j_zeros(order, n)?;
            let mut norms = Vec::with_capacity(n);
            for &k in &zeros {
                // J'_a(k) = a J_a(k)/k - J_{a+1}(k) = -J_{a+1}(k) at a zero of J_a
                let d = bessel_j(order + 1.0, k)?;
                norms.push(d * d / gamma);
            }
            let b = Arc::new((zeros, norms));
            basis_cache().write().expect("cache lock").entry(key).or_insert(b).clone()
        }
    };
    Ok(EigenSystem { gamma, mu, order: mu - 1.0, zeros: basis.0.clone(), norms: basis.1.clone(), coefficients: Vec::new() })
}

impl EigenSystem {
    pub fn weight(&self, x: f64) -> f64 {
        x.powf(self.gamma * self.mu - 1.0)
    }

    /// `psi_{k_n}(x)` for the zero with index `n` (0-based).
    pub fn psi(&self, n: usize, x: f64) -> Result<f64> {
        let r = x.powf(self.gamma / 2.0);
        Ok(x.powf(self.gamma * (1.0 - self.mu) / 2.0) * bessel_j(self.order, self.zeros[n] * r)?)
    }

    /// Largest gap between the norms from the zero identity and from a centred difference
    /// of `J_{mu-1}` with step `1e-6`.
    pub fn norm_cross_check(&self) -> Result<f64> {
        let h = 1e-6;
        let mut gap: f64 = 0.0;
        for &k in &self.zeros {
            let fd = (bessel_j(self.order, k + h)? - bessel_j(self.order, k - h)?) / (2.0 * h);
            let exact = -bessel_j(self.order + 1.0, k)?;
            gap = gap.max((fd - exact).abs());
        }
        Ok(gap)
    }

    /// `int_0^1 psi_i psi_j w dx` by quadrature in `r = x^(gamma/2)`.
    pub fn inner_product(&self, i: usize, j: usize) -> Result<f64> {
        let (ki, kj) = (self.zeros[i], self.zeros[j]);
        let kmax = ki.max(kj);
        let breaks: Vec<f64> = self.zeros.iter().take_while(|k| **k < kmax).map(|k| k / kmax).collect();
        let mut err = None;
        let q = integrate_with_breaks(
            |r| match (bessel_j(self.order, ki * r), bessel_j(self.order, kj * r)) {
                (Ok(a), Ok(b)) => r * a * b,
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            1.0,
            &breaks,
            Tolerance::new(1e-14, 1e-12),
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(2.0 / self.gamma * q.check("inner_product")?)
    }

    fn datum_value(&self, datum: &Datum, x: f64) -> Result<f64> {
        Ok(match datum {
            Datum::One => 1.0,
            Datum::FirstMode => self.weight(x) * self.psi(0, x)?,
            Datum::Bump => {
                let s = (std::f64::consts::PI * x).sin();
                s * s
            }
            Datum::Sampled(g) => g.value(x),
        })
    }

    /// `c_n = int_0^1 m_0 psi_n dx` for every mode, by quadrature in `r = x^(gamma/2)`
    /// with breaks at the zeros of `J_{mu-1}(k_n r)`.
    pub fn project(&mut self, datum: &Datum) -> Result<()> {
        let (g, mu) = (self.gamma, self.mu);
        let mut coeffs = Vec::with_capacity(self.zeros.len());
        for n in 0..self.zeros.len() {
            let kn = self.zeros[n];
            let breaks: Vec<f64> = self.zeros[..n].iter().map(|k| k / kn).collect();
            let mut err = None;
            let q = integrate_with_breaks(
                |r| {
                    if r <= 0.0 {
                        return 0.0;
                    }
                    let x = r.powf(2.0 / g);
                    let v = self.datum_value(datum, x).and_then(|m0| Ok(m0 * bessel_j(self.order, kn * r)?));
                    match v {
                        Ok(v) => v * r.powf(1.0 - mu) * r.powf(2.0 / g - 1.0),
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                0.0,
                1.0,
                &breaks,
                Tolerance::new(1e-15, 1e-13),
            );
            if let Some(e) = err {
                return Err(e);
            }
            coeffs.push(2.0 / g * q.check("project")?);
        }
        self.coefficients = coeffs;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The truncated eigenfunction series of the boundary-value problem.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub spec: BVPSpec,
    pub system: EigenSystem,
}

impl BvpSolution {
    pub fn new(spec: BVPSpec) -> Result<Self> {
        let mut system = eigen_system(spec.gamma, spec.mu, spec.n_terms)?;
        system.project(&spec.datum)?;
        Ok(BvpSolution { spec, system })
    }

    fn time_factor(&self, n: usize, t: f64) -> Result<f64> {
        let lambda = 0.25 * self.system.zeros[n] * self.system.zeros[n];
        if t == 0.0 {
            return Ok(1.0);
        }
        if self.spec.nu == 1.0 {
            return Ok((-lambda * t).exp());
        }
        mittag_leffler(self.spec.nu, 1.0, -lambda * t.powf(self.spec.nu))
    }

    /// `m / w = sum_n c_n E_nu(-(k_n/2)^2 t^nu) psi_n(x) / ||psi_n||^2`.
    pub fn reduced_value(&self, x: f64, t: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) || !(t >= 0.0) {
            return Err(Error::domain(format!("series solution needs x in (0, 1] and t >= 0 (x={x}, t={t})")));
        }
        let s = &self.system;
        let mut acc = 0.0;
        for n in 0..s.zeros.len() {
            acc += s.coefficients[n] * self.time_factor(n, t)? * s.psi(n, x)? / s.norms[n];
        }
        Ok(acc)
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.system.weight(x) * self.reduced_value(x, t)?)
    }

    /// Size of the last retained term at time `t`, a proxy for the truncation error.
    pub fn tail_estimate(&self, t: f64) -> Result<f64> {
        let n = self.system.zeros.len() - 1;
        Ok((self.system.coefficients[n] * self.time_factor(n, t)? / self.system.norms[n].sqrt()).abs())
    }

    /// Weighted-L2 distance between `m_0 / w` and the truncated series at `t = 0`,
    /// from Parseval's identity.
    pub fn initial_l2_error(&self) -> Result<f64> {
        let s = &self.system;
        let g = s.gamma;
        let mut err = None;
        // int_0^1 (m_0 / w)^2 w dx = int_0^1 m_0^2 / w dx, in r = x^(gamma/2)
        let total = integrate_with_breaks(
            |r| {
                if r <= 0.0 {
                    return 0.0;
                }
                let x = r.powf(2.0 / g);
                match s.datum_value(&self.spec.datum, x) {
                    Ok(m0) => m0 * m0 / s.weight(x) * (2.0 / g) * r.powf(2.0 / g - 1.0),
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            1.0,
            &[0.5],
            Tolerance::new(1e-15, 1e-13),
        );
        if let Some(e) = err {
            return Err(e);
        }
        let total = total.check("initial_l2_error")?;
        let captured: f64 = s.coefficients.iter().zip(&s.norms).map(|(c, n)| c * c / n).sum();
        Ok((total - captured).max(0.0).sqrt())
    }

    /// `G* m` at `(x, t)` by centred second-order differences of the flux form, step `h`.
    pub fn generator_fd(&self, x: f64, t: f64, h: f64) -> Result<f64> {
        let (g, mu) = (self.spec.gamma, self.spec.mu);
        let p = g * mu - g + 1.0;
        let flux = |y: f64| -> Result<f64> {
            let d = (self.reduced_value(y + 0.5 * h, t)? - self.reduced_value(y - 0.5 * h, t)?) / h;
            Ok(y.powf(p) * d)
        };
        Ok((flux(x + 0.5 * h)? - flux(x - 0.5 * h)?) / (h * g * g))
    }
}

/// Series value at `(x, t)`; builds (and discards) the eigen system.
pub fn sturm_liouville_solve(spec: BVPSpec, x: f64, t: f64) -> Result<f64> {
    BvpSolution::new(spec)?.value(x, t)
}

/// Both sides of the time-fractional equation at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdeResidual {
    /// Caputo derivative in time, by quadrature of the series as a function of `t`.
    pub caputo: f64,
    /// `G* m` by finite differences.
    pub generator: f64,
    pub residual: f64,
}

pub fn pde_residual(sol: &BvpSolution, x: f64, t: f64) -> Result<PdeResidual> {
    let f = |s: f64| sol.value(x, s).unwrap_or(f64::NAN);
    let cap = caputo(sol.spec.nu, Operand::Func(&f), t)?;
    if !cap.is_finite() {
        return Err(Error::nonconv("pde_residual", "series evaluation failed inside the Caputo quadrature"));
    }
    let gen = sol.generator_fd(x, t, 1e-4)?;
    Ok(PdeResidual { caputo: cap, generator: gen, residual: (cap - gen).abs() })
}

/// Eigenrelation `G psi = -(k/2)^2 psi` checked by finite differences: relative residual
/// for mode `n` at `x`.
pub fn eigen_relation_residual(sys: &EigenSystem, n: usize, x: f64) -> Result<f64> {
    let (g, mu) = (sys.gamma, sys.mu);
    let p = g * mu - g + 1.0;
    let h = 1e-4 * x.min(1.0);
    let flux = |y: f64| -> Result<f64> { Ok(y.powf(p) * (sys.psi(n, y + 0.5 * h)? - sys.psi(n, y - 0.5 * h)?) / h) };
    let lhs = (flux(x + 0.5 * h)? - flux(x - 0.5 * h)?) / (h * g * g * sys.weight(x));
    let rhs = -0.25 * sys.zeros[n] * sys.zeros[n] * sys.psi(n, x)?;
    Ok(((lhs - rhs) / rhs).abs())
}

// ---------------------------------------------------------------------------------------
// Fractional power of the adjoint generator

/// `A f = -D^nu_{0+}( x^(mu-1+nu) D^nu_{0-}( x^(1-mu) f ) )` for `gamma = 1`.
///
/// The inner right derivative is tabulated once on a geometric grid; the outer left
/// derivative acts on that table.
pub struct OperatorA {
    mu: f64,
    nu: f64,
    inner: GridFunction,
}

impl OperatorA {
    /// `f` must decay fast enough for the right-sided derivative to exist.
    pub fn new(mu: f64, nu: f64, f: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Self> {
        check_index("nu", nu)?;
        if !(mu > 0.0) {
            return Err(Error::domain(format!("mu must be positive, got {mu}")));
        }
        let g1 = move |s: f64| s.powf(1.0 - mu) * f(s);
        // extend the table until the inner function is negligible
        let mut hi: f64 = 8.0;
        let peak = (0..40).map(|k| g1(0.05 * (k + 1) as f64).abs()).fold(0.0, f64::max);
        while hi < 1e6 && g1(hi).abs() > 1e-17 * peak.max(1e-300) {
            hi *= 2.0;
        }
        let nodes = geometric_nodes(1e-7, hi, 600);
        let mut values = Vec::with_capacity(nodes.len());
        for &s in &nodes {
            values.push(s.powf(mu - 1.0 + nu) * rl_right(nu, Operand::Func(&g1), s)?);
        }
        let n = nodes.len();
        let (a, b) = (values[n - 2].abs(), values[n - 1].abs());
        let decay = if a > 0.0 && b > 0.0 { ((b / a).ln() / (nodes[n - 1] / nodes[n - 2]).ln()).min(-2.0) } else { -60.0 };
        let inner = GridFunction::new(nodes, values, decay)?.with_head(Head::Power);
        Ok(OperatorA { mu, nu, inner })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        let top = self.inner.x_max();
        if x <= top {
            return Ok(-rl_left(self.nu, &self.inner, x)?);
        }
        // past the table the inner function is negligible, so the kernel is smooth:
        // D^nu q(x) = int_0^X q(s) (x - s)^(-nu-1) ds / Gamma(-nu)
        let nodes = self.inner.nodes();
        let breaks: Vec<f64> = nodes.iter().step_by(50).copied().collect();
        let q = integrate_with_breaks(
            |s| self.inner.value(s) * (x - s).powf(-self.nu - 1.0),
            0.0,
            top,
            &breaks,
            Tolerance::new(1e-16, 1e-11),
        )
        .check("operator_a tail")?;
        Ok(-q * rgamma(-self.nu))
    }
}

/// One-shot [`OperatorA`] evaluation.
pub fn operator_a_apply(mu: f64, nu: f64, f: &(dyn Fn(f64) -> f64 + Sync), x: f64) -> Result<f64> {
    OperatorA::new(mu, nu, f)?.apply(x)
}

/// `G* f = d/dx (x^mu d/dx (x^(1-mu) f))` (`gamma = 1`) by centred differences.
pub fn adjoint_generator_fd(mu: f64, f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let inner = |y: f64| y.powf(1.0 - mu) * f(y);
    let flux = |y: f64| y.powf(mu) * (inner(y + 0.5 * h) - inner(y - 0.5 * h)) / h;
    (flux(x + 0.5 * h) - flux(x - 0.5 * h)) / h
}

/// Collected multiplier `-Gamma(1-eta+nu) Gamma(eta+mu-1) / (Gamma(1-eta) Gamma(eta+mu-1-nu))`
/// in `M[A f](eta) = m(eta) M[f](eta - nu)`.
pub fn operator_a_multiplier(mu: f64, nu: f64, eta: f64) -> Result<f64> {
    Ok(-gamma_fn(1.0 - eta + nu)? * rgamma(1.0 - eta) * gamma_fn(eta + mu - 1.0)? * rgamma(eta + mu - 1.0 - nu))
}

/// Gap between the collected multiplier and the product of the three elementary rules
/// (power weight, right derivative, power weight, left derivative).
pub fn operator_a_mellin_residual(mu: f64, nu: f64, eta: f64) -> Result<f64> {
    // M[x^c g](s) = M[g](s + c): the right rule is applied at s = eta - nu + (mu - 1 + nu)
    let chained = -mellin_multiplier(Side::Left, nu, eta)? * mellin_multiplier(Side::Right, nu, eta + mu - 1.0)?;
    Ok((chained - operator_a_multiplier(mu, nu, eta)?).abs())
}

/// Numerical Mellin transform of `A g^1_{mu_f}(., 1)` against the multiplier rule:
/// returns `(quadrature, rule)`.
pub fn operator_a_mellin_gap(mu: f64, nu: f64, mu_f: f64, eta: f64) -> Result<(f64, f64)> {
    let law = GGLaw::new(1.0, mu_f)?;
    let f = move |x: f64| gg_density(law, x, 1.0, false).unwrap_or(0.0);
    let op = OperatorA::new(mu, nu, &f)?;
    let quad = mellin_numeric(|x| op.apply(x), eta, None, Tolerance::new(1e-12, 1e-8))?;
    let rule = operator_a_multiplier(mu, nu, eta)? * gg_mellin(law, 1.0, eta - nu, false)?;
    Ok((quad, rule))
}

// ---------------------------------------------------------------------------------------
// The density g^{nu,beta}_mu

/// Evaluation route for [`g_nu_beta_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GRoute {
    /// `int g^1_mu(x, s) f_{nu,beta}(s, t) ds` with the mixing density itself a quadrature.
    DoubleIntegral,
    /// H-function representation, scaled to the unit time by self-similarity.
    Foxh,
    /// Contour inversion of the closed-form Mellin transform.
    MellinInversion,
}

impl FromStr for GRoute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double_integral" => Ok(GRoute::DoubleIntegral),
            "foxh" => Ok(GRoute::Foxh),
            "mellin_inversion" => Ok(GRoute::MellinInversion),
            _ => Err(Error::Parse(format!("unknown route '{s}' (double_integral|foxh|mellin_inversion)"))),
        }
    }
}

impl GRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            GRoute::DoubleIntegral => "double_integral",
            GRoute::Foxh => "foxh",
            GRoute::MellinInversion => "mellin_inversion",
        }
    }
}

fn check_g_params(mu: f64, nu: f64, beta: f64) -> Result<()> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mu must be positive, got {mu}")));
    }
    check_index("nu", nu)?;
    check_index("beta", beta)
}

/// Mellin strip of `g^{nu,beta}_mu(., t)`: `(max(1 - mu, 1 - nu [beta < 1]), 1 + nu)`, unbounded above at `nu = 1`.
pub fn g_nu_beta_strip(mu: f64, nu: f64, beta: f64) -> MellinStrip {
    let mut lower = 1.0 - mu;
    if beta < 1.0 {
        lower = lower.max(1.0 - nu);
    }
    let upper = if nu == 1.0 { f64::INFINITY } else { 1.0 + nu };
    MellinStrip { lower, upper }
}

/// `ln` of the unit-time Mellin transform at real `eta` (all Gamma arguments positive in the strip).
fn g_ln_mellin_real(mu: f64, nu: f64, beta: f64, eta: f64) -> Result<f64> {
    let q = eta - 1.0;
    let lg = |x: f64| ln_gamma(x).map(|v| v.0);
    let mut acc = lg(eta + mu - 1.0)? - lg(mu)?;
    if nu < 1.0 {
        // Gamma(1 - q/nu) / Gamma(1 - q), both arguments positive inside the strip
        acc += lg(1.0 - q / nu)?;
        let g = gamma_fn(1.0 - q)?;
        if g <= 0.0 {
            return Err(Error::domain(format!("eta = {eta} outside the positive part of the strip")));
        }
        acc -= g.ln();
    }
    if beta < 1.0 {
        acc += lg(1.0 + q / nu)? - lg(1.0 + beta * q / nu)?;
    }
    Ok(acc)
}

/// `M[g^{nu,beta}_mu(., t)](eta) = t^(beta (eta-1)/nu) Gamma(eta+mu-1)/Gamma(mu)
/// Gamma(1 - (eta-1)/nu) Gamma(1 + (eta-1)/nu) / (Gamma(2 - eta) Gamma(1 + beta (eta-1)/nu))`.
pub fn g_nu_beta_mellin(mu: f64, nu: f64, beta: f64, t: f64, eta: f64) -> Result<f64> {
    check_g_params(mu, nu, beta)?;
    let strip = g_nu_beta_strip(mu, nu, beta);
    if !strip.contains(eta) {
        return Err(Error::domain(format!("eta = {eta} outside the strip ({}, {})", strip.lower, strip.upper)));
    }
    let q = eta - 1.0;
    Ok((g_ln_mellin_real(mu, nu, beta, eta)? + beta * q / nu * t.ln()).exp())
}

/// Complex unit-time Mellin transform, used by the inversion route.
fn g_mellin_complex(mu: f64, nu: f64, beta: f64, eta: Complex64) -> Result<Complex64> {
    let q = eta - 1.0;
    let mut v = gamma_complex(eta + mu - 1.0)? / gamma_fn(mu)?;
    if nu < 1.0 {
        v *= gamma_complex(1.0 - q / nu)? / gamma_complex(1.0 - q)?;
    }
    if beta < 1.0 {
        v *= gamma_complex(1.0 + q / nu)? / gamma_complex(1.0 + beta * q / nu)?;
    }
    Ok(v)
}

/// H-function with `G^{nu,beta}_mu(x) = H(x) / x` (the coefficient `1/nu` included):
/// `H^{2,1}_{3,3}` with upper `(1, 1/nu), (1, beta/nu), (mu, 0)` and lower `(mu, 1), (1, 1/nu), (1, 1)`.
pub fn g_nu_beta_fox(mu: f64, nu: f64, beta: f64) -> Result<FoxH> {
    check_g_params(mu, nu, beta)?;
    FoxH::new(
        2,
        1,
        vec![(1.0, 1.0 / nu), (1.0, beta / nu), (mu, 0.0)],
        vec![(mu, 1.0), (1.0, 1.0 / nu), (1.0, 1.0)],
        None,
    )?
    .with_coefficient(1.0 / nu)
}

/// Density of `G_mu` run at the clock `F^{nu,beta}_t = h^nu(L^beta_t)`.
pub fn g_nu_beta_density(mu: f64, nu: f64, beta: f64, x: f64, t: f64, route: GRoute) -> Result<f64> {
    check_g_params(mu, nu, beta)?;
    check_xt(x, t)?;
    let law = GGLaw::new(1.0, mu)?;
    match route {
        GRoute::DoubleIntegral => {
            if nu == 1.0 && beta == 1.0 {
                return gg_density(law, x, t, false);
            }
            let mix = |s: f64| -> Result<f64> {
                match (nu == 1.0, beta == 1.0) {
                    (true, _) => l_density(beta, s, t, best_method(beta)),
                    (_, true) => h_density(nu, s, t, best_method(nu)),
                    _ => f_nu_beta(nu, beta, s, t),
                }
            };
            log_scale_integral(
                |s| {
                    let g = gg_density(law, x, s, false)?;
                    if g == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(g * mix(s)?)
                },
                &[x, t.powf(beta / nu)],
                Tolerance::new(1e-13, 1e-9),
                "g_nu_beta double integral",
            )
        }
        GRoute::Foxh => {
            let s = t.powf(-beta / nu);
            let y = x * s;
            Ok(s * g_nu_beta_fox(mu, nu, beta)?.eval(y)? / y)
        }
        GRoute::MellinInversion => {
            let s = t.powf(-beta / nu);
            let y = x * s;
            let strip = g_nu_beta_strip(mu, nu, beta);
            let c = saddle_abscissa(|e| g_ln_mellin_real(mu, nu, beta, e).unwrap_or(f64::INFINITY), strip, y);
            Ok(s * inverse_mellin(|e| g_mellin_complex(mu, nu, beta, e), y, c)?)
        }
    }
}

/// `E[X^r]` for `X ~ g^{nu,beta}_mu(., t)`, from the Mellin transform at `1 + r`.
pub fn g_nu_beta_moment(mu: f64, nu: f64, beta: f64, r: f64, t: f64) -> Result<f64> {
    let strip = g_nu_beta_strip(mu, nu, beta);
    if !strip.contains(1.0 + r) {
        return Err(Error::InfiniteMoment(format!("order {r} outside the Mellin strip ({}, {})", strip.lower - 1.0, strip.upper - 1.0)));
    }
    g_nu_beta_mellin(mu, nu, beta, t, 1.0 + r)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::domain("slope fit needs at least two positive (x, y) pairs"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

// ---------------------------------------------------------------------------------------
// Mellin identities in time

/// Gap in `D^nu_t M[g^1_mu(., t)](eta) = Gamma(eta)/Gamma(eta-nu) Gamma(eta+mu-1)/Gamma(eta+mu-1-nu)
/// M[g^1_mu(., t)](eta - nu)`, with the left side from the power-law rule in `t`.
pub fn time_mellin_residual(mu: f64, nu: f64, eta: f64, t: f64) -> Result<f64> {
    let law = GGLaw::new(1.0, mu)?;
    check_index("nu", nu)?;
    if !(eta - nu > 1.0 - mu) {
        return Err(Error::domain(format!("eta - nu = {} outside the strip ({}, inf)", eta - nu, 1.0 - mu)));
    }
    // M[g(., t)](eta) = c t^(eta - 1)
    let c = gg_mellin(law, 1.0, eta, false)?;
    let lhs = rl_left(nu, PowerLaw::new(c, eta), t)?;
    let rhs = time_multiplier(mu, nu, eta)? * gg_mellin(law, t, eta - nu, false)?;
    Ok((lhs - rhs).abs())
}

fn time_multiplier(mu: f64, nu: f64, eta: f64) -> Result<f64> {
    Ok(gamma_fn(eta)? * rgamma(eta - nu) * gamma_fn(eta + mu - 1.0)? * rgamma(eta + mu - 1.0 - nu))
}

/// The same identity with both Mellin transforms by quadrature and the time derivative
/// by fractional quadrature: returns `(left, right)`.
pub fn time_mellin_quadrature(mu: f64, nu: f64, eta: f64, t: f64) -> Result<(f64, f64)> {
    let law = GGLaw::new(1.0, mu)?;
    let tol = Tolerance::new(1e-13, 1e-11);
    let m = move |s: f64| mellin_numeric(|x| gg_density(law, x, s, false), eta, None, tol).unwrap_or(f64::NAN);
    let lhs = rl_left(nu, Operand::Func(&m), t)?;
    let rhs = time_multiplier(mu, nu, eta)? * mellin_numeric(|x| gg_density(law, x, t, false), eta - nu, None, tol)?;
    if !lhs.is_finite() {
        return Err(Error::nonconv("time_mellin_quadrature", "inner Mellin transform failed"));
    }
    Ok((lhs, rhs))
}

/// Double Laplace transform of `f_{nu,beta}` by quadrature against
/// `lambda^(beta-1) / (lambda^beta + xi^nu)`: returns `(quadrature, closed)`.
///
/// Fubini reduces it to `int_0^inf [int e^{-xi x} h_nu(x, s) dx] [int e^{-lambda t} l_beta(s, t) dt] ds`.
pub fn double_laplace(nu: f64, beta: f64, xi: f64, lambda: f64) -> Result<(f64, f64)> {
    check_index("nu", nu)?;
    check_index("beta", beta)?;
    if !(xi > 0.0) || !(lambda > 0.0) {
        return Err(Error::domain("transform variables must be positive"));
    }
    let tol = Tolerance::new(1e-13, 1e-10);
    let space = |s: f64| -> Result<f64> {
        if nu == 1.0 {
            return Ok((-xi * s).exp());
        }
        let m = best_method(nu);
        log_scale_integral(|x| Ok((-xi * x).exp() * h_density(nu, x, s, m)?), &[s.powf(1.0 / nu), 1.0 / xi], tol, "double_laplace space")
    };
    let closed = lambda.powf(beta - 1.0) / (lambda.powf(beta) + xi.powf(nu));
    let quad = if beta == 1.0 {
        log_scale_integral(|s| Ok((-lambda * s).exp() * space(s)?), &[1.0 / lambda], tol, "double_laplace")?
    } else {
        let m = best_method(beta);
        let time = |s: f64| -> Result<f64> {
            log_scale_integral(|t| Ok((-lambda * t).exp() * l_density(beta, s, t, m)?), &[s.powf(1.0 / beta), 1.0 / lambda], tol, "double_laplace time")
        };
        log_scale_integral(
            |s| {
                let a = time(s)?;
                if a == 0.0 {
                    return Ok(0.0);
                }
                Ok(a * space(s)?)
            },
            &[1.0, lambda.powf(-beta)],
            tol,
            "double_laplace",
        )?
    };
    Ok((quad, closed))
}
