//! Riemann–Liouville, Weyl-type right-sided and Caputo fractional operators on the
//! half-line, with the fractional integral
//!
//! ```text
//! (I^{1-a}_{0+} f)(x) = 1/Gamma(1-a) int_0^x (x-s)^{-a} f(s) ds
//! (I^{1-a}_{0-} f)(x) = 1/Gamma(1-a) int_x^inf (s-x)^{-a} f(s) ds
//! ```
//!
//! and `D^a_{0+} f = d/dx I^{1-a}_{0+} f`, `D^a_{0-} f = -d/dx I^{1-a}_{0-} f`.
//! Power laws use the closed-form rules; sampled functions and closures use quadrature
//! with the kernel singularity removed by substitution and the outer derivative taken
//! by a Richardson-extrapolated centred difference.

use crate::error::{Error, Result};
use crate::specfun::quad::{integrate, integrate_with_breaks, weakly_singular, Tolerance};
use crate::specfun::{gamma_fn, rgamma};

/// Which end of the half-line the operator integrates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `c x^(beta - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn new(coefficient: f64, exponent: f64) -> Self {
        PowerLaw { coefficient, exponent }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coefficient * x.powf(self.exponent - 1.0)
    }
}

/// Behaviour assumed between 0 and the first node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Head {
    /// Straight line through the first two nodes.
    Linear,
    /// `A s^p` through the first two nodes.
    Power,
}

/// Samples of a function on `(0, X_max]`, interpolated by piecewise cubic Hermite
/// polynomials and continued as `f(X_max) (x/X_max)^decay` beyond the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    extrapolation_decay: f64,
    head: Head,
}

/// `n` geometrically spaced points from `lo` to `hi`.
pub fn geometric_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo * (r * i as f64).exp() }).collect()
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, extrapolation_decay: f64) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::domain("grid needs at least two nodes and one value per node"));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid nodes must be positive and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) || !extrapolation_decay.is_finite() || nodes.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid values and decay exponent must be finite"));
        }
        let slopes = hermite_slopes(&nodes, &values);
        Ok(GridFunction { nodes, values, slopes, extrapolation_decay, head: Head::Linear })
    }

    /// Samples `f` at `nodes`.
    pub fn from_fn<F: Fn(f64) -> f64>(nodes: Vec<f64>, f: F, extrapolation_decay: f64) -> Result<Self> {
        let values = nodes.iter().map(|&x| f(x)).collect();
        GridFunction::new(nodes, values, extrapolation_decay)
    }

    pub fn with_head(mut self, head: Head) -> Self {
        self.head = head;
        self
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn extrapolation_decay(&self) -> f64 {
        self.extrapolation_decay
    }
    pub fn x_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    fn head_power(&self) -> Option<(f64, f64)> {
        let (x0, x1, v0, v1) = (self.nodes[0], self.nodes[1], self.values[0], self.values[1]);
        if v0 == 0.0 || v1 == 0.0 || v0.signum() != v1.signum() {
            return None;
        }
        let p = (v1 / v0).ln() / (x1 / x0).ln();
        Some((v0 / x0.powf(p), p))
    }

    fn head_value(&self, x: f64, deriv: bool) -> f64 {
        let (x0, x1, v0, v1) = (self.nodes[0], self.nodes[1], self.values[0], self.values[1]);
        if self.head == Head::Power {
            if let Some((a, p)) = self.head_power() {
                return if deriv { a * p * x.powf(p - 1.0) } else { a * x.powf(p) };
            }
        }
        let slope = (v1 - v0) / (x1 - x0);
        if deriv { slope } else { v0 + slope * (x - x0) }
    }

    /// Limit of the interpolant at `0+`; infinite for a singular power head.
    pub fn value_at_origin(&self) -> f64 {
        if self.head == Head::Power {
            if let Some((a, p)) = self.head_power() {
                return if p > 0.0 {
                    0.0
                } else if p == 0.0 {
                    a
                } else {
                    f64::INFINITY * a.signum()
                };
            }
        }
        self.head_value(0.0, false)
    }

    fn eval(&self, x: f64, deriv: bool) -> f64 {
        let n = self.nodes.len();
        if x < self.nodes[0] {
            return self.head_value(x, deriv);
        }
        let xm = self.nodes[n - 1];
        if x > xm {
            let q = self.extrapolation_decay;
            let v = self.values[n - 1] * (x / xm).powf(q);
            return if deriv { q * v / x } else { v };
        }
        let i = self.nodes.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let (xa, xb) = (self.nodes[i], self.nodes[i + 1]);
        let h = xb - xa;
        let t = (x - xa) / h;
        let (ya, yb, ma, mb) = (self.values[i], self.values[i + 1], self.slopes[i] * h, self.slopes[i + 1] * h);
        if deriv {
            let t2 = t * t;
            ((6.0 * t2 - 6.0 * t) * ya + (3.0 * t2 - 4.0 * t + 1.0) * ma + (-6.0 * t2 + 6.0 * t) * yb + (3.0 * t2 - 2.0 * t) * mb) / h
        } else {
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * ya + (t3 - 2.0 * t2 + t) * ma + (-2.0 * t3 + 3.0 * t2) * yb + (t3 - t2) * mb
        }
    }

    /// Interpolated value.
    pub fn value(&self, x: f64) -> f64 {
        self.eval(x, false)
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> f64 {
        self.eval(x, true)
    }

    /// Width of the grid cell holding `x`.
    fn cell_width(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|&v| v < x).clamp(1, n - 1);
        self.nodes[i] - self.nodes[i - 1]
    }

    fn nodes_between(&self, a: f64, b: f64) -> Vec<f64> {
        self.nodes.iter().copied().filter(|&v| v > a && v < b).collect()
    }
}

/// Slope estimates for the Hermite interpolant: derivative of the Lagrange polynomial
/// through five neighbouring nodes (three for short grids), which keeps the interpolant
/// fourth-order accurate on smooth data.
fn hermite_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![d, d];
    }
    let width = if n >= 5 { 5 } else { 3 };
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let idx = start..start + width;
            let xi = x[i];
            let mut slope = 0.0;
            for j in idx.clone() {
                let weight = if j == i {
                    idx.clone().filter(|&k| k != i).map(|k| 1.0 / (xi - x[k])).sum::<f64>()
                } else {
                    let num: f64 = idx.clone().filter(|&k| k != i && k != j).map(|k| xi - x[k]).product();
                    let den: f64 = idx.clone().filter(|&k| k != j).map(|k| x[j] - x[k]).product();
                    num / den
                };
                slope += weight * y[j];
            }
            slope
        })
        .collect()
}

/// Argument of the fractional operators.
#[derive(Clone, Copy)]
pub enum Operand<'a> {
    Power(PowerLaw),
    Grid(&'a GridFunction),
    /// A function defined on the whole half-line; right-sided operators integrate it to infinity.
    Func(&'a (dyn Fn(f64) -> f64 + Sync)),
}

impl From<PowerLaw> for Operand<'_> {
    fn from(p: PowerLaw) -> Self {
        Operand::Power(p)
    }
}

impl<'a> From<&'a GridFunction> for Operand<'a> {
    fn from(g: &'a GridFunction) -> Self {
        Operand::Grid(g)
    }
}

const INNER_TOL: Tolerance = Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 4000 };

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("fractional order must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

fn check_point(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("evaluation point must be positive, got {x}")));
    }
    Ok(())
}

impl Operand<'_> {
    fn value(&self, x: f64) -> f64 {
        match self {
            Operand::Power(p) => p.value(x),
            Operand::Grid(g) => g.value(x),
            Operand::Func(f) => f(x),
        }
    }

    fn ordinary_derivative(&self, x: f64) -> f64 {
        match self {
            Operand::Power(p) => p.coefficient * (p.exponent - 1.0) * x.powf(p.exponent - 2.0),
            Operand::Grid(g) => g.derivative(x),
            Operand::Func(f) => richardson(f, x, 1e-3 * x),
        }
    }

    fn covers(&self, x: f64) -> Result<()> {
        if let Operand::Grid(g) = self {
            if x > g.x_max() * (1.0 + 1e-14) {
                return Err(Error::domain(format!("x = {x} beyond grid coverage {}", g.x_max())));
            }
        }
        Ok(())
    }
}

/// Centred difference with one Richardson step: `(4 D(h/2) - D(h)) / 3`.
fn richardson<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let h2 = 0.5 * h;
    let d2 = (f(x + h2) - f(x - h2)) / (2.0 * h2);
    (4.0 * d2 - d1) / 3.0
}

fn richardson_fallible<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    let d1 = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let h2 = 0.5 * h;
    let d2 = (f(x + h2)? - f(x - h2)?) / (2.0 * h2);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Powers of ten strictly inside `(a, b)`, so adaptive rules see every scale of a long range.
fn decades(a: f64, b: f64) -> Vec<f64> {
    (-12..=12).map(|k| 10f64.powi(k)).filter(|&v| v > a && v < b).collect()
}

/// `int_0^x (x-s)^(-a) g(s) ds` for a sampled or closure integrand `g`.
fn left_kernel_integral<G: Fn(f64) -> f64>(alpha: f64, g: &G, grid: Option<&GridFunction>, x: f64) -> Result<f64> {
    let cut = match grid {
        Some(gr) => {
            let below = gr.nodes.partition_point(|&v| v < x);
            let mut c = if below == 0 { x } else { x - gr.nodes[below - 1] };
            if c < 0.1 * gr.cell_width(x) && below >= 2 {
                c = x - gr.nodes[below - 2];
            }
            c.min(0.5 * x)
        }
        None => 0.5 * x,
    };
    let near = weakly_singular(alpha, |d| g(x - d), cut, cut, INNER_TOL).check("fractional integral (singular part)")?;
    let breaks = grid.map(|gr| gr.nodes_between(0.0, x - cut)).unwrap_or_else(|| decades(0.0, x - cut));
    let far = integrate_with_breaks(
        |s| if s <= 0.0 { 0.0 } else { (x - s).powf(-alpha) * g(s) },
        0.0,
        x - cut,
        &breaks,
        INNER_TOL,
    )
    .check("fractional integral (regular part)")?;
    Ok(near + far)
}

/// `int_x^upper (s-x)^(-a) g(s) ds`; `upper` may be infinite.
fn right_kernel_integral<G: Fn(f64) -> f64>(alpha: f64, g: &G, grid: Option<&GridFunction>, x: f64, upper: f64) -> Result<f64> {
    if upper <= x {
        return Ok(0.0);
    }
    let span = upper - x;
    let cut = match grid {
        Some(gr) => {
            let above = gr.nodes.partition_point(|&v| v <= x);
            let mut c = if above < gr.nodes.len() { gr.nodes[above] - x } else { x };
            if c < 0.1 * gr.cell_width(x) && above + 1 < gr.nodes.len() {
                c = gr.nodes[above + 1] - x;
            }
            c
        }
        None => x.max(1.0),
    }
    .min(if span.is_finite() { 0.5 * span } else { f64::INFINITY });
    if !span.is_finite() && grid.is_none() {
        let scale = x.max(1.0);
        return weakly_singular(alpha, |d| g(x + d), f64::INFINITY, scale, INNER_TOL).check("fractional integral");
    }
    let near = weakly_singular(alpha, |d| g(x + d), cut, cut, INNER_TOL).check("fractional integral (singular part)")?;
    let breaks = grid.map(|gr| gr.nodes_between(x + cut, upper)).unwrap_or_else(|| decades(x + cut, upper));
    let far = integrate_with_breaks(|s| (s - x).powf(-alpha) * g(s), x + cut, upper, &breaks, INNER_TOL)
        .check("fractional integral (regular part)")?;
    Ok(near + far)
}

/// `int_0^len q(d) d^(-a-1) dd` for a difference `q(d) = f(x) - f(x -+ d)` that vanishes
/// linearly at 0.
///
/// Closures are differentiated through this Marchaud form, which needs no outer
/// finite difference. Below `delta` the quotient `q(d)/d` is replaced by its linear
/// extrapolation from `delta` and `2 delta`, where rounding in `q` would dominate.
fn marchaud_integral(alpha: f64, q: &dyn Fn(f64) -> f64, len: f64, scale: f64) -> Result<f64> {
    let delta = (1e-6 * scale).min(0.01 * len);
    let g1 = q(delta) / delta;
    let g2 = q(2.0 * delta) / (2.0 * delta);
    let b = (g2 - g1) / delta;
    let a = g1 - b * delta;
    let moment = |c: f64, p: f64| if c == 0.0 { 0.0 } else { c * delta.powf(p) / p };
    let head = moment(a, 1.0 - alpha) + moment(b, 2.0 - alpha);
    let mut breaks = decades(delta, len);
    breaks.insert(0, 2.0 * delta);
    if len.is_finite() {
        // resolve the far end, where the difference samples f near the origin
        breaks.push(0.5 * len);
        breaks.extend(decades(0.0, len).into_iter().map(|p| len - p));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks.retain(|&b| b > delta && b < len);
    let weighted = |d: f64| {
        let w = d.powf(-alpha - 1.0);
        if w == 0.0 {
            0.0
        } else if w.is_infinite() {
            q(d) / d * d.powf(-alpha)
        } else {
            q(d) * w
        }
    };
    let tail = integrate_with_breaks(weighted, delta, len, &breaks, Tolerance::new(1e-14, 1e-11))
        .check("fractional derivative (Marchaud form)")?;
    Ok(head + tail)
}

/// `int_X^inf (s-x)^(-e) f_X (s/X)^q ds` for the grid tail.
fn tail_integral(e: f64, gr: &GridFunction, x: f64) -> Result<f64> {
    let xm = gr.x_max();
    let fx = *gr.values.last().unwrap();
    let q = gr.extrapolation_decay;
    integrate(|s| (s - x).powf(-e) * fx * (s / xm).powf(q), xm, f64::INFINITY, INNER_TOL).check("fractional tail")
}

/// Left Riemann–Liouville derivative `d/dx I^{1-a}_{0+} f`.
pub fn rl_left<'a, O: Into<Operand<'a>>>(alpha: f64, f: O, x: f64) -> Result<f64> {
    check_order(alpha)?;
    check_point(x)?;
    let f = f.into();
    f.covers(x)?;
    if alpha == 1.0 {
        return Ok(f.ordinary_derivative(x));
    }
    match f {
        Operand::Power(p) => {
            if !(p.exponent > 0.0) {
                return Err(Error::domain("left operators need exponent > 0 for integrability at 0"));
            }
            Ok(p.coefficient * gamma_fn(p.exponent)? * rgamma(p.exponent - alpha) * x.powf(p.exponent - alpha - 1.0))
        }
        Operand::Grid(g) => {
            let h = 0.1 * g.cell_width(x).min(0.25 * x);
            let upper = g.x_max();
            let h = if x + h > upper { (upper - x).max(1e-3 * h) } else { h };
            let val = |y: f64| g.value(y);
            let d = richardson_fallible(|y| left_kernel_integral(alpha, &val, Some(g), y), x, h)?;
            Ok(d / gamma_fn(1.0 - alpha)?)
        }
        Operand::Func(func) => {
            let fx = func(x);
            let inner = marchaud_integral(alpha, &|d| fx - func(x - d), x, x)?;
            Ok((fx * x.powf(-alpha) + alpha * inner) / gamma_fn(1.0 - alpha)?)
        }
    }
}

/// Right-sided derivative `-d/dx I^{1-a}_{0-} f`.
pub fn rl_right<'a, O: Into<Operand<'a>>>(alpha: f64, f: O, x: f64) -> Result<f64> {
    check_order(alpha)?;
    check_point(x)?;
    let f = f.into();
    if alpha == 1.0 {
        return Ok(-f.ordinary_derivative(x));
    }
    match f {
        Operand::Power(p) => power_right_derivative(alpha, p, x),
        Operand::Grid(g) => {
            let q = g.extrapolation_decay;
            if !(q < -alpha) {
                return Err(Error::domain(format!(
                    "divergent tail: extrapolation_decay {q} must be below -alpha = {}",
                    -alpha
                )));
            }
            let xm = g.x_max();
            let fx = *g.values.last().unwrap();
            if x >= xm {
                return power_right_derivative(alpha, PowerLaw::new(fx * xm.powf(-q), q + 1.0), x);
            }
            let h = (0.1 * g.cell_width(x).min(0.25 * x)).min(0.25 * (xm - x));
            let val = |y: f64| g.value(y);
            let d_fin = richardson_fallible(|y| right_kernel_integral(alpha, &val, Some(g), y, xm), x, h)?;
            // derivative of the tail piece, taken under the integral sign
            let d_tail = alpha * tail_integral(alpha + 1.0, g, x)?;
            Ok(-(d_fin + d_tail) / gamma_fn(1.0 - alpha)?)
        }
        Operand::Func(func) => {
            let fx = func(x);
            let inner = marchaud_integral(alpha, &|d| fx - func(x + d), f64::INFINITY, x.max(1.0))?;
            Ok(alpha * inner / gamma_fn(1.0 - alpha)?)
        }
    }
}

fn power_right_derivative(alpha: f64, p: PowerLaw, x: f64) -> Result<f64> {
    let b = p.exponent;
    if !(b < alpha) {
        return Err(Error::domain(format!("divergent tail: power exponent {b} must be below alpha = {alpha}")));
    }
    // D^a_{0-} s^{-r} = Gamma(r + a)/Gamma(r) x^{-r-a} with r = 1 - b
    Ok(p.coefficient * gamma_fn(1.0 - b + alpha)? * rgamma(1.0 - b) * x.powf(b - 1.0 - alpha))
}

/// Factor `m(eta)` in the Mellin rule `M[D^a f](eta) = m(eta) M[f](eta - a)`:
/// `Gamma(1 + a - eta)/Gamma(1 - eta)` for the left derivative, `Gamma(eta)/Gamma(eta - a)`
/// for the right one.
pub fn mellin_multiplier(side: Side, alpha: f64, eta: f64) -> Result<f64> {
    check_order(alpha)?;
    match side {
        Side::Left => Ok(gamma_fn(1.0 + alpha - eta)? * rgamma(1.0 - eta)),
        Side::Right => Ok(gamma_fn(eta)? * rgamma(eta - alpha)),
    }
}

/// Caputo derivative `1/Gamma(1-a) int_0^t (t-s)^{-a} f'(s) ds`.
pub fn caputo<'a, O: Into<Operand<'a>>>(alpha: f64, f: O, t: f64) -> Result<f64> {
    check_order(alpha)?;
    check_point(t)?;
    let f = f.into();
    f.covers(t)?;
    if alpha == 1.0 {
        return Ok(f.ordinary_derivative(t));
    }
    match f {
        Operand::Power(p) => {
            let b = p.exponent;
            if b == 1.0 {
                Ok(0.0)
            } else if b > 1.0 {
                rl_left(alpha, p, t)
            } else {
                Err(Error::domain("Caputo derivative needs a finite value at 0+"))
            }
        }
        Operand::Grid(g) => {
            if !g.value_at_origin().is_finite() {
                return Err(Error::domain("Caputo derivative needs a finite value at 0+"));
            }
            let d = |s: f64| g.derivative(s);
            Ok(left_kernel_integral(alpha, &d, Some(g), t)? / gamma_fn(1.0 - alpha)?)
        }
        Operand::Func(func) => {
            let f0 = func(0.0);
            if !f0.is_finite() {
                return Err(Error::domain("Caputo derivative needs a finite value at 0+"));
            }
            let ft = func(t);
            let inner = marchaud_integral(alpha, &|d| ft - func(t - d), t, t)?;
            Ok(((ft - f0) * t.powf(-alpha) + alpha * inner) / gamma_fn(1.0 - alpha)?)
        }
    }
}

/// Fractional integral `I^{1-a}_{0+}` or `I^{1-a}_{0-}` of order `1 - a`.
pub fn frac_integral<'a, O: Into<Operand<'a>>>(side: Side, alpha: f64, f: O, x: f64) -> Result<f64> {
    check_order(alpha)?;
    check_point(x)?;
    let f = f.into();
    if side == Side::Left {
        f.covers(x)?;
    }
    if alpha == 1.0 {
        return Ok(f.value(x));
    }
    let order = 1.0 - alpha;
    match (side, f) {
        (Side::Left, Operand::Power(p)) => {
            if !(p.exponent > 0.0) {
                return Err(Error::domain("left operators need exponent > 0 for integrability at 0"));
            }
            Ok(p.coefficient * gamma_fn(p.exponent)? * rgamma(p.exponent + order) * x.powf(p.exponent + order - 1.0))
        }
        (Side::Right, Operand::Power(p)) => {
            if !(p.exponent < alpha) {
                return Err(Error::domain(format!("divergent tail: power exponent {} must be below alpha = {alpha}", p.exponent)));
            }
            Ok(p.coefficient * gamma_fn(alpha - p.exponent)? * rgamma(1.0 - p.exponent) * x.powf(p.exponent - alpha))
        }
        (Side::Left, Operand::Grid(g)) => {
            let v = |s: f64| g.value(s);
            Ok(left_kernel_integral(alpha, &v, Some(g), x)? / gamma_fn(order)?)
        }
        (Side::Right, Operand::Grid(g)) => {
            let q = g.extrapolation_decay;
            if !(q < alpha - 1.0) {
                return Err(Error::domain(format!(
                    "divergent tail: extrapolation_decay {q} must be below alpha - 1 = {}",
                    alpha - 1.0
                )));
            }
            let xm = g.x_max();
            if x >= xm {
                let fx = *g.values.last().unwrap();
                return frac_integral(Side::Right, alpha, PowerLaw::new(fx * xm.powf(-q), q + 1.0), x);
            }
            let v = |s: f64| g.value(s);
            let fin = right_kernel_integral(alpha, &v, Some(g), x, xm)?;
            Ok((fin + tail_integral(alpha, g, x)?) / gamma_fn(order)?)
        }
        (Side::Left, Operand::Func(func)) => Ok(left_kernel_integral(alpha, &|s| func(s), None, x)? / gamma_fn(order)?),
        (Side::Right, Operand::Func(func)) => {
            Ok(right_kernel_integral(alpha, &|s| func(s), None, x, f64::INFINITY)? / gamma_fn(order)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_quadratics() {
        let nodes = geometric_nodes(0.1, 5.0, 30);
        let g = GridFunction::from_fn(nodes, |x| 2.0 * x * x - x + 3.0, -2.0).unwrap();
        for &x in &[0.13, 0.77, 2.2, 4.99] {
            assert!((g.value(x) - (2.0 * x * x - x + 3.0)).abs() < 1e-12);
            assert!((g.derivative(x) - (4.0 * x - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn power_head_extrapolates_roots() {
        let nodes = geometric_nodes(1e-3, 2.0, 50);
        let g = GridFunction::from_fn(nodes, |x| x.powf(0.25), -2.0).unwrap().with_head(Head::Power);
        assert!((g.value(1e-5) - 1e-5f64.powf(0.25)).abs() < 1e-14);
        assert_eq!(g.value_at_origin(), 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(vec![1.0], vec![1.0], -1.0).is_err());
        assert!(GridFunction::new(vec![1.0, 0.5], vec![1.0, 1.0], -1.0).is_err());
        assert!(GridFunction::new(vec![0.0, 0.5], vec![1.0, 1.0], -1.0).is_err());
    }

    #[test]
    fn order_and_coverage_checks() {
        let g = GridFunction::from_fn(geometric_nodes(0.01, 2.0, 20), |x| x, -2.0).unwrap();
        assert!(rl_left(0.0, &g, 1.0).is_err());
        assert!(rl_left(1.5, &g, 1.0).is_err());
        assert!(rl_left(0.5, &g, 3.0).is_err());
        // decay -0.2 is not below -alpha = -0.5
        let slow = GridFunction::from_fn(geometric_nodes(0.01, 2.0, 20), |x| x, -0.2).unwrap();
        assert!(rl_right(0.5, &slow, 1.0).is_err());
    }
}
