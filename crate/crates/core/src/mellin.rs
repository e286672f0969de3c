//! Mellin transforms, Mellin convolution and Fox H-functions.
//!
//! `H^{m,n}_{p,q}[x | (a_i, alpha_i); (b_j, beta_j)]` is evaluated as the Mellin–Barnes
//! integral `(1/2 pi i) int M(eta) x^{-eta} d eta` along a vertical line inside the
//! fundamental strip, where
//!
//! ```text
//! M(eta) = prod_{j<=m} Gamma(b_j + beta_j eta) prod_{i<=n} Gamma(1 - a_i - alpha_i eta)
//!        / ( prod_{j>m} Gamma(1 - b_j - beta_j eta) prod_{i>n} Gamma(a_i + alpha_i eta) ).
//! ```
//!
//! Pairs with a zero scale (`alpha_i = 0` or `beta_j = 0`) contribute constant factors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::quad::{gl20, integrate_fallible, Tolerance};
use crate::specfun::{is_gamma_pole, ln_gamma_complex};

/// Open vertical strip `lower < Re(eta) < upper`; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinStrip {
    pub lower: f64,
    pub upper: f64,
}

impl MellinStrip {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::domain(format!("empty Mellin strip ({lower}, {upper})")));
        }
        Ok(MellinStrip { lower, upper })
    }

    pub fn contains(&self, eta: f64) -> bool {
        eta > self.lower && eta < self.upper
    }

    /// Midpoint of a finite strip.
    pub fn midpoint(&self) -> Option<f64> {
        (self.lower.is_finite() && self.upper.is_finite()).then_some(0.5 * (self.lower + self.upper))
    }

    pub fn intersect(&self, other: &MellinStrip) -> Result<MellinStrip> {
        MellinStrip::new(self.lower.max(other.lower), self.upper.min(other.upper))
    }

    pub fn shift(&self, c: f64) -> MellinStrip {
        MellinStrip { lower: self.lower + c, upper: self.upper + c }
    }
}

impl Serialize for MellinStrip {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let enc = |v: f64| if v.is_finite() { Some(v) } else { None };
        [enc(self.lower), enc(self.upper)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for MellinStrip {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi]: [Option<f64>; 2] = Deserialize::deserialize(d)?;
        MellinStrip::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))
            .map_err(serde::de::Error::custom)
    }
}

/// Parameter set of a Fox H-function together with its fundamental strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FoxHJson", into = "FoxHJson")]
pub struct FoxH {
    m: usize,
    n: usize,
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    strip: MellinStrip,
    coefficient: f64,
    abscissa: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Serialize, Deserialize)]
struct FoxHJson {
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    upper: Vec<[f64; 2]>,
    lower: Vec<[f64; 2]>,
    strip: MellinStrip,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    coefficient: f64,
}

impl TryFrom<FoxHJson> for FoxH {
    type Error = Error;
    fn try_from(j: FoxHJson) -> Result<FoxH> {
        if j.p != j.upper.len() || j.q != j.lower.len() {
            return Err(Error::Parse(format!(
                "p={} q={} do not match {} upper and {} lower pairs",
                j.p,
                j.q,
                j.upper.len(),
                j.lower.len()
            )));
        }
        FoxH::new(
            j.m,
            j.n,
            j.upper.iter().map(|v| (v[0], v[1])).collect(),
            j.lower.iter().map(|v| (v[0], v[1])).collect(),
            Some(j.strip),
        )?
        .with_coefficient(j.coefficient)
    }
}

impl From<FoxH> for FoxHJson {
    fn from(h: FoxH) -> FoxHJson {
        FoxHJson {
            m: h.m,
            n: h.n,
            p: h.upper.len(),
            q: h.lower.len(),
            upper: h.upper.iter().map(|&(a, b)| [a, b]).collect(),
            lower: h.lower.iter().map(|&(a, b)| [a, b]).collect(),
            strip: h.strip,
            coefficient: h.coefficient,
        }
    }
}

enum Slot {
    Num,
    Den,
}

impl FoxH {
    /// Builds an H-function. When `strip` is `None` the natural strip (between the
    /// rightmost uncancelled left pole and the leftmost uncancelled right pole) is used;
    /// a supplied strip must not contain poles.
    pub fn new(
        m: usize,
        n: usize,
        upper: Vec<(f64, f64)>,
        lower: Vec<(f64, f64)>,
        strip: Option<MellinStrip>,
    ) -> Result<Self> {
        if m > lower.len() || n > upper.len() {
            return Err(Error::domain(format!(
                "need m <= q and n <= p (m={m}, n={n}, p={}, q={})",
                upper.len(),
                lower.len()
            )));
        }
        for &(v, s) in upper.iter().chain(lower.iter()) {
            if !v.is_finite() || !s.is_finite() || s < 0.0 {
                return Err(Error::domain(format!("invalid parameter pair ({v}, {s})")));
            }
        }
        let mut h = FoxH {
            m,
            n,
            upper,
            lower,
            strip: MellinStrip { lower: f64::NEG_INFINITY, upper: f64::INFINITY },
            coefficient: 1.0,
            abscissa: None,
        };
        let natural = h.natural_strip()?;
        h.strip = match strip {
            None => natural,
            Some(s) => {
                if s.lower < natural.lower - 1e-12 || s.upper > natural.upper + 1e-12 {
                    return Err(Error::Pole {
                        what: format!(
                            "strip ({}, {}) extends past the poles bounding ({}, {})",
                            s.lower, s.upper, natural.lower, natural.upper
                        ),
                        at: if s.lower < natural.lower { natural.lower } else { natural.upper },
                    });
                }
                s
            }
        };
        // a constant factor sitting on a Gamma pole makes the function undefined
        for (slot, arg) in h.constant_args() {
            if is_gamma_pole(arg) && matches!(slot, Slot::Num) {
                return Err(Error::Pole { what: "constant Gamma factor".into(), at: arg });
            }
        }
        Ok(h)
    }

    /// Constant factor in front of the H-function (and of its Mellin kernel).
    pub fn with_coefficient(mut self, c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(Error::domain(format!("H-function coefficient must be finite and non-zero, got {c}")));
        }
        self.coefficient = c;
        Ok(self)
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// Fixes the real part of the integration contour.
    pub fn with_abscissa(mut self, c: f64) -> Result<Self> {
        if !self.strip.contains(c) {
            return Err(Error::domain(format!(
                "abscissa {c} outside strip ({}, {})",
                self.strip.lower, self.strip.upper
            )));
        }
        self.abscissa = Some(c);
        Ok(self)
    }

    pub fn strip(&self) -> MellinStrip {
        self.strip
    }
    pub fn orders(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n, self.upper.len(), self.lower.len())
    }
    pub fn upper(&self) -> &[(f64, f64)] {
        &self.upper
    }
    pub fn lower(&self) -> &[(f64, f64)] {
        &self.lower
    }

    /// Parameters after `H(x) = x^{-c} H_c(x)`: `a_i -> a_i + c alpha_i`, `b_j -> b_j + c beta_j`.
    pub fn shifted(&self, c: f64) -> Result<FoxH> {
        FoxH::new(
            self.m,
            self.n,
            self.upper.iter().map(|&(a, al)| (a + c * al, al)).collect(),
            self.lower.iter().map(|&(b, be)| (b + c * be, be)).collect(),
            Some(self.strip.shift(-c)),
        )?
        .with_coefficient(self.coefficient)
    }

    fn constant_args(&self) -> Vec<(Slot, f64)> {
        let mut out = Vec::new();
        for (j, &(b, be)) in self.lower.iter().enumerate() {
            if be == 0.0 {
                out.push(if j < self.m { (Slot::Num, b) } else { (Slot::Den, 1.0 - b) });
            }
        }
        for (i, &(a, al)) in self.upper.iter().enumerate() {
            if al == 0.0 {
                out.push(if i < self.n { (Slot::Num, 1.0 - a) } else { (Slot::Den, a) });
            }
        }
        out
    }

    /// All Gamma arguments as affine maps `eta -> c0 + c1 eta`, tagged numerator/denominator.
    fn gamma_args(&self) -> Vec<(Slot, f64, f64)> {
        let mut out = Vec::new();
        for (j, &(b, be)) in self.lower.iter().enumerate() {
            if j < self.m {
                out.push((Slot::Num, b, be));
            } else {
                out.push((Slot::Den, 1.0 - b, -be));
            }
        }
        for (i, &(a, al)) in self.upper.iter().enumerate() {
            if i < self.n {
                out.push((Slot::Num, 1.0 - a, -al));
            } else {
                out.push((Slot::Den, a, al));
            }
        }
        out
    }

    /// Net pole order of the kernel at a real point (numerator poles minus denominator poles).
    fn pole_order(&self, eta: f64) -> i32 {
        let mut order = 0;
        for (slot, c0, c1) in self.gamma_args() {
            let arg = c0 + c1 * eta;
            let near = (arg - arg.round()).abs() < 1e-11 * (1.0 + arg.abs());
            if near && arg.round() <= 0.0 {
                match slot {
                    Slot::Num => order += 1,
                    Slot::Den => order -= 1,
                }
            }
        }
        order
    }

    /// Whether some Gamma argument sits on a pole at real `eta`.
    fn touches_pole(&self, eta: f64) -> bool {
        self.gamma_args().into_iter().any(|(_, c0, c1)| {
            let arg = c0 + c1 * eta;
            (arg - arg.round()).abs() < 1e-11 * (1.0 + arg.abs()) && arg.round() <= 0.0
        })
    }

    /// Strip bounded by the nearest genuine poles on each side of the real axis.
    pub fn natural_strip(&self) -> Result<MellinStrip> {
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for (slot, c0, c1) in self.gamma_args() {
            if !matches!(slot, Slot::Num) || c1 == 0.0 {
                continue;
            }
            // poles at c0 + c1 eta = -k
            for k in 0..200 {
                let eta = (-(k as f64) - c0) / c1 + 0.0;
                if self.pole_order(eta) > 0 {
                    if c1 > 0.0 {
                        lower = lower.max(eta);
                    } else {
                        upper = upper.min(eta);
                    }
                    break;
                }
            }
        }
        MellinStrip::new(lower, upper).map_err(|_| Error::Pole {
            what: "left and right pole families overlap; no fundamental strip".into(),
            at: lower,
        })
    }

    /// Log of the Mellin kernel at complex `eta`.
    pub fn ln_kernel(&self, eta: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (slot, c0, c1) in self.gamma_args() {
            let z = c0 + c1 * eta;
            match slot {
                Slot::Num => acc += ln_gamma_complex(z)?,
                Slot::Den => {
                    if z.im == 0.0 && is_gamma_pole(z.re) {
                        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
                    }
                    acc -= ln_gamma_complex(z)?
                }
            }
        }
        Ok(acc)
    }

    /// Mellin kernel at complex `eta`.
    pub fn kernel(&self, eta: Complex64) -> Result<Complex64> {
        let l = self.ln_kernel(eta)?;
        if l.re == f64::NEG_INFINITY {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.coefficient * l.exp())
    }

    fn abscissa_for(&self, x: f64) -> f64 {
        if let Some(c) = self.abscissa {
            return c;
        }
        saddle_abscissa(|c| self.ln_kernel(Complex64::new(c, 0.0)).map(|v| v.re).unwrap_or(f64::INFINITY), self.strip, x)
    }

    /// `H(x)` for `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain(format!("Fox H evaluated at x = {x}")));
        }
        let c = self.abscissa_for(x);
        inverse_mellin(|eta| self.kernel(eta), x, c)
    }
}

/// Mellin kernel of `h` at real `eta` inside the strip.
pub fn fox_h_mellin(h: &FoxH, eta: f64) -> Result<f64> {
    if !h.strip.contains(eta) {
        return Err(Error::domain(format!(
            "eta = {eta} outside strip ({}, {})",
            h.strip.lower, h.strip.upper
        )));
    }
    match h.pole_order(eta) {
        o if o > 0 => Err(Error::Pole { what: "Mellin kernel".into(), at: eta }),
        o if o < 0 => Ok(0.0),
        _ if h.touches_pole(eta) => {
            // removable singularity: symmetric limit, error O(delta^2)
            let d = 1e-6 * (1.0 + eta.abs());
            let a = h.kernel(Complex64::new(eta - d, 0.0))?.re;
            let b = h.kernel(Complex64::new(eta + d, 0.0))?.re;
            Ok(0.5 * (a + b))
        }
        _ => Ok(h.kernel(Complex64::new(eta, 0.0))?.re),
    }
}

/// `H(x)` by the Mellin–Barnes integral.
pub fn fox_h_eval(h: &FoxH, x: f64) -> Result<f64> {
    h.eval(x)
}

/// Minimises `ln|M(c)| - c ln x` over the usable part of the strip: the vertical line
/// through this real saddle keeps the contour integrand free of cancellation.
pub(crate) fn saddle_abscissa<F: Fn(f64) -> f64>(ln_m: F, strip: MellinStrip, x: f64) -> f64 {
    let lx = x.ln();
    let (lo, hi) = match (strip.lower.is_finite(), strip.upper.is_finite()) {
        (true, true) => {
            let w = strip.upper - strip.lower;
            (strip.lower + 0.02 * w, strip.upper - 0.02 * w)
        }
        (true, false) => (strip.lower + 0.02, strip.lower + 40.0),
        (false, true) => (strip.upper - 40.0, strip.upper - 0.02),
        (false, false) => (-40.0, 40.0),
    };
    let phi = |c: f64| {
        let v = ln_m(c) - c * lx;
        if v.is_finite() { v } else { f64::INFINITY }
    };
    // coarse scan then golden-section refinement
    let n = 80;
    let mut best = lo;
    let mut best_v = f64::INFINITY;
    for k in 0..=n {
        let c = lo + (hi - lo) * k as f64 / n as f64;
        let v = phi(c);
        if v < best_v {
            best_v = v;
            best = c;
        }
    }
    let step = (hi - lo) / n as f64;
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = 0.618_033_988_749_894_9;
    for _ in 0..60 {
        let c1 = b - g * (b - a);
        let c2 = a + g * (b - a);
        if phi(c1) < phi(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    0.5 * (a + b)
}

/// Inverse Mellin transform `(1/2 pi i) int_{c - i inf}^{c + i inf} M(eta) x^{-eta} d eta` of a
/// kernel with real-conjugate symmetry `M(conj eta) = conj M(eta)`.
///
/// The integral over `y > 0` is accumulated on Gauss–Legendre panels until the integrand
/// envelope has dropped below `1e-15` of its peak on three consecutive panels.
pub fn inverse_mellin<K: Fn(Complex64) -> Result<Complex64>>(kernel: K, x: f64, c: f64) -> Result<f64> {
    let (nodes, weights) = gl20();
    let lx = x.ln();
    let xc = (-c * lx).exp();
    let width = (4.0 / lx.abs().max(1e-3)).min(1.0);
    let mut total = 0.0;
    let mut peak: f64 = 0.0;
    let mut quiet = 0;
    let mut y0 = 0.0;
    let y_max = 20_000.0;
    while y0 < y_max {
        let mid = y0 + 0.5 * width;
        let mut panel = 0.0;
        let mut env: f64 = 0.0;
        for (t, w) in nodes.iter().zip(weights.iter()) {
            let y = mid + 0.5 * width * t;
            let m = kernel(Complex64::new(c, y))?;
            let phase = Complex64::new(0.0, -y * lx).exp();
            let v = (m * phase).re;
            if !v.is_finite() {
                return Err(Error::nonconv("inverse_mellin", format!("non-finite kernel at eta = {c} + {y}i")));
            }
            panel += w * v;
            env = env.max(m.norm());
        }
        total += 0.5 * width * panel;
        peak = peak.max(env);
        if env <= 1e-15 * peak || env < 1e-300 {
            quiet += 1;
            if quiet >= 3 {
                return Ok(xc * total / std::f64::consts::PI);
            }
        } else {
            quiet = 0;
        }
        y0 += width;
    }
    Err(Error::nonconv(
        "inverse_mellin",
        format!("kernel still significant at |Im eta| = {y_max}; decay too slow"),
    ))
}

/// `int_0^inf x^(eta - 1) f(x) dx`, computed on the logarithmic scale `x = e^u`.
///
/// With a declared strip, `eta` outside it is reported as a divergent transform.
pub fn mellin_numeric<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    eta: f64,
    strip: Option<MellinStrip>,
    tol: Tolerance,
) -> Result<f64> {
    if let Some(s) = strip {
        if !s.contains(eta) {
            return Err(Error::domain(format!(
                "Mellin transform diverges: eta = {eta} outside strip ({}, {})",
                s.lower, s.upper
            )));
        }
    }
    integrate_fallible(
        |u: f64| {
            let x = u.exp();
            if x == 0.0 || !x.is_finite() {
                return Ok(0.0);
            }
            let v = f(x)?;
            Ok(if v == 0.0 { 0.0 } else { (eta * u).exp() * v })
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &[],
        tol,
    )?
    .check("mellin_numeric")
}

/// Mellin convolution `(f1 * f2)(x) = int_0^inf f1(x/s) f2(s) ds/s`.
pub fn mellin_convolve<F1, F2>(mut f1: F1, mut f2: F2, x: f64, tol: Tolerance) -> Result<f64>
where
    F1: FnMut(f64) -> Result<f64>,
    F2: FnMut(f64) -> Result<f64>,
{
    if !(x > 0.0) {
        return Err(Error::domain(format!("Mellin convolution at x = {x}")));
    }
    let lx = x.ln();
    integrate_fallible(
        |u: f64| {
            let s = u.exp();
            if s == 0.0 || !s.is_finite() {
                return Ok(0.0);
            }
            let b = f2(s)?;
            if b == 0.0 {
                return Ok(0.0);
            }
            let r = (lx - u).exp();
            if r == 0.0 || !r.is_finite() {
                return Ok(0.0);
            }
            Ok(f1(r)? * b)
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &[lx, 0.0],
        tol,
    )?
    .check("mellin_convolve")
}
