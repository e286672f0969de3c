//! Python bindings (`import pyfracdiff`) for the densities, the series solver, the samplers
//! and the verification suite.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fracdiff::laws::{self, GGLaw, Method, MuVector};
use fracdiff::montecarlo::{self, RngSpec, SamplerKind};
use fracdiff::solvers::{self, BVPSpec, BvpSolution, Datum, GRoute};
use fracdiff::{specfun, verify, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::Pole { .. } | Error::InfiniteMoment(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for fracdiff::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn method(nu: f64, name: Option<&str>) -> PyResult<Method> {
    match name {
        None | Some("auto") => Ok(laws::best_method(nu)),
        Some(s) => s.parse().py(),
    }
}

#[pyfunction]
fn gamma_fn(x: f64) -> PyResult<f64> {
    specfun::gamma_fn(x).py()
}

#[pyfunction]
#[pyo3(signature = (alpha, z, beta = 1.0))]
fn mittag_leffler(alpha: f64, z: f64, beta: f64) -> PyResult<f64> {
    specfun::mittag_leffler(alpha, beta, z).py()
}

#[pyfunction]
fn wright_w(alpha: f64, beta: f64, z: f64) -> PyResult<f64> {
    specfun::wright_w(alpha, beta, z).py()
}

#[pyfunction]
fn bessel_j(order: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_j(order, x).py()
}

#[pyfunction]
fn bessel_k(order: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_k(order, x).py()
}

#[pyfunction]
fn bessel_j_zeros(order: f64, count: usize) -> PyResult<Vec<f64>> {
    specfun::bessel_j_zeros(order, count).py()
}

/// Generalized gamma law `g^gamma_mu`.
#[pyclass(name = "GGLaw", frozen)]
struct PyGGLaw(GGLaw);

#[pymethods]
impl PyGGLaw {
    #[new]
    fn new(gamma: f64, mu: f64) -> PyResult<Self> {
        GGLaw::new(gamma, mu).map(PyGGLaw).py()
    }

    #[pyo3(signature = (x, t, tilde = false))]
    fn density(&self, x: f64, t: f64, tilde: bool) -> PyResult<f64> {
        self.0.density(x, t, tilde).py()
    }

    #[pyo3(signature = (t, eta, tilde = false))]
    fn mellin(&self, t: f64, eta: f64, tilde: bool) -> PyResult<f64> {
        laws::gg_mellin(self.0, t, eta, tilde).py()
    }

    fn __repr__(&self) -> String {
        format!("GGLaw(gamma={}, mu={})", self.0.gamma, self.0.mu)
    }
}

#[pyfunction]
#[pyo3(signature = (nu, x, t, method = None))]
fn h_density(nu: f64, x: f64, t: f64, method: Option<&str>) -> PyResult<f64> {
    laws::h_density(nu, x, t, self::method(nu, method)?).py()
}

#[pyfunction]
#[pyo3(signature = (nu, x, t, method = None))]
fn l_density(nu: f64, x: f64, t: f64, method: Option<&str>) -> PyResult<f64> {
    laws::l_density(nu, x, t, self::method(nu, method)?).py()
}

#[pyfunction]
fn ratio_density(nu: f64, x: f64) -> PyResult<f64> {
    laws::ratio_density(nu, x).py()
}

#[pyfunction]
fn f_nu_beta(nu: f64, beta: f64, x: f64, t: f64) -> PyResult<f64> {
    laws::f_nu_beta(nu, beta, x, t).py()
}

/// Density of the composed law for shapes written as fractions, e.g. `"1/3,2/3"`.
#[pyfunction]
fn compose_density(gamma: f64, mu: &str, x: f64, t: f64) -> PyResult<f64> {
    let v: MuVector = mu.parse().py()?;
    laws::compose_density(gamma, &v.values(), x, t).py()
}

#[pyfunction]
#[pyo3(signature = (mu, nu, beta, x, t, route = "foxh"))]
fn g_nu_beta_density(mu: f64, nu: f64, beta: f64, x: f64, t: f64, route: &str) -> PyResult<f64> {
    let r: GRoute = route.parse().py()?;
    solvers::g_nu_beta_density(mu, nu, beta, x, t, r).py()
}

#[pyfunction]
fn subordinated_solution(gamma: f64, mu: f64, nu: f64, x: f64, t: f64) -> PyResult<f64> {
    solvers::subordinated_solution(gamma, mu, nu, x, t).py()
}

/// Truncated eigenfunction series on `(0, 1)` for a preset initial datum.
#[pyclass(name = "BvpSolution", frozen)]
struct PyBvpSolution(BvpSolution);

#[pymethods]
impl PyBvpSolution {
    #[new]
    #[pyo3(signature = (gamma, mu, nu, datum = "one", n_terms = 50))]
    fn new(gamma: f64, mu: f64, nu: f64, datum: &str, n_terms: usize) -> PyResult<Self> {
        let d: Datum = datum.parse().py()?;
        let spec = BVPSpec::new(gamma, mu, nu, d, n_terms).py()?;
        BvpSolution::new(spec).map(PyBvpSolution).py()
    }

    fn value(&self, x: f64, t: f64) -> PyResult<f64> {
        self.0.value(x, t).py()
    }

    fn initial_l2_error(&self) -> PyResult<f64> {
        self.0.initial_l2_error().py()
    }

    #[getter]
    fn zeros(&self) -> Vec<f64> {
        self.0.system.zeros.clone()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.0.system.coefficients.clone()
    }

    /// The eigen system as JSON text.
    fn eigen_json(&self) -> PyResult<String> {
        self.0.system.to_json().py()
    }
}

/// `n` reproducible draws. `sampler` is one of g, e, h, l, f, g_nu_beta; missing shape
/// parameters default to 1.
#[pyfunction]
#[pyo3(signature = (sampler, n, t = 1.0, mu = 1.0, nu = 1.0, beta = 1.0, seed = 0, stream = 0))]
#[allow(clippy::too_many_arguments)]
fn sample(sampler: &str, n: usize, t: f64, mu: f64, nu: f64, beta: f64, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
    let kind: SamplerKind = sampler.parse().py()?;
    let spec = RngSpec::new(seed, stream);
    match kind {
        SamplerKind::G => spec.draw(n, |r| montecarlo::sample_g(mu, t, r)),
        SamplerKind::E => spec.draw(n, |r| montecarlo::sample_e(mu, t, r)),
        SamplerKind::Subordinator => spec.draw(n, |r| montecarlo::sample_subordinator(nu, t, r)),
        SamplerKind::Inverse => spec.draw(n, |r| montecarlo::sample_inverse(nu, t, r)),
        SamplerKind::Clock => spec.draw(n, |r| montecarlo::sample_clock(nu, beta, t, r)),
        SamplerKind::TimeChangedGamma => spec.draw(n, |r| montecarlo::sample_time_changed_gamma(mu, nu, beta, t, r)),
    }
    .py()
}

#[pyfunction]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    montecarlo::ks_two_sample(&a, &b).py()
}

/// Runs the verification suite and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (seed = 0, suite = None, tolerance_scale = 1.0, samples = 100_000))]
fn run_verify(seed: u64, suite: Option<String>, tolerance_scale: f64, samples: usize) -> PyResult<String> {
    let cfg = verify::VerifyConfig { seed, filter: suite, tolerance_scale, samples };
    verify::run(&cfg).and_then(|r| r.to_json()).py()
}

#[pymodule]
fn pyfracdiff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGGLaw>()?;
    m.add_class::<PyBvpSolution>()?;
    m.add_function(wrap_pyfunction!(gamma_fn, m)?)?;
    m.add_function(wrap_pyfunction!(mittag_leffler, m)?)?;
    m.add_function(wrap_pyfunction!(wright_w, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(h_density, m)?)?;
    m.add_function(wrap_pyfunction!(l_density, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_density, m)?)?;
    m.add_function(wrap_pyfunction!(f_nu_beta, m)?)?;
    m.add_function(wrap_pyfunction!(compose_density, m)?)?;
    m.add_function(wrap_pyfunction!(g_nu_beta_density, m)?)?;
    m.add_function(wrap_pyfunction!(subordinated_solution, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
