//! Special functions: Gamma, Mittag-Leffler, Wright, Bessel `J`/`I`/`K` and the
//! zeros of `J`, together with the quadrature rules the rest of the crate uses.

mod bessel;
mod gamma;
mod mittag_leffler;
pub mod quad;
mod wright;

pub use bessel::{bessel_i, bessel_j, bessel_j_derivative, bessel_j_zeros, bessel_k};
pub use gamma::{
    beta_fn, cos_pi, gamma_complex, gamma_fn, is_gamma_pole, ln_gamma, ln_gamma_complex, ln_rgamma, rgamma,
    sin_pi,
};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_with};
pub use wright::{m_wright, wright_w, wright_w_with};

/// Truncation controls shared by the power-series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once a term falls below `tol` times the running sum.
    pub tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
    /// Largest tolerated absolute rounding error, estimated as
    /// `machine epsilon * largest term * number of terms`.
    pub cancellation_limit: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            tol: 1e-17,
            max_terms: 20_000,
            cancellation_limit: 1e-10,
        }
    }
}
