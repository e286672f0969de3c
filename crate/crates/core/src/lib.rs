//! Numerical toolkit for subordinated diffusions.
//!
//! The crate evaluates stable-subordinator densities and their inverses, generalized
//! gamma laws and their Mellin convolutions, Fox H-functions via Mellin–Barnes
//! integrals, fractional derivatives, eigenfunction series for the time-fractional
//! Sturm–Liouville problem, and Monte Carlo samplers for the associated random
//! compositions.

pub mod cli;
pub mod error;
pub mod frac_calc;
pub mod laws;
pub mod mellin;
pub mod montecarlo;
pub mod solvers;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
