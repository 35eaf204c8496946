//! Independent numerical checks of the exact pipeline.
//!
//! Nothing here reads partial fractions or harmonic numbers produced by the
//! exact side except [`sum_terms_numeric`], whose whole purpose is to sum a
//! given term multiset directly.

mod mc;
mod quad;
mod sum;
mod zeta;

use num_rational::BigRational;
use thiserror::Error;

use crate::hp::HpReal;

pub use mc::{mc_integral, mc_integrand, McEstimate, MC_BATCH};
pub use quad::{gauss_legendre, quad_piece, tanh_sinh_hp, QuadResult};
pub use sum::{sum_monomial_direct, sum_terms_numeric, DirectSum, TailBracket};
pub use zeta::{bernoulli_numbers, eval_form, zeta_value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("form has divergent parts and no numeric value")]
    DivergentForm,
    #[error("input series does not converge: {0}")]
    DivergentInput(String),
    #[error("quadrature did not converge: last change {last_change:e}, target {target:e}")]
    NonConvergent { last_change: f64, target: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Nearest double to an exact rational (huge numerators are fine).
pub fn rational_to_f64(q: &BigRational) -> f64 {
    HpReal::from_rational(q, 20).to_f64()
}
