//! Bounds side: sup constants, decay certificates, lcm growth, and the
//! denominator and decay tables of computed forms.

mod bounds;
mod lcm;
mod tables;

use thiserror::Error;

pub use bounds::{decay_certificate, doubled_lcm_decay, ratio, sup_ratio, BoundCertificate, DoubledLcmDecay};
pub use lcm::{lcm_growth, LcmGrowthReport, LcmRow};
pub use tables::{decay_table, denominator_report, DecayRow, DecayTable, DenominatorReport, DenominatorRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("local ascent left the open cube at {0:?}")]
    NoInteriorMaximum(Vec<f64>),
    #[error("{0}")]
    Numeric(#[from] crate::numeric::NumericError),
    #[error("{0}")]
    Series(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
