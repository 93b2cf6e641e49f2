//! Cochran's Q, its χ² approximation and a Monte-Carlo check of that
//! approximation.

mod calibrate;
mod chisq;
mod cochran;

pub use calibrate::{
    null_calibration, null_column_totals, Calibration, CalibrationOptions, Quantile, MIN_TRIALS,
    QUANTILE_LEVELS,
};
pub use chisq::{chi_square_cdf, chi_square_isf, chi_square_sf, gamma_p, gamma_q, ln_gamma};
pub use cochran::{cochran_q, cochran_q_with, partition_q, CochranResult, Component, DfConvention};
