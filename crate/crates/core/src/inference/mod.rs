//! Mean summaries, bootstrap and prediction bands, and the permutation
//! two-sample test.

mod bands;
mod metric;
mod permutation;
pub mod stats;

pub use bands::{
    bootstrap_band, mean_curve, prediction_band, sd_curve, variance_curve, BandResult, Prediction, WidthMode,
};
pub use metric::{metric_distance, SIGMA_FLOOR};
pub use permutation::{
    exhaustive_permutation_test, permutation_test, permutation_test_with, PValueRule, TestResult,
};
