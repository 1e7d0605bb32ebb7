//! Mixture fitting, projection, and thresholding.
//!
//! Everything here is deterministic: identical data and seeds produce
//! bitwise-identical models, which the sweep in [`crate::pipeline`] relies
//! on for reproducible runs.

mod gmm;
mod outliers;
mod pca;

pub use gmm::{
    gmm_fit, gmm_log_likelihood, gmm_predict, gmm_select_k, GmmConfig, GmmModel, ModelSelection,
    SelectionCriterion,
};
pub use outliers::{detect_outliers, emit_scatter_data, percentile_threshold, OutlierDecision};
pub use pca::{pca_fit_transform, PcaModel};

/// Cheap stable mixer used to derive per-restart and per-cell seeds.
/// Pure integer arithmetic, so identical on every platform.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
