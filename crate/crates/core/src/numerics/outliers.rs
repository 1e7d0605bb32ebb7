//! Percentile thresholding of per-document log-likelihoods.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use super::gmm::{gmm_predict, GmmModel};
use crate::{Error, Result};

/// One threshold decision. `outlier_ids` holds exactly the ids whose
/// log-likelihood falls strictly below `threshold`; ties are kept.
#[derive(Debug, Clone, Serialize)]
pub struct OutlierDecision {
    pub log_likelihoods: Vec<f64>,
    pub threshold: f64,
    pub percentile: f64,
    pub outlier_ids: BTreeSet<String>,
}

/// Linear-interpolation percentile: with sorted values s_0 <= ... <= s_{N-1}
/// and h = (percentile/100)(N-1), returns s_floor(h) + frac(h) * (s_floor(h)+1
/// - s_floor(h)). Percentile 0 is the minimum, 100 the maximum.
pub fn percentile_threshold(values: &[f64], percentile: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Data("percentile of an empty set".into()));
    }
    if !(0.0..=100.0).contains(&percentile) {
        return Err(Error::Config(format!(
            "percentile must lie in [0, 100], got {percentile}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite value in percentile input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let h = (percentile / 100.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return Ok(sorted[sorted.len() - 1]);
    }
    Ok(sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo]))
}

/// Flags every id whose log-likelihood is strictly below the percentile
/// threshold. `log_likelihoods[i]` belongs to `doc_ids[i]`.
pub fn detect_outliers(
    log_likelihoods: &[f64],
    doc_ids: &[String],
    percentile: f64,
) -> Result<OutlierDecision> {
    if log_likelihoods.len() != doc_ids.len() {
        return Err(Error::Data(format!(
            "{} log-likelihoods for {} ids",
            log_likelihoods.len(),
            doc_ids.len()
        )));
    }
    let threshold = percentile_threshold(log_likelihoods, percentile)?;
    let outlier_ids = doc_ids
        .iter()
        .zip(log_likelihoods)
        .filter(|(_, &ll)| ll < threshold)
        .map(|(id, _)| id.clone())
        .collect();
    Ok(OutlierDecision {
        log_likelihoods: log_likelihoods.to_vec(),
        threshold,
        percentile,
        outlier_ids,
    })
}

/// Writes one CSV row per document: its 2-D projection, the mixture
/// component that claims it, and whether it was flagged. `reduced` must
/// have exactly two columns.
pub fn emit_scatter_data(
    reduced: &[Vec<f64>],
    doc_ids: &[String],
    model: &GmmModel,
    decision: &OutlierDecision,
    path: &Path,
) -> Result<()> {
    if reduced.len() != doc_ids.len() {
        return Err(Error::Data(format!(
            "{} rows for {} ids",
            reduced.len(),
            doc_ids.len()
        )));
    }
    if reduced.iter().any(|r| r.len() != 2) {
        return Err(Error::Data("scatter rows must have exactly 2 columns".into()));
    }
    let clusters = gmm_predict(model, reduced)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["doc_id", "pc1", "pc2", "cluster", "is_outlier"])?;
    for ((id, row), cluster) in doc_ids.iter().zip(reduced).zip(&clusters) {
        w.write_record([
            id.as_str(),
            &row[0].to_string(),
            &row[1].to_string(),
            &cluster.to_string(),
            if decision.outlier_ids.contains(id) {
                "true"
            } else {
                "false"
            },
        ])?;
    }
    w.flush()?;
    Ok(())
}
