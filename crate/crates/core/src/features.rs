//! Distance features over a retrieved set.
//!
//! Every document gets two raw distances: Euclidean distance to the
//! retrieved-set centroid and Euclidean distance to the query vector.
//! (Retrieval itself ranks by cosine; the Euclidean choice here is
//! deliberate, see [`crate::vector_store`].) A feature method expands the
//! pair into the vector the mixture model sees, and [`standardize`] brings
//! all columns to zero mean and unit variance before PCA.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::vector_store::{Centroid, RetrievedSet};
use crate::{Error, Result};

/// Raw distances for one document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistancePair {
    pub to_centroid: f64,
    pub to_query: f64,
}

/// How a distance pair becomes a feature row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMethod {
    /// `[d_c, d_q]`
    Concatenate,
    /// `[alpha * d_q + (1 - alpha) * d_c]`, a single blended column.
    WeightedSum,
    /// `[d_c, d_q, d_c * d_q, d_c / (d_q + epsilon)]`
    Interaction,
    /// All monomials `d_c^a * d_q^b` with `1 <= a + b <= degree`, ordered by
    /// total degree, then by descending power of `d_c`.
    Polynomial { degree: usize },
}

impl FeatureMethod {
    /// Number of feature columns the method produces.
    pub fn feature_dim(&self) -> usize {
        match self {
            FeatureMethod::Concatenate => 2,
            FeatureMethod::WeightedSum => 1,
            FeatureMethod::Interaction => 4,
            FeatureMethod::Polynomial { degree } => (degree + 1) * (degree + 2) / 2 - 1,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let FeatureMethod::Polynomial { degree: 0 } = self {
            return Err(Error::Config("polynomial degree must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for FeatureMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureMethod::Concatenate => write!(f, "concatenate"),
            FeatureMethod::WeightedSum => write!(f, "weighted_sum"),
            FeatureMethod::Interaction => write!(f, "interaction"),
            FeatureMethod::Polynomial { degree } => write!(f, "polynomial({degree})"),
        }
    }
}

impl FromStr for FeatureMethod {
    type Err = Error;

    /// Accepts `concatenate`, `weighted_sum`, `interaction`, `polynomial`
    /// (degree 2), or `polynomial(N)`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "concatenate" => Ok(FeatureMethod::Concatenate),
            "weighted_sum" => Ok(FeatureMethod::WeightedSum),
            "interaction" => Ok(FeatureMethod::Interaction),
            "polynomial" => Ok(FeatureMethod::Polynomial { degree: 2 }),
            other => {
                if let Some(inner) = other
                    .strip_prefix("polynomial(")
                    .and_then(|r| r.strip_suffix(')'))
                {
                    let degree: usize = inner.trim().parse().map_err(|_| {
                        Error::Config(format!("bad polynomial degree {inner:?}"))
                    })?;
                    if degree == 0 {
                        return Err(Error::Config(
                            "polynomial degree must be at least 1".into(),
                        ));
                    }
                    return Ok(FeatureMethod::Polynomial { degree });
                }
                Err(Error::Config(format!(
                    "unknown feature method {other:?} (expected concatenate, \
                     weighted_sum, interaction, or polynomial(N))"
                )))
            }
        }
    }
}

impl Serialize for FeatureMethod {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureMethod {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Blend weight and ratio guard. `alpha` in [0, 1] shifts emphasis between
/// the two distances (1 = all query distance); `epsilon` keeps the
/// interaction ratio finite when `d_q` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightingParams {
    pub alpha: f64,
    pub epsilon: f64,
}

impl Default for WeightingParams {
    fn default() -> Self {
        WeightingParams {
            alpha: 0.5,
            epsilon: 1e-8,
        }
    }
}

impl WeightingParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) || !self.alpha.is_finite() {
            return Err(Error::Config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Feature rows plus the ids they belong to, row i for doc_ids[i].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub doc_ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub method: FeatureMethod,
}

impl FeatureMatrix {
    pub fn feature_dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Debug dump with header `doc_id,f1,..,fF`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["doc_id".to_string()];
        header.extend((1..=self.feature_dim()).map(|i| format!("f{i}")));
        w.write_record(&header)?;
        for (id, row) in self.doc_ids.iter().zip(&self.rows) {
            let mut record = vec![id.clone()];
            record.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Column means and population standard deviations recorded by
/// [`standardize`]. Columns listed in `zero_variance_columns` were constant;
/// their standardized values are all zero.
#[derive(Debug, Clone, Serialize)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub zero_variance_columns: Vec<usize>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distances from each hit to the centroid and to the query,
/// in retrieval order.
pub fn compute_distances(hits: &RetrievedSet, centroid: &Centroid) -> Result<Vec<DistancePair>> {
    if hits.hits.is_empty() {
        return Err(Error::Data("no hits to compute distances for".into()));
    }
    let dim = centroid.vector.len();
    if hits.query_vector.len() != dim {
        return Err(Error::Data(format!(
            "query has dimension {}, centroid has {}",
            hits.query_vector.len(),
            dim
        )));
    }
    hits.hits
        .iter()
        .map(|hit| {
            if hit.record.vector.len() != dim {
                return Err(Error::Data(format!(
                    "id {:?} has dimension {}, expected {}",
                    hit.record.id,
                    hit.record.vector.len(),
                    dim
                )));
            }
            Ok(DistancePair {
                to_centroid: euclidean(&hit.record.vector, &centroid.vector),
                to_query: euclidean(&hit.record.vector, &hits.query_vector),
            })
        })
        .collect()
}

/// Scales a pair to `(d_c * (1 - alpha), d_q * alpha)`.
pub fn apply_weighting(
    pairs: &[DistancePair],
    params: &WeightingParams,
) -> Result<Vec<DistancePair>> {
    params.validate()?;
    Ok(pairs
        .iter()
        .map(|p| DistancePair {
            to_centroid: p.to_centroid * (1.0 - params.alpha),
            to_query: p.to_query * params.alpha,
        })
        .collect())
}

/// Expands distance pairs into feature rows. The weighted-sum method blends
/// with `params.alpha` itself, so callers feed it raw pairs; the other
/// methods consume whatever pairs they are given (typically the output of
/// [`apply_weighting`]).
pub fn build_features(
    doc_ids: &[String],
    pairs: &[DistancePair],
    method: FeatureMethod,
    params: &WeightingParams,
) -> Result<FeatureMatrix> {
    method.validate()?;
    params.validate()?;
    if doc_ids.len() != pairs.len() {
        return Err(Error::Data(format!(
            "{} ids for {} distance pairs",
            doc_ids.len(),
            pairs.len()
        )));
    }
    if pairs.is_empty() {
        return Err(Error::Data("no distance pairs to featurize".into()));
    }
    let rows = pairs
        .iter()
        .map(|p| {
            let (dc, dq) = (p.to_centroid, p.to_query);
            match method {
                FeatureMethod::Concatenate => vec![dc, dq],
                FeatureMethod::WeightedSum => {
                    vec![params.alpha * dq + (1.0 - params.alpha) * dc]
                }
                FeatureMethod::Interaction => {
                    vec![dc, dq, dc * dq, dc / (dq + params.epsilon)]
                }
                FeatureMethod::Polynomial { degree } => {
                    let mut row = Vec::with_capacity(method.feature_dim());
                    for total in 1..=degree {
                        for a in (0..=total).rev() {
                            let b = total - a;
                            row.push(dc.powi(a as i32) * dq.powi(b as i32));
                        }
                    }
                    row
                }
            }
        })
        .collect();
    Ok(FeatureMatrix {
        doc_ids: doc_ids.to_vec(),
        rows,
        method,
    })
}

/// Centers each column and divides by its population standard deviation.
/// Constant columns become all zeros and are reported in the stats.
pub fn standardize(features: &FeatureMatrix) -> Result<(FeatureMatrix, StandardizationStats)> {
    let n = features.rows.len();
    if n < 2 {
        return Err(Error::Data(format!(
            "standardization needs at least 2 rows, got {n}"
        )));
    }
    let dim = features.feature_dim();
    let nf = n as f64;

    let mut mean = vec![0.0; dim];
    for row in &features.rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= nf;
    }

    let mut var = vec![0.0; dim];
    for row in &features.rows {
        for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
            let d = x - m;
            *v += d * d;
        }
    }
    let mut std = vec![0.0; dim];
    let mut zero_variance_columns = Vec::new();
    for (c, v) in var.iter().enumerate() {
        let s = (v / nf).sqrt();
        if s == 0.0 {
            zero_variance_columns.push(c);
        }
        std[c] = s;
    }
    if !zero_variance_columns.is_empty() {
        log::warn!(
            "standardize: zero-variance feature columns {:?} set to 0",
            zero_variance_columns
        );
    }

    let rows = features
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, x)| {
                    if std[c] == 0.0 {
                        0.0
                    } else {
                        (x - mean[c]) / std[c]
                    }
                })
                .collect()
        })
        .collect();

    Ok((
        FeatureMatrix {
            doc_ids: features.doc_ids.clone(),
            rows,
            method: features.method,
        },
        StandardizationStats {
            mean,
            std,
            zero_variance_columns,
        },
    ))
}
