//! The cluster-count by projection-dimension sweep, vote aggregation, and
//! context filtering.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::features::{
    apply_weighting, build_features, compute_distances, standardize, DistancePair,
    FeatureMethod, WeightingParams,
};
use crate::numerics::{
    detect_outliers, gmm_fit, gmm_log_likelihood, pca_fit_transform, splitmix64, GmmConfig,
    OutlierDecision,
};
use crate::vector_store::{centroid_of, Centroid, RetrievedSet};
use crate::{Error, Result};

/// Whether the weighted distance pair feeds every feature method or none.
/// The weighted-sum method always blends the raw pair itself, so this
/// switch only affects the other three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingScope {
    AllMethods,
    None,
}

impl std::fmt::Display for WeightingScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightingScope::AllMethods => "all_methods",
            WeightingScope::None => "none",
        })
    }
}

impl std::str::FromStr for WeightingScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_methods" => Ok(WeightingScope::AllMethods),
            "none" => Ok(WeightingScope::None),
            other => Err(Error::Config(format!(
                "unknown weighting scope {other:?}; expected all_methods or none"
            ))),
        }
    }
}

/// Full configuration for one filtering run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub method: FeatureMethod,
    pub weighting: WeightingParams,
    pub weighting_applies_to: WeightingScope,
    pub percentile: f64,
    pub cluster_counts: Vec<usize>,
    pub pca_dims: Vec<usize>,
    pub min_outlier_freq: usize,
    pub num_docs: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            method: FeatureMethod::Interaction,
            weighting: WeightingParams::default(),
            weighting_applies_to: WeightingScope::AllMethods,
            percentile: 15.0,
            cluster_counts: vec![4, 5, 6],
            pca_dims: vec![2, 3],
            min_outlier_freq: 2,
            num_docs: 20,
            seed: 0,
        }
    }
}

impl SweepConfig {
    /// Distinct (clusters, dims) cells the sweep will run.
    pub fn cell_count(&self) -> usize {
        let ks: BTreeSet<_> = self.cluster_counts.iter().collect();
        let rs: BTreeSet<_> = self.pca_dims.iter().collect();
        ks.len() * rs.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.method.validate()?;
        self.weighting.validate()?;
        if !(0.0..=100.0).contains(&self.percentile) {
            return Err(Error::Config(format!(
                "percentile must lie in [0, 100], got {}",
                self.percentile
            )));
        }
        if self.cluster_counts.is_empty() {
            return Err(Error::Config("cluster_counts must not be empty".into()));
        }
        if self.pca_dims.is_empty() {
            return Err(Error::Config("pca_dims must not be empty".into()));
        }
        if self.cluster_counts.iter().any(|&k| k == 0) {
            return Err(Error::Config("cluster counts must be at least 1".into()));
        }
        if self.pca_dims.iter().any(|&r| r == 0) {
            return Err(Error::Config("projection dimensions must be at least 1".into()));
        }
        if self.min_outlier_freq == 0 {
            return Err(Error::Config("min_outlier_freq must be at least 1".into()));
        }
        let cells = self.cell_count();
        if self.min_outlier_freq > cells {
            return Err(Error::Config(format!(
                "min_outlier_freq {} exceeds the {} sweep cells",
                self.min_outlier_freq, cells
            )));
        }
        if self.num_docs == 0 {
            return Err(Error::Config("num_docs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one sweep cell. `pca_dim` is the requested dimension;
/// `effective_dim` drops to the feature width when projection was skipped.
/// `seed` is the derived per-cell mixture seed.
#[derive(Debug, Clone, Serialize)]
pub struct CellDecision {
    pub clusters: usize,
    pub pca_dim: usize,
    pub effective_dim: usize,
    pub seed: u64,
    pub decision: OutlierDecision,
}

/// How many sweep cells flagged each document.
#[derive(Debug, Clone, Serialize)]
pub struct VoteTally {
    pub counts: BTreeMap<String, usize>,
    pub total_cells: usize,
}

/// The filtering verdict. `kept_ids` preserves retrieval order;
/// `original_ids` is the rank-matched baseline of the same length taken
/// from the top of the retrieval ranking.
#[derive(Debug, Clone, Serialize)]
pub struct FilterResult {
    pub kept_ids: Vec<String>,
    pub dropped_ids: Vec<String>,
    pub original_ids: Vec<String>,
    pub tally: VoteTally,
    pub per_cell_decisions: Vec<CellDecision>,
}

/// Mixes the sweep coordinates into the base seed so every cell draws an
/// independent yet reproducible stream.
pub fn cell_seed(base: u64, clusters: usize, pca_dim: usize) -> u64 {
    base ^ splitmix64(((clusters as u64) << 32) | pca_dim as u64)
}

/// Distance pairs as the feature stage will see them. The weighted-sum
/// method blends raw pairs itself, so up-front weighting applies only to
/// the other methods, and only when the scope says so.
pub(crate) fn effective_pairs(
    raw: Vec<DistancePair>,
    config: &SweepConfig,
) -> Result<Vec<DistancePair>> {
    match (config.method, config.weighting_applies_to) {
        (FeatureMethod::WeightedSum, _) | (_, WeightingScope::None) => Ok(raw),
        (_, WeightingScope::AllMethods) => apply_weighting(&raw, &config.weighting),
    }
}

/// Runs every (clusters, dims) cell over the retrieved set: distances,
/// features, standardization, projection, mixture fit, and percentile
/// decision. Cells are ordered lexicographically. When the feature width F
/// is at most the requested dimension the projection is skipped and the
/// cell records effective dimension F.
pub fn run_sweep(
    hits: &RetrievedSet,
    centroid: &Centroid,
    config: &SweepConfig,
) -> Result<Vec<CellDecision>> {
    config.validate()?;
    let n = hits.hits.len();
    let max_k = *config.cluster_counts.iter().max().unwrap();
    if n < max_k + 1 {
        return Err(Error::Data(format!(
            "sweep needs at least {} documents for {max_k} clusters, got {n}",
            max_k + 1
        )));
    }

    let doc_ids = hits.ids();
    let raw = compute_distances(hits, centroid)?;
    let pairs = effective_pairs(raw, config)?;
    let features = build_features(&doc_ids, &pairs, config.method, &config.weighting)?;
    let (standardized, _) = standardize(&features)?;
    let feature_dim = config.method.feature_dim();

    // One reduction per distinct requested dimension, shared across K.
    let dims: BTreeSet<usize> = config.pca_dims.iter().copied().collect();
    let mut reduced: BTreeMap<usize, (usize, Vec<Vec<f64>>)> = BTreeMap::new();
    for &r in &dims {
        let entry = if feature_dim <= r {
            (feature_dim, standardized.rows.clone())
        } else {
            let (_, projected) = pca_fit_transform(&standardized.rows, r)?;
            (r, projected)
        };
        reduced.insert(r, entry);
    }

    let ks: BTreeSet<usize> = config.cluster_counts.iter().copied().collect();
    let mut cells = Vec::with_capacity(ks.len() * dims.len());
    for &k in &ks {
        for &r in &dims {
            let (effective_dim, data) = &reduced[&r];
            let seed = cell_seed(config.seed, k, r);
            let model = gmm_fit(data, &GmmConfig::new(k, seed))?;
            let lls = gmm_log_likelihood(&model, data)?;
            let decision = detect_outliers(&lls, &doc_ids, config.percentile)?;
            cells.push(CellDecision {
                clusters: k,
                pca_dim: r,
                effective_dim: *effective_dim,
                seed,
                decision,
            });
        }
    }
    Ok(cells)
}

/// Counts per-document flags across cells and drops every id flagged at
/// least `min_freq` times.
pub fn vote_outliers(
    cells: &[CellDecision],
    min_freq: usize,
) -> Result<(VoteTally, BTreeSet<String>)> {
    if min_freq == 0 {
        return Err(Error::Config("min_freq must be at least 1".into()));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for cell in cells {
        for id in &cell.decision.outlier_ids {
            *counts.entry(id.clone()).or_insert(0) += 1;
        }
    }
    let dropped = counts
        .iter()
        .filter(|&(_, &c)| c >= min_freq)
        .map(|(id, _)| id.clone())
        .collect();
    Ok((
        VoteTally {
            counts,
            total_cells: cells.len(),
        },
        dropped,
    ))
}

/// Removes the voted outliers from the retrieval order and pairs the
/// survivors with the rank-matched baseline of equal length. The tally and
/// per-cell decisions are left empty; [`run_filter_pipeline`] fills them.
pub fn filter_context(
    hits: &RetrievedSet,
    final_outliers: &BTreeSet<String>,
) -> Result<FilterResult> {
    let ids = hits.ids();
    let known: BTreeSet<&String> = ids.iter().collect();
    for id in final_outliers {
        if !known.contains(id) {
            return Err(Error::Data(format!("outlier id {id:?} was never retrieved")));
        }
    }
    let (kept_ids, dropped_ids): (Vec<String>, Vec<String>) =
        ids.iter().cloned().partition(|id| !final_outliers.contains(id));
    if kept_ids.is_empty() {
        log::warn!("every retrieved document was flagged; the filtered context is empty");
    }
    let original_ids = ids[..kept_ids.len()].to_vec();
    Ok(FilterResult {
        kept_ids,
        dropped_ids,
        original_ids,
        tally: VoteTally {
            counts: BTreeMap::new(),
            total_cells: 0,
        },
        per_cell_decisions: Vec::new(),
    })
}

/// Sweep, vote, filter. The centroid is taken over the retrieved set.
pub fn run_filter_pipeline(hits: &RetrievedSet, config: &SweepConfig) -> Result<FilterResult> {
    let centroid = centroid_of(hits)?;
    let cells = run_sweep(hits, &centroid, config)?;
    let (tally, dropped) = vote_outliers(&cells, config.min_outlier_freq)?;
    let mut result = filter_context(hits, &dropped)?;
    result.tally = tally;
    result.per_cell_decisions = cells;
    Ok(result)
}
