//! Python bindings over the core pruning pipeline.
//!
//! Documents cross the boundary as `(id, text, vector)` tuples and vectors
//! as plain lists of floats, so the module needs nothing beyond the Python
//! standard library on the other side. Every fallible call raises
//! `ValueError` carrying the library's own message text.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ragprune::features::FeatureMethod;
use ragprune::numerics::{self, GmmConfig};
use ragprune::pipeline::{self, SweepConfig, WeightingScope};
use ragprune::vector_store::{Corpus, EmbeddingRecord};
use ragprune::{evaluation, prompt};

fn to_py_err(e: ragprune::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn build_corpus(records: Vec<(String, String, Vec<f64>)>) -> PyResult<Corpus> {
    let records = records
        .into_iter()
        .map(|(id, text, vector)| EmbeddingRecord { id, text, vector })
        .collect();
    Corpus::from_records(records).map_err(to_py_err)
}

/// Overlay of keyword arguments onto the default sweep configuration.
/// `None` keeps the default; the merged result is validated as a whole.
#[allow(clippy::too_many_arguments)]
fn sweep_config(
    method: Option<&str>,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    weighting_applies_to: Option<&str>,
    percentile: Option<f64>,
    clusters: Option<Vec<usize>>,
    pca_dims: Option<Vec<usize>>,
    min_freq: Option<usize>,
    num_docs: Option<usize>,
    seed: Option<u64>,
) -> PyResult<SweepConfig> {
    let mut config = SweepConfig::default();
    if let Some(m) = method {
        config.method = m.parse::<FeatureMethod>().map_err(to_py_err)?;
    }
    if let Some(a) = alpha {
        config.weighting.alpha = a;
    }
    if let Some(e) = epsilon {
        config.weighting.epsilon = e;
    }
    if let Some(w) = weighting_applies_to {
        config.weighting_applies_to = w.parse::<WeightingScope>().map_err(to_py_err)?;
    }
    if let Some(p) = percentile {
        config.percentile = p;
    }
    if let Some(c) = clusters {
        config.cluster_counts = c;
    }
    if let Some(d) = pca_dims {
        config.pca_dims = d;
    }
    if let Some(f) = min_freq {
        config.min_outlier_freq = f;
    }
    if let Some(n) = num_docs {
        config.num_docs = n;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate().map_err(to_py_err)?;
    Ok(config)
}

/// Cosine top-k over an in-memory corpus. Returns `(id, score)` pairs in
/// rank order.
#[pyfunction]
fn top_k(
    records: Vec<(String, String, Vec<f64>)>,
    query_vector: Vec<f64>,
    k: usize,
) -> PyResult<Vec<(String, f64)>> {
    let corpus = build_corpus(records)?;
    let retrieved = ragprune::vector_store::top_k(&corpus, &query_vector, k).map_err(to_py_err)?;
    Ok(retrieved
        .hits
        .iter()
        .map(|h| (h.record.id.clone(), h.score))
        .collect())
}

/// Runs retrieval plus the full sweep-vote-filter pipeline and returns the
/// verdict as a dict: `kept_ids`, `dropped_ids`, `original_ids`,
/// `kept_texts`, `vote_counts`, `total_cells`, and a `cells` list with one
/// entry per grid cell. Keyword arguments override pipeline defaults.
#[pyfunction]
#[pyo3(signature = (
    records, query_vector, *,
    method = None, alpha = None, epsilon = None, weighting_applies_to = None,
    percentile = None, clusters = None, pca_dims = None, min_freq = None,
    num_docs = None, seed = None,
))]
#[allow(clippy::too_many_arguments)]
fn filter_context<'py>(
    py: Python<'py>,
    records: Vec<(String, String, Vec<f64>)>,
    query_vector: Vec<f64>,
    method: Option<&str>,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    weighting_applies_to: Option<&str>,
    percentile: Option<f64>,
    clusters: Option<Vec<usize>>,
    pca_dims: Option<Vec<usize>>,
    min_freq: Option<usize>,
    num_docs: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let config = sweep_config(
        method,
        alpha,
        epsilon,
        weighting_applies_to,
        percentile,
        clusters,
        pca_dims,
        min_freq,
        num_docs,
        seed,
    )?;
    let corpus = build_corpus(records)?;
    let retrieved =
        ragprune::vector_store::top_k(&corpus, &query_vector, config.num_docs).map_err(to_py_err)?;
    let result = pipeline::run_filter_pipeline(&retrieved, &config).map_err(to_py_err)?;

    let texts: BTreeMap<String, String> = retrieved
        .hits
        .iter()
        .map(|h| (h.record.id.clone(), h.record.text.clone()))
        .collect();
    let kept_texts: Vec<&String> = result
        .kept_ids
        .iter()
        .map(|id| &texts[id])
        .collect();

    let cells = result
        .per_cell_decisions
        .iter()
        .map(|cell| {
            let entry = PyDict::new(py);
            entry.set_item("clusters", cell.clusters)?;
            entry.set_item("pca_dim", cell.pca_dim)?;
            entry.set_item("effective_dim", cell.effective_dim)?;
            entry.set_item("seed", cell.seed)?;
            entry.set_item("threshold", cell.decision.threshold)?;
            entry.set_item(
                "outlier_ids",
                cell.decision.outlier_ids.iter().cloned().collect::<Vec<_>>(),
            )?;
            Ok(entry)
        })
        .collect::<PyResult<Vec<_>>>()?;

    let out = PyDict::new(py);
    out.set_item("kept_ids", &result.kept_ids)?;
    out.set_item("dropped_ids", &result.dropped_ids)?;
    out.set_item("original_ids", &result.original_ids)?;
    out.set_item("kept_texts", kept_texts)?;
    out.set_item("vote_counts", &result.tally.counts)?;
    out.set_item("total_cells", result.tally.total_cells)?;
    out.set_item("cells", cells)?;
    Ok(out)
}

/// A fitted Gaussian mixture. Construct with `gmm_fit`.
#[pyclass(name = "GmmModel", frozen)]
struct PyGmmModel {
    inner: numerics::GmmModel,
}

#[pymethods]
impl PyGmmModel {
    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    #[getter]
    fn means(&self) -> Vec<Vec<f64>> {
        self.inner.means.clone()
    }

    #[getter]
    fn covariances(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner.covariances.clone()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn final_log_likelihood(&self) -> f64 {
        self.inner.final_log_likelihood
    }

    #[getter]
    fn log_likelihood_history(&self) -> Vec<f64> {
        self.inner.log_likelihood_history.clone()
    }

    /// Per-point total log-density under the mixture.
    fn log_likelihood(&self, data: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        numerics::gmm_log_likelihood(&self.inner, &data).map_err(to_py_err)
    }

    /// Most responsible component index per point.
    fn predict(&self, data: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
        numerics::gmm_predict(&self.inner, &data).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "GmmModel(k={}, dim={}, converged={})",
            self.inner.k(),
            self.inner.dim(),
            self.inner.converged
        )
    }
}

/// Fits a `clusters`-component full-covariance mixture by seeded EM.
#[pyfunction]
#[pyo3(signature = (data, clusters, seed = 0))]
fn gmm_fit(data: Vec<Vec<f64>>, clusters: usize, seed: u64) -> PyResult<PyGmmModel> {
    let model = numerics::gmm_fit(&data, &GmmConfig::new(clusters, seed)).map_err(to_py_err)?;
    Ok(PyGmmModel { inner: model })
}

/// Projects rows onto the top `target_dim` principal components. Returns
/// `(mean, components, explained_variance, transformed)`.
#[pyfunction]
fn pca_fit_transform(
    rows: Vec<Vec<f64>>,
    target_dim: usize,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>)> {
    let (model, transformed) = numerics::pca_fit_transform(&rows, target_dim).map_err(to_py_err)?;
    Ok((
        model.mean,
        model.components,
        model.explained_variance,
        transformed,
    ))
}

/// Linear-interpolation percentile over unsorted values.
#[pyfunction]
fn percentile_threshold(values: Vec<f64>, percentile: f64) -> PyResult<f64> {
    numerics::percentile_threshold(&values, percentile).map_err(to_py_err)
}

/// Flags ids whose log-likelihood falls strictly below the percentile
/// threshold. Returns `(threshold, outlier_ids)` with ids sorted.
#[pyfunction]
fn detect_outliers(
    log_likelihoods: Vec<f64>,
    doc_ids: Vec<String>,
    percentile: f64,
) -> PyResult<(f64, Vec<String>)> {
    let decision =
        numerics::detect_outliers(&log_likelihoods, &doc_ids, percentile).map_err(to_py_err)?;
    Ok((
        decision.threshold,
        decision.outlier_ids.into_iter().collect(),
    ))
}

/// Mixes sweep coordinates into the base seed; same derivation the
/// pipeline uses for its per-cell streams.
#[pyfunction]
fn cell_seed(base: u64, clusters: usize, pca_dim: usize) -> u64 {
    pipeline::cell_seed(base, clusters, pca_dim)
}

/// Assembles the chat prompt from context documents and a question.
#[pyfunction]
fn build_prompt(docs: Vec<String>, question: &str) -> PyResult<String> {
    prompt::build_prompt(&docs, question).map_err(to_py_err)
}

/// Whitespace-delimited token count, the unit used for context-size stats.
#[pyfunction]
fn whitespace_token_count(text: &str) -> usize {
    prompt::whitespace_token_count(text)
}

/// Cosine similarity, clamped to [-1, 1].
#[pyfunction]
fn cosine_similarity(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    evaluation::cosine_similarity(&a, &b).map_err(to_py_err)
}

/// TF-IDF cosine between two texts, idf taken over `idf_corpus`.
#[pyfunction]
fn tfidf_similarity(a: &str, b: &str, idf_corpus: Vec<String>) -> f64 {
    evaluation::tfidf_similarity(a, b, &idf_corpus)
}

/// Relative improvement of the filtered similarity over the original.
/// `None` when the original similarity is too close to zero to divide by.
#[pyfunction]
fn improvement(sim_filtered: f64, sim_original: f64) -> Option<f64> {
    evaluation::improvement(sim_filtered, sim_original)
}

#[pymodule]
fn ragprune_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGmmModel>()?;
    m.add_function(wrap_pyfunction!(top_k, m)?)?;
    m.add_function(wrap_pyfunction!(filter_context, m)?)?;
    m.add_function(wrap_pyfunction!(gmm_fit, m)?)?;
    m.add_function(wrap_pyfunction!(pca_fit_transform, m)?)?;
    m.add_function(wrap_pyfunction!(percentile_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(detect_outliers, m)?)?;
    m.add_function(wrap_pyfunction!(cell_seed, m)?)?;
    m.add_function(wrap_pyfunction!(build_prompt, m)?)?;
    m.add_function(wrap_pyfunction!(whitespace_token_count, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(tfidf_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(improvement, m)?)?;
    Ok(())
}
