//! Response-quality scoring: embedding-cosine and tf-idf similarities
//! between a filtered response, an unfiltered response, and the ground
//! truth, plus the relative-improvement aggregates and the CSV exports
//! behind the summary tables and running-average plots.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedder::EmbeddingProvider;
use crate::pipeline::SweepConfig;
use crate::{Error, Result};

/// One evaluated question: the reference answer and the two model
/// responses, with and without context filtering. Embeddings may be
/// supplied up front; missing ones are fetched from the provider.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponseTriple {
    pub question_id: String,
    pub ground_truth: String,
    pub filtered_response: String,
    pub original_response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_embedding: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtered_embedding: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_embedding: Option<Vec<f64>>,
}

impl ResponseTriple {
    pub fn validate(&self) -> Result<()> {
        for (label, text) in [
            ("ground_truth", &self.ground_truth),
            ("filtered_response", &self.filtered_response),
            ("original_response", &self.original_response),
        ] {
            if text.trim().is_empty() {
                return Err(Error::Data(format!(
                    "question {:?}: {label} is empty",
                    self.question_id
                )));
            }
        }
        Ok(())
    }

    /// Ground-truth, filtered, original embeddings in that order, using
    /// precomputed vectors where present and one provider call otherwise.
    fn embeddings(&self, provider: &dyn EmbeddingProvider) -> Result<[Vec<f64>; 3]> {
        let slots = [
            (&self.ground_truth, &self.ground_truth_embedding),
            (&self.filtered_response, &self.filtered_embedding),
            (&self.original_response, &self.original_embedding),
        ];
        let missing: Vec<String> = slots
            .iter()
            .filter(|(_, precomputed)| precomputed.is_none())
            .map(|(text, _)| (*text).clone())
            .collect();
        let mut fetched = if missing.is_empty() {
            Vec::new()
        } else {
            provider.embed(&missing).map_err(|e| {
                Error::Embedder(format!("question {:?}: {e}", self.question_id))
            })?
        }
        .into_iter();
        Ok(slots.map(|(_, precomputed)| {
            precomputed.clone().unwrap_or_else(|| {
                fetched.next().expect("provider returned one vector per text")
            })
        }))
    }
}

/// Per-question improvement pair. `skipped` marks questions whose
/// original-response similarity was too close to zero for the relative
/// improvement to mean anything; they are excluded from all averages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionScore {
    pub question_id: String,
    pub emb_improvement: Option<f64>,
    pub tfidf_improvement: Option<f64>,
    pub skipped: bool,
}

/// Batch evaluation result. The running series hold the average over the
/// first 1, 2, ... non-skipped questions in input order, so the final
/// element of each series is the batch average for that metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImprovementReport {
    pub per_question: Vec<QuestionScore>,
    pub average_emb: Option<f64>,
    pub average_tfidf: Option<f64>,
    pub running_emb: Vec<f64>,
    pub running_tfidf: Vec<f64>,
    pub n_questions: usize,
    pub n_effective: usize,
    pub config_echo: SweepConfig,
}

/// Experiment identity attached to an exported summary row; not derivable
/// from the report itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentMeta {
    pub experiment_id: String,
    pub question_category: String,
    pub avg_docs_kept: Option<f64>,
}

/// Cosine of the angle between two equal-length nonzero vectors.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Data(format!(
            "cosine inputs have dimensions {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Data("cosine of empty vectors".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Data("cosine input contains a non-finite value".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_b = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(Error::Data("cosine of a zero vector".into()));
    }
    Ok((dot / (norm_a * norm_b)).clamp(-1.0, 1.0))
}

fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Token-level tf-idf cosine between two texts. Document frequencies come
/// from `idf_corpus`, which should contain every response in the batch;
/// idf = ln((1+C)/(1+df)) + 1, tf is the raw count, and both vectors are
/// L2-normalized so the dot product lands in [0, 1].
pub fn tfidf_similarity(a: &str, b: &str, idf_corpus: &[String]) -> f64 {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in idf_corpus {
        let unique: BTreeSet<String> = tokens(doc).into_iter().collect();
        for term in unique {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let corpus_size = idf_corpus.len() as f64;
    let idf = |term: &str| {
        let d = df.get(term).copied().unwrap_or(0) as f64;
        ((1.0 + corpus_size) / (1.0 + d)).ln() + 1.0
    };
    let vector = |text: &str| {
        let mut weights: BTreeMap<String, f64> = BTreeMap::new();
        for token in tokens(text) {
            *weights.entry(token).or_insert(0.0) += 1.0;
        }
        let mut norm_sq = 0.0;
        for (term, w) in weights.iter_mut() {
            *w *= idf(term);
            norm_sq += *w * *w;
        }
        if norm_sq > 0.0 {
            let norm = norm_sq.sqrt();
            for w in weights.values_mut() {
                *w /= norm;
            }
        }
        weights
    };
    let va = vector(a);
    let vb = vector(b);
    if va.is_empty() && vb.is_empty() {
        log::warn!("tf-idf similarity of two tokenless texts, defining it as 0");
        return 0.0;
    }
    va.iter()
        .filter_map(|(term, x)| vb.get(term).map(|y| x * y))
        .sum()
}

/// Relative similarity change (filtered - original) / original. `None`
/// when the original similarity is too close to zero to divide by; such
/// questions are skipped rather than failed.
pub fn improvement(sim_filtered: f64, sim_original: f64) -> Option<f64> {
    if sim_original.abs() < 1e-9 {
        None
    } else {
        Some((sim_filtered - sim_original) / sim_original)
    }
}

/// Prefix means of `values`: out[j] is the average of the first j+1
/// entries. The final element equals the plain average of the whole
/// slice, same summation order, so the two agree to the last bit.
pub fn running_averages(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        out.push(sum / (i + 1) as f64);
    }
    out
}

/// Scores every triple with both similarity kinds and aggregates the
/// improvements. The tf-idf document-frequency corpus is all 3N response
/// texts in the batch. A question where either metric's original
/// similarity is degenerate is marked skipped and excluded from both
/// averages, keeping the two series over the same question set.
pub fn evaluate_batch(
    triples: &[ResponseTriple],
    provider: &dyn EmbeddingProvider,
    config: &SweepConfig,
) -> Result<ImprovementReport> {
    if triples.is_empty() {
        return Err(Error::Config("evaluation needs at least one triple".into()));
    }
    for triple in triples {
        triple.validate()?;
    }
    let corpus: Vec<String> = triples
        .iter()
        .flat_map(|t| {
            [
                t.ground_truth.clone(),
                t.filtered_response.clone(),
                t.original_response.clone(),
            ]
        })
        .collect();

    let mut per_question = Vec::with_capacity(triples.len());
    let mut emb_values = Vec::new();
    let mut tfidf_values = Vec::new();
    for triple in triples {
        let [truth, filtered, original] = triple.embeddings(provider)?;
        let with_id = |e: Error| Error::Data(format!("question {:?}: {e}", triple.question_id));
        let emb_filtered = cosine_similarity(&filtered, &truth).map_err(with_id)?;
        let emb_original = cosine_similarity(&original, &truth).map_err(with_id)?;
        let tfidf_filtered =
            tfidf_similarity(&triple.filtered_response, &triple.ground_truth, &corpus);
        let tfidf_original =
            tfidf_similarity(&triple.original_response, &triple.ground_truth, &corpus);

        let emb_improvement = improvement(emb_filtered, emb_original);
        let tfidf_improvement = improvement(tfidf_filtered, tfidf_original);
        let skipped = emb_improvement.is_none() || tfidf_improvement.is_none();
        if skipped {
            log::warn!(
                "question {:?}: near-zero original similarity, excluded from averages",
                triple.question_id
            );
        } else {
            emb_values.push(emb_improvement.unwrap());
            tfidf_values.push(tfidf_improvement.unwrap());
        }
        per_question.push(QuestionScore {
            question_id: triple.question_id.clone(),
            emb_improvement,
            tfidf_improvement,
            skipped,
        });
    }

    let running_emb = running_averages(&emb_values);
    let running_tfidf = running_averages(&tfidf_values);
    Ok(ImprovementReport {
        average_emb: running_emb.last().copied(),
        average_tfidf: running_tfidf.last().copied(),
        n_questions: triples.len(),
        n_effective: emb_values.len(),
        per_question,
        running_emb,
        running_tfidf,
        config_echo: config.clone(),
    })
}

fn write_rows(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn opt_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes summary.csv (one experiment row), per_question.csv, and
/// running_avg.csv into `dir`. Percent columns are 100x the averages and
/// stay blank when every question was skipped.
pub fn export_summary(
    report: &ImprovementReport,
    meta: &ExperimentMeta,
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let cfg = &report.config_echo;

    let summary = vec![
        vec![
            "experiment_id".into(),
            "method".into(),
            "alpha".into(),
            "min_freq".into(),
            "percentile".into(),
            "question_category".into(),
            "n_questions".into(),
            "n_effective".into(),
            "emb_pct".into(),
            "tfidf_pct".into(),
            "avg_docs_kept".into(),
        ],
        vec![
            meta.experiment_id.clone(),
            cfg.method.to_string(),
            cfg.weighting.alpha.to_string(),
            cfg.min_outlier_freq.to_string(),
            cfg.percentile.to_string(),
            meta.question_category.clone(),
            report.n_questions.to_string(),
            report.n_effective.to_string(),
            opt_cell(report.average_emb.map(|v| 100.0 * v)),
            opt_cell(report.average_tfidf.map(|v| 100.0 * v)),
            opt_cell(meta.avg_docs_kept),
        ],
    ];
    write_rows(&dir.join("summary.csv"), &summary)?;

    let mut per_question = vec![vec![
        "question_id".into(),
        "emb_improvement".into(),
        "tfidf_improvement".into(),
        "skipped".into(),
    ]];
    for q in &report.per_question {
        per_question.push(vec![
            q.question_id.clone(),
            opt_cell(q.emb_improvement),
            opt_cell(q.tfidf_improvement),
            q.skipped.to_string(),
        ]);
    }
    write_rows(&dir.join("per_question.csv"), &per_question)?;

    let mut running = vec![vec![
        "n".into(),
        "avg_emb_improvement".into(),
        "avg_tfidf_improvement".into(),
    ]];
    for (i, (e, t)) in report.running_emb.iter().zip(&report.running_tfidf).enumerate() {
        running.push(vec![(i + 1).to_string(), e.to_string(), t.to_string()]);
    }
    write_rows(&dir.join("running_avg.csv"), &running)?;
    Ok(())
}
