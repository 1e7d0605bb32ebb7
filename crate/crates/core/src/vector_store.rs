//! Embedding corpus storage and nearest-neighbor retrieval.
//!
//! Retrieval ranks by cosine similarity. The distance features computed
//! downstream (see [`crate::features`]) use Euclidean distance instead; the
//! asymmetry is intentional, retrieval mimics the vector index while the
//! outlier features measure geometric spread within the retrieved set.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One document with its embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub text: String,
    pub vector: Vec<f64>,
}

/// An in-memory set of records with a uniform embedding dimension and
/// unique ids.
#[derive(Debug, Clone)]
pub struct Corpus {
    records: Vec<EmbeddingRecord>,
    dimension: usize,
}

impl Corpus {
    /// Validates and wraps records loaded from memory. Error messages cite
    /// record positions (0-based); use [`ingest_jsonl`] for file input with
    /// line numbers.
    pub fn from_records(records: Vec<EmbeddingRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Data("empty corpus".into()));
        }
        let dimension = records[0].vector.len();
        let mut seen = HashSet::new();
        for (pos, rec) in records.iter().enumerate() {
            validate_record(rec, dimension, &format!("record {pos}"))?;
            if !seen.insert(rec.id.as_str()) {
                return Err(Error::Data(format!("duplicate id {:?}", rec.id)));
            }
        }
        Ok(Corpus { records, dimension })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&EmbeddingRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

fn validate_record(rec: &EmbeddingRecord, dimension: usize, at: &str) -> Result<()> {
    if rec.vector.is_empty() {
        return Err(Error::Data(format!("{at}: id {:?} has an empty vector", rec.id)));
    }
    if rec.vector.len() != dimension {
        return Err(Error::Data(format!(
            "{at}: id {:?} has dimension {}, expected {}",
            rec.id,
            rec.vector.len(),
            dimension
        )));
    }
    if let Some(bad) = rec.vector.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "{at}: id {:?} has a non-finite value at component {bad}",
            rec.id
        )));
    }
    Ok(())
}

/// Reads a corpus from a JSONL file, one `{"id", "text", "vector"}` object
/// per line. Blank lines are skipped. Errors cite 1-based line numbers.
pub fn ingest_jsonl(path: &Path) -> Result<Corpus> {
    let file = File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let shown = path.display().to_string();

    let mut records = Vec::new();
    let mut dimension = None;
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: EmbeddingRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: shown.clone(),
            line: lineno,
            message: e.to_string(),
        })?;
        let dim = *dimension.get_or_insert(rec.vector.len());
        validate_record(&rec, dim, &format!("line {lineno}")).map_err(|e| Error::Parse {
            path: shown.clone(),
            line: lineno,
            message: e.to_string(),
        })?;
        if !seen.insert(rec.id.clone()) {
            return Err(Error::Parse {
                path: shown.clone(),
                line: lineno,
                message: format!("duplicate id {:?}", rec.id),
            });
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::Data(format!("{shown}: empty corpus")));
    }
    let dimension = dimension.unwrap();
    Ok(Corpus { records, dimension })
}

/// One retrieval hit. `score` is the cosine similarity to the query.
#[derive(Debug, Clone)]
pub struct ScoredHit {
    pub record: EmbeddingRecord,
    pub score: f64,
}

/// Top-k retrieval result, ordered by descending score. Rank is the
/// position in `hits` (0-based here, 1-based in the CSV dump).
#[derive(Debug, Clone)]
pub struct RetrievedSet {
    pub query_vector: Vec<f64>,
    pub hits: Vec<ScoredHit>,
}

impl RetrievedSet {
    pub fn ids(&self) -> Vec<String> {
        self.hits.iter().map(|h| h.record.id.clone()).collect()
    }

    pub fn texts(&self) -> Vec<String> {
        self.hits.iter().map(|h| h.record.text.clone()).collect()
    }

    /// Dumps `id,rank,score` rows, rank 1-based.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["id", "rank", "score"])?;
        for (i, hit) in self.hits.iter().enumerate() {
            w.write_record([
                hit.record.id.as_str(),
                &(i + 1).to_string(),
                &hit.score.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity used for ranking. A zero-norm stored vector scores 0
/// rather than erroring so a single degenerate record cannot sink a query.
fn ranking_score(record: &[f64], query: &[f64], query_norm: f64) -> f64 {
    let rn = norm(record);
    if rn == 0.0 {
        return 0.0;
    }
    let dot: f64 = record.iter().zip(query).map(|(a, b)| a * b).sum();
    dot / (rn * query_norm)
}

/// Retrieves the `k` most cosine-similar records. Ties break by ascending
/// id, so results are deterministic and `top_k(.., k1)` is a prefix of
/// `top_k(.., k2)` for k1 <= k2. Asking for more records than exist returns
/// the whole corpus, ranked.
pub fn top_k(corpus: &Corpus, query: &[f64], k: usize) -> Result<RetrievedSet> {
    if k == 0 {
        return Err(Error::Config("retrieval size k must be at least 1".into()));
    }
    if query.len() != corpus.dimension() {
        return Err(Error::Data(format!(
            "query has dimension {}, corpus has {}",
            query.len(),
            corpus.dimension()
        )));
    }
    if let Some(bad) = query.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "query has a non-finite value at component {bad}"
        )));
    }
    let qn = norm(query);
    if qn == 0.0 {
        return Err(Error::Data("query vector has zero norm".into()));
    }

    let mut scored: Vec<ScoredHit> = corpus
        .records()
        .iter()
        .map(|r| ScoredHit {
            score: ranking_score(&r.vector, query, qn),
            record: r.clone(),
        })
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.record.id.cmp(&b.record.id))
    });
    scored.truncate(k);
    Ok(RetrievedSet {
        query_vector: query.to_vec(),
        hits: scored,
    })
}

/// Mean of the retrieved vectors. This is the anchor the distance features
/// measure against; it is computed over the retrieved set, not the corpus.
#[derive(Debug, Clone)]
pub struct Centroid {
    pub vector: Vec<f64>,
}

pub fn centroid_of(hits: &RetrievedSet) -> Result<Centroid> {
    if hits.hits.is_empty() {
        return Err(Error::Data("cannot take the centroid of an empty set".into()));
    }
    let dim = hits.hits[0].record.vector.len();
    let mut sum = vec![0.0; dim];
    for hit in &hits.hits {
        if hit.record.vector.len() != dim {
            return Err(Error::Data(format!(
                "id {:?} has dimension {}, expected {}",
                hit.record.id,
                hit.record.vector.len(),
                dim
            )));
        }
        for (s, v) in sum.iter_mut().zip(&hit.record.vector) {
            *s += v;
        }
    }
    let n = hits.hits.len() as f64;
    for s in &mut sum {
        *s /= n;
    }
    Ok(Centroid { vector: sum })
}
