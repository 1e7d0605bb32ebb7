//! Embedding providers: an HTTP client for an external embedding service
//! and a cache-only offline provider for replayable runs.
//!
//! Wire contract: POST {base_url}/embed with {"texts": [...]} returning
//! {"embeddings": [[...], ...]}. The cache file is JSONL, one entry per
//! text keyed by the SHA-256 of its UTF-8 bytes.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Anything that can turn texts into vectors, one per text, order
/// preserved. Output depends only on text content.
pub trait EmbeddingProvider {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedderEndpoint {
    pub base_url: String,
    pub timeout_secs: u64,
    pub expected_dim: Option<usize>,
}

impl EmbedderEndpoint {
    pub fn new(base_url: impl Into<String>) -> Self {
        EmbedderEndpoint {
            base_url: base_url.into(),
            timeout_secs: 30,
            expected_dim: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.timeout_secs == 0 {
            return Err(Error::Config("embedder timeout must be positive".into()));
        }
        Ok(())
    }
}

/// SHA-256 of the text's UTF-8 bytes, lowercase hex.
pub fn content_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    hash: String,
    text_preview: String,
    vector: Vec<f64>,
}

/// Append-only JSONL store of text-hash to vector. Later entries for the
/// same hash win, so re-appending is harmless.
#[derive(Debug)]
pub struct EmbeddingCache {
    entries: BTreeMap<String, Vec<f64>>,
    dimension: Option<usize>,
    path: PathBuf,
}

impl EmbeddingCache {
    /// Loads an existing cache file; the file must exist and parse.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Data(format!(
                "embedding cache {} does not exist",
                path.display()
            )));
        }
        Self::read(path)
    }

    /// Opens a cache that may not exist yet; missing means empty.
    pub fn open(path: &Path) -> Result<Self> {
        if path.exists() {
            Self::read(path)
        } else {
            Ok(EmbeddingCache {
                entries: BTreeMap::new(),
                dimension: None,
                path: path.to_path_buf(),
            })
        }
    }

    fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut entries = BTreeMap::new();
        let mut dimension = None;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CacheEntry =
                serde_json::from_str(&line).map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
            match dimension {
                None => dimension = Some(entry.vector.len()),
                Some(d) if d != entry.vector.len() => {
                    return Err(Error::Data(format!(
                        "cache {} line {}: vector dimension {} differs from {}",
                        path.display(),
                        i + 1,
                        entry.vector.len(),
                        d
                    )));
                }
                _ => {}
            }
            entries.insert(entry.hash, entry.vector);
        }
        Ok(EmbeddingCache {
            entries,
            dimension,
            path: path.to_path_buf(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, text: &str) -> Option<&Vec<f64>> {
        self.entries.get(&content_hash(text))
    }

    /// Adds one vector, appending it to the backing file.
    pub fn insert(&mut self, text: &str, vector: Vec<f64>) -> Result<()> {
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "refusing to cache a non-finite vector for {:?}",
                preview(text)
            )));
        }
        if let Some(d) = self.dimension {
            if vector.len() != d {
                return Err(Error::Data(format!(
                    "vector dimension {} differs from cache dimension {d}",
                    vector.len()
                )));
            }
        }
        let entry = CacheEntry {
            hash: content_hash(text),
            text_preview: preview(text),
            vector,
        };
        let line = serde_json::to_string(&entry)
            .map_err(|e| Error::Data(format!("cache entry serialization: {e}")))?;
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(file, "{line}")?;
        self.dimension.get_or_insert(entry.vector.len());
        self.entries.insert(entry.hash, entry.vector);
        Ok(())
    }
}

fn preview(text: &str) -> String {
    text.chars().take(40).collect()
}

/// HTTP client for the embedding service, with an optional write-through
/// cache so repeated texts never hit the network twice.
pub struct HttpEmbedder {
    endpoint: EmbedderEndpoint,
    agent: ureq::Agent,
    cache: Option<Mutex<EmbeddingCache>>,
}

impl HttpEmbedder {
    pub fn new(endpoint: EmbedderEndpoint) -> Result<Self> {
        endpoint.validate()?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(endpoint.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(HttpEmbedder {
            endpoint,
            agent,
            cache: None,
        })
    }

    pub fn with_cache(endpoint: EmbedderEndpoint, cache: EmbeddingCache) -> Result<Self> {
        let mut embedder = Self::new(endpoint)?;
        embedder.cache = Some(Mutex::new(cache));
        Ok(embedder)
    }

    fn request(&self, texts: &[&String]) -> Result<Vec<Vec<f64>>> {
        let url = format!("{}/embed", self.endpoint.base_url.trim_end_matches('/'));
        let body = serde_json::json!({ "texts": texts }).to_string();
        let mut response = self
            .agent
            .post(&url)
            .header("content-type", "application/json")
            .send(body.as_str())
            .map_err(|e| Error::Embedder(format!("request to {url} failed: {e}")))?;
        let status = response.status();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Embedder(format!("reading response from {url}: {e}")))?;
        if !status.is_success() {
            return Err(Error::Embedder(format!(
                "{url} answered status {status}: {}",
                preview(&text)
            )));
        }
        #[derive(Deserialize)]
        struct EmbedResponse {
            embeddings: Vec<Vec<f64>>,
        }
        let parsed: EmbedResponse = serde_json::from_str(&text)
            .map_err(|e| Error::Embedder(format!("malformed response from {url}: {e}")))?;
        if parsed.embeddings.len() != texts.len() {
            return Err(Error::Embedder(format!(
                "{url} returned {} embeddings for {} texts",
                parsed.embeddings.len(),
                texts.len()
            )));
        }
        Ok(parsed.embeddings)
    }
}

impl EmbeddingProvider for HttpEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(Error::Config("no texts to embed".into()));
        }
        let mut results: Vec<Option<Vec<f64>>> = vec![None; texts.len()];

        if let Some(cache) = &self.cache {
            let cache = cache.lock().expect("cache lock poisoned");
            for (i, text) in texts.iter().enumerate() {
                if let Some(v) = cache.get(text) {
                    results[i] = Some(v.clone());
                }
            }
        }

        // One request for the distinct unknown texts, in first-seen order.
        let mut unknown: Vec<&String> = Vec::new();
        for (i, text) in texts.iter().enumerate() {
            if results[i].is_none() && !unknown.iter().any(|u| *u == text) {
                unknown.push(text);
            }
        }
        if !unknown.is_empty() {
            let fetched = self.request(&unknown)?;
            let mut by_hash: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for (text, vector) in unknown.iter().zip(fetched) {
                by_hash.insert(content_hash(text), vector);
            }
            for (i, text) in texts.iter().enumerate() {
                if results[i].is_none() {
                    let vector = &by_hash[&content_hash(text)];
                    if vector.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Embedder(format!(
                            "embedding for text {i} contains a non-finite value"
                        )));
                    }
                    if let Some(want) = self.endpoint.expected_dim {
                        if vector.len() != want {
                            return Err(Error::Embedder(format!(
                                "embedding for text {i} has dimension {}, expected {want}",
                                vector.len()
                            )));
                        }
                    }
                    results[i] = Some(vector.clone());
                }
            }
            if let Some(cache) = &self.cache {
                let mut cache = cache.lock().expect("cache lock poisoned");
                for text in &unknown {
                    if cache.get(text).is_none() {
                        let vector = by_hash[&content_hash(text)].clone();
                        cache.insert(text, vector)?;
                    }
                }
            }
        }

        Ok(results.into_iter().map(|v| v.expect("filled above")).collect())
    }
}

/// Provider that answers only from a cache file; any unknown text is an
/// error naming the missing hash.
pub struct OfflineProvider {
    cache: EmbeddingCache,
}

pub fn offline_provider(cache_path: &Path) -> Result<OfflineProvider> {
    Ok(OfflineProvider {
        cache: EmbeddingCache::load(cache_path)?,
    })
}

impl EmbeddingProvider for OfflineProvider {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(Error::Config("no texts to embed".into()));
        }
        texts
            .iter()
            .map(|text| {
                self.cache.get(text).cloned().ok_or_else(|| {
                    Error::Embedder(format!(
                        "missing embedding for {:?} (hash {}) in {}",
                        preview(text),
                        content_hash(text),
                        self.cache.path().display()
                    ))
                })
            })
            .collect()
    }
}
