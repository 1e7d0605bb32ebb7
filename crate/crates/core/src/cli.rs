//! Command-line entry points. One executable, six subcommands:
//! ingest-check, retrieve, filter, prompt, eval, report. Settings come
//! from defaults, then an optional JSON config file, then flags, with
//! later layers winning field by field. Every writing run drops a
//! config_echo.json whose effective values reproduce the run bitwise.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::embedder::{offline_provider, EmbedderEndpoint, EmbeddingProvider, HttpEmbedder};
use crate::evaluation::{evaluate_batch, export_summary, ExperimentMeta, ResponseTriple};
use crate::features::{
    build_features, compute_distances, standardize, FeatureMatrix, FeatureMethod,
    WeightingParams,
};
use crate::numerics::{
    detect_outliers, emit_scatter_data, gmm_fit, gmm_log_likelihood, pca_fit_transform,
    GmmConfig,
};
use crate::pipeline::{
    cell_seed, effective_pairs, run_filter_pipeline, SweepConfig, WeightingScope,
};
use crate::prompt::PromptBundle;
use crate::vector_store::{centroid_of, ingest_jsonl, top_k, Corpus, RetrievedSet};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "ragprune",
    version,
    about = "Prunes retrieved RAG context by dropping density outliers in embedding space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus file and print its shape.
    IngestCheck {
        /// JSONL corpus, one {"id", "text", "vector"} record per line.
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Retrieve the closest documents to a query and dump id,rank,score.
    Retrieve(CommonArgs),
    /// Retrieve, prune outliers, and write all filter artifacts.
    Filter(CommonArgs),
    /// Run the filter and print the pruned prompt to standard output.
    Prompt(CommonArgs),
    /// Score filtered vs original responses against ground truth.
    Eval(EvalArgs),
    /// Merge summary.csv files from several eval runs into one table.
    Report(ReportArgs),
}

/// Flags shared by retrieve, filter, and prompt. Everything is optional
/// here; requiredness depends on the subcommand and is checked after the
/// config file is merged in.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSONL corpus, one {"id", "text", "vector"} record per line.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Query text; embedded for retrieval and quoted in the prompt.
    #[arg(long)]
    pub query: Option<String>,
    /// JSON file holding a precomputed query vector; skips query embedding.
    #[arg(long)]
    pub query_embedding: Option<PathBuf>,
    /// Embedding service base URL (POST {url}/embed).
    #[arg(long)]
    pub embedder_url: Option<String>,
    #[arg(long)]
    pub embedder_timeout_secs: Option<u64>,
    #[arg(long)]
    pub embedder_expected_dim: Option<usize>,
    /// Offline embedding cache (JSONL); mutually exclusive with a URL.
    #[arg(long)]
    pub embedding_cache: Option<PathBuf>,
    /// Directory for all written artifacts.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// concatenate, weighted_sum, interaction, or polynomial(N).
    #[arg(long)]
    pub method: Option<FeatureMethod>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// all_methods or none.
    #[arg(long)]
    pub weighting_applies_to: Option<WeightingScope>,
    #[arg(long)]
    pub percentile: Option<f64>,
    /// Comma-separated cluster counts, e.g. 4,5,6.
    #[arg(long)]
    pub clusters: Option<String>,
    /// Comma-separated projection target dimensions, e.g. 2,3.
    #[arg(long)]
    pub pca_dims: Option<String>,
    #[arg(long)]
    pub min_freq: Option<usize>,
    #[arg(long)]
    pub num_docs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// JSONL file of {"question_id", "ground_truth", "filtered_response",
    /// "original_response"} triples.
    #[arg(long)]
    pub triples: PathBuf,
    /// Label for the summary row.
    #[arg(long)]
    pub experiment_id: Option<String>,
    #[arg(long)]
    pub category: Option<String>,
    /// Mean documents kept per question, if the caller tracked it.
    #[arg(long)]
    pub avg_docs_kept: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// summary.csv files from previous eval runs.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Merged CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Seed of one sweep cell, recorded in config_echo.json. Derived from the
/// base seed; ignored when read back in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSeed {
    pub clusters: usize,
    pub pca_dim: usize,
    pub seed: u64,
}

/// Fully-optional run settings. The JSON config file and the flag layer
/// both deserialize into this; merging keeps the later layer's Some
/// values and [`RunConfig::sweep_config`] fills the rest with defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub corpus_path: Option<PathBuf>,
    pub query: Option<String>,
    pub query_embedding_path: Option<PathBuf>,
    pub embedder_url: Option<String>,
    pub embedder_timeout_secs: Option<u64>,
    pub embedder_expected_dim: Option<usize>,
    pub embedding_cache: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub method: Option<FeatureMethod>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub weighting_applies_to: Option<WeightingScope>,
    pub percentile: Option<f64>,
    pub cluster_counts: Option<Vec<usize>>,
    pub pca_dims: Option<Vec<usize>>,
    pub min_outlier_freq: Option<usize>,
    pub num_docs: Option<usize>,
    pub seed: Option<u64>,
    pub experiment_id: Option<String>,
    pub question_category: Option<String>,
    pub avg_docs_kept: Option<f64>,
    /// Output only: per-cell seeds derived from `seed`. Never an input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_cell_seeds: Option<Vec<CellSeed>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    /// Field-wise overlay: `over`'s Some values win.
    pub fn merge(mut self, over: RunConfig) -> RunConfig {
        macro_rules! overlay {
            ($($field:ident),+ $(,)?) => {
                $( if over.$field.is_some() { self.$field = over.$field; } )+
            };
        }
        overlay!(
            corpus_path,
            query,
            query_embedding_path,
            embedder_url,
            embedder_timeout_secs,
            embedder_expected_dim,
            embedding_cache,
            out_dir,
            method,
            alpha,
            epsilon,
            weighting_applies_to,
            percentile,
            cluster_counts,
            pca_dims,
            min_outlier_freq,
            num_docs,
            seed,
            experiment_id,
            question_category,
            avg_docs_kept,
        );
        self.derived_cell_seeds = None;
        self
    }

    /// Sweep settings with defaults filled in, validated.
    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let defaults = SweepConfig::default();
        let config = SweepConfig {
            method: self.method.unwrap_or(defaults.method),
            weighting: WeightingParams {
                alpha: self.alpha.unwrap_or(defaults.weighting.alpha),
                epsilon: self.epsilon.unwrap_or(defaults.weighting.epsilon),
            },
            weighting_applies_to: self
                .weighting_applies_to
                .unwrap_or(defaults.weighting_applies_to),
            percentile: self.percentile.unwrap_or(defaults.percentile),
            cluster_counts: self
                .cluster_counts
                .clone()
                .unwrap_or(defaults.cluster_counts),
            pca_dims: self.pca_dims.clone().unwrap_or(defaults.pca_dims),
            min_outlier_freq: self.min_outlier_freq.unwrap_or(defaults.min_outlier_freq),
            num_docs: self.num_docs.unwrap_or(defaults.num_docs),
            seed: self.seed.unwrap_or(defaults.seed),
        };
        config.validate()?;
        Ok(config)
    }

    fn load_corpus(&self) -> Result<Corpus> {
        let path = self
            .corpus_path
            .as_ref()
            .ok_or_else(|| Error::Config("a corpus file is required".into()))?;
        ingest_jsonl(path)
    }

    fn out_dir(&self) -> Result<&Path> {
        self.out_dir
            .as_deref()
            .ok_or_else(|| Error::Config("an output directory is required".into()))
    }

    /// Exactly one embedding source may be configured. With neither, the
    /// returned provider fails on first use, so runs that never need an
    /// embedding still work.
    fn provider(&self) -> Result<Box<dyn EmbeddingProvider>> {
        match (&self.embedder_url, &self.embedding_cache) {
            (Some(_), Some(_)) => Err(Error::Config(
                "embedder_url and embedding_cache are mutually exclusive; \
                 configure exactly one embedding source"
                    .into(),
            )),
            (Some(url), None) => {
                let mut endpoint = EmbedderEndpoint::new(url.clone());
                if let Some(t) = self.embedder_timeout_secs {
                    endpoint.timeout_secs = t;
                }
                endpoint.expected_dim = self.embedder_expected_dim;
                Ok(Box::new(HttpEmbedder::new(endpoint)?))
            }
            (None, Some(path)) => Ok(Box::new(offline_provider(path)?)),
            (None, None) => Ok(Box::new(NoSourceProvider)),
        }
    }

    /// The retrieval vector: a precomputed file when given, otherwise the
    /// embedded query text.
    fn query_vector(&self, provider: &dyn EmbeddingProvider) -> Result<Vec<f64>> {
        if let Some(path) = &self.query_embedding_path {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Data(format!("query embedding {}: {e}", path.display()))
            })?;
            let vector: Vec<f64> = serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                line: e.line(),
                message: e.to_string(),
            })?;
            if vector.is_empty() {
                return Err(Error::Data(format!(
                    "query embedding {} is empty",
                    path.display()
                )));
            }
            Ok(vector)
        } else if let Some(query) = &self.query {
            Ok(provider.embed(&[query.clone()])?.remove(0))
        } else {
            Err(Error::Config(
                "a query or a query_embedding file is required".into(),
            ))
        }
    }

    fn question(&self) -> Result<&str> {
        self.query
            .as_deref()
            .ok_or_else(|| Error::Config("query text is required to build a prompt".into()))
    }

    /// Echo with every effective value filled in, including derived seeds.
    fn effective_echo(&self, sweep: &SweepConfig) -> RunConfig {
        RunConfig {
            corpus_path: self.corpus_path.clone(),
            query: self.query.clone(),
            query_embedding_path: self.query_embedding_path.clone(),
            embedder_url: self.embedder_url.clone(),
            embedder_timeout_secs: self.embedder_timeout_secs,
            embedder_expected_dim: self.embedder_expected_dim,
            embedding_cache: self.embedding_cache.clone(),
            out_dir: self.out_dir.clone(),
            method: Some(sweep.method),
            alpha: Some(sweep.weighting.alpha),
            epsilon: Some(sweep.weighting.epsilon),
            weighting_applies_to: Some(sweep.weighting_applies_to),
            percentile: Some(sweep.percentile),
            cluster_counts: Some(sweep.cluster_counts.clone()),
            pca_dims: Some(sweep.pca_dims.clone()),
            min_outlier_freq: Some(sweep.min_outlier_freq),
            num_docs: Some(sweep.num_docs),
            seed: Some(sweep.seed),
            experiment_id: self.experiment_id.clone(),
            question_category: self.question_category.clone(),
            avg_docs_kept: self.avg_docs_kept,
            derived_cell_seeds: Some(derive_cell_seeds(sweep)),
        }
    }
}

/// The per-cell seeds the sweep will use, in cell order.
pub fn derive_cell_seeds(config: &SweepConfig) -> Vec<CellSeed> {
    let ks: BTreeSet<usize> = config.cluster_counts.iter().copied().collect();
    let rs: BTreeSet<usize> = config.pca_dims.iter().copied().collect();
    ks.iter()
        .flat_map(|&clusters| {
            rs.iter().map(move |&pca_dim| CellSeed {
                clusters,
                pca_dim,
                seed: cell_seed(config.seed, clusters, pca_dim),
            })
        })
        .collect()
}

/// Stand-in provider for runs with no embedding source configured.
struct NoSourceProvider;

impl EmbeddingProvider for NoSourceProvider {
    fn embed(&self, _texts: &[String]) -> Result<Vec<Vec<f64>>> {
        Err(Error::Config(
            "no embedding source configured; set embedder_url or embedding_cache".into(),
        ))
    }
}

impl CommonArgs {
    /// Config file under flags, flags winning.
    pub fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(base.merge(self.as_overlay()?))
    }

    fn as_overlay(&self) -> Result<RunConfig> {
        Ok(RunConfig {
            corpus_path: self.corpus.clone(),
            query: self.query.clone(),
            query_embedding_path: self.query_embedding.clone(),
            embedder_url: self.embedder_url.clone(),
            embedder_timeout_secs: self.embedder_timeout_secs,
            embedder_expected_dim: self.embedder_expected_dim,
            embedding_cache: self.embedding_cache.clone(),
            out_dir: self.out_dir.clone(),
            method: self.method,
            alpha: self.alpha,
            epsilon: self.epsilon,
            weighting_applies_to: self.weighting_applies_to,
            percentile: self.percentile,
            cluster_counts: self
                .clusters
                .as_deref()
                .map(|s| parse_list(s, "clusters"))
                .transpose()?,
            pca_dims: self
                .pca_dims
                .as_deref()
                .map(|s| parse_list(s, "pca-dims"))
                .transpose()?,
            min_outlier_freq: self.min_freq,
            num_docs: self.num_docs,
            seed: self.seed,
            experiment_id: None,
            question_category: None,
            avg_docs_kept: None,
            derived_cell_seeds: None,
        })
    }
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad {flag} entry {:?}", part.trim())))
        })
        .collect()
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::IngestCheck { corpus } => cmd_ingest_check(&corpus),
        Command::Retrieve(args) => cmd_retrieve(&args.resolve()?),
        Command::Filter(args) => cmd_filter(&args.resolve()?),
        Command::Prompt(args) => cmd_prompt(&args.resolve()?),
        Command::Eval(args) => {
            let mut config = args.common.resolve()?;
            if args.experiment_id.is_some() {
                config.experiment_id = args.experiment_id.clone();
            }
            if args.category.is_some() {
                config.question_category = args.category.clone();
            }
            if args.avg_docs_kept.is_some() {
                config.avg_docs_kept = args.avg_docs_kept;
            }
            cmd_eval(&config, &args.triples)
        }
        Command::Report(args) => cmd_report(&args),
    }
}

pub fn cmd_ingest_check(path: &Path) -> Result<()> {
    let corpus = ingest_jsonl(path)?;
    println!(
        "ok: {} records, dimension {}",
        corpus.len(),
        corpus.dimension()
    );
    Ok(())
}

pub fn cmd_retrieve(config: &RunConfig) -> Result<()> {
    let out_dir = config.out_dir()?;
    let corpus = config.load_corpus()?;
    let provider = config.provider()?;
    let query_vector = config.query_vector(provider.as_ref())?;
    let k = config.num_docs.unwrap_or(SweepConfig::default().num_docs);
    let retrieved = top_k(&corpus, &query_vector, k)?;
    fs::create_dir_all(out_dir)?;
    retrieved.write_csv(&out_dir.join("retrieved.csv"))?;
    println!(
        "retrieved {} documents into {}",
        retrieved.hits.len(),
        out_dir.display()
    );
    Ok(())
}

pub fn cmd_filter(config: &RunConfig) -> Result<()> {
    let sweep = config.sweep_config()?;
    let out_dir = config.out_dir()?.to_path_buf();
    let question = config.question()?.to_string();
    let corpus = config.load_corpus()?;
    let provider = config.provider()?;
    let query_vector = config.query_vector(provider.as_ref())?;
    let retrieved = top_k(&corpus, &query_vector, sweep.num_docs)?;

    let result = run_filter_pipeline(&retrieved, &sweep)?;
    let standardized = standardized_features(&retrieved, &sweep)?;

    fs::create_dir_all(&out_dir)?;
    standardized.write_csv(&out_dir.join("features.csv"))?;
    write_scatter(&standardized, &sweep, &out_dir.join("scatter.csv"))?;

    let kept_texts = texts_for(&retrieved, &result.kept_ids)?;
    let bundle = PromptBundle::assemble(&kept_texts, &retrieved.texts(), &question)?;
    fs::write(out_dir.join("filtered_prompt.txt"), &bundle.filtered_prompt)?;
    fs::write(out_dir.join("original_prompt.txt"), &bundle.original_prompt)?;

    write_json(&out_dir.join("filter_result.json"), &result)?;
    write_json(
        &out_dir.join("config_echo.json"),
        &config.effective_echo(&sweep),
    )?;

    let dropped = if result.dropped_ids.is_empty() {
        "none".to_string()
    } else {
        result.dropped_ids.join(", ")
    };
    println!(
        "kept {} of {} documents; dropped: {dropped}",
        result.kept_ids.len(),
        retrieved.hits.len()
    );
    Ok(())
}

pub fn cmd_prompt(config: &RunConfig) -> Result<()> {
    let sweep = config.sweep_config()?;
    let question = config.question()?.to_string();
    let corpus = config.load_corpus()?;
    let provider = config.provider()?;
    let query_vector = config.query_vector(provider.as_ref())?;
    let retrieved = top_k(&corpus, &query_vector, sweep.num_docs)?;
    let result = run_filter_pipeline(&retrieved, &sweep)?;
    let kept_texts = texts_for(&retrieved, &result.kept_ids)?;
    let bundle = PromptBundle::assemble(&kept_texts, &retrieved.texts(), &question)?;
    // Exact prompt bytes, no trailing newline, so output can be piped
    // straight to a model.
    print!("{}", bundle.filtered_prompt);
    std::io::stdout().flush()?;
    Ok(())
}

pub fn cmd_eval(config: &RunConfig, triples_path: &Path) -> Result<()> {
    let sweep = config.sweep_config()?;
    let out_dir = config.out_dir()?.to_path_buf();
    let triples = load_triples(triples_path)?;
    let provider = config.provider()?;
    let report = evaluate_batch(&triples, provider.as_ref(), &sweep)?;
    let meta = ExperimentMeta {
        experiment_id: config
            .experiment_id
            .clone()
            .unwrap_or_else(|| "default".into()),
        question_category: config.question_category.clone().unwrap_or_default(),
        avg_docs_kept: config.avg_docs_kept,
    };
    fs::create_dir_all(&out_dir)?;
    export_summary(&report, &meta, &out_dir)?;
    write_json(
        &out_dir.join("config_echo.json"),
        &config.effective_echo(&sweep),
    )?;
    match (report.average_emb, report.average_tfidf) {
        (Some(emb), Some(tfidf)) => println!(
            "evaluated {} questions ({} effective): emb {:+.2}%, tfidf {:+.2}%",
            report.n_questions,
            report.n_effective,
            100.0 * emb,
            100.0 * tfidf
        ),
        _ => println!(
            "evaluated {} questions; every question was skipped",
            report.n_questions
        ),
    }
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    let mut header: Option<String> = None;
    let mut rows: Vec<String> = Vec::new();
    for path in &args.inputs {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("summary {}: {e}", path.display())))?;
        let mut lines = text.lines();
        let this_header = lines
            .next()
            .ok_or_else(|| Error::Data(format!("{} is empty", path.display())))?;
        match &header {
            None => header = Some(this_header.to_string()),
            Some(expected) if expected != this_header => {
                return Err(Error::Data(format!(
                    "{} has a different header than the first input",
                    path.display()
                )));
            }
            _ => {}
        }
        rows.extend(lines.filter(|l| !l.is_empty()).map(str::to_string));
    }
    let mut merged = header.expect("at least one input is enforced by clap");
    merged.push('\n');
    for row in &rows {
        merged.push_str(row);
        merged.push('\n');
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &merged)?;
            println!("merged {} experiment rows into {}", rows.len(), path.display());
        }
        None => {
            print!("{merged}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

/// The standardized feature matrix the sweep consumes, recomputed for the
/// debug dump and the scatter export.
fn standardized_features(
    retrieved: &RetrievedSet,
    sweep: &SweepConfig,
) -> Result<FeatureMatrix> {
    let centroid = centroid_of(retrieved)?;
    let doc_ids = retrieved.ids();
    let raw = compute_distances(retrieved, &centroid)?;
    let pairs = effective_pairs(raw, sweep)?;
    let features = build_features(&doc_ids, &pairs, sweep.method, &sweep.weighting)?;
    let (standardized, _) = standardize(&features)?;
    Ok(standardized)
}

/// Two-dimensional cluster/outlier view of the smallest-cluster-count
/// cell. When 2 is among the requested dimensions this reproduces that
/// cell exactly (same derived seed); otherwise it is a visualization-only
/// extra cell. Skipped with a warning when the features cannot span two
/// dimensions.
fn write_scatter(
    standardized: &FeatureMatrix,
    sweep: &SweepConfig,
    path: &Path,
) -> Result<()> {
    let feature_dim = standardized.feature_dim();
    if feature_dim < 2 {
        log::warn!(
            "scatter export skipped: {} produces a single feature column",
            sweep.method
        );
        return Ok(());
    }
    if feature_dim > 2 && standardized.len() < 3 {
        log::warn!("scatter export skipped: too few documents to project to 2 dimensions");
        return Ok(());
    }
    let reduced = if feature_dim == 2 {
        standardized.rows.clone()
    } else {
        pca_fit_transform(&standardized.rows, 2)?.1
    };
    let clusters = *sweep
        .cluster_counts
        .iter()
        .min()
        .expect("validated non-empty");
    let seed = cell_seed(sweep.seed, clusters, 2);
    let model = gmm_fit(&reduced, &GmmConfig::new(clusters, seed))?;
    let lls = gmm_log_likelihood(&model, &reduced)?;
    let decision = detect_outliers(&lls, &standardized.doc_ids, sweep.percentile)?;
    emit_scatter_data(&reduced, &standardized.doc_ids, &model, &decision, path)
}

fn texts_for(retrieved: &RetrievedSet, ids: &[String]) -> Result<Vec<String>> {
    ids.iter()
        .map(|id| {
            retrieved
                .hits
                .iter()
                .find(|h| &h.record.id == id)
                .map(|h| h.record.text.clone())
                .ok_or_else(|| Error::Data(format!("id {id:?} not in the retrieved set")))
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Data(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn load_triples(path: &Path) -> Result<Vec<ResponseTriple>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("triples {}: {e}", path.display())))?;
    let mut triples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let triple: ResponseTriple = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        triples.push(triple);
    }
    if triples.is_empty() {
        return Err(Error::Data(format!("no questions in {}", path.display())));
    }
    Ok(triples)
}
