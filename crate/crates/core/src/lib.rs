//! Context pruning for retrieval-augmented generation.
//!
//! Nearest-neighbor retrieval returns the k closest documents to a query,
//! but closest is not the same as relevant. A few of the hits usually sit
//! far from the rest of the retrieved set in embedding space and drag the
//! generator off topic. This crate scores each retrieved document by its
//! distance to the retrieved-set centroid and to the query, expands those
//! two distances into a feature vector, fits Gaussian mixtures over a small
//! grid of cluster counts and PCA target dimensions, and flags the documents
//! whose log-likelihood falls below a percentile threshold in enough grid
//! cells. Flagged documents are dropped and the survivors are reassembled
//! into a prompt, preserving retrieval order.
//!
//! The pieces are usable on their own:
//!
//! - [`vector_store`]: JSONL corpus ingestion, cosine top-k, centroids
//! - [`features`]: distance pairs and the feature expansions over them
//! - [`numerics`]: GMM fitting, PCA, percentile thresholds, outlier calls
//! - [`pipeline`]: the (clusters x dims) sweep, voting, and context filtering
//! - [`prompt`]: prompt assembly from kept documents
//! - [`evaluation`]: response similarity scoring and improvement reports
//! - [`embedder`]: HTTP embedding client with a content-addressed cache
//! - [`cli`]: the `ragprune` command-line entry points

pub mod cli;
pub mod embedder;
pub mod evaluation;
pub mod features;
mod linalg;
pub mod numerics;
pub mod pipeline;
pub mod prompt;
pub mod vector_store;

mod error;

pub use error::{Error, Result};
