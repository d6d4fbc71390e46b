//! Creativity scoring for time-stamped artifact collections.
//!
//! Artifacts are ingested from a CSV table plus optional vector records,
//! compared pairwise under per-attribute similarity kernels, and arranged into
//! a pair of directed graphs (towards earlier and towards later work). A
//! damped power iteration over both graphs yields novelty, influence and
//! aggregate creativity per artifact; a windowed comparison against recent
//! predecessors yields unexpectedness. The [`experiments`] module feeds these
//! into rating regression and correlation analyses.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod pca;
pub mod regression;
pub mod similarity;
pub mod unexpectedness;

pub use config::{EngineSettings, RegressionSettings, SimilarityInput};
pub use dataset::{
    impute, load_corpus, normalize_numeric, read_corpus, ArtifactRecord, AttributeKind, AttributeSpec, Corpus,
    Ingested, Label, LabelSpec, Payload, Schema,
};
pub use error::{Error, Result};
pub use graph::{
    build_graph_pair, build_graph_pair_from_weights, compute_threshold, iteration_matrix, solve_scores,
    CreativityScores, DirectedGraphPair, GraphConfig, ThresholdRule,
};
pub use similarity::{build_similarity_matrix, Kernel, NumericKernels, SimilarityMatrix};
pub use unexpectedness::{
    unexpectedness_score, unexpectedness_vector, EmptyWindowPolicy, Measure, UnexpectednessConfig,
    UnexpectednessScore, UnexpectednessVector,
};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    items.into_iter().map(f).collect()
}
