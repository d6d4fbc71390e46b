//! The two analyses built on top of the scores: criterion/label
//! correlations and the feature-combination RMSE benchmark. Also home to the
//! synthetic corpus generator used to check both end to end.

mod analysis;
mod benchmark;
mod features;
mod probe;
mod stats;
mod synthetic;

pub use analysis::{analyze, analyze_with_cache, prepare_corpus, score_graph, Analysis, GraphScores, SimilarityCache};
pub use benchmark::{
    correlation_table, improvement_percent, improvements, manifest, run_benchmark, CorrelationCell,
    CorrelationMeasure, ExperimentReport, GraphStatus, Improvement, RmseCell, RunManifest,
};
pub use features::{assemble_features, CriterionColumns, FeatureCombination, FeatureGroup, FeatureMatrix};
pub use probe::{chronology_probe, rank_groups, ChronologyProbe, TIE_TOLERANCE};
pub use stats::pearson;
pub use synthetic::{generate_synthetic_corpus, generate_synthetic_corpus_with, write_corpus_files, LabelRule};
