//! Stage caches keyed by content hashes of their inputs.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use creativity_core::experiments::{analyze_with_cache, prepare_corpus, Analysis, SimilarityCache};
use creativity_core::{load_corpus, Corpus, Schema};
use log::{info, warn};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

const FORMAT: &str = "creativity-cache-1";

/// Hex SHA-256 over length-prefixed parts.
pub fn content_hash(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(FORMAT.as_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IngestCache {
    pub key: String,
    pub dropped: Vec<String>,
    pub imputed_cells: usize,
    /// Imputed and normalized.
    pub corpus: Corpus,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoresCache {
    pub key: String,
    pub analysis: Analysis,
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read `{}`", path.display()))
}

fn load_cached<T: DeserializeOwned>(path: &Path) -> Option<T> {
    let bytes = std::fs::read(path).ok()?;
    match serde_json::from_slice(&bytes) {
        Ok(v) => Some(v),
        Err(e) => {
            warn!("ignoring unreadable cache {}: {e}", path.display());
            None
        }
    }
}

fn store<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
    }
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_vec(value)?).with_context(|| format!("cannot write `{}`", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("cannot write `{}`", path.display()))?;
    Ok(())
}

pub fn ingest_path(run: &RunConfig) -> PathBuf {
    run.cache_dir.join("ingest.json")
}

/// The prepared corpus, from cache when the input files are unchanged.
pub fn ingest(run: &RunConfig) -> Result<(IngestCache, bool)> {
    let schema_path = run.schema_path()?;
    let table_path = run.artifacts_path()?;
    let vectors_path = run.vectors_path()?;
    let schema_bytes = read_file(schema_path)?;
    let table_bytes = read_file(table_path)?;
    let vector_bytes = match vectors_path {
        Some(p) => read_file(p)?,
        None => Vec::new(),
    };
    let key = content_hash(&[&schema_bytes, &table_bytes, &vector_bytes]);

    let path = ingest_path(run);
    if let Some(cached) = load_cached::<IngestCache>(&path) {
        if cached.key == key {
            info!("ingest cache hit ({})", path.display());
            return Ok((cached, true));
        }
    }

    let schema = Schema::read(schema_path)?;
    let ingested = load_corpus(table_path, vectors_path, &schema)?;
    for id in &ingested.dropped {
        warn!("dropped artifact `{id}`: no year");
    }
    let imputed_cells = ingested
        .corpus
        .artifacts
        .iter()
        .flat_map(|a| &a.values)
        .filter(|v| matches!(v, creativity_core::Payload::Missing))
        .count()
        + ingested
            .corpus
            .labels
            .iter()
            .map(|l| l.values.iter().filter(|v| v.is_none()).count())
            .sum::<usize>();
    let corpus = prepare_corpus(&ingested.corpus)?;
    let cache = IngestCache {
        key,
        dropped: ingested.dropped,
        imputed_cells,
        corpus,
    };
    store(&path, &cache)?;
    Ok((cache, false))
}

fn scores_key(ingest: &IngestCache, run: &RunConfig) -> Result<String> {
    let s = &run.settings;
    let relevant = serde_json::to_vec(&serde_json::json!({
        "variance_fraction": s.variance_fraction,
        "numeric_kernels": s.numeric_kernels,
        "similarity_input": s.similarity_input,
        "graph": s.graph,
        "unexpectedness": {
            "window_years": s.unexpectedness.window_years,
            "empty_window_policy": s.unexpectedness.empty_window_policy,
        },
    }))?;
    Ok(content_hash(&[ingest.key.as_bytes(), &relevant]))
}

/// Scores for the prepared corpus, from cache when corpus and score
/// settings are unchanged. Similarity matrices are kept as `.csim` files.
pub fn scores(ingest: &IngestCache, run: &RunConfig) -> Result<(Analysis, bool)> {
    let key = scores_key(ingest, run)?;
    let path = run.cache_dir.join("scores.json");
    if let Some(cached) = load_cached::<ScoresCache>(&path) {
        if cached.key == key {
            info!("scores cache hit ({})", path.display());
            return Ok((cached.analysis, true));
        }
    }

    let s = &run.settings;
    let sim_inputs = serde_json::to_vec(&serde_json::json!({
        "variance_fraction": s.variance_fraction,
        "similarity_input": s.similarity_input,
    }))?;
    let prefix = content_hash(&[ingest.key.as_bytes(), &sim_inputs])[..16].to_string();
    let dir = run.cache_dir.join("similarity");
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
    let sim_cache = SimilarityCache {
        dir: &dir,
        prefix: &prefix,
    };
    let analysis = analyze_with_cache(&ingest.corpus, s, Some(&sim_cache))?;
    let cache = ScoresCache { key, analysis };
    store(&path, &cache)?;
    Ok((cache.analysis, false))
}
