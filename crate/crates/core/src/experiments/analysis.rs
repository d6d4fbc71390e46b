use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{EngineSettings, SimilarityInput};
use crate::dataset::{impute, normalize_numeric, Corpus};
use crate::error::{Error, Result};
use crate::experiments::features::CriterionColumns;
use crate::graph::{build_graph_pair, solve_scores, CreativityScores};
use crate::par_map;
use crate::pca::{pca_value_features, reduced_corpus, ValueFeatures};
use crate::similarity::{build_similarity_matrix, kernels_for, Kernel, SimilarityMatrix};
use crate::unexpectedness::{unexpectedness_vector, Measure, UnexpectednessConfig, UnexpectednessVector};

/// Imputes missing values, then standardizes numeric attributes.
pub fn prepare_corpus(corpus: &Corpus) -> Result<Corpus> {
    normalize_numeric(&impute(corpus)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphScores {
    pub attribute: String,
    pub kernel: Kernel,
    pub threshold: Option<f64>,
    pub fully_dangling: bool,
    pub scores: CreativityScores,
    /// One vector per unexpectedness measure, in `Measure::ALL` order.
    pub unexpectedness: Vec<UnexpectednessVector>,
}

impl GraphScores {
    pub fn unexpectedness(&self, measure: Measure) -> &UnexpectednessVector {
        self.unexpectedness
            .iter()
            .find(|u| u.measure == measure)
            .expect("every measure is computed")
    }
}

/// All per-artifact quantities the experiments consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub ids: Vec<String>,
    pub times: Vec<i32>,
    pub value: ValueFeatures,
    /// One entry per (attribute, kernel): schema order, linear before exponential.
    pub graphs: Vec<GraphScores>,
}

impl Analysis {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn criterion_columns(&self, measure: Measure) -> Vec<CriterionColumns> {
        self.graphs
            .iter()
            .map(|g| CriterionColumns {
                attribute: g.attribute.clone(),
                kernel: g.kernel,
                novelty: g.scores.novelty.clone(),
                influence: g.scores.influence.clone(),
                aggregate: g.scores.aggregate.clone(),
                unexpectedness: g.unexpectedness(measure).filled(),
            })
            .collect()
    }

    pub fn all_converged(&self) -> bool {
        self.graphs.iter().all(|g| g.scores.converged)
    }
}

/// Where to keep similarity matrices between runs. Files are named
/// `<prefix>_<attribute index>_<kernel>.csim`.
pub struct SimilarityCache<'a> {
    pub dir: &'a Path,
    pub prefix: &'a str,
}

/// Runs value extraction and every (attribute, kernel) graph on a prepared
/// (imputed, normalized) corpus.
pub fn analyze(corpus: &Corpus, settings: &EngineSettings) -> Result<Analysis> {
    analyze_with_cache(corpus, settings, None)
}

pub fn analyze_with_cache(
    corpus: &Corpus,
    settings: &EngineSettings,
    cache: Option<&SimilarityCache<'_>>,
) -> Result<Analysis> {
    settings.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if corpus.has_missing() {
        return Err(Error::Argument("analyze requires an imputed corpus".into()));
    }
    let value = pca_value_features(corpus, settings.variance_fraction)?;
    let sim_corpus = match settings.similarity_input {
        SimilarityInput::Pca => reduced_corpus(corpus, &value)?,
        SimilarityInput::Raw => corpus.clone(),
    };
    let times = corpus.times();

    let mut tasks = Vec::new();
    for (k, attr) in corpus.attributes.iter().enumerate() {
        for kernel in kernels_for(attr.kind, attr.similarity_kind, settings.numeric_kernels) {
            tasks.push((k, attr.name.clone(), kernel));
        }
    }

    let results = par_map(tasks, |(k, name, kernel)| -> Result<GraphScores> {
        let context = format!("attribute `{name}` ({kernel})");
        let sim = similarity(&sim_corpus, k, &name, kernel, cache).map_err(|e| e.context(&context))?;
        score_graph(&sim, &times, settings).map_err(|e| e.context(&context))
    });
    let graphs = results.into_iter().collect::<Result<Vec<_>>>()?;

    Ok(Analysis {
        ids: corpus.ids().into_iter().map(String::from).collect(),
        times,
        value,
        graphs,
    })
}

fn similarity(
    corpus: &Corpus,
    index: usize,
    name: &str,
    kernel: Kernel,
    cache: Option<&SimilarityCache<'_>>,
) -> Result<SimilarityMatrix> {
    let Some(cache) = cache else {
        return build_similarity_matrix(corpus, name, kernel);
    };
    let path = cache.dir.join(format!("{}_{index}_{kernel}.csim", cache.prefix));
    if path.exists() {
        if let Ok(sim) = SimilarityMatrix::load(&path, name, kernel) {
            if sim.len() == corpus.len() {
                return Ok(sim);
            }
        }
    }
    let sim = build_similarity_matrix(corpus, name, kernel)?;
    sim.save(&path)?;
    Ok(sim)
}

/// Graph scores and all unexpectedness measures for one similarity matrix.
pub fn score_graph(sim: &SimilarityMatrix, times: &[i32], settings: &EngineSettings) -> Result<GraphScores> {
    let graphs = build_graph_pair(sim, times, &settings.graph)?;
    let scores = solve_scores(&graphs, &settings.graph)?;
    let unexpectedness = Measure::ALL
        .into_iter()
        .map(|measure| {
            let config = UnexpectednessConfig {
                measure,
                ..settings.unexpectedness
            };
            unexpectedness_vector(sim, times, &config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphScores {
        attribute: sim.attribute.clone(),
        kernel: sim.kernel,
        threshold: graphs.threshold,
        fully_dangling: graphs.is_fully_dangling(),
        scores,
        unexpectedness,
    })
}
