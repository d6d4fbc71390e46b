use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::FeatureCombination;
use crate::graph::GraphConfig;
use crate::pca::DEFAULT_VARIANCE_FRACTION;
use crate::regression::SplitSpec;
use crate::similarity::NumericKernels;
use crate::unexpectedness::UnexpectednessConfig;

/// What the similarity kernels see for vector attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityInput {
    /// PCA-reduced coordinates of each vector attribute.
    #[default]
    Pca,
    /// The ingested vectors as-is.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionSettings {
    pub lambda: f64,
    pub k: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for RegressionSettings {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            k: 5,
            seed: 0,
            train_fraction: 0.8,
        }
    }
}

impl RegressionSettings {
    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed: self.seed,
        }
    }
}

/// Everything that shapes the numbers a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineSettings {
    pub variance_fraction: f64,
    pub numeric_kernels: NumericKernels,
    pub similarity_input: SimilarityInput,
    pub combinations: Vec<FeatureCombination>,
    /// Labels to benchmark; empty means every label in the corpus.
    pub labels: Vec<String>,
    pub graph: GraphConfig,
    pub unexpectedness: UnexpectednessConfig,
    pub regression: RegressionSettings,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self {
            variance_fraction: DEFAULT_VARIANCE_FRACTION,
            numeric_kernels: NumericKernels::default(),
            similarity_input: SimilarityInput::default(),
            combinations: FeatureCombination::ALL.to_vec(),
            labels: Vec::new(),
            graph: GraphConfig::default(),
            unexpectedness: UnexpectednessConfig::default(),
            regression: RegressionSettings::default(),
        }
    }
}

impl EngineSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.variance_fraction > 0.0 && self.variance_fraction <= 1.0) {
            return Err(Error::Argument(format!(
                "variance_fraction {} outside (0, 1]",
                self.variance_fraction
            )));
        }
        if self.combinations.is_empty() {
            return Err(Error::Argument("no feature combinations selected".into()));
        }
        if self.regression.k == 0 {
            return Err(Error::Argument("k must be positive".into()));
        }
        if !(self.regression.lambda.is_finite() && self.regression.lambda >= 0.0) {
            return Err(Error::Argument("lambda must be nonnegative".into()));
        }
        self.graph.validate()?;
        self.unexpectedness.validate()
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("settings serialize");
        hex::encode(Sha256::digest(&json))
    }
}
