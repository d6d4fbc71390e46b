use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::ValueFeatures;
use crate::similarity::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Pca,
    Novelty,
    Influence,
    Unexpectedness,
    Aggregate,
}

impl FeatureGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::Pca => "pca",
            FeatureGroup::Novelty => "novelty",
            FeatureGroup::Influence => "influence",
            FeatureGroup::Unexpectedness => "unexpectedness",
            FeatureGroup::Aggregate => "aggregate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureCombination {
    Baseline,
    PN,
    PI,
    PU,
    PUN,
    PUI,
    PUNI,
    PUNIA,
}

impl FeatureCombination {
    pub const ALL: [FeatureCombination; 8] = [
        FeatureCombination::Baseline,
        FeatureCombination::PN,
        FeatureCombination::PI,
        FeatureCombination::PU,
        FeatureCombination::PUN,
        FeatureCombination::PUI,
        FeatureCombination::PUNI,
        FeatureCombination::PUNIA,
    ];

    pub fn code(self) -> &'static str {
        match self {
            FeatureCombination::Baseline => "Baseline",
            FeatureCombination::PN => "PN",
            FeatureCombination::PI => "PI",
            FeatureCombination::PU => "PU",
            FeatureCombination::PUN => "PUN",
            FeatureCombination::PUI => "PUI",
            FeatureCombination::PUNI => "PUNI",
            FeatureCombination::PUNIA => "PUNIA",
        }
    }

    /// Included groups, in the order their letters appear in the code.
    pub fn groups(self) -> Vec<FeatureGroup> {
        if self == FeatureCombination::Baseline {
            return vec![FeatureGroup::Pca];
        }
        self.code()
            .chars()
            .map(|c| match c {
                'P' => FeatureGroup::Pca,
                'U' => FeatureGroup::Unexpectedness,
                'N' => FeatureGroup::Novelty,
                'I' => FeatureGroup::Influence,
                'A' => FeatureGroup::Aggregate,
                _ => unreachable!("combination codes only use PUNIA letters"),
            })
            .collect()
    }
}

impl fmt::Display for FeatureCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for FeatureCombination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureCombination::ALL
            .into_iter()
            .find(|c| c.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Argument(format!("unknown feature combination `{s}`")))
    }
}

/// Per-artifact criterion scores of one (attribute, kernel) graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionColumns {
    pub attribute: String,
    pub kernel: Kernel,
    pub novelty: Vec<f64>,
    pub influence: Vec<f64>,
    pub aggregate: Vec<f64>,
    pub unexpectedness: Vec<f64>,
}

impl CriterionColumns {
    fn get(&self, group: FeatureGroup) -> &[f64] {
        match group {
            FeatureGroup::Novelty => &self.novelty,
            FeatureGroup::Influence => &self.influence,
            FeatureGroup::Aggregate => &self.aggregate,
            FeatureGroup::Unexpectedness => &self.unexpectedness,
            FeatureGroup::Pca => unreachable!("pca columns come from value features"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub matrix: DMatrix<f64>,
    pub names: Vec<String>,
}

/// Value block followed by one column per (attribute, kernel) for each
/// included criterion. `columns` must already be in schema order with
/// linear before exponential.
pub fn assemble_features(
    value: &ValueFeatures,
    columns: &[CriterionColumns],
    combination: FeatureCombination,
) -> Result<FeatureMatrix> {
    let m = value.matrix.nrows();
    for c in columns {
        let lens = [c.novelty.len(), c.influence.len(), c.aggregate.len(), c.unexpectedness.len()];
        if lens.iter().any(|&l| l != m) {
            return Err(Error::Integrity(format!(
                "scores for `{}`/{} are not aligned with {m} artifacts",
                c.attribute, c.kernel
            )));
        }
    }
    let extra: Vec<FeatureGroup> = combination
        .groups()
        .into_iter()
        .filter(|g| *g != FeatureGroup::Pca)
        .collect();
    let width = value.width() + extra.len() * columns.len();
    let mut matrix = DMatrix::zeros(m, width);
    matrix.columns_mut(0, value.width()).copy_from(&value.matrix);
    let mut names = value.column_names.clone();
    let mut at = value.width();
    for group in extra {
        for c in columns {
            for (i, v) in c.get(group).iter().enumerate() {
                matrix[(i, at)] = *v;
            }
            names.push(format!("{}:{}:{}", group.as_str(), c.attribute, c.kernel));
            at += 1;
        }
    }
    Ok(FeatureMatrix { matrix, names })
}
