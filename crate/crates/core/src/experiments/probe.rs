use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph_pair_from_weights, solve_scores, GraphConfig};

/// Scores within this distance share a rank.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Aggregate-score ordering of `k` identical artifacts at consecutive years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChronologyProbe {
    pub threshold_rule: String,
    pub years: Vec<i32>,
    pub aggregate: Vec<f64>,
    /// Artifact indices from highest to lowest aggregate, ties grouped.
    pub ordering: Vec<Vec<usize>>,
    pub converged: bool,
}

pub fn chronology_probe(k: usize, config: &GraphConfig) -> Result<ChronologyProbe> {
    if k == 0 {
        return Err(Error::EmptyCorpus);
    }
    let years: Vec<i32> = (0..k as i32).map(|i| 2000 + i).collect();
    let weights = DMatrix::from_element(k, k, 1.0);
    let graphs = build_graph_pair_from_weights(&weights, &years, config)?;
    let scores = solve_scores(&graphs, config)?;
    Ok(ChronologyProbe {
        threshold_rule: config.threshold_rule.to_string(),
        years,
        ordering: rank_groups(&scores.aggregate, TIE_TOLERANCE),
        aggregate: scores.aggregate,
        converged: scores.converged,
    })
}

/// Indices sorted by descending score (lower index first among equals),
/// with neighbours closer than `tol` merged into one group.
pub fn rank_groups(scores: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut previous = f64::NAN;
    for i in order {
        match groups.last_mut() {
            Some(group) if (previous - scores[i]).abs() <= tol => group.push(i),
            _ => groups.push(vec![i]),
        }
        previous = scores[i];
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}
