//! Time-directed creativity graphs and their stationary scores.
//!
//! Entry `(i, j)` of every matrix here carries weight flowing from node `j`
//! to node `i`: scores propagate as `c <- W c` with column-stochastic `W`.
//!
//! Construction from a similarity matrix:
//!
//! 1. keep only forward-in-time pairs, `t(i) < t(j)`;
//! 2. subtract the threshold from each kept weight;
//! 3. residuals `>= 0` stay at `(i, j)`, negative residuals move to `(j, i)`
//!    with the sign flipped;
//! 4. entries with `t(i) > t(j)` form the prior graph, entries with
//!    `t(i) <= t(j)` the subsequent graph (self-loops removed);
//! 5. both are column-normalized; all-zero columns are recorded as dangling.
//!
//! Novelty comes from the prior graph and influence from the subsequent one.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ThresholdRule {
    Fixed(f64),
    /// Percentile in (0, 100) of the strictly positive forward-edge weights.
    Percentile(f64),
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::Percentile(50.0)
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Fixed(t) => write!(f, "fixed:{t}"),
            ThresholdRule::Percentile(p) => write!(f, "percentile:{p}"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("threshold rule `{s}`: expected `fixed:X` or `percentile:P`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("threshold rule `{s}`: bad number")))?;
        let rule = match kind.trim() {
            "fixed" => ThresholdRule::Fixed(value),
            "percentile" => ThresholdRule::Percentile(value),
            other => return Err(Error::Argument(format!("unknown threshold rule `{other}`"))),
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl TryFrom<String> for ThresholdRule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ThresholdRule> for String {
    fn from(rule: ThresholdRule) -> String {
        rule.to_string()
    }
}

impl ThresholdRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdRule::Fixed(t) if t.is_finite() => Ok(()),
            ThresholdRule::Percentile(p) if p > 0.0 && p < 100.0 => Ok(()),
            other => Err(Error::Argument(format!("invalid threshold rule {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    pub alpha: f64,
    pub beta: f64,
    pub threshold_rule: ThresholdRule,
    #[serde(rename = "tol")]
    pub convergence_tol: f64,
    #[serde(rename = "max_iters")]
    pub max_iterations: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            alpha: 0.95,
            beta: 0.2,
            threshold_rule: ThresholdRule::default(),
            convergence_tol: 1e-10,
            max_iterations: 200,
        }
    }
}

impl GraphConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Argument(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Argument(format!("beta {} outside [0, 1]", self.beta)));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Argument("convergence tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Argument("max_iterations must be positive".into()));
        }
        self.threshold_rule.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedGraphPair {
    /// Column-stochastic prior graph (reversed edges, novelty).
    pub prior: DMatrix<f64>,
    /// Column-stochastic subsequent graph (forward edges, influence).
    pub subsequent: DMatrix<f64>,
    pub dangling_prior: Vec<usize>,
    pub dangling_subsequent: Vec<usize>,
    /// Threshold that was subtracted; `None` when no forward edge had
    /// positive weight and the graphs are empty.
    pub threshold: Option<f64>,
}

impl DirectedGraphPair {
    pub fn len(&self) -> usize {
        self.prior.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.prior.nrows() == 0
    }

    pub fn is_fully_dangling(&self) -> bool {
        let m = self.len();
        self.dangling_prior.len() == m && self.dangling_subsequent.len() == m
    }
}

/// Threshold for a forward-masked similarity matrix (zero where the pair is
/// not forward in time).
pub fn compute_threshold(sim_forward: &DMatrix<f64>, rule: ThresholdRule) -> Result<f64> {
    match rule {
        ThresholdRule::Fixed(t) => Ok(t),
        ThresholdRule::Percentile(p) => {
            let mut weights: Vec<f64> = sim_forward.iter().copied().filter(|w| *w > 0.0).collect();
            if weights.is_empty() {
                return Err(Error::Threshold(
                    "percentile rule needs at least one positive forward edge".into(),
                ));
            }
            weights.sort_by(f64::total_cmp);
            Ok(percentile_sorted(&weights, p))
        }
    }
}

/// Linear-interpolation percentile of sorted data.
pub(crate) fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

pub fn build_graph_pair(
    sim: &SimilarityMatrix,
    times: &[i32],
    config: &GraphConfig,
) -> Result<DirectedGraphPair> {
    build_graph_pair_from_weights(&sim.nonnegative(), times, config)
}

/// Graph construction from a nonnegative square weight matrix.
pub fn build_graph_pair_from_weights(
    weights: &DMatrix<f64>,
    times: &[i32],
    config: &GraphConfig,
) -> Result<DirectedGraphPair> {
    config.validate()?;
    let m = weights.nrows();
    if m == 0 {
        return Err(Error::EmptyCorpus);
    }
    if weights.ncols() != m || times.len() != m {
        return Err(Error::Argument(format!(
            "weights are {}x{} but there are {} times",
            m,
            weights.ncols(),
            times.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Argument("graph weights must be finite and nonnegative".into()));
    }

    let forward = DMatrix::from_fn(m, m, |i, j| {
        if times[i] < times[j] {
            weights[(i, j)]
        } else {
            0.0
        }
    });

    let threshold = match compute_threshold(&forward, config.threshold_rule) {
        Ok(t) => Some(t),
        Err(Error::Threshold(_)) => None,
        Err(e) => return Err(e),
    };

    let mut reversed = DMatrix::zeros(m, m);
    if let Some(tau) = threshold {
        for j in 0..m {
            for i in 0..m {
                if times[i] >= times[j] {
                    continue;
                }
                let residual = forward[(i, j)] - tau;
                if residual >= 0.0 {
                    reversed[(i, j)] = residual;
                } else {
                    reversed[(j, i)] = -residual;
                }
            }
        }
    }

    let mut prior = DMatrix::from_fn(m, m, |i, j| if times[i] > times[j] { reversed[(i, j)] } else { 0.0 });
    let mut subsequent = DMatrix::from_fn(m, m, |i, j| {
        if i != j && times[i] <= times[j] {
            reversed[(i, j)]
        } else {
            0.0
        }
    });
    let dangling_prior = normalize_columns(&mut prior);
    let dangling_subsequent = normalize_columns(&mut subsequent);

    Ok(DirectedGraphPair {
        prior,
        subsequent,
        dangling_prior,
        dangling_subsequent,
        threshold,
    })
}

/// Scales each column to sum 1 and returns the indices of all-zero columns.
fn normalize_columns(matrix: &mut DMatrix<f64>) -> Vec<usize> {
    let mut dangling = Vec::new();
    for (j, mut column) in matrix.column_iter_mut().enumerate() {
        let total: f64 = column.iter().sum();
        if total > 0.0 {
            column /= total;
        } else {
            column.fill(0.0);
            dangling.push(j);
        }
    }
    dangling
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreativityScores {
    pub aggregate: Vec<f64>,
    pub novelty: Vec<f64>,
    pub influence: Vec<f64>,
    /// Mass each node receives from dangling columns. Together with the
    /// teleport share it closes the identity
    /// `aggregate = (1 - alpha) / m + novelty + influence + dangling_share`.
    pub dangling_share: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Dense effective iteration matrix, dangling columns repaired with a
/// uniform `1/m` column.
pub fn iteration_matrix(graphs: &DirectedGraphPair, config: &GraphConfig) -> DMatrix<f64> {
    let m = graphs.len();
    let uniform = 1.0 / m as f64;
    let teleport = (1.0 - config.alpha) * uniform;
    let wp = config.alpha * config.beta;
    let wq = config.alpha * (1.0 - config.beta);
    let mut matrix = DMatrix::from_element(m, m, teleport);
    matrix += wp * &graphs.prior + wq * &graphs.subsequent;
    for &j in &graphs.dangling_prior {
        matrix.column_mut(j).add_scalar_mut(wp * uniform);
    }
    for &j in &graphs.dangling_subsequent {
        matrix.column_mut(j).add_scalar_mut(wq * uniform);
    }
    matrix
}

struct Step {
    novelty: DVector<f64>,
    influence: DVector<f64>,
    dangling_share: f64,
}

fn propagate(graphs: &DirectedGraphPair, config: &GraphConfig, c: &DVector<f64>) -> Step {
    let m = graphs.len() as f64;
    let wp = config.alpha * config.beta;
    let wq = config.alpha * (1.0 - config.beta);
    let novelty = wp * (&graphs.prior * c);
    let influence = wq * (&graphs.subsequent * c);
    let dp: f64 = graphs.dangling_prior.iter().map(|&j| c[j]).sum();
    let dq: f64 = graphs.dangling_subsequent.iter().map(|&j| c[j]).sum();
    Step {
        novelty,
        influence,
        dangling_share: (wp * dp + wq * dq) / m,
    }
}

/// Stationary aggregate scores by power iteration from the uniform vector,
/// with the novelty/influence split of the final iterate.
pub fn solve_scores(graphs: &DirectedGraphPair, config: &GraphConfig) -> Result<CreativityScores> {
    config.validate()?;
    let m = graphs.len();
    if m == 0 {
        return Err(Error::EmptyCorpus);
    }
    let teleport = (1.0 - config.alpha) / m as f64;
    let mut c = DVector::from_element(m, 1.0 / m as f64);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let step = propagate(graphs, config, &c);
        let mut next = step.novelty + step.influence;
        next.add_scalar_mut(teleport + step.dangling_share);
        let total = next.sum();
        next /= total;
        let change = (&next - &c).lp_norm(1);
        c = next;
        if change < config.convergence_tol {
            converged = true;
            break;
        }
    }

    let step = propagate(graphs, config, &c);
    let aggregate: Vec<f64> = step
        .novelty
        .iter()
        .zip(step.influence.iter())
        .map(|(n, l)| teleport + n + l + step.dangling_share)
        .collect();
    Ok(CreativityScores {
        aggregate,
        novelty: step.novelty.iter().copied().collect(),
        influence: step.influence.iter().copied().collect(),
        dangling_share: step.dangling_share,
        iterations_used: iterations,
        converged,
    })
}
