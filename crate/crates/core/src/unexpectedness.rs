//! Unexpectedness: how dissimilar an artifact is from its recent predecessors.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Max,
    Mean,
    InverseWeighted,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Max, Measure::Mean, Measure::InverseWeighted];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Max => "max",
            Measure::Mean => "mean",
            Measure::InverseWeighted => "inverse_weighted",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown unexpectedness measure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EmptyWindowPolicy {
    /// Score 0.0, flagged.
    #[default]
    Zero,
    /// No score, flagged.
    Flag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnexpectednessConfig {
    pub window_years: u32,
    pub measure: Measure,
    pub empty_window_policy: EmptyWindowPolicy,
}

impl Default for UnexpectednessConfig {
    fn default() -> Self {
        Self {
            window_years: 5,
            measure: Measure::Mean,
            empty_window_policy: EmptyWindowPolicy::Zero,
        }
    }
}

impl UnexpectednessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_years == 0 {
            return Err(Error::Argument("window_years must be at least 1".into()));
        }
        Ok(())
    }
}

/// Indices `j` with `t(i) - window <= t(j) < t(i)`, ascending.
pub fn predecessor_window(i: usize, times: &[i32], window_years: u32) -> Vec<usize> {
    let t = i64::from(times[i]);
    let lower = t - i64::from(window_years);
    times
        .iter()
        .enumerate()
        .filter(|(_, &tj)| {
            let tj = i64::from(tj);
            lower <= tj && tj < t
        })
        .map(|(j, _)| j)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnexpectednessScore {
    pub value: Option<f64>,
    pub empty_window: bool,
}

/// Score for artifact `i` against a nonnegative similarity matrix.
pub fn unexpectedness_score(
    i: usize,
    sim: &DMatrix<f64>,
    times: &[i32],
    config: &UnexpectednessConfig,
) -> UnexpectednessScore {
    let window = predecessor_window(i, times, config.window_years);
    if window.is_empty() {
        let value = match config.empty_window_policy {
            EmptyWindowPolicy::Zero => Some(0.0),
            EmptyWindowPolicy::Flag => None,
        };
        return UnexpectednessScore {
            value,
            empty_window: true,
        };
    }
    let value = match config.measure {
        Measure::Max => -window.iter().map(|&j| sim[(i, j)]).fold(f64::NEG_INFINITY, f64::max),
        Measure::Mean => {
            let total: f64 = window.iter().map(|&j| sim[(i, j)]).sum();
            -(total / window.len() as f64)
        }
        Measure::InverseWeighted => {
            let mut weighted = 0.0;
            let mut weights = 0.0;
            for &j in &window {
                let gap = times[i] - times[j];
                debug_assert!(gap > 0, "window excludes same-year predecessors");
                let v = 1.0 / f64::from(gap);
                weighted += v * sim[(i, j)];
                weights += v;
            }
            -(weighted / weights)
        }
    };
    UnexpectednessScore {
        value: Some(value),
        empty_window: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnexpectednessVector {
    pub measure: Measure,
    pub values: Vec<Option<f64>>,
    pub empty_window: Vec<bool>,
}

impl UnexpectednessVector {
    /// Values with flagged-missing entries read as 0.
    pub fn filled(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(0.0)).collect()
    }
}

pub fn unexpectedness_vector(
    sim: &SimilarityMatrix,
    times: &[i32],
    config: &UnexpectednessConfig,
) -> Result<UnexpectednessVector> {
    config.validate()?;
    let m = sim.len();
    if times.len() != m {
        return Err(Error::Argument(format!(
            "{} times for a {m}x{m} similarity matrix",
            times.len()
        )));
    }
    let weights = sim.nonnegative();
    let (values, empty_window) = (0..m)
        .map(|i| {
            let s = unexpectedness_score(i, &weights, times, config);
            (s.value, s.empty_window)
        })
        .unzip();
    Ok(UnexpectednessVector {
        measure: config.measure,
        values,
        empty_window,
    })
}
