//! Principal components by power iteration with deflation, and the value
//! feature matrix built from them.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Corpus, Payload};
use crate::error::{Error, Result};

pub const DEFAULT_VARIANCE_FRACTION: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIterationSettings {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PowerIterationSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 1000,
        }
    }
}

/// Leading principal components of one data block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalComponents {
    pub mean: Vec<f64>,
    /// One unit-norm component per column (dim × retained).
    pub components: DMatrix<f64>,
    /// Variance captured by each retained component, descending.
    pub eigenvalues: Vec<f64>,
    pub total_variance: f64,
}

impl PrincipalComponents {
    pub fn retained(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Fraction of total variance covered by the retained components.
    pub fn explained_ratio(&self) -> f64 {
        if self.total_variance <= 0.0 {
            return 1.0;
        }
        (self.eigenvalues.iter().sum::<f64>() / self.total_variance).min(1.0)
    }

    pub fn project(&self, block: &DMatrix<f64>) -> DMatrix<f64> {
        let mut centered = block.clone();
        for mut row in centered.row_iter_mut() {
            for (x, mu) in row.iter_mut().zip(&self.mean) {
                *x -= mu;
            }
        }
        centered * &self.components
    }
}

/// Fits components on the rows of `block` (m × dim), keeping the fewest
/// whose cumulative variance reaches `variance_fraction`.
pub fn principal_components(
    block: &DMatrix<f64>,
    variance_fraction: f64,
    settings: PowerIterationSettings,
) -> Result<PrincipalComponents> {
    if !(variance_fraction > 0.0 && variance_fraction <= 1.0) {
        return Err(Error::Argument(format!(
            "variance fraction {variance_fraction} outside (0, 1]"
        )));
    }
    let (m, dim) = block.shape();
    if m == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mean: Vec<f64> = block.column_iter().map(|c| c.mean()).collect();
    let mut centered = block.clone();
    for mut row in centered.row_iter_mut() {
        for (x, mu) in row.iter_mut().zip(&mean) {
            *x -= mu;
        }
    }
    let denom = (m.max(2) - 1) as f64;

    // Same nonzero spectrum either way; use the smaller Gram form.
    let use_gram = m < dim;
    let scatter = if use_gram {
        &centered * centered.transpose() / denom
    } else {
        centered.transpose() * &centered / denom
    };
    let total_variance = scatter.trace();
    let max_rank = m.min(dim);

    let pairs = leading_eigenpairs(&scatter, settings, max_rank, |captured| {
        captured >= variance_fraction * total_variance - 1e-12 * total_variance
    });

    let mut eigenvalues = Vec::with_capacity(pairs.len());
    let mut components = DMatrix::zeros(dim, pairs.len());
    for (j, (lambda, vector)) in pairs.into_iter().enumerate() {
        let direction = if use_gram {
            let mut v = centered.transpose() * vector;
            let norm = v.norm();
            if norm > 0.0 {
                v /= norm;
            }
            v
        } else {
            vector
        };
        components.set_column(j, &direction);
        eigenvalues.push(lambda);
    }
    Ok(PrincipalComponents {
        mean,
        components,
        eigenvalues,
        total_variance,
    })
}

/// Extracts eigenpairs of a symmetric positive semidefinite matrix, largest
/// first, until `enough` reports the captured eigenvalue sum is sufficient
/// or the spectrum is exhausted.
pub fn leading_eigenpairs(
    matrix: &DMatrix<f64>,
    settings: PowerIterationSettings,
    max_count: usize,
    mut enough: impl FnMut(f64) -> bool,
) -> Vec<(f64, DVector<f64>)> {
    let n = matrix.nrows();
    let mut deflated = matrix.clone();
    let scale = matrix.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut found: Vec<(f64, DVector<f64>)> = Vec::new();
    let mut captured = 0.0;
    if n == 0 || scale == 0.0 {
        return found;
    }
    while found.len() < max_count.min(n) && !enough(captured) {
        let mut rng = ChaCha8Rng::seed_from_u64(found.len() as u64);
        let mut v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        orthogonalize(&mut v, &found);
        let norm = v.norm();
        if norm == 0.0 {
            break;
        }
        v /= norm;
        for _ in 0..settings.max_iterations {
            let mut w = &deflated * &v;
            orthogonalize(&mut w, &found);
            let norm = w.norm();
            if norm <= 1e-14 * scale {
                break;
            }
            w /= norm;
            let delta = (&w - &v).norm();
            v = w;
            if delta < settings.tol {
                break;
            }
        }
        let lambda = v.dot(&(matrix * &v)).max(0.0);
        if lambda <= 1e-13 * scale {
            break;
        }
        deflated -= lambda * &v * v.transpose();
        captured += lambda;
        found.push((lambda, v));
    }
    found
}

fn orthogonalize(v: &mut DVector<f64>, basis: &[(f64, DVector<f64>)]) {
    for _ in 0..2 {
        for (_, b) in basis {
            let proj = b.dot(v);
            v.axpy(-proj, b, 1.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub attribute: String,
    pub start: usize,
    pub width: usize,
}

/// Per-artifact value features: reduced vector blocks and numeric
/// passthrough columns, concatenated in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFeatures {
    pub matrix: DMatrix<f64>,
    pub spans: Vec<BlockSpan>,
    /// Retained-variance fraction per attribute (1.0 for passthrough columns).
    pub explained_variance: Vec<f64>,
    pub column_names: Vec<String>,
}

impl ValueFeatures {
    pub fn width(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn block(&self, attribute: &str) -> Option<DMatrix<f64>> {
        let span = self.spans.iter().find(|s| s.attribute == attribute)?;
        Some(self.matrix.columns(span.start, span.width).into_owned())
    }
}

/// Dense m × dim matrix of one vector attribute.
pub fn attribute_block(corpus: &Corpus, attribute: usize) -> Result<DMatrix<f64>> {
    let spec = &corpus.attributes[attribute];
    let m = corpus.len();
    let mut block = DMatrix::zeros(m, spec.dimension);
    for (i, artifact) in corpus.artifacts.iter().enumerate() {
        match &artifact.values[attribute] {
            Payload::Vector(v) => {
                for (j, x) in v.iter().enumerate() {
                    block[(i, j)] = *x;
                }
            }
            Payload::Scalar(v) => block[(i, 0)] = *v,
            Payload::Missing => {
                return Err(Error::Argument(format!(
                    "attribute `{}` has missing values; impute first",
                    spec.name
                )))
            }
        }
    }
    Ok(block)
}

pub fn pca_value_features(corpus: &Corpus, variance_fraction: f64) -> Result<ValueFeatures> {
    pca_value_features_with(corpus, variance_fraction, PowerIterationSettings::default())
}

pub fn pca_value_features_with(
    corpus: &Corpus,
    variance_fraction: f64,
    settings: PowerIterationSettings,
) -> Result<ValueFeatures> {
    if !(variance_fraction > 0.0 && variance_fraction <= 1.0) {
        return Err(Error::Argument(format!(
            "variance fraction {variance_fraction} outside (0, 1]"
        )));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let m = corpus.len();
    let mut blocks = Vec::with_capacity(corpus.attributes.len());
    let mut spans = Vec::new();
    let mut explained = Vec::new();
    let mut names = Vec::new();
    let mut start = 0;
    for (k, attr) in corpus.attributes.iter().enumerate() {
        let raw = attribute_block(corpus, k)?;
        let (block, ratio) = match attr.kind {
            AttributeKind::Numeric => {
                names.push(attr.name.clone());
                (raw, 1.0)
            }
            AttributeKind::Vector => {
                let pcs = principal_components(&raw, variance_fraction, settings)
                    .map_err(|e| e.context(format!("PCA on `{}`", attr.name)))?;
                for c in 0..pcs.retained() {
                    names.push(format!("{}_pc{}", attr.name, c + 1));
                }
                (pcs.project(&raw), pcs.explained_ratio())
            }
        };
        spans.push(BlockSpan {
            attribute: attr.name.clone(),
            start,
            width: block.ncols(),
        });
        start += block.ncols();
        explained.push(ratio);
        blocks.push(block);
    }
    let mut matrix = DMatrix::zeros(m, start);
    for (span, block) in spans.iter().zip(&blocks) {
        matrix.columns_mut(span.start, span.width).copy_from(block);
    }
    Ok(ValueFeatures {
        matrix,
        spans,
        explained_variance: explained,
        column_names: names,
    })
}

/// Copy of `corpus` whose vector attributes are replaced by their reduced
/// PCA coordinates. Blocks with no retained component become a single zero
/// coordinate.
pub fn reduced_corpus(corpus: &Corpus, value: &ValueFeatures) -> Result<Corpus> {
    let mut out = corpus.clone();
    for (k, attr) in corpus.attributes.iter().enumerate() {
        if attr.kind != AttributeKind::Vector {
            continue;
        }
        let block = value
            .block(&attr.name)
            .ok_or_else(|| Error::Integrity(format!("no value block for `{}`", attr.name)))?;
        if block.nrows() != corpus.len() {
            return Err(Error::Integrity("value features misaligned with corpus".into()));
        }
        let width = block.ncols().max(1);
        out.attributes[k].dimension = width;
        for (i, artifact) in out.artifacts.iter_mut().enumerate() {
            let row: Vec<f64> = if block.ncols() == 0 {
                vec![0.0]
            } else {
                block.row(i).iter().copied().collect()
            };
            artifact.values[k] = Payload::Vector(row);
        }
    }
    Ok(out)
}
