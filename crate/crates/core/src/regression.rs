//! Rating-prediction models: standardization, splits, ridge, KNN, RMSE.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature matrix with labels normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDesign {
    pub features: DMatrix<f64>,
    pub labels: Vec<f64>,
    pub feature_names: Vec<String>,
}

impl LabeledDesign {
    pub fn new(features: DMatrix<f64>, labels: Vec<f64>, feature_names: Vec<String>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::Integrity(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if features.ncols() != feature_names.len() {
            return Err(Error::Integrity(format!(
                "{} feature columns but {} names",
                features.ncols(),
                feature_names.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite feature value".into()));
        }
        if labels.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Argument("labels must be normalized into [0, 1]".into()));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Divides raw labels by their declared maximum.
pub fn normalize_labels(raw: &[f64], max: f64) -> Result<Vec<f64>> {
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::Argument(format!("label maximum {max} must be positive")));
    }
    Ok(raw.iter().map(|v| v / max).collect())
}

pub fn rescale_labels(normalized: &[f64], max: f64) -> Vec<f64> {
    normalized.iter().map(|v| v * max).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

/// Seeded shuffle of `0..m`; the first `floor(m * train_fraction)` indices
/// train, the rest test.
pub fn split_indices(m: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if m < 2 {
        return Err(Error::Argument(format!("cannot split {m} rows")));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Argument(format!(
            "train fraction {} outside (0, 1)",
            spec.train_fraction
        )));
    }
    let n_train = (m as f64 * spec.train_fraction).floor() as usize;
    if n_train == 0 || n_train == m {
        return Err(Error::Argument(format!(
            "train fraction {} leaves an empty partition of {m} rows",
            spec.train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);
    let test = order.split_off(n_train);
    Ok((order, test))
}

pub fn split(design: &LabeledDesign, spec: &SplitSpec) -> Result<(LabeledDesign, LabeledDesign)> {
    let (train, test) = split_indices(design.len(), spec)?;
    Ok((design.select_rows(&train), design.select_rows(&test)))
}

/// Per-feature train means and standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Population statistics; constant columns get std 1 and turn into zeros.
    pub fn fit(features: &DMatrix<f64>) -> Self {
        let n = features.nrows() as f64;
        let mut means = Vec::with_capacity(features.ncols());
        let mut stds = Vec::with_capacity(features.ncols());
        for column in features.column_iter() {
            let mean = column.sum() / n;
            let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let sd = var.sqrt();
            means.push(mean);
            stds.push(if sd > 1e-12 * mean.abs().max(1.0) { sd } else { 1.0 });
        }
        Self { means, stds }
    }

    pub fn transform(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.ncols() != self.means.len() {
            return Err(Error::Argument(format!(
                "expected {} features, got {}",
                self.means.len(),
                features.ncols()
            )));
        }
        let mut out = features.clone();
        for (j, mut column) in out.column_iter_mut().enumerate() {
            let (mu, sd) = (self.means[j], self.stds[j]);
            column.apply(|v| *v = (*v - mu) / sd);
        }
        Ok(out)
    }
}

/// Serializable description of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub kind: String,
    pub hyperparameters: serde_json::Value,
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
}

pub trait Predictor: Send + Sync {
    fn predict(&self, features: &DMatrix<f64>) -> Result<Vec<f64>>;
    fn describe(&self) -> ModelSummary;
}

/// A model family that can be trained on a design. New regressors plug in
/// by implementing this and [`Predictor`].
pub trait Regressor: Send + Sync {
    fn name(&self) -> &str;
    fn fit(&self, train: &LabeledDesign) -> Result<Box<dyn Predictor>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ridge,
    Knn,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ridge => "ridge",
            ModelKind::Knn => "knn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub lambda: f64,
    /// Weights in standardized feature space.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub standardizer: Standardizer,
    pub feature_names: Vec<String>,
    /// The unregularized system was singular and the minimum-norm fallback was used.
    pub jitter_applied: bool,
}

impl RidgeModel {
    /// Weights and intercept mapped back to the raw feature scale.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let weights: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.standardizer.stds)
            .map(|(w, sd)| w / sd)
            .collect();
        let shift: f64 = weights
            .iter()
            .zip(&self.standardizer.means)
            .map(|(w, mu)| w * mu)
            .sum();
        (weights, self.intercept - shift)
    }
}

/// Solves `(XᵀX + λI) w = Xᵀy`. With `λ = 0` and a singular Gram matrix,
/// falls back to the minimum-norm solution; the flag reports whether that happened.
pub fn solve_normal_equations(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
) -> Result<(DVector<f64>, bool)> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Argument(format!("ridge lambda {lambda} must be nonnegative")));
    }
    let d = x.ncols();
    let gram = x.transpose() * x;
    let rhs = x.transpose() * y;
    let regularized = &gram + DMatrix::identity(d, d) * lambda;

    let scale = gram.diagonal().amax().max(lambda).max(f64::MIN_POSITIVE);
    let well_posed = regularized.clone().cholesky().filter(|c| {
        let l = c.l_dirty();
        (0..d).all(|i| l[(i, i)] * l[(i, i)] > 1e-12 * scale)
    });
    if let Some(chol) = well_posed {
        return Ok((chol.solve(&rhs), false));
    }
    if lambda > 0.0 {
        return Err(Error::Regression("regularized system is not positive definite".into()));
    }
    // Pseudo-inverse through the SVD of X; directions below the numerical
    // rank cutoff are dropped. This is the jitter solution in the limit.
    let svd = x.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Regression("singular value decomposition failed".into())),
    };
    let sigma_max = svd.singular_values.amax();
    let cutoff = f64::EPSILON * x.nrows().max(d) as f64 * sigma_max;
    let mut w = DVector::zeros(d);
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma <= cutoff {
            continue;
        }
        let coef = u.column(k).dot(y) / sigma;
        w += v_t.row(k).transpose() * coef;
    }
    Ok((w, true))
}

pub fn fit_ridge(train: &LabeledDesign, lambda: f64) -> Result<RidgeModel> {
    if train.features.ncols() == 0 {
        return Err(Error::Regression("ridge needs at least one feature".into()));
    }
    if train.is_empty() {
        return Err(Error::Regression("empty training set".into()));
    }
    let standardizer = Standardizer::fit(&train.features);
    let x = standardizer.transform(&train.features)?;
    let intercept = train.labels.iter().sum::<f64>() / train.len() as f64;
    let y = DVector::from_iterator(train.len(), train.labels.iter().map(|v| v - intercept));
    let (w, jitter_applied) = solve_normal_equations(&x, &y, lambda)?;
    Ok(RidgeModel {
        lambda,
        weights: w.iter().copied().collect(),
        intercept,
        standardizer,
        feature_names: train.feature_names.clone(),
        jitter_applied,
    })
}

impl Predictor for RidgeModel {
    fn predict(&self, features: &DMatrix<f64>) -> Result<Vec<f64>> {
        let x = self.standardizer.transform(features)?;
        let w = DVector::from_column_slice(&self.weights);
        Ok((x * w).iter().map(|v| v + self.intercept).collect())
    }

    fn describe(&self) -> ModelSummary {
        ModelSummary {
            kind: ModelKind::Ridge.as_str().into(),
            hyperparameters: serde_json::json!({
                "lambda": self.lambda,
                "jitter_applied": self.jitter_applied,
            }),
            feature_names: self.feature_names.clone(),
            standardizer: self.standardizer.clone(),
            weights: Some(self.weights.clone()),
            intercept: Some(self.intercept),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    /// Standardized training rows.
    pub rows: DMatrix<f64>,
    pub labels: Vec<f64>,
    pub standardizer: Standardizer,
    pub feature_names: Vec<String>,
}

pub fn fit_knn(train: &LabeledDesign, k: usize) -> Result<KnnModel> {
    if k == 0 || k > train.len() {
        return Err(Error::Regression(format!(
            "k = {k} needs 1 <= k <= {} training rows",
            train.len()
        )));
    }
    let standardizer = Standardizer::fit(&train.features);
    let rows = standardizer.transform(&train.features)?;
    Ok(KnnModel {
        k,
        rows,
        labels: train.labels.clone(),
        standardizer,
        feature_names: train.feature_names.clone(),
    })
}

impl KnnModel {
    /// Indices of the `k` nearest standardized training rows; ties go to
    /// the lower index.
    pub fn neighbors(&self, query: &[f64]) -> Vec<usize> {
        let mut dists: Vec<(f64, usize)> = self
            .rows
            .row_iter()
            .enumerate()
            .map(|(i, row)| {
                let d: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
                (d, i)
            })
            .collect();
        let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dists.len() {
            dists.select_nth_unstable_by(self.k - 1, by_distance);
            dists.truncate(self.k);
        }
        dists.sort_by(by_distance);
        dists.into_iter().map(|(_, i)| i).collect()
    }
}

impl Predictor for KnnModel {
    fn predict(&self, features: &DMatrix<f64>) -> Result<Vec<f64>> {
        let x = self.standardizer.transform(features)?;
        Ok(x.row_iter()
            .map(|row| {
                let query: Vec<f64> = row.iter().copied().collect();
                let nn = self.neighbors(&query);
                nn.iter().map(|&i| self.labels[i]).sum::<f64>() / nn.len() as f64
            })
            .collect())
    }

    fn describe(&self) -> ModelSummary {
        ModelSummary {
            kind: ModelKind::Knn.as_str().into(),
            hyperparameters: serde_json::json!({ "k": self.k }),
            feature_names: self.feature_names.clone(),
            standardizer: self.standardizer.clone(),
            weights: None,
            intercept: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeRegressor {
    pub lambda: f64,
}

impl Regressor for RidgeRegressor {
    fn name(&self) -> &str {
        ModelKind::Ridge.as_str()
    }

    fn fit(&self, train: &LabeledDesign) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(fit_ridge(train, self.lambda)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnRegressor {
    pub k: usize,
}

impl Regressor for KnnRegressor {
    fn name(&self) -> &str {
        ModelKind::Knn.as_str()
    }

    fn fit(&self, train: &LabeledDesign) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(fit_knn(train, self.k)?))
    }
}

pub fn predict(model: &dyn Predictor, features: &DMatrix<f64>) -> Result<Vec<f64>> {
    model.predict(features)
}

pub fn rmse(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::Argument("rmse of empty input".into()));
    }
    if predictions.len() != labels.len() {
        return Err(Error::Argument(format!(
            "rmse of {} predictions against {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let sse: f64 = predictions.iter().zip(labels).map(|(p, y)| (p - y) * (p - y)).sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(x: DMatrix<f64>, y: Vec<f64>) -> LabeledDesign {
        let names = (0..x.ncols()).map(|j| format!("f{j}")).collect();
        LabeledDesign::new(x, y, names).unwrap()
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(rmse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!((rmse(&[0.0, 1.0], &[1.0, 1.0]).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(rmse(&[], &[]).is_err());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let spec = SplitSpec { train_fraction: 0.8, seed: 7 };
        let (train, test) = split_indices(10, &spec).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(split_indices(10, &spec).unwrap(), (train, test));
        assert!(split_indices(1, &spec).is_err());
        assert!(split_indices(10, &SplitSpec { train_fraction: 1.0, seed: 0 }).is_err());
    }

    #[test]
    fn normal_equations_on_identity() {
        let x = DMatrix::<f64>::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let (w0, jitter) = solve_normal_equations(&x, &y, 0.0).unwrap();
        assert!(!jitter);
        assert_eq!(w0.as_slice(), &[1.0, 2.0]);
        assert!((&x * &w0 - &y).norm() < 1e-12);
        let (w1, _) = solve_normal_equations(&x, &y, 1.0).unwrap();
        for j in 0..2 {
            assert!((w1[j] - 0.5 * w0[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn ridge_interpolates_identity_design() {
        // Standardizing the 2x2 identity leaves a rank-one design, so the
        // unregularized fit needs the jitter fallback.
        let d = design(DMatrix::identity(2, 2), vec![0.1, 0.2]);
        let model = fit_ridge(&d, 0.0).unwrap();
        assert!(model.jitter_applied);
        let pred = model.predict(&d.features).unwrap();
        assert!(rmse(&pred, &d.labels).unwrap() < 1e-12);

        // Standardized Gram matrix has eigenvalue 4 along the fitted
        // direction, so lambda = 1 shrinks the weights by 4 / 5.
        let shrunk = fit_ridge(&d, 1.0).unwrap();
        for (a, b) in shrunk.weights.iter().zip(&model.weights) {
            assert!((a - 0.8 * b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_weight_ridge_predicts_intercept() {
        let d = design(DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]), vec![0.2, 0.4, 0.6]);
        let mut model = fit_ridge(&d, 1.0).unwrap();
        model.weights = vec![0.0];
        let pred = model.predict(&DMatrix::from_row_slice(2, 1, &[-5.0, 9.0])).unwrap();
        assert_eq!(pred, vec![model.intercept; 2]);
        assert!((model.intercept - 0.4).abs() < 1e-15);
    }

    #[test]
    fn knn_basic_cases() {
        let d = design(
            DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 3.0, 5.0, 5.0]),
            vec![0.1, 0.2, 0.3, 0.4],
        );
        let k1 = fit_knn(&d, 1).unwrap();
        assert_eq!(k1.predict(&d.features).unwrap(), d.labels);
        let all = fit_knn(&d, 4).unwrap();
        let p = all.predict(&DMatrix::from_row_slice(1, 2, &[100.0, -3.0])).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-15);
        assert!(fit_knn(&d, 5).is_err());
        assert!(fit_knn(&d, 0).is_err());
        assert!(k1.predict(&DMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn knn_tie_goes_to_lower_index() {
        let d = design(DMatrix::from_row_slice(3, 1, &[-1.0, 1.0, 0.0]), vec![0.9, 0.1, 0.5]);
        let model = fit_knn(&d, 1).unwrap();
        // Rows 0 and 1 sit at equal distance on either side of row 2.
        assert_eq!(model.neighbors(&[0.0]), vec![2]);
        let model = fit_knn(&d, 2).unwrap();
        let two = model.neighbors(&[0.0]);
        assert_eq!(two, vec![2, 0]);
    }

    #[test]
    fn constant_feature_becomes_zero_column() {
        let s = Standardizer::fit(&DMatrix::from_row_slice(3, 1, &[4.0, 4.0, 4.0]));
        assert_eq!(s.stds, vec![1.0]);
        let t = s.transform(&DMatrix::from_row_slice(1, 1, &[4.0])).unwrap();
        assert_eq!(t[(0, 0)], 0.0);
    }

    #[test]
    fn labels_normalize_and_rescale() {
        let raw = [7.3, 10.0, 1.0];
        let n = normalize_labels(&raw, 10.0).unwrap();
        assert!(n.iter().all(|v| (0.0..=1.0).contains(v)));
        for (a, b) in rescale_labels(&n, 10.0).iter().zip(&raw) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(normalize_labels(&raw, 0.0).is_err());
    }

    #[test]
    fn design_validation() {
        assert!(LabeledDesign::new(DMatrix::zeros(2, 1), vec![0.5], vec!["a".into()]).is_err());
        assert!(LabeledDesign::new(DMatrix::zeros(1, 1), vec![1.5], vec!["a".into()]).is_err());
        assert!(LabeledDesign::new(DMatrix::from_element(1, 1, f64::NAN), vec![0.5], vec!["a".into()]).is_err());
    }
}
