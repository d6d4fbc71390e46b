use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::EngineSettings;
use crate::dataset::Corpus;
use crate::error::{Error, Result};
use crate::experiments::analysis::Analysis;
use crate::experiments::features::{assemble_features, FeatureCombination};
use crate::experiments::probe::{chronology_probe, ChronologyProbe};
use crate::experiments::stats::pearson;
use crate::graph::{GraphConfig, ThresholdRule};
use crate::par_map;
use crate::regression::{
    normalize_labels, rmse, split_indices, KnnRegressor, LabeledDesign, ModelKind, Regressor,
    RidgeRegressor,
};
use crate::similarity::Kernel;
use crate::unexpectedness::Measure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseCell {
    pub label: String,
    pub combination: FeatureCombination,
    pub model: ModelKind,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub label: String,
    pub model: ModelKind,
    pub baseline: f64,
    pub best: f64,
    pub best_combination: FeatureCombination,
    pub percent: f64,
}

/// `(baseline - best) / baseline * 100`
pub fn improvement_percent(baseline: f64, best: f64) -> f64 {
    (baseline - best) / baseline * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMeasure {
    Novelty,
    Influence,
    Aggregate,
    Unexpectedness(Measure),
}

impl CorrelationMeasure {
    pub const ALL: [CorrelationMeasure; 6] = [
        CorrelationMeasure::Novelty,
        CorrelationMeasure::Influence,
        CorrelationMeasure::Aggregate,
        CorrelationMeasure::Unexpectedness(Measure::Max),
        CorrelationMeasure::Unexpectedness(Measure::Mean),
        CorrelationMeasure::Unexpectedness(Measure::InverseWeighted),
    ];
}

impl fmt::Display for CorrelationMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelationMeasure::Novelty => f.write_str("novelty"),
            CorrelationMeasure::Influence => f.write_str("influence"),
            CorrelationMeasure::Aggregate => f.write_str("aggregate"),
            CorrelationMeasure::Unexpectedness(m) => write!(f, "unexpectedness_{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub label: String,
    pub attribute: String,
    pub kernel: Kernel,
    pub measure: CorrelationMeasure,
    /// `None` when either side is constant.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStatus {
    pub attribute: String,
    pub kernel: Kernel,
    pub converged: bool,
    pub iterations: usize,
    pub threshold: Option<f64>,
    pub fully_dangling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub config_hash: String,
    pub artifacts: usize,
    pub labels: Vec<String>,
    pub combinations: Vec<FeatureCombination>,
    pub all_converged: bool,
    pub graphs: Vec<GraphStatus>,
    pub chronology_probes: Vec<ChronologyProbe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rmse: Vec<RmseCell>,
    pub improvements: Vec<Improvement>,
    pub correlations: Vec<CorrelationCell>,
    pub manifest: RunManifest,
}

impl ExperimentReport {
    pub fn rmse_for(&self, label: &str, combination: FeatureCombination, model: ModelKind) -> Option<f64> {
        self.rmse
            .iter()
            .find(|c| c.label == label && c.combination == combination && c.model == model)
            .map(|c| c.rmse)
    }
}

fn selected_labels(corpus: &Corpus, settings: &EngineSettings) -> Result<Vec<String>> {
    if settings.labels.is_empty() {
        return Ok(corpus.labels.iter().map(|l| l.name.clone()).collect());
    }
    for name in &settings.labels {
        if corpus.label(name).is_none() {
            return Err(Error::Argument(format!("unknown label `{name}`")));
        }
    }
    Ok(settings.labels.clone())
}

fn check_alignment(corpus: &Corpus, analysis: &Analysis) -> Result<()> {
    let aligned = corpus.len() == analysis.len()
        && corpus
            .artifacts
            .iter()
            .zip(&analysis.ids)
            .all(|(a, id)| &a.id == id);
    if aligned {
        Ok(())
    } else {
        Err(Error::Integrity("analysis does not match corpus artifact order".into()))
    }
}

fn normalized_label(corpus: &Corpus, name: &str) -> Result<Vec<f64>> {
    let label = corpus
        .label(name)
        .ok_or_else(|| Error::Argument(format!("unknown label `{name}`")))?;
    if label.values.iter().any(Option::is_none) {
        return Err(Error::Argument(format!("label `{name}` has missing values; impute first")));
    }
    normalize_labels(&label.dense(), label.max)
}

/// RMSE of every (label, combination, model) on one shared split per label,
/// the improvement rows, and the correlation table.
pub fn run_benchmark(corpus: &Corpus, analysis: &Analysis, settings: &EngineSettings) -> Result<ExperimentReport> {
    settings.validate()?;
    check_alignment(corpus, analysis)?;
    let labels = selected_labels(corpus, settings)?;
    if labels.is_empty() {
        return Err(Error::Argument("corpus has no labels to predict".into()));
    }

    let columns = analysis.criterion_columns(settings.unexpectedness.measure);
    let designs = settings
        .combinations
        .iter()
        .map(|&combo| assemble_features(&analysis.value, &columns, combo).map(|f| (combo, f)))
        .collect::<Result<Vec<_>>>()?;
    let (train_rows, test_rows) = split_indices(corpus.len(), &settings.regression.split_spec())?;

    let regressors: Vec<(ModelKind, Box<dyn Regressor>)> = vec![
        (
            ModelKind::Ridge,
            Box::new(RidgeRegressor {
                lambda: settings.regression.lambda,
            }),
        ),
        (ModelKind::Knn, Box::new(KnnRegressor { k: settings.regression.k })),
    ];

    let mut tasks = Vec::new();
    for label in &labels {
        let y = normalized_label(corpus, label)?;
        for (combo, features) in &designs {
            for (kind, regressor) in &regressors {
                tasks.push((label.clone(), y.clone(), *combo, features, *kind, regressor.as_ref()));
            }
        }
    }

    let cells = par_map(tasks, |(label, y, combo, features, kind, regressor)| -> Result<RmseCell> {
        let context = format!("label `{label}`, combination {combo}, model {}", kind.as_str());
        let run = || -> Result<f64> {
            let design = LabeledDesign::new(features.matrix.clone(), y, features.names.clone())?;
            let train = design.select_rows(&train_rows);
            let test = design.select_rows(&test_rows);
            let model = regressor.fit(&train)?;
            let predictions = model.predict(&test.features)?;
            rmse(&predictions, &test.labels)
        };
        let value = run().map_err(|e| e.context(context))?;
        Ok(RmseCell {
            label,
            combination: combo,
            model: kind,
            rmse: value,
        })
    });
    let rmse_cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    let improvements = improvements(&rmse_cells, &labels);
    let correlations = correlation_table(corpus, analysis, settings)?;

    Ok(ExperimentReport {
        rmse: rmse_cells,
        improvements,
        correlations,
        manifest: manifest(corpus, analysis, settings, labels),
    })
}

/// Per (label, model): the best combination against Baseline. Skipped when
/// Baseline was not run.
pub fn improvements(cells: &[RmseCell], labels: &[String]) -> Vec<Improvement> {
    let mut out = Vec::new();
    for label in labels {
        for model in [ModelKind::Ridge, ModelKind::Knn] {
            let rows: Vec<&RmseCell> = cells.iter().filter(|c| &c.label == label && c.model == model).collect();
            let Some(baseline) = rows.iter().find(|c| c.combination == FeatureCombination::Baseline) else {
                continue;
            };
            let best = rows
                .iter()
                .min_by(|a, b| a.rmse.total_cmp(&b.rmse).then(a.combination.cmp(&b.combination)))
                .expect("baseline row exists");
            out.push(Improvement {
                label: label.clone(),
                model,
                baseline: baseline.rmse,
                best: best.rmse,
                best_combination: best.combination,
                percent: improvement_percent(baseline.rmse, best.rmse),
            });
        }
    }
    out
}

/// Pearson r of every (attribute, kernel) score column with every label,
/// over the full corpus.
pub fn correlation_table(
    corpus: &Corpus,
    analysis: &Analysis,
    settings: &EngineSettings,
) -> Result<Vec<CorrelationCell>> {
    check_alignment(corpus, analysis)?;
    let labels = selected_labels(corpus, settings)?;
    let mut out = Vec::new();
    for label in &labels {
        let y = normalized_label(corpus, label)?;
        for graph in &analysis.graphs {
            for measure in CorrelationMeasure::ALL {
                let x = match measure {
                    CorrelationMeasure::Novelty => graph.scores.novelty.clone(),
                    CorrelationMeasure::Influence => graph.scores.influence.clone(),
                    CorrelationMeasure::Aggregate => graph.scores.aggregate.clone(),
                    CorrelationMeasure::Unexpectedness(m) => graph.unexpectedness(m).filled(),
                };
                let r = match pearson(&x, &y) {
                    Ok(r) => Some(r),
                    Err(Error::UndefinedCorrelation(_)) => None,
                    Err(e) => return Err(e),
                };
                out.push(CorrelationCell {
                    label: label.clone(),
                    attribute: graph.attribute.clone(),
                    kernel: graph.kernel,
                    measure,
                    r,
                });
            }
        }
    }
    Ok(out)
}

pub fn manifest(corpus: &Corpus, analysis: &Analysis, settings: &EngineSettings, labels: Vec<String>) -> RunManifest {
    let fixed = GraphConfig {
        threshold_rule: ThresholdRule::Fixed(0.5),
        ..settings.graph
    };
    let probes = [settings.graph, fixed]
        .iter()
        .filter_map(|config| chronology_probe(5, config).ok())
        .collect();
    RunManifest {
        seed: settings.regression.seed,
        config_hash: settings.hash(),
        artifacts: corpus.len(),
        labels,
        combinations: settings.combinations.clone(),
        all_converged: analysis.all_converged(),
        graphs: analysis
            .graphs
            .iter()
            .map(|g| GraphStatus {
                attribute: g.attribute.clone(),
                kernel: g.kernel,
                converged: g.scores.converged,
                iterations: g.scores.iterations_used,
                threshold: g.threshold,
                fully_dangling: g.fully_dangling,
            })
            .collect(),
        chronology_probes: probes,
    }
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn strings<const N: usize>(items: [&str; N]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl ExperimentReport {
    /// Writes `rmse.csv`, `improvements.csv`, per-label `rmse_<label>.csv`
    /// tables, `correlations.csv`, per-measure `heatmap_<measure>.csv`
    /// matrices and `manifest.json`. Returns the paths written.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();

        if !self.rmse.is_empty() {
            let path = dir.join("rmse.csv");
            let rows: Vec<Vec<String>> = self
                .rmse
                .iter()
                .map(|c| vec![c.label.clone(), c.combination.to_string(), c.model.as_str().into(), c.rmse.to_string()])
                .collect();
            write_csv(&path, &strings(["label", "combination", "model", "rmse"]), &rows)?;
            written.push(path);

            let path = dir.join("improvements.csv");
            let rows: Vec<Vec<String>> = self
                .improvements
                .iter()
                .map(|i| {
                    vec![
                        i.label.clone(),
                        i.model.as_str().into(),
                        i.baseline.to_string(),
                        i.best.to_string(),
                        i.best_combination.to_string(),
                        i.percent.to_string(),
                    ]
                })
                .collect();
            let header = strings(["label", "model", "baseline_rmse", "best_rmse", "best_combination", "improvement_percent"]);
            write_csv(&path, &header, &rows)?;
            written.push(path);

            for label in &self.manifest.labels {
                let path = dir.join(format!("rmse_{}.csv", file_safe(label)));
                let models = [ModelKind::Ridge, ModelKind::Knn];
                let mut rows = Vec::new();
                for combo in &self.manifest.combinations {
                    let mut row = vec![combo.to_string()];
                    row.extend(models.iter().map(|&m| opt(self.rmse_for(label, *combo, m))));
                    rows.push(row);
                }
                let mut row = vec!["Improvement%".to_string()];
                row.extend(models.iter().map(|&m| {
                    opt(self
                        .improvements
                        .iter()
                        .find(|i| &i.label == label && i.model == m)
                        .map(|i| i.percent))
                }));
                rows.push(row);
                write_csv(&path, &strings(["combination", "ridge", "knn"]), &rows)?;
                written.push(path);
            }
        }

        let path = dir.join("correlations.csv");
        let rows: Vec<Vec<String>> = self
            .correlations
            .iter()
            .map(|c| {
                vec![
                    c.label.clone(),
                    c.attribute.clone(),
                    c.kernel.to_string(),
                    c.measure.to_string(),
                    opt(c.r),
                ]
            })
            .collect();
        write_csv(&path, &strings(["label", "attribute", "kernel", "measure", "pearson_r"]), &rows)?;
        written.push(path);

        for measure in CorrelationMeasure::ALL {
            let mut grid: BTreeMap<(usize, String), Vec<String>> = BTreeMap::new();
            let mut order: Vec<String> = Vec::new();
            for cell in self.correlations.iter().filter(|c| c.measure == measure) {
                let key = format!("{}:{}", cell.attribute, cell.kernel);
                let pos = match order.iter().position(|k| k == &key) {
                    Some(p) => p,
                    None => {
                        order.push(key.clone());
                        order.len() - 1
                    }
                };
                grid.entry((pos, key)).or_default().push(opt(cell.r));
            }
            if grid.is_empty() {
                continue;
            }
            let mut header = vec!["attribute_kernel".to_string()];
            header.extend(self.manifest.labels.iter().cloned());
            let rows: Vec<Vec<String>> = grid
                .into_iter()
                .map(|((_, key), values)| std::iter::once(key).chain(values).collect())
                .collect();
            let path = dir.join(format!("heatmap_{measure}.csv"));
            write_csv(&path, &header, &rows)?;
            written.push(path);
        }

        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(written)
    }
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
