use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::EngineSettings;
use crate::dataset::{
    standardize, ArtifactRecord, AttributeKind, AttributeSpec, Corpus, Label, LabelSpec, Payload, Schema,
};
use crate::error::{Error, Result};
use crate::experiments::analysis::{analyze, prepare_corpus};
use crate::similarity::Kernel;

pub const SYNTHETIC_LABEL: &str = "rating";
pub const SYNTHETIC_NOISE_SD: f64 = 0.05;
const VECTOR_DIM: usize = 6;
const CLUSTERS: usize = 4;
const MISSING_RATE: f64 = 0.03;
const FIRST_YEAR: i32 = 1960;
const LAST_YEAR: i32 = 2010;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelRule {
    ValueOnly,
    NoveltyDriven,
    UnexpectednessDriven,
}

impl fmt::Display for LabelRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelRule::ValueOnly => "value_only",
            LabelRule::NoveltyDriven => "novelty_driven",
            LabelRule::UnexpectednessDriven => "unexpectedness_driven",
        })
    }
}

impl FromStr for LabelRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "value_only" => Ok(LabelRule::ValueOnly),
            "novelty_driven" => Ok(LabelRule::NoveltyDriven),
            "unexpectedness_driven" => Ok(LabelRule::UnexpectednessDriven),
            other => Err(Error::Argument(format!("unknown label rule `{other}`"))),
        }
    }
}

pub fn generate_synthetic_corpus(m: usize, attributes: usize, seed: u64, rule: LabelRule) -> Result<Corpus> {
    generate_synthetic_corpus_with(m, attributes, seed, rule, &EngineSettings::default())
}

/// Random corpus with a planted label.
///
/// Attributes alternate between 6-dimensional vectors (clustered, drifting
/// with time) and numeric values; about 3% of cells are missing. The single
/// label `rating` (max 1) is `0.5 + 0.12 z(signal) + 0.03 z(value) + noise`
/// with noise sd 0.05, where `signal` is the summed standardized novelty or
/// unexpectedness computed by the engine under `settings`, and `value` a
/// linear function of the prepared numeric attributes. For `ValueOnly` the
/// value term alone carries weight 0.12.
pub fn generate_synthetic_corpus_with(
    m: usize,
    attributes: usize,
    seed: u64,
    rule: LabelRule,
    settings: &EngineSettings,
) -> Result<Corpus> {
    if m < 10 {
        return Err(Error::Argument(format!("synthetic corpus needs m >= 10, got {m}")));
    }
    if attributes == 0 {
        return Err(Error::Argument("synthetic corpus needs at least one attribute".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");

    let specs: Vec<AttributeSpec> = (0..attributes)
        .map(|k| {
            if k % 2 == 0 {
                AttributeSpec::vector(format!("vec{k}"), VECTOR_DIM)
            } else {
                AttributeSpec::numeric(format!("num{k}"), Kernel::Linear)
            }
        })
        .collect();

    let years: Vec<i32> = (0..m).map(|_| rng.random_range(FIRST_YEAR..=LAST_YEAR)).collect();
    let mut columns: Vec<Vec<Payload>> = Vec::with_capacity(attributes);
    for spec in &specs {
        let column = match spec.kind {
            AttributeKind::Vector => {
                let centers: Vec<Vec<f64>> = (0..CLUSTERS)
                    .map(|_| (0..VECTOR_DIM).map(|_| std_normal.sample(&mut rng)).collect())
                    .collect();
                let drifts: Vec<Vec<f64>> = (0..CLUSTERS)
                    .map(|_| (0..VECTOR_DIM).map(|_| 0.8 * std_normal.sample(&mut rng)).collect())
                    .collect();
                years
                    .iter()
                    .map(|&year| {
                        let c = rng.random_range(0..CLUSTERS);
                        let phase = f64::from(year - FIRST_YEAR) / f64::from(LAST_YEAR - FIRST_YEAR) - 0.5;
                        let v: Vec<f64> = (0..VECTOR_DIM)
                            .map(|d| centers[c][d] + phase * drifts[c][d] + 0.6 * std_normal.sample(&mut rng))
                            .collect();
                        Payload::Vector(v)
                    })
                    .collect::<Vec<_>>()
            }
            AttributeKind::Numeric => (0..m)
                .map(|_| Payload::Scalar((1000.0 * (0.5 * std_normal.sample(&mut rng)).exp()).round()))
                .collect(),
        };
        columns.push(column);
    }
    for column in &mut columns {
        for cell in column.iter_mut().skip(1) {
            if rng.random_bool(MISSING_RATE) {
                *cell = Payload::Missing;
            }
        }
    }

    let artifacts: Vec<ArtifactRecord> = (0..m)
        .map(|i| ArtifactRecord {
            id: format!("syn{i:05}"),
            year: years[i],
            values: columns.iter().map(|c| c[i].clone()).collect(),
        })
        .collect();
    let unlabeled = Corpus::new(specs, artifacts, Vec::new())?;
    let prepared = prepare_corpus(&unlabeled)?;

    let value = standardize(&value_signal(&prepared));
    let (signal_weight, value_weight, signal) = match rule {
        LabelRule::ValueOnly => (0.0, 0.12, vec![0.0; m]),
        LabelRule::NoveltyDriven | LabelRule::UnexpectednessDriven => {
            let analysis = analyze(&prepared, settings)?;
            let mut total = vec![0.0; m];
            for graph in &analysis.graphs {
                let column = match rule {
                    LabelRule::NoveltyDriven => graph.scores.novelty.clone(),
                    _ => graph.unexpectedness(settings.unexpectedness.measure).filled(),
                };
                for (t, z) in total.iter_mut().zip(standardize(&column)) {
                    *t += z;
                }
            }
            (0.12, 0.03, standardize(&total))
        }
    };

    let noise = Normal::new(0.0, SYNTHETIC_NOISE_SD).expect("valid normal");
    let labels: Vec<Option<f64>> = (0..m)
        .map(|i| {
            let y = 0.5 + signal_weight * signal[i] + value_weight * value[i] + noise.sample(&mut rng);
            Some(y.clamp(0.0, 1.0))
        })
        .collect();

    let mut corpus = unlabeled;
    corpus.labels.push(Label {
        name: SYNTHETIC_LABEL.into(),
        max: 1.0,
        values: labels,
    });
    Ok(corpus)
}

/// Sum of prepared numeric attributes with alternating signs, or the first
/// coordinate of the first vector attribute when there are none.
fn value_signal(prepared: &Corpus) -> Vec<f64> {
    let numeric: Vec<usize> = prepared
        .attributes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind == AttributeKind::Numeric)
        .map(|(k, _)| k)
        .collect();
    prepared
        .artifacts
        .iter()
        .map(|a| {
            if numeric.is_empty() {
                match &a.values[0] {
                    Payload::Vector(v) => v[0],
                    _ => 0.0,
                }
            } else {
                numeric
                    .iter()
                    .enumerate()
                    .map(|(n, &k)| match a.values[k] {
                        Payload::Scalar(v) => if n % 2 == 0 { v } else { -0.5 * v },
                        _ => 0.0,
                    })
                    .sum()
            }
        })
        .collect()
}

/// Writes `artifacts.csv`, `vectors.jsonl` and `schema.json` for `corpus`.
pub fn write_corpus_files(corpus: &Corpus, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let schema = Schema {
        attributes: corpus.attributes.clone(),
        labels: corpus
            .labels
            .iter()
            .map(|l| LabelSpec {
                name: l.name.clone(),
                max: l.max,
            })
            .collect(),
    };
    let schema_path = dir.join("schema.json");
    let json = serde_json::to_string_pretty(&schema)?;
    std::fs::write(&schema_path, json + "\n").map_err(|e| Error::io(&schema_path, e))?;

    let table_path = dir.join("artifacts.csv");
    let mut w = csv::Writer::from_path(&table_path)?;
    let numeric: Vec<usize> = corpus
        .attributes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind == AttributeKind::Numeric)
        .map(|(k, _)| k)
        .collect();
    let mut header = vec!["id".to_string(), "year".to_string()];
    header.extend(numeric.iter().map(|&k| corpus.attributes[k].name.clone()));
    header.extend(corpus.labels.iter().map(|l| l.name.clone()));
    w.write_record(&header)?;
    for (i, artifact) in corpus.artifacts.iter().enumerate() {
        let mut row = vec![artifact.id.clone(), artifact.year.to_string()];
        for &k in &numeric {
            row.push(match artifact.values[k] {
                Payload::Scalar(v) => v.to_string(),
                _ => String::new(),
            });
        }
        for label in &corpus.labels {
            row.push(label.values[i].map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(&table_path, e))?;

    let vectors_path = dir.join("vectors.jsonl");
    let file = std::fs::File::create(&vectors_path).map_err(|e| Error::io(&vectors_path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for artifact in &corpus.artifacts {
        for (attr, value) in corpus.attributes.iter().zip(&artifact.values) {
            if let Payload::Vector(v) = value {
                let line = serde_json::json!({ "id": artifact.id, "attribute": attr.name, "vector": v });
                writeln!(out, "{line}").map_err(|e| Error::io(&vectors_path, e))?;
            }
        }
    }
    out.flush().map_err(|e| Error::io(&vectors_path, e))?;

    Ok(vec![schema_path, table_path, vectors_path])
}
