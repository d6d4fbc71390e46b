//! Corpus ingestion and preparation.
//!
//! A corpus is read from three inputs: a CSV artifact table (`id`, `year`,
//! one column per numeric attribute and per label), a JSON Lines vector
//! store (`{"id", "attribute", "vector"}` per record) and a JSON schema
//! listing the attributes in order. Missing cells and absent vector records
//! are kept as [`Payload::Missing`] until [`impute`] fills them.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Numeric,
    Vector,
}

fn default_dimension() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(rename = "similarity")]
    pub similarity_kind: Kernel,
}

impl AttributeSpec {
    pub fn numeric(name: impl Into<String>, similarity_kind: Kernel) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Numeric,
            dimension: 1,
            similarity_kind,
        }
    }

    pub fn vector(name: impl Into<String>, dimension: usize) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Vector,
            dimension,
            similarity_kind: Kernel::Cosine,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Schema("attribute with empty name".into()));
        }
        if self.dimension == 0 {
            return Err(Error::Schema(format!(
                "attribute `{}` has dimension 0",
                self.name
            )));
        }
        match (self.kind, self.similarity_kind) {
            (AttributeKind::Numeric, Kernel::Linear | Kernel::Exponential) => {
                if self.dimension != 1 {
                    return Err(Error::Schema(format!(
                        "numeric attribute `{}` must have dimension 1, got {}",
                        self.name, self.dimension
                    )));
                }
                Ok(())
            }
            (AttributeKind::Vector, Kernel::Cosine) => Ok(()),
            (kind, kernel) => Err(Error::Schema(format!(
                "attribute `{}`: kernel {kernel} is not valid for {kind:?} attributes",
                self.name
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSpec {
    pub name: String,
    /// Highest attainable value; labels are divided by it before regression.
    pub max: f64,
}

/// Attribute list plus label declarations.
///
/// The schema file is either a bare JSON array of attributes or an object
/// `{"attributes": [...], "labels": [{"name", "max"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Schema {
    pub attributes: Vec<AttributeSpec>,
    #[serde(default)]
    pub labels: Vec<LabelSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SchemaFile {
    Bare(Vec<AttributeSpec>),
    Full(Schema),
}

impl Schema {
    pub fn from_json(text: &str) -> Result<Self> {
        let schema = match serde_json::from_str::<SchemaFile>(text)
            .map_err(|e| Error::Schema(format!("cannot parse schema: {e}")))?
        {
            SchemaFile::Bare(attributes) => Schema {
                attributes,
                labels: Vec::new(),
            },
            SchemaFile::Full(schema) => schema,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for attr in &self.attributes {
            attr.validate()?;
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute `{}`", attr.name)));
            }
        }
        for label in &self.labels {
            if !(label.max.is_finite() && label.max > 0.0) {
                return Err(Error::Schema(format!(
                    "label `{}` needs a positive maximum",
                    label.name
                )));
            }
            if matches!(label.name.as_str(), "id" | "year") || !seen.insert(label.name.as_str()) {
                return Err(Error::Schema(format!("label name `{}` clashes", label.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Scalar(f64),
    Vector(Vec<f64>),
    Missing,
}

impl Payload {
    pub fn is_missing(&self) -> bool {
        matches!(self, Payload::Missing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub id: String,
    pub year: i32,
    pub values: Vec<Payload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub name: String,
    pub max: f64,
    /// `None` marks a missing cell until imputation.
    pub values: Vec<Option<f64>>,
}

impl Label {
    /// Observed values, with NaN standing in for anything still missing.
    pub fn dense(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub attributes: Vec<AttributeSpec>,
    pub artifacts: Vec<ArtifactRecord>,
    pub labels: Vec<Label>,
}

impl Corpus {
    pub fn new(
        attributes: Vec<AttributeSpec>,
        artifacts: Vec<ArtifactRecord>,
        labels: Vec<Label>,
    ) -> Result<Self> {
        let corpus = Self {
            attributes,
            artifacts,
            labels,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    pub fn len(&self) -> usize {
        self.artifacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.artifacts.is_empty()
    }

    pub fn times(&self) -> Vec<i32> {
        self.artifacts.iter().map(|a| a.year).collect()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.artifacts.iter().map(|a| a.id.as_str()).collect()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn label(&self, name: &str) -> Option<&Label> {
        self.labels.iter().find(|l| l.name == name)
    }

    pub fn has_missing(&self) -> bool {
        self.artifacts
            .iter()
            .any(|a| a.values.iter().any(Payload::is_missing))
            || self
                .labels
                .iter()
                .any(|l| l.values.iter().any(Option::is_none))
    }

    /// Column of scalar values for a numeric attribute; `None` where missing.
    pub fn scalar_column(&self, attribute: usize) -> Vec<Option<f64>> {
        self.artifacts
            .iter()
            .map(|a| match &a.values[attribute] {
                Payload::Scalar(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for attr in &self.attributes {
            attr.validate()?;
        }
        let mut ids = HashSet::new();
        for artifact in &self.artifacts {
            if !ids.insert(artifact.id.as_str()) {
                return Err(Error::Integrity(format!(
                    "duplicate artifact id `{}`",
                    artifact.id
                )));
            }
            if artifact.values.len() != self.attributes.len() {
                return Err(Error::Integrity(format!(
                    "artifact `{}` has {} values for {} attributes",
                    artifact.id,
                    artifact.values.len(),
                    self.attributes.len()
                )));
            }
            for (attr, value) in self.attributes.iter().zip(&artifact.values) {
                match (attr.kind, value) {
                    (_, Payload::Missing) => {}
                    (AttributeKind::Numeric, Payload::Scalar(v)) if v.is_finite() => {}
                    (AttributeKind::Vector, Payload::Vector(v))
                        if v.len() == attr.dimension && v.iter().all(|x| x.is_finite()) => {}
                    _ => {
                        return Err(Error::Schema(format!(
                            "artifact `{}`: bad payload for attribute `{}`",
                            artifact.id, attr.name
                        )))
                    }
                }
            }
        }
        for label in &self.labels {
            if label.values.len() != self.artifacts.len() {
                return Err(Error::Integrity(format!(
                    "label `{}` has {} values for {} artifacts",
                    label.name,
                    label.values.len(),
                    self.artifacts.len()
                )));
            }
        }
        Ok(())
    }
}

/// Result of reading the input files.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub corpus: Corpus,
    /// Ids of rows rejected for lacking a year.
    pub dropped: Vec<String>,
}

/// Reads a corpus from the artifact table, the optional vector store and a schema.
pub fn load_corpus(table: &Path, vectors: Option<&Path>, schema: &Schema) -> Result<Ingested> {
    let table_file = File::open(table).map_err(|e| Error::io(table, e))?;
    let table_name = table.display().to_string();
    match vectors {
        Some(path) => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            read_corpus(
                table_file,
                &table_name,
                Some((BufReader::new(file), path.display().to_string().as_str())),
                schema,
            )
        }
        None => read_corpus::<_, BufReader<File>>(table_file, &table_name, None, schema),
    }
}

enum Column {
    Id,
    Year,
    Attribute(usize),
    Label(usize),
}

pub fn read_corpus<R: Read, B: BufRead>(
    table: R,
    table_name: &str,
    vectors: Option<(B, &str)>,
    schema: &Schema,
) -> Result<Ingested> {
    schema.validate()?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(table);

    let parse_err = |line: usize, message: String| Error::Parse {
        source_name: table_name.to_string(),
        line,
        message,
    };

    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let mut columns = Vec::with_capacity(headers.len());
    for name in headers.iter() {
        let column = match name {
            "id" => Column::Id,
            "year" => Column::Year,
            _ => {
                if let Some(k) = schema.attributes.iter().position(|a| a.name == name) {
                    if schema.attributes[k].kind != AttributeKind::Numeric {
                        return Err(Error::Schema(format!(
                            "vector attribute `{name}` cannot be a table column"
                        )));
                    }
                    Column::Attribute(k)
                } else if let Some(l) = schema.labels.iter().position(|l| l.name == name) {
                    Column::Label(l)
                } else {
                    return Err(Error::Schema(format!("unknown column `{name}` in {table_name}")));
                }
            }
        };
        columns.push(column);
    }
    for required in ["id", "year"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Schema(format!("{table_name}: missing `{required}` column")));
        }
    }
    for attr in schema.attributes.iter().filter(|a| a.kind == AttributeKind::Numeric) {
        if !headers.iter().any(|h| h == attr.name) {
            return Err(Error::Schema(format!(
                "{table_name}: no column for numeric attribute `{}`",
                attr.name
            )));
        }
    }
    for label in &schema.labels {
        if !headers.iter().any(|h| h == label.name) {
            return Err(Error::Schema(format!(
                "{table_name}: no column for label `{}`",
                label.name
            )));
        }
    }

    let mut artifacts: Vec<ArtifactRecord> = Vec::new();
    let mut label_values: Vec<Vec<Option<f64>>> = vec![Vec::new(); schema.labels.len()];
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut dropped = Vec::new();

    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let mut id = None;
        let mut year = None;
        let mut values = vec![Payload::Missing; schema.attributes.len()];
        let mut labels = vec![None; schema.labels.len()];
        for (cell, column) in record.iter().zip(&columns) {
            match column {
                Column::Id => {
                    if cell.is_empty() {
                        return Err(parse_err(line, "empty id".into()));
                    }
                    id = Some(cell.to_string());
                }
                Column::Year => {
                    if !cell.is_empty() {
                        let y = cell
                            .parse::<i32>()
                            .map_err(|_| parse_err(line, format!("year `{cell}` is not an integer")))?;
                        year = Some(y);
                    }
                }
                Column::Attribute(k) => {
                    if !cell.is_empty() {
                        values[*k] = Payload::Scalar(parse_real(cell).map_err(|m| parse_err(line, m))?);
                    }
                }
                Column::Label(l) => {
                    if !cell.is_empty() {
                        let v = parse_real(cell).map_err(|m| parse_err(line, m))?;
                        let max = schema.labels[*l].max;
                        if !(0.0..=max).contains(&v) {
                            return Err(parse_err(
                                line,
                                format!("label `{}` value {v} outside [0, {max}]", schema.labels[*l].name),
                            ));
                        }
                        labels[*l] = Some(v);
                    }
                }
            }
        }
        let id = id.ok_or_else(|| parse_err(line, "missing id".into()))?;
        let Some(year) = year else {
            dropped.push(id);
            continue;
        };
        if index_of.contains_key(&id) || dropped.contains(&id) {
            return Err(Error::Integrity(format!("duplicate artifact id `{id}` (line {line})")));
        }
        index_of.insert(id.clone(), artifacts.len());
        artifacts.push(ArtifactRecord { id, year, values });
        for (column, v) in label_values.iter_mut().zip(labels) {
            column.push(v);
        }
    }

    if let Some((vectors, vectors_name)) = vectors {
        read_vector_store(vectors, vectors_name, schema, &index_of, &dropped, &mut artifacts)?;
    }

    let labels = schema
        .labels
        .iter()
        .zip(label_values)
        .map(|(spec, values)| Label {
            name: spec.name.clone(),
            max: spec.max,
            values,
        })
        .collect();
    let corpus = Corpus::new(schema.attributes.clone(), artifacts, labels)?;
    Ok(Ingested { corpus, dropped })
}

fn parse_real(cell: &str) -> std::result::Result<f64, String> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{cell}` is not a finite number")),
    }
}

#[derive(Deserialize)]
struct VectorRecord {
    id: String,
    attribute: String,
    vector: Vec<f64>,
}

fn read_vector_store<B: BufRead>(
    reader: B,
    name: &str,
    schema: &Schema,
    index_of: &HashMap<String, usize>,
    dropped: &[String],
    artifacts: &mut [ArtifactRecord],
) -> Result<()> {
    let dropped: HashSet<&str> = dropped.iter().map(String::as_str).collect();
    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: VectorRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            source_name: name.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        let k = schema
            .attributes
            .iter()
            .position(|a| a.name == record.attribute)
            .ok_or_else(|| Error::Schema(format!("{name}:{line_no}: unknown attribute `{}`", record.attribute)))?;
        let spec = &schema.attributes[k];
        if spec.kind != AttributeKind::Vector {
            return Err(Error::Schema(format!(
                "{name}:{line_no}: attribute `{}` is not a vector attribute",
                spec.name
            )));
        }
        if record.vector.len() != spec.dimension {
            return Err(Error::Schema(format!(
                "{name}:{line_no}: attribute `{}` expects dimension {}, got {}",
                spec.name,
                spec.dimension,
                record.vector.len()
            )));
        }
        if record.vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                source_name: name.to_string(),
                line: line_no,
                message: "non-finite vector entry".into(),
            });
        }
        let Some(&i) = index_of.get(&record.id) else {
            if dropped.contains(record.id.as_str()) {
                continue;
            }
            return Err(Error::Integrity(format!(
                "{name}:{line_no}: unknown artifact id `{}`",
                record.id
            )));
        };
        let slot = &mut artifacts[i].values[k];
        if !slot.is_missing() {
            return Err(Error::Integrity(format!(
                "{name}:{line_no}: duplicate vector for (`{}`, `{}`)",
                record.id, spec.name
            )));
        }
        *slot = Payload::Vector(record.vector);
    }
    Ok(())
}

/// Fills missing numeric cells and labels with the observed mean and missing
/// vectors with zeros.
pub fn impute(corpus: &Corpus) -> Result<Corpus> {
    let mut out = corpus.clone();
    for (k, attr) in corpus.attributes.iter().enumerate() {
        let missing = corpus.artifacts.iter().any(|a| a.values[k].is_missing());
        if !missing {
            continue;
        }
        let fill = match attr.kind {
            AttributeKind::Numeric => {
                let observed: Vec<f64> = corpus.scalar_column(k).into_iter().flatten().collect();
                if observed.is_empty() {
                    return Err(Error::Imputation(attr.name.clone()));
                }
                Payload::Scalar(mean(&observed))
            }
            AttributeKind::Vector => {
                if corpus.artifacts.iter().all(|a| a.values[k].is_missing()) {
                    return Err(Error::Imputation(attr.name.clone()));
                }
                Payload::Vector(vec![0.0; attr.dimension])
            }
        };
        for artifact in &mut out.artifacts {
            if artifact.values[k].is_missing() {
                artifact.values[k] = fill.clone();
            }
        }
    }
    for label in &mut out.labels {
        if label.values.iter().all(Option::is_some) {
            continue;
        }
        let observed: Vec<f64> = label.values.iter().flatten().copied().collect();
        if observed.is_empty() {
            return Err(Error::Imputation(label.name.clone()));
        }
        let m = mean(&observed);
        for v in &mut label.values {
            v.get_or_insert(m);
        }
    }
    Ok(out)
}

/// Rescales each numeric attribute to zero mean and unit (population)
/// standard deviation. Constant attributes become all zeros.
pub fn normalize_numeric(corpus: &Corpus) -> Result<Corpus> {
    if corpus.has_missing() {
        return Err(Error::Argument("normalize_numeric requires an imputed corpus".into()));
    }
    let mut out = corpus.clone();
    for (k, attr) in corpus.attributes.iter().enumerate() {
        if attr.kind != AttributeKind::Numeric {
            continue;
        }
        let column: Vec<f64> = corpus.scalar_column(k).into_iter().flatten().collect();
        let scaled = standardize(&column);
        for (artifact, v) in out.artifacts.iter_mut().zip(scaled) {
            artifact.values[k] = Payload::Scalar(v);
        }
    }
    Ok(out)
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Z-scores with population standard deviation; constant input maps to zeros.
pub(crate) fn standardize(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mu = mean(values);
    let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / values.len() as f64;
    let sd = var.sqrt();
    if sd <= f64::EPSILON * mu.abs().max(1.0) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mu) / sd).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Schema {
        Schema {
            attributes: vec![
                AttributeSpec::numeric("budget", Kernel::Linear),
                AttributeSpec::vector("genre", 4),
            ],
            labels: vec![LabelSpec {
                name: "rating".into(),
                max: 10.0,
            }],
        }
    }

    fn read(table: &str, vectors: &str) -> Result<Ingested> {
        read_corpus(
            table.as_bytes(),
            "artifacts.csv",
            Some((vectors.as_bytes(), "vectors.jsonl")),
            &schema(),
        )
    }

    #[test]
    fn three_rows_load() {
        let ing = read(
            "id,year,budget,rating\na,1990,1.0,5\nb,1991,2.0,6\nc,1992,,7\n",
            "{\"id\":\"a\",\"attribute\":\"genre\",\"vector\":[1,0,0,0]}\n",
        )
        .unwrap();
        assert_eq!(ing.corpus.len(), 3);
        assert!(ing.dropped.is_empty());
        assert_eq!(ing.corpus.artifacts[2].values[0], Payload::Missing);
        assert_eq!(ing.corpus.artifacts[1].values[1], Payload::Missing);
        assert_eq!(ing.corpus.artifacts[0].values[1], Payload::Vector(vec![1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn missing_year_is_dropped() {
        let ing = read(
            "id,year,budget,rating\na,1990,1.0,5\nb,,2.0,6\n",
            "{\"id\":\"b\",\"attribute\":\"genre\",\"vector\":[1,0,0,0]}\n",
        )
        .unwrap();
        assert_eq!(ing.corpus.len(), 1);
        assert_eq!(ing.dropped, vec!["b".to_string()]);
    }

    #[test]
    fn short_vector_is_schema_error() {
        let err = read(
            "id,year,budget,rating\na,1990,1.0,5\n",
            "{\"id\":\"a\",\"attribute\":\"genre\",\"vector\":[1,0,0]}\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = read("id,year,budget,rating\na,1990,1.0,5\nb,1991,abc,5\n", "").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = read("id,year,budget,rating\na,19x0,1.0,5\n", "").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn duplicate_id_and_vector_rows() {
        let err = read("id,year,budget,rating\na,1990,1,5\na,1991,2,5\n", "").unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
        let v = "{\"id\":\"a\",\"attribute\":\"genre\",\"vector\":[1,0,0,0]}\n";
        let err = read("id,year,budget,rating\na,1990,1,5\n", &format!("{v}{v}")).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
        let err = read(
            "id,year,budget,rating\na,1990,1,5\n",
            "{\"id\":\"zz\",\"attribute\":\"genre\",\"vector\":[1,0,0,0]}\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn schema_file_forms() {
        let bare = r#"[{"name":"runtime","kind":"numeric","similarity":"exponential"}]"#;
        let s = Schema::from_json(bare).unwrap();
        assert_eq!(s.attributes[0].dimension, 1);
        assert!(s.labels.is_empty());
        let bad = r#"[{"name":"plot","kind":"vector","dimension":3,"similarity":"linear"}]"#;
        assert!(matches!(Schema::from_json(bad), Err(Error::Schema(_))));
        let bad = r#"[{"name":"x","kind":"numeric","dimension":2,"similarity":"linear"}]"#;
        assert!(matches!(Schema::from_json(bad), Err(Error::Schema(_))));
    }

    #[test]
    fn impute_numeric_mean_and_zero_vector() {
        let ing = read(
            "id,year,budget,rating\na,1990,2,5\nb,1991,,\nc,1992,4,7\n",
            "{\"id\":\"a\",\"attribute\":\"genre\",\"vector\":[1,2,3,4]}\n",
        )
        .unwrap();
        let c = impute(&ing.corpus).unwrap();
        let col: Vec<f64> = c.scalar_column(0).into_iter().flatten().collect();
        assert_eq!(col, vec![2.0, 3.0, 4.0]);
        assert_eq!(c.artifacts[1].values[1], Payload::Vector(vec![0.0; 4]));
        assert_eq!(c.labels[0].values[1], Some(6.0));
        assert!(!c.has_missing());
        assert_eq!(impute(&c).unwrap(), c);
    }

    #[test]
    fn impute_without_observations_fails() {
        let ing = read("id,year,budget,rating\na,1990,,5\n", "").unwrap();
        match impute(&ing.corpus) {
            Err(Error::Imputation(name)) => assert_eq!(name, "budget"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn standardize_cases() {
        assert_eq!(standardize(&[0.0, 2.0]), vec![-1.0, 1.0]);
        assert_eq!(standardize(&[5.0, 5.0, 5.0]), vec![0.0, 0.0, 0.0]);
        let z = standardize(&[1.0, 4.0, 9.0, 2.5]);
        let again = standardize(&z);
        for (a, b) in z.iter().zip(&again) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
