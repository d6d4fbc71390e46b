use std::fs;

use creativity_core::experiments::{generate_synthetic_corpus, write_corpus_files, LabelRule};
use creativity_core::{load_corpus, Error, Payload, Schema};

const SCHEMA: &str = r#"{
  "attributes": [
    {"name": "budget", "kind": "numeric", "similarity": "linear"},
    {"name": "plot", "kind": "vector", "dimension": 3, "similarity": "cosine"}
  ],
  "labels": [{"name": "rating", "max": 10}]
}"#;

#[test]
fn three_rows_load_with_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("a.csv");
    let vectors = dir.path().join("v.jsonl");
    fs::write(&table, "id,year,budget,rating\nm1,1999,10,7\nm2,2001,,8\nm3,2003,30,\n").unwrap();
    fs::write(
        &vectors,
        "{\"id\":\"m1\",\"attribute\":\"plot\",\"vector\":[1,0,0]}\n{\"id\":\"m3\",\"attribute\":\"plot\",\"vector\":[0,1,0]}\n",
    )
    .unwrap();
    let schema = Schema::from_json(SCHEMA).unwrap();
    let ingested = load_corpus(&table, Some(&vectors), &schema).unwrap();
    let c = ingested.corpus;
    assert_eq!(c.len(), 3);
    assert_eq!(c.times(), vec![1999, 2001, 2003]);
    assert_eq!(c.artifacts[1].values[0], Payload::Missing);
    assert_eq!(c.artifacts[1].values[1], Payload::Missing);
    assert_eq!(c.labels[0].values, vec![Some(7.0), Some(8.0), None]);
}

#[test]
fn short_vector_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("a.csv");
    let vectors = dir.path().join("v.jsonl");
    fs::write(&table, "id,year,budget,rating\nm1,1999,10,7\n").unwrap();
    fs::write(&vectors, "{\"id\":\"m1\",\"attribute\":\"plot\",\"vector\":[1,0]}\n").unwrap();
    let schema = Schema::from_json(SCHEMA).unwrap();
    let err = load_corpus(&table, Some(&vectors), &schema).unwrap_err();
    assert!(matches!(err.root(), Error::Schema(_)), "{err}");
}

#[test]
fn bad_year_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("a.csv");
    fs::write(&table, "id,year,budget,rating\nm1,1999,10,7\nm2,soon,3,1\n").unwrap();
    let schema = Schema::from_json(SCHEMA).unwrap();
    match load_corpus(&table, None, &schema).unwrap_err().root() {
        Error::Parse { line, .. } => assert_eq!(*line, 3),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn synthetic_corpus_round_trips_through_files() {
    let corpus = generate_synthetic_corpus(60, 3, 9, LabelRule::ValueOnly).unwrap();
    assert_eq!(corpus, generate_synthetic_corpus(60, 3, 9, LabelRule::ValueOnly).unwrap());
    assert_ne!(corpus, generate_synthetic_corpus(60, 3, 10, LabelRule::ValueOnly).unwrap());
    let dir = tempfile::tempdir().unwrap();
    write_corpus_files(&corpus, dir.path()).unwrap();
    let schema = Schema::read(&dir.path().join("schema.json")).unwrap();
    let back = load_corpus(
        &dir.path().join("artifacts.csv"),
        Some(&dir.path().join("vectors.jsonl")),
        &schema,
    )
    .unwrap();
    assert!(back.dropped.is_empty());
    assert_eq!(back.corpus, corpus);
}
