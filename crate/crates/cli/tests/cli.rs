use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_creativity"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn synth(dir: &Path, m: usize, seed: u64) -> PathBuf {
    let data = dir.join("data");
    let out = run(&[
        "synth",
        "--out",
        data.to_str().unwrap(),
        "--m",
        &m.to_string(),
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    data.join("creativity.toml")
}

const TINY_SCHEMA: &str = r#"{"attributes": [
  {"name": "x", "kind": "numeric", "similarity": "linear"},
  {"name": "v", "kind": "vector", "dimension": 2, "similarity": "cosine"}
], "labels": [{"name": "score", "max": 5}]}"#;

/// Five artifacts; every artifact in `year` when given.
fn tiny(dir: &Path, year: Option<i32>) -> PathBuf {
    let mut table = String::from("id,year,x,score\n");
    let mut vectors = String::new();
    for i in 0..5 {
        let y = year.unwrap_or(2000 + 2 * i);
        table.push_str(&format!("t{i},{y},{},{}\n", i * i, 1 + i % 4));
        vectors.push_str(&format!("{{\"id\":\"t{i}\",\"attribute\":\"v\",\"vector\":[{},{}]}}\n", i, 5 - i));
    }
    fs::write(dir.join("schema.json"), TINY_SCHEMA).unwrap();
    fs::write(dir.join("a.csv"), table).unwrap();
    fs::write(dir.join("v.jsonl"), vectors).unwrap();
    let config = dir.join("c.toml");
    fs::write(
        &config,
        "[paths]\nschema = \"schema.json\"\nartifacts = \"a.csv\"\nvectors = \"v.jsonl\"\n",
    )
    .unwrap();
    config
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timings.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["benchmark", "--measure", "median"])), 1);
    assert_eq!(code(&run(&["benchmark", "--combinations", "Baseline,XYZ"])), 1);
}

#[test]
fn missing_schema_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["ingest", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let out = run(&["ingest", "--schema", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn malformed_data_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(dir.path(), None);
    fs::write(dir.path().join("a.csv"), "id,year,x,score\nt0,19x9,1,2\n").unwrap();
    let out = run(&["ingest", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn ingest_caches_and_invalidates() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(dir.path(), None);
    let c = config.to_str().unwrap();
    let first = run(&["ingest", "--config", c]);
    assert_eq!(code(&first), 0);
    assert!(stdout(&first).contains("5 artifacts") && stdout(&first).contains("wrote"));
    assert!(dir.path().join("cache/ingest.json").is_file());
    assert!(stdout(&run(&["ingest", "--config", c])).contains("reused"));

    let table = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    fs::write(dir.path().join("a.csv"), table.replace("t4,2008,16", "t4,2008,17")).unwrap();
    assert!(stdout(&run(&["ingest", "--config", c])).contains("wrote"));
}

#[test]
fn scores_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(dir.path(), None);
    let c = config.to_str().unwrap();
    assert_eq!(code(&run(&["scores", "--config", c])), 0);
    let out = dir.path().join("out");
    // x gets linear and exponential graphs, v a cosine graph
    let rows = csv_rows(&out.join("scores.csv"));
    assert_eq!(rows.len(), 15);
    for key in ["x:linear", "x:exponential", "v:cosine"] {
        let n = rows.iter().filter(|r| format!("{}:{}", r[1], r[2]) == key).count();
        assert_eq!(n, 5, "{key}");
    }
    let first = dir_bytes(&out);
    assert_eq!(code(&run(&["scores", "--config", c])), 0);
    assert_eq!(first, dir_bytes(&out));

    // cold caches give the same bytes
    fs::remove_dir_all(dir.path().join("cache")).unwrap();
    assert_eq!(code(&run(&["scores", "--config", c])), 0);
    assert_eq!(first, dir_bytes(&out));
}

#[test]
fn single_year_corpus_flags_every_window() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(dir.path(), Some(2001));
    assert_eq!(code(&run(&["scores", "--config", config.to_str().unwrap()])), 0);
    for measure in ["max", "mean", "inverse_weighted"] {
        let rows = csv_rows(&dir.path().join(format!("out/unexpectedness_{measure}.csv")));
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().all(|r| r[5] == "true" && r[4] == "0"));
    }
}

#[test]
fn strict_mode_fails_on_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny(dir.path(), None);
    let text = fs::read_to_string(&config).unwrap() + "[graph]\nmax_iters = 1\n";
    fs::write(&config, text).unwrap();
    let c = config.to_str().unwrap();
    assert_eq!(code(&run(&["scores", "--config", c])), 0);
    assert_eq!(code(&run(&["scores", "--config", c, "--strict"])), 3);
    assert_eq!(code(&run(&["benchmark", "--config", c, "--strict"])), 3);
    let manifest = fs::read_to_string(dir.path().join("out/convergence.json")).unwrap();
    assert!(manifest.contains("\"all_converged\": false"));
}

#[test]
fn benchmark_report_shape_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth(dir.path(), 80, 1);
    let c = config.to_str().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cache_b = dir.path().join("cache_b");

    let res = run(&["benchmark", "--config", c, "--output-dir", out_a.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(csv_rows(&out_a.join("rmse.csv")).len(), 8 * 2);
    assert_eq!(csv_rows(&out_a.join("rmse_rating.csv")).len(), 8 + 1);
    assert!(out_a.join("manifest.json").is_file() && out_a.join("timings.json").is_file());

    // second run from a cold cache into another directory
    let res = run(&[
        "benchmark",
        "--config",
        c,
        "--output-dir",
        out_b.to_str().unwrap(),
        "--cache-dir",
        cache_b.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(code(&res), 0);
    assert_eq!(dir_bytes(&out_a), dir_bytes(&out_b));

    let out_c = dir.path().join("c");
    let res = run(&["benchmark", "--config", c, "--output-dir", out_c.to_str().unwrap(), "--combinations", "Baseline,PN"]);
    assert_eq!(code(&res), 0);
    let table = csv_rows(&out_c.join("rmse_rating.csv"));
    assert_eq!(table.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), vec!["Baseline", "PN", "Improvement%"]);
    assert_eq!(csv_rows(&out_c.join("rmse.csv")).len(), 4);

    let out_d = dir.path().join("d");
    let res = run(&["benchmark", "--config", c, "--output-dir", out_d.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(code(&res), 0);
    let a = csv_rows(&out_a.join("rmse.csv"));
    let d = csv_rows(&out_d.join("rmse.csv"));
    assert_eq!(a.len(), d.len());
    assert!(a.iter().zip(&d).all(|(x, y)| x[..3] == y[..3]));
    assert_ne!(a, d);
}

#[test]
fn correlate_writes_table_and_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth(dir.path(), 40, 2);
    let res = run(&["correlate", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    let out = dir.path().join("data/out");
    // 3 synthetic attributes: two vectors and one numeric with both kernels
    assert_eq!(csv_rows(&out.join("correlations.csv")).len(), 4 * 6);
    assert_eq!(csv_rows(&out.join("heatmap_novelty.csv")).len(), 4);
    assert!(!out.join("rmse.csv").exists());
}
