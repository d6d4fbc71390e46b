use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use creativity_core::experiments::{
    correlation_table, generate_synthetic_corpus_with, manifest, run_benchmark, write_corpus_files, Analysis,
    ExperimentReport,
};
use creativity_core::regression::ModelKind;
use creativity_core::Measure;
use log::{info, warn};

use crate::cache::{self, IngestCache};
use crate::config::{self, RunConfig};
use crate::{Failure, GlobalArgs, SynthArgs};

#[derive(Default, serde::Serialize)]
struct Timings {
    ingest_seconds: f64,
    scores_seconds: f64,
    benchmark_seconds: Option<f64>,
}

fn timed<T>(slot: &mut f64, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed().as_secs_f64();
    out
}

fn report_ingest(cache: &IngestCache, reused: bool, run: &RunConfig) {
    let c = &cache.corpus;
    println!(
        "ingest: {} artifacts, {} attributes, {} labels, {} dropped, {} cells imputed ({} {})",
        c.len(),
        c.attributes.len(),
        c.labels.len(),
        cache.dropped.len(),
        cache.imputed_cells,
        if reused { "reused" } else { "wrote" },
        cache::ingest_path(run).display()
    );
}

pub fn ingest(args: &GlobalArgs) -> Result<()> {
    let run = config::load(args)?;
    let (cache, reused) = cache::ingest(&run)?;
    report_ingest(&cache, reused, &run);
    Ok(())
}

/// Warns about every unconverged graph; an error under `--strict`.
fn check_convergence(analysis: &Analysis, run: &RunConfig) -> Result<()> {
    let failed: Vec<String> = analysis
        .graphs
        .iter()
        .filter(|g| !g.scores.converged)
        .map(|g| format!("{}:{}", g.attribute, g.kernel))
        .collect();
    for name in &failed {
        warn!(
            "power iteration for {name} did not converge in {} iterations",
            run.settings.graph.max_iterations
        );
    }
    if run.strict && !failed.is_empty() {
        return Err(Failure::NotConverged(format!("{} graph(s) did not converge: {}", failed.len(), failed.join(", "))).into());
    }
    Ok(())
}

fn prepared(run: &RunConfig, timings: &mut Timings) -> Result<(IngestCache, Analysis)> {
    let (ingest, reused) = timed(&mut timings.ingest_seconds, || cache::ingest(run))?;
    report_ingest(&ingest, reused, run);
    let (analysis, reused) = timed(&mut timings.scores_seconds, || cache::scores(&ingest, run))?;
    info!(
        "scores: {} graphs ({})",
        analysis.graphs.len(),
        if reused { "cached" } else { "computed" }
    );
    check_convergence(&analysis, run)?;
    Ok((ingest, analysis))
}

fn csv_writer(dir: &Path, name: &str) -> Result<(csv::Writer<std::fs::File>, std::path::PathBuf)> {
    let path = dir.join(name);
    let w = csv::Writer::from_path(&path).with_context(|| format!("cannot write `{}`", path.display()))?;
    Ok((w, path))
}

fn write_scores(analysis: &Analysis, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
    let mut written = Vec::new();

    let (mut w, path) = csv_writer(dir, "scores.csv")?;
    w.write_record(["id", "attribute", "kernel", "novelty", "influence", "aggregate"])?;
    for g in &analysis.graphs {
        for (i, id) in analysis.ids.iter().enumerate() {
            w.write_record([
                id.clone(),
                g.attribute.clone(),
                g.kernel.to_string(),
                g.scores.novelty[i].to_string(),
                g.scores.influence[i].to_string(),
                g.scores.aggregate[i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push(path);

    for measure in Measure::ALL {
        let (mut w, path) = csv_writer(dir, &format!("unexpectedness_{measure}.csv"))?;
        w.write_record(["id", "attribute", "kernel", "measure", "unexpectedness", "empty_window"])?;
        for g in &analysis.graphs {
            let u = g.unexpectedness(measure);
            for (i, id) in analysis.ids.iter().enumerate() {
                w.write_record([
                    id.clone(),
                    g.attribute.clone(),
                    g.kernel.to_string(),
                    measure.to_string(),
                    u.values[i].map(|v| v.to_string()).unwrap_or_default(),
                    u.empty_window[i].to_string(),
                ])?;
            }
        }
        w.flush()?;
        written.push(path);
    }

    let path = dir.join("convergence.json");
    let graphs: Vec<serde_json::Value> = analysis
        .graphs
        .iter()
        .map(|g| {
            serde_json::json!({
                "attribute": g.attribute,
                "kernel": g.kernel,
                "converged": g.scores.converged,
                "iterations": g.scores.iterations_used,
                "threshold": g.threshold,
                "fully_dangling": g.fully_dangling,
                "dangling_share": g.scores.dangling_share,
            })
        })
        .collect();
    let json = serde_json::json!({ "all_converged": analysis.all_converged(), "graphs": graphs });
    std::fs::write(&path, serde_json::to_string_pretty(&json)? + "\n")
        .with_context(|| format!("cannot write `{}`", path.display()))?;
    written.push(path);
    Ok(written)
}

pub fn scores(args: &GlobalArgs) -> Result<()> {
    let run = config::load(args)?;
    let mut timings = Timings::default();
    let (ingest, reused) = timed(&mut timings.ingest_seconds, || cache::ingest(&run))?;
    report_ingest(&ingest, reused, &run);
    let (analysis, _) = timed(&mut timings.scores_seconds, || cache::scores(&ingest, &run))?;
    // outputs first, so an unconverged run still leaves its manifest behind
    let written = write_scores(&analysis, &run.output_dir)?;
    println!(
        "scores: {} graphs over {} artifacts, {} converged",
        analysis.graphs.len(),
        analysis.len(),
        analysis.graphs.iter().filter(|g| g.scores.converged).count()
    );
    for p in &written {
        println!("  {}", p.display());
    }
    check_convergence(&analysis, &run)
}

fn label_names(ingest: &IngestCache, run: &RunConfig) -> Result<Vec<String>> {
    let names: Vec<String> = if run.settings.labels.is_empty() {
        ingest.corpus.labels.iter().map(|l| l.name.clone()).collect()
    } else {
        run.settings.labels.clone()
    };
    if names.is_empty() {
        bail!("the corpus has no labels to predict or correlate");
    }
    Ok(names)
}

fn write_timings(dir: &Path, timings: &Timings) -> Result<()> {
    let path = dir.join("timings.json");
    std::fs::write(&path, serde_json::to_string_pretty(timings)? + "\n")
        .with_context(|| format!("cannot write `{}`", path.display()))
}

pub fn benchmark(args: &GlobalArgs) -> Result<()> {
    let run = config::load(args)?;
    let mut timings = Timings::default();
    let (ingest, analysis) = prepared(&run, &mut timings)?;
    let labels = label_names(&ingest, &run)?;
    let mut seconds = 0.0;
    let report = timed(&mut seconds, || Ok(run_benchmark(&ingest.corpus, &analysis, &run.settings)?))?;
    timings.benchmark_seconds = Some(seconds);
    report.write_to_dir(&run.output_dir)?;
    write_timings(&run.output_dir, &timings)?;

    for label in &labels {
        println!("{label} (seed {})", run.settings.regression.seed);
        println!("  {:<10} {:>10} {:>10}", "", "ridge", "knn");
        for combo in &run.settings.combinations {
            let cell = |m| report.rmse_for(label, *combo, m).map(|v| format!("{v:.5}")).unwrap_or_default();
            println!("  {:<10} {:>10} {:>10}", combo.to_string(), cell(ModelKind::Ridge), cell(ModelKind::Knn));
        }
        for imp in report.improvements.iter().filter(|i| &i.label == label) {
            println!(
                "  {} improvement {:.2}% (best {})",
                imp.model.as_str(),
                imp.percent,
                imp.best_combination
            );
        }
    }
    println!("report written to {}", run.output_dir.display());
    Ok(())
}

pub fn correlate(args: &GlobalArgs) -> Result<()> {
    let run = config::load(args)?;
    let mut timings = Timings::default();
    let (ingest, analysis) = prepared(&run, &mut timings)?;
    let labels = label_names(&ingest, &run)?;
    let correlations = correlation_table(&ingest.corpus, &analysis, &run.settings)?;
    let undefined = correlations.iter().filter(|c| c.r.is_none()).count();
    let report = ExperimentReport {
        rmse: Vec::new(),
        improvements: Vec::new(),
        correlations,
        manifest: manifest(&ingest.corpus, &analysis, &run.settings, labels),
    };
    report.write_to_dir(&run.output_dir)?;
    write_timings(&run.output_dir, &timings)?;
    println!(
        "correlations: {} cells ({undefined} undefined) written to {}",
        report.correlations.len(),
        run.output_dir.display()
    );
    Ok(())
}

pub fn synth(args: &GlobalArgs, synth: &SynthArgs) -> Result<()> {
    let run = config::load(args)?;
    let seed = args.seed.unwrap_or(0);
    let corpus = generate_synthetic_corpus_with(synth.m, synth.attributes, seed, synth.label_rule, &run.settings)
        .map_err(|e| match e {
            creativity_core::Error::Argument(msg) => anyhow::Error::new(Failure::Usage(msg)),
            other => other.into(),
        })?;
    let mut written = write_corpus_files(&corpus, &synth.out)?;
    let config_path = synth.out.join("creativity.toml");
    let text = "# generated by `creativity synth`\n\
                [paths]\n\
                schema = \"schema.json\"\n\
                artifacts = \"artifacts.csv\"\n\
                vectors = \"vectors.jsonl\"\n\
                cache_dir = \"cache\"\n\
                output_dir = \"out\"\n";
    std::fs::write(&config_path, text).with_context(|| format!("cannot write `{}`", config_path.display()))?;
    written.push(config_path);
    println!(
        "synth: {} artifacts, {} attributes, labels {} (seed {seed})",
        corpus.len(),
        corpus.attributes.len(),
        synth.label_rule
    );
    for p in &written {
        println!("  {}", p.display());
    }
    Ok(())
}
