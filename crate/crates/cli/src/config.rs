use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use creativity_core::experiments::FeatureCombination;
use creativity_core::EngineSettings;
use serde::Deserialize;

use crate::{Failure, GlobalArgs};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub schema: Option<PathBuf>,
    pub artifacts: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct FileConfig {
    #[serde(default)]
    paths: PathsConfig,
    #[serde(flatten)]
    engine: EngineSettings,
}

/// Resolved inputs, locations and engine settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schema: Option<PathBuf>,
    pub artifacts: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    pub settings: EngineSettings,
    pub strict: bool,
}

impl RunConfig {
    pub fn schema_path(&self) -> Result<&Path> {
        existing(self.schema.as_deref(), "schema")
    }

    pub fn artifacts_path(&self) -> Result<&Path> {
        existing(self.artifacts.as_deref(), "artifact table")
    }

    pub fn vectors_path(&self) -> Result<Option<&Path>> {
        match &self.vectors {
            Some(p) => existing(Some(p), "vector file").map(Some),
            None => Ok(None),
        }
    }
}

fn existing<'a>(path: Option<&'a Path>, what: &str) -> Result<&'a Path> {
    let path = path.ok_or_else(|| Failure::Usage(format!("no {what} path given (config [paths] or flag)")))?;
    if !path.is_file() {
        return Err(Failure::Usage(format!("{what} `{}` does not exist", path.display())).into());
    }
    Ok(path)
}

pub fn load(args: &GlobalArgs) -> Result<RunConfig> {
    let (file, base) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config `{}`: {e}", path.display())))?;
            let file: FileConfig = toml::from_str(&text)
                .with_context(|| format!("invalid config `{}`", path.display()))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (file, base)
        }
        None => (FileConfig::default(), PathBuf::new()),
    };
    let resolve = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });

    let mut settings = file.engine;
    if let Some(seed) = args.seed {
        settings.regression.seed = seed;
    }
    if let Some(beta) = args.beta {
        settings.graph.beta = beta;
    }
    if let Some(measure) = args.measure {
        settings.unexpectedness.measure = measure;
    }
    if let Some(list) = &args.combinations {
        settings.combinations = list
            .iter()
            .map(|s| s.trim().parse::<FeatureCombination>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    settings.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let paths = file.paths;
    Ok(RunConfig {
        schema: args.schema.clone().or(resolve(paths.schema)),
        artifacts: args.artifacts.clone().or(resolve(paths.artifacts)),
        vectors: args.vectors.clone().or(resolve(paths.vectors)),
        cache_dir: args
            .cache_dir
            .clone()
            .or(resolve(paths.cache_dir))
            .unwrap_or_else(|| base.join("cache")),
        output_dir: args
            .output_dir
            .clone()
            .or(resolve(paths.output_dir))
            .unwrap_or_else(|| base.join("out")),
        settings,
        strict: args.strict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use creativity_core::{Measure, ThresholdRule};

    #[test]
    fn minimal_config_has_all_defaults() {
        let file: FileConfig = toml::from_str("").unwrap();
        assert_eq!(file.engine, EngineSettings::default());
    }

    #[test]
    fn tables_and_top_level_keys_parse() {
        let text = r#"
variance_fraction = 0.8
combinations = ["Baseline", "PN"]

[paths]
schema = "schema.json"

[graph]
beta = 0.5
threshold_rule = "fixed:0.4"
max_iters = 300

[unexpectedness]
measure = "max"
window_years = 3

[regression]
k = 7
"#;
        let file: FileConfig = toml::from_str(text).unwrap();
        assert_eq!(file.engine.variance_fraction, 0.8);
        assert_eq!(file.engine.combinations, vec![FeatureCombination::Baseline, FeatureCombination::PN]);
        assert_eq!(file.engine.graph.threshold_rule, ThresholdRule::Fixed(0.4));
        assert_eq!(file.engine.graph.max_iterations, 300);
        assert_eq!(file.engine.unexpectedness.measure, Measure::Max);
        assert_eq!(file.engine.regression.k, 7);
        assert_eq!(file.paths.schema, Some(PathBuf::from("schema.json")));
    }

    #[test]
    fn flags_override_file_and_paths_resolve_against_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[paths]\nschema = \"s.json\"\n[graph]\nbeta = 0.5\n").unwrap();
        let args = GlobalArgs {
            config: Some(path),
            beta: Some(0.3),
            combinations: Some(vec!["pn".into()]),
            ..Default::default()
        };
        let run = load(&args).unwrap();
        assert_eq!(run.settings.graph.beta, 0.3);
        assert_eq!(run.settings.combinations, vec![FeatureCombination::PN]);
        assert_eq!(run.schema, Some(dir.path().join("s.json")));
        assert_eq!(run.cache_dir, dir.path().join("cache"));
    }
}
