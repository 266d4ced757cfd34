//! Pipeline configuration: one TOML file, unknown keys rejected. Relative
//! paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub retrieval: RetrievalSection,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
    #[serde(default)]
    pub features: FeatureSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub manifest: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub suffix_rules: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub judgments: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Embedding stores by name, used by the embedding rerankers.
    #[serde(default)]
    pub embeddings: BTreeMap<String, PathBuf>,
    /// Gold benchmark corpora by name, used by `ablate`.
    #[serde(default)]
    pub benchmarks: BTreeMap<String, PathBuf>,
    /// Nested gold entity sidecars, keyed like `benchmarks`.
    #[serde(default)]
    pub benchmark_entities: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalSection {
    pub limit: Option<usize>,
    pub jaccard_tolerance: Option<f64>,
    pub jaccard_stride: Option<usize>,
    pub phrase_slack: Option<usize>,
    pub max_edits: Option<usize>,
    pub bm25_k1: Option<f64>,
    pub bm25_b: Option<f64>,
    pub rrf_k: Option<f64>,
    pub rrf_wiring: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSection {
    pub method: Option<String>,
    pub candidate_limit: Option<usize>,
    pub split_ratios: Option<[f64; 3]>,
    pub corpus_name: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSection {
    pub hash_dim: Option<usize>,
    pub ngram_sizes: Option<Vec<usize>>,
    pub window: Option<usize>,
    pub shape_features: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub loss: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub beta: Option<f64>,
    pub per_language: Option<bool>,
    pub top_k: Option<usize>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: PipelineConfig =
            toml::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.paths.resolve(base);
        config.paths.check_exist()?;
        Ok(config)
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.manifest,
            &mut self.gazetteer,
            &mut self.lemmas,
            &mut self.suffix_rules,
            &mut self.abbreviations,
            &mut self.judgments,
            &mut self.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        for map in [&mut self.embeddings, &mut self.benchmarks, &mut self.benchmark_entities] {
            map.values_mut().for_each(fix);
        }
    }

    /// Every input path must exist; the output directory is created later.
    fn check_exist(&self) -> Result<(), CliError> {
        let singles = [
            ("paths.manifest", &self.manifest),
            ("paths.gazetteer", &self.gazetteer),
            ("paths.lemmas", &self.lemmas),
            ("paths.suffix_rules", &self.suffix_rules),
            ("paths.abbreviations", &self.abbreviations),
            ("paths.judgments", &self.judgments),
        ];
        for (key, p) in singles {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(CliError::usage(format!("{key}: {} does not exist", p.display())));
                }
            }
        }
        for (section, map) in [
            ("paths.embeddings", &self.embeddings),
            ("paths.benchmarks", &self.benchmarks),
            ("paths.benchmark_entities", &self.benchmark_entities),
        ] {
            for (name, p) in map {
                if !p.exists() {
                    return Err(CliError::usage(format!("{section}.{name}: {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }
}
