//! Run configuration: a TOML file whose tables mirror the subcommands, with
//! command-line flags applied on top. The resolved result is written next to
//! every output.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hypenet::baselines::{DistMethod, LogRegConfig, SlqsConfig};
use hypenet::dataset::{Fractions, PositiveWhitelist, SplitMode};
use hypenet::features::{SNOW_GEN_TOP_K, SNOW_TOP_K};
use hypenet::network::TrainConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub extract: ExtractConfig,
    pub dataset: DatasetConfig,
    pub train: TrainSection,
    pub evaluate: EvaluateConfig,
    pub analyze: AnalyzeConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text)
            .map_err(|e| anyhow::anyhow!("parsing config {}: {}", path.display(), one_line(&e.to_string())))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    pub corpus: Vec<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub relations: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub split: SplitMode,
    pub fractions: Fractions,
    pub negatives_per_positive: usize,
    /// `(resource, relation)` pairs labeled positive.
    pub positive_relations: PositiveWhitelist,
    pub out: Option<PathBuf>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            relations: None,
            index: None,
            split: SplitMode::Random,
            fractions: Fractions::default(),
            negatives_per_positive: 4,
            positive_relations: PositiveWhitelist::default(),
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    HypenetPath,
    HypenetIntegrated,
    Snow,
    SnowGen,
    DistLogreg,
    Slqs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::HypenetPath => "hypenet-path",
            Method::HypenetIntegrated => "hypenet-integrated",
            Method::Snow => "snow",
            Method::SnowGen => "snow-gen",
            Method::DistLogreg => "dist-logreg",
            Method::Slqs => "slqs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub method: Option<Method>,
    pub dataset_dir: Option<PathBuf>,
    /// Defaults to the index recorded in the dataset manifest.
    pub index: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    /// Parsed corpus files; SLQS only.
    pub corpus: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub path_only: TrainConfig,
    pub integrated: TrainConfig,
    /// Feature cap for `snow`.
    pub snow_top_k: usize,
    /// Feature cap for `snow-gen`.
    pub snow_gen_top_k: usize,
    pub logreg: LogRegConfig,
    pub dist_method: DistMethod,
    pub slqs: SlqsConfig,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            method: None,
            dataset_dir: None,
            index: None,
            embeddings: None,
            corpus: Vec::new(),
            out: None,
            path_only: TrainConfig::path_only(),
            integrated: TrainConfig::integrated(),
            snow_top_k: SNOW_TOP_K,
            snow_gen_top_k: SNOW_GEN_TOP_K,
            logreg: LogRegConfig::default(),
            dist_method: DistMethod::Concat,
            slqs: SlqsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub model: Option<PathBuf>,
    pub dataset_dir: Option<PathBuf>,
    /// Pair file to score; defaults to `test.tsv` in the dataset directory.
    pub test: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    /// Relation file used to bucket false positives by relation.
    pub relations: Option<PathBuf>,
    pub breakdown: hypenet::analysis::BreakdownConfig,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub model: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub top_k: usize,
    pub out: Option<PathBuf>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { model: None, index: None, top_k: 100, out: None }
    }
}

pub fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
