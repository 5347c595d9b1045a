//! Pipeline settings, loadable from a plain `key = value` file.
//!
//! ```text
//! # comments and blank lines are ignored
//! sample_rate = 22050
//! model = forest
//! n_trees = 200
//! ```
//!
//! Unknown keys are rejected. Later assignments win, which is how command
//! line flags override file values.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::classify::{
    Activation, Criterion, ForestParams, MaxFeatures, MlpSpec, ModelConfig, ModelKind, OptimizerKind,
    SvmParams, TreeParams,
};
use crate::dsp::{MelFilterbank, StftConfig, Window};
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, N_MELS};
use crate::label::Label;
use crate::select::SelectionMethod;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub sample_rate: u32,
    pub block_seconds: f64,
    pub n_fft: usize,
    pub hop: usize,
    pub window: Window,
    pub n_mfcc: usize,
    pub k_features: usize,
    pub selection_method: SelectionMethod,
    /// Select by ranking instead of the fixed preference order.
    pub select_by_score: bool,
    pub model: ModelKind,
    pub seed: u64,
    /// 0 lets the thread pool pick.
    pub threads: usize,
    pub test_fraction: f64,
    pub mlp: MlpSpec,
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub svm: SvmParams,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let stft = StftConfig::default();
        PipelineConfig {
            sample_rate: crate::audio::PIPELINE_SAMPLE_RATE,
            block_seconds: crate::audio::BLOCK_SECONDS,
            n_fft: stft.n_fft,
            hop: stft.hop,
            window: stft.window,
            n_mfcc: crate::features::N_MFCC,
            k_features: crate::select::DEFAULT_K,
            selection_method: SelectionMethod::AnovaF,
            select_by_score: false,
            model: ModelKind::Mlp,
            seed: 0,
            threads: 0,
            test_fraction: 0.2,
            mlp: MlpSpec::default(),
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            svm: SvmParams::default(),
            input: None,
            output: None,
        }
    }
}

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "sample_rate",
    "block_seconds",
    "n_fft",
    "hop",
    "window",
    "n_mfcc",
    "k_features",
    "selection_method",
    "select_by_score",
    "model",
    "seed",
    "threads",
    "test_fraction",
    "hidden_layers",
    "activation",
    "optimizer",
    "learning_rate",
    "decay",
    "epochs",
    "batch_size",
    "criterion",
    "max_depth",
    "min_split",
    "max_features",
    "n_trees",
    "bootstrap",
    "tie_label",
    "svm_c",
    "svm_epochs",
    "input",
    "output",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::invalid(format!("{key}: expected true or false, got {value:?}"))),
    }
}

fn parse_depth(value: &str) -> Result<Option<usize>> {
    match value.to_ascii_lowercase().as_str() {
        "none" | "" => Ok(None),
        v => parse("max_depth", v).map(Some),
    }
}

fn parse_layers(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse("hidden_layers", s))
        .collect()
}

impl PipelineConfig {
    /// Applies one assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "sample_rate" => self.sample_rate = parse(key, v)?,
            "block_seconds" => self.block_seconds = parse(key, v)?,
            "n_fft" => self.n_fft = parse(key, v)?,
            "hop" => self.hop = parse(key, v)?,
            "window" => self.window = v.parse()?,
            "n_mfcc" => self.n_mfcc = parse(key, v)?,
            "k_features" => self.k_features = parse(key, v)?,
            "selection_method" => self.selection_method = v.parse()?,
            "select_by_score" => self.select_by_score = parse_bool(key, v)?,
            "model" => self.model = v.parse()?,
            "seed" => self.seed = parse(key, v)?,
            "threads" => self.threads = parse(key, v)?,
            "test_fraction" => self.test_fraction = parse(key, v)?,
            "hidden_layers" => self.mlp.hidden_layers = parse_layers(v)?,
            "activation" => self.mlp.hidden_activation = v.parse::<Activation>()?,
            "optimizer" => self.mlp.optimizer = v.parse::<OptimizerKind>()?,
            "learning_rate" => self.mlp.learning_rate = parse(key, v)?,
            "decay" => self.mlp.decay = parse(key, v)?,
            "epochs" => self.mlp.epochs = parse(key, v)?,
            "batch_size" => self.mlp.batch_size = parse(key, v)?,
            "criterion" => {
                let c: Criterion = v.parse()?;
                self.tree.criterion = c;
                self.forest.criterion = c;
            }
            "max_depth" => {
                let d = parse_depth(v)?;
                self.tree.max_depth = d;
                self.forest.max_depth = d;
            }
            "min_split" => {
                let m = parse(key, v)?;
                self.tree.min_split = m;
                self.forest.min_split = m;
            }
            "max_features" => self.forest.max_features = v.parse::<MaxFeatures>()?,
            "n_trees" => self.forest.n_trees = parse(key, v)?,
            "bootstrap" => self.forest.bootstrap = parse_bool(key, v)?,
            "tie_label" => self.forest.tie_label = v.parse::<Label>()?,
            "svm_c" => self.svm.c = parse(key, v)?,
            "svm_epochs" => self.svm.epochs = parse(key, v)?,
            "input" => self.input = Some(PathBuf::from(v)),
            "output" => self.output = Some(PathBuf::from(v)),
            other => return Err(Error::invalid(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v).map_err(|e| {
                let msg = match e {
                    Error::InvalidArgument(m) => m,
                    other => other.to_string(),
                };
                Error::invalid(format!("config line {}: {msg}", i + 1))
            })?;
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text)
    }

    pub fn stft(&self) -> StftConfig {
        StftConfig {
            n_fft: self.n_fft,
            hop: self.hop,
            window: self.window,
            center_pad: true,
        }
    }

    pub fn extractor(&self) -> Result<FeatureExtractor> {
        let stft = self.stft();
        stft.validate()?;
        let fb = MelFilterbank::full_band(N_MELS, stft.n_fft, self.sample_rate)?;
        FeatureExtractor::new(stft, fb, self.n_mfcc)
    }

    /// Hyperparameters for `self.model`, with the pipeline seed in every
    /// seeded component.
    pub fn model_config(&self) -> ModelConfig {
        self.model_config_for(self.model)
    }

    pub fn model_config_for(&self, kind: ModelKind) -> ModelConfig {
        match kind {
            ModelKind::Mlp => ModelConfig::Mlp(MlpSpec {
                seed: self.seed,
                ..self.mlp.clone()
            }),
            ModelKind::Gnb => ModelConfig::Gnb,
            ModelKind::Tree => ModelConfig::Tree(TreeParams {
                seed: self.seed,
                ..self.tree.clone()
            }),
            ModelKind::Forest => ModelConfig::Forest(ForestParams {
                seed: self.seed,
                ..self.forest.clone()
            }),
            ModelKind::Svm => ModelConfig::Svm(self.svm.clone()),
        }
    }
}
