//! Trainable binary classifiers over feature tables.
//!
//! All models share the label encoding `Bee = 0`, `NoBee = 1` and the decision
//! rule `NoBee` iff score >= 0.5. A [`TrainedModel`] remembers the ordered
//! feature names it was fitted on and refuses inputs laid out differently.

pub mod gnb;
pub mod mlp;
pub mod optim;
pub mod svm;
pub mod tree;

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::label::Label;

pub use gnb::GaussianNb;
pub use mlp::{Activation, Mlp, MlpSpec};
pub use optim::{Optimizer, OptimizerKind, OptimizerParams};
pub use svm::{LinearSvm, SvmParams};
pub use tree::{Criterion, DecisionTree, ForestParams, MaxFeatures, RandomForest, TreeParams};

pub const MODEL_FORMAT: &str = "hive-sound-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Probability-like score for `NoBee`, in `[0, 1]`.
    pub score: f64,
}

impl Prediction {
    pub fn from_score(score: f64) -> Self {
        Prediction {
            label: Label::from_score(score),
            score,
        }
    }
}

/// Anything that maps a named feature vector to a label.
pub trait Classifier {
    fn feature_names(&self) -> &[String];

    fn predict(&self, names: &[String], values: &[f64]) -> Result<Prediction>;

    fn predict_table(&self, table: &FeatureTable) -> Result<Vec<Prediction>> {
        table
            .rows()
            .iter()
            .map(|r| self.predict(table.feature_names(), &r.values))
            .collect()
    }
}

pub(crate) fn check_names(expected: &[String], got: &[String]) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::FeatureMismatch {
            expected: expected.join(","),
            got: got.join(","),
        })
    }
}

/// Per-feature z-score transform captured from training rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Columns with zero spread; their `std` is stored as 1.
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::invalid("cannot standardize zero rows"));
        };
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            mean.iter_mut().zip(r).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                var[j] += (r[j] - mean[j]).powi(2);
            }
        }
        let mut constant = vec![false; d];
        let std = var
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let s = (v / n).sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    constant[j] = true;
                    1.0
                }
            })
            .collect();
        Ok(Standardizer {
            mean,
            std,
            constant,
        })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// Raw feature rows and 0/1 targets of a table.
pub(crate) fn table_xy(table: &FeatureTable) -> (Vec<Vec<f64>>, Vec<f64>) {
    table
        .rows()
        .iter()
        .map(|r| (r.values.clone(), r.label.as_f64()))
        .unzip()
}

pub(crate) fn require_both_classes(table: &FeatureTable, min_rows: usize) -> Result<()> {
    if table.len() < min_rows {
        return Err(Error::degenerate(format!(
            "need at least {min_rows} rows, got {}",
            table.len()
        )));
    }
    let (bee, nobee) = table.class_counts();
    if bee == 0 || nobee == 0 {
        return Err(Error::degenerate("training data contains a single class"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mlp,
    Gnb,
    Tree,
    Forest,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Mlp,
        ModelKind::Gnb,
        ModelKind::Tree,
        ModelKind::Forest,
        ModelKind::Svm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::Gnb => "gnb",
            ModelKind::Tree => "tree",
            ModelKind::Forest => "forest",
            ModelKind::Svm => "svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::invalid(format!("unknown model kind {s:?}")))
    }
}

/// Hyperparameters of one model kind; enough to re-train from scratch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Mlp(MlpSpec),
    Gnb,
    Tree(TreeParams),
    Forest(ForestParams),
    Svm(SvmParams),
}

impl ModelConfig {
    /// Defaults for `kind`, with every seed set to `seed`.
    pub fn default_for(kind: ModelKind, seed: u64) -> Self {
        match kind {
            ModelKind::Mlp => ModelConfig::Mlp(MlpSpec {
                seed,
                ..MlpSpec::default()
            }),
            ModelKind::Gnb => ModelConfig::Gnb,
            ModelKind::Tree => ModelConfig::Tree(TreeParams {
                seed,
                ..TreeParams::default()
            }),
            ModelKind::Forest => ModelConfig::Forest(ForestParams {
                seed,
                ..ForestParams::default()
            }),
            ModelKind::Svm => ModelConfig::Svm(SvmParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Mlp(_) => ModelKind::Mlp,
            ModelConfig::Gnb => ModelKind::Gnb,
            ModelConfig::Tree(_) => ModelKind::Tree,
            ModelConfig::Forest(_) => ModelKind::Forest,
            ModelConfig::Svm(_) => ModelKind::Svm,
        }
    }

    pub fn train(&self, table: &FeatureTable) -> Result<TrainedModel> {
        match self {
            ModelConfig::Mlp(spec) => mlp::train_mlp(table, spec),
            ModelConfig::Gnb => gnb::train_gnb(table),
            ModelConfig::Tree(p) => tree::train_tree(table, p),
            ModelConfig::Forest(p) => tree::train_forest(table, p),
            ModelConfig::Svm(p) => svm::train_svm(table, p),
        }
    }
}

/// Learned parameters, tagged by kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Mlp { spec: MlpSpec, network: Mlp },
    Gnb { model: GaussianNb },
    Tree { params: TreeParams, tree: DecisionTree },
    Forest { params: ForestParams, forest: RandomForest },
    Svm { params: SvmParams, svm: LinearSvm },
}

/// A fitted classifier plus the feature layout and normalization it expects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format: String,
    pub version: u32,
    pub feature_names: Vec<String>,
    /// Present for the MLP and SVM; trees and naive Bayes use raw features.
    pub normalization: Option<Standardizer>,
    pub model: ModelParams,
}

impl TrainedModel {
    pub(crate) fn new(
        feature_names: Vec<String>,
        normalization: Option<Standardizer>,
        model: ModelParams,
    ) -> Self {
        TrainedModel {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            feature_names,
            normalization,
            model,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            ModelParams::Mlp { .. } => ModelKind::Mlp,
            ModelParams::Gnb { .. } => ModelKind::Gnb,
            ModelParams::Tree { .. } => ModelKind::Tree,
            ModelParams::Forest { .. } => ModelKind::Forest,
            ModelParams::Svm { .. } => ModelKind::Svm,
        }
    }

    pub fn config(&self) -> ModelConfig {
        match &self.model {
            ModelParams::Mlp { spec, .. } => ModelConfig::Mlp(spec.clone()),
            ModelParams::Gnb { .. } => ModelConfig::Gnb,
            ModelParams::Tree { params, .. } => ModelConfig::Tree(params.clone()),
            ModelParams::Forest { params, .. } => ModelConfig::Forest(params.clone()),
            ModelParams::Svm { params, .. } => ModelConfig::Svm(params.clone()),
        }
    }

    /// Score for a vector already laid out as `feature_names`.
    pub fn score(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.feature_names.len() {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                self.feature_names.len(),
                values.len()
            )));
        }
        let x = match &self.normalization {
            Some(s) => s.transform(values),
            None => values.to_vec(),
        };
        Ok(match &self.model {
            ModelParams::Mlp { network, .. } => network.predict_proba(&x),
            ModelParams::Gnb { model } => model.score(&x),
            ModelParams::Tree { tree, .. } => tree.score(&x),
            ModelParams::Forest { forest, .. } => return Ok(forest.predict(&x).score),
            ModelParams::Svm { svm, .. } => svm.score(&x),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TrainedModel =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if model.format != MODEL_FORMAT {
            return Err(Error::Format(format!("unexpected format {:?}", model.format)));
        }
        if model.version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let d = self.feature_names.len();
        if let Some(s) = &self.normalization {
            if s.mean.len() != d || s.std.len() != d || s.std.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Format("normalization does not match features".into()));
            }
        }
        let inputs = match &self.model {
            ModelParams::Mlp { network, .. } => network.input_dim(),
            ModelParams::Gnb { model } => model.n_features(),
            ModelParams::Tree { tree, .. } => return tree.validate(d),
            ModelParams::Forest { forest, .. } => {
                return forest.trees().iter().try_for_each(|t| t.validate(d))
            }
            ModelParams::Svm { svm, .. } => svm.weights.len(),
        };
        if inputs != d {
            return Err(Error::Format(format!(
                "model expects {inputs} inputs but lists {d} features"
            )));
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let text = self.to_json()?;
        w.write_all(text.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io("<model>", e))
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)
            .map_err(|e| Error::io("<model>", e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

impl Classifier for TrainedModel {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict(&self, names: &[String], values: &[f64]) -> Result<Prediction> {
        check_names(&self.feature_names, names)?;
        if let ModelParams::Forest { forest, .. } = &self.model {
            return Ok(forest.predict(values));
        }
        Ok(Prediction::from_score(self.score(values)?))
    }
}

/// Fits `config` on `table`.
pub fn train(table: &FeatureTable, config: &ModelConfig) -> Result<TrainedModel> {
    config.train(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizer_flags_constant_columns() {
        let rows = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(&rows).unwrap();
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
        assert_eq!(s.constant, vec![false, true]);
        assert_eq!(s.transform(&[3.0, 6.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn kind_parsing() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("cnn".parse::<ModelKind>().is_err());
    }

    #[test]
    fn prediction_threshold() {
        assert_eq!(Prediction::from_score(0.5).label, Label::NoBee);
        assert_eq!(Prediction::from_score(0.4999).label, Label::Bee);
    }
}
