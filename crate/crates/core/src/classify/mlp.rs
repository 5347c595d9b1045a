//! Fully connected feed-forward network with a single sigmoid output,
//! trained by mini-batch backpropagation on binary cross-entropy.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::optim::{Optimizer, OptimizerKind};
use super::{require_both_classes, table_xy, ModelParams, Standardizer, TrainedModel};
use crate::error::{Error, Result};
use crate::features::FeatureTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Relu, Activation::Sigmoid, Activation::Tanh];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Activation::ALL
            .into_iter()
            .find(|a| a.name() == lower)
            .ok_or_else(|| Error::invalid(format!("unknown activation {s:?}")))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub hidden_layers: Vec<usize>,
    pub hidden_activation: Activation,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    /// Per-update decay: `lr_t = lr / (1 + decay * t)`.
    pub decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpSpec {
    fn default() -> Self {
        MlpSpec {
            hidden_layers: vec![256, 128, 64],
            hidden_activation: Activation::Relu,
            optimizer: OptimizerKind::AdaMax,
            learning_rate: 1e-3,
            decay: 1e-5,
            epochs: 1000,
            batch_size: 128,
            seed: 0,
        }
    }
}

impl MlpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers.contains(&0) {
            return Err(Error::invalid("hidden layer sizes must be at least 1"));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("epochs and batch size must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(Error::invalid("decay must be non-negative"));
        }
        Ok(())
    }
}

/// Network weights as one flat vector: for each layer, the `out x in`
/// row-major weight matrix followed by its `out` biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MlpRepr", try_from = "MlpRepr")]
pub struct Mlp {
    sizes: Vec<usize>,
    activation: Activation,
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DenseLayer {
    /// `[outputs, inputs]`
    shape: [usize; 2],
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MlpRepr {
    hidden_activation: Activation,
    output_activation: String,
    layers: Vec<DenseLayer>,
}

impl From<Mlp> for MlpRepr {
    fn from(m: Mlp) -> Self {
        let layers = m
            .layer_ranges()
            .into_iter()
            .map(|(out, inp, w, b)| DenseLayer {
                shape: [out, inp],
                weights: m.params[w..b].to_vec(),
                bias: m.params[b..b + out].to_vec(),
            })
            .collect();
        MlpRepr {
            hidden_activation: m.activation,
            output_activation: "sigmoid".into(),
            layers,
        }
    }
}

impl TryFrom<MlpRepr> for Mlp {
    type Error = String;

    fn try_from(r: MlpRepr) -> std::result::Result<Self, String> {
        if r.output_activation != "sigmoid" {
            return Err(format!("unsupported output activation {}", r.output_activation));
        }
        let Some(first) = r.layers.first() else {
            return Err("network has no layers".into());
        };
        let mut sizes = vec![first.shape[1]];
        let mut params = Vec::new();
        for layer in &r.layers {
            let [out, inp] = layer.shape;
            if inp != *sizes.last().unwrap()
                || layer.weights.len() != out * inp
                || layer.bias.len() != out
            {
                return Err(format!("layer shape {:?} inconsistent", layer.shape));
            }
            params.extend_from_slice(&layer.weights);
            params.extend_from_slice(&layer.bias);
            sizes.push(out);
        }
        if *sizes.last().unwrap() != 1 {
            return Err("output layer must have one unit".into());
        }
        Ok(Mlp {
            sizes,
            activation: r.hidden_activation,
            params,
        })
    }
}

impl Mlp {
    /// Glorot-uniform weights and zero biases for `input -> hidden... -> 1`.
    pub fn init<R: Rng>(input_dim: usize, hidden: &[usize], activation: Activation, rng: &mut R) -> Self {
        let mut sizes = vec![input_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (inp, out) = (w[0], w[1]);
            let limit = (6.0 / (inp + out) as f64).sqrt();
            params.extend((0..out * inp).map(|_| rng.gen_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, out));
        }
        Mlp {
            sizes,
            activation,
            params,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// `(outputs, inputs, weight offset, bias offset)` per layer.
    fn layer_ranges(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut off = 0;
        self.sizes
            .windows(2)
            .map(|w| {
                let (inp, out) = (w[0], w[1]);
                let r = (out, inp, off, off + out * inp);
                off += out * inp + out;
                r
            })
            .collect()
    }

    /// Hidden activations (input first) and output logits.
    fn forward(&self, x: ArrayView2<f64>) -> (Vec<Array2<f64>>, Array1<f64>) {
        let ranges = self.layer_ranges();
        let last = ranges.len() - 1;
        let mut acts = vec![x.to_owned()];
        let mut logits = Array1::zeros(x.nrows());
        for (l, &(out, inp, w, b)) in ranges.iter().enumerate() {
            let weights = ArrayView2::from_shape((out, inp), &self.params[w..b]).expect("shape");
            let bias = ArrayView1::from(&self.params[b..b + out]);
            let mut z = acts[l].dot(&weights.t());
            z += &bias;
            if l == last {
                logits = z.column(0).to_owned();
            } else {
                z.mapv_inplace(|v| self.activation.apply(v));
                acts.push(z);
            }
        }
        (acts, logits)
    }

    fn bce(logits: &Array1<f64>, y: ArrayView1<f64>) -> f64 {
        let n = logits.len() as f64;
        logits
            .iter()
            .zip(y.iter())
            .map(|(&z, &t)| softplus(z) - t * z)
            .sum::<f64>()
            / n
    }

    /// Mean binary cross-entropy over the rows of `x`.
    pub fn loss(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> f64 {
        let (_, logits) = self.forward(x);
        Self::bce(&logits, y)
    }

    /// Mean loss and its gradient with respect to [`Mlp::params`].
    pub fn loss_and_gradient(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> (f64, Vec<f64>) {
        let (acts, logits) = self.forward(x);
        let n = x.nrows() as f64;
        let loss = Self::bce(&logits, y);
        let ranges = self.layer_ranges();
        let mut grad = vec![0.0; self.params.len()];
        let mut delta: Array2<f64> = Array2::from_shape_fn((x.nrows(), 1), |(i, _)| {
            (sigmoid(logits[i]) - y[i]) / n
        });
        for l in (0..ranges.len()).rev() {
            let (out, inp, w, b) = ranges[l];
            let a_prev = &acts[l];
            let g_w = delta.t().dot(a_prev);
            grad[w..b].copy_from_slice(g_w.as_slice().expect("contiguous"));
            let g_b = delta.sum_axis(Axis(0));
            grad[b..b + out].copy_from_slice(g_b.as_slice().expect("contiguous"));
            if l > 0 {
                let weights =
                    ArrayView2::from_shape((out, inp), &self.params[w..b]).expect("shape");
                let mut d_prev = delta.dot(&weights);
                d_prev.zip_mut_with(a_prev, |d, &a| {
                    *d *= self.activation.derivative_from_output(a)
                });
                delta = d_prev;
            }
        }
        (loss, grad)
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        let (_, logits) = self.forward(view);
        sigmoid(logits[0])
    }
}

/// Trains on already-prepared inputs. Returns the network and the mean
/// training loss of every epoch.
pub fn fit(x: &Array2<f64>, y: &Array1<f64>, spec: &MlpSpec) -> Result<(Mlp, Vec<f64>)> {
    spec.validate()?;
    if x.nrows() != y.len() || x.nrows() == 0 {
        return Err(Error::invalid("inputs and targets must be non-empty and aligned"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut net = Mlp::init(x.ncols(), &spec.hidden_layers, spec.hidden_activation, &mut rng);
    let mut opt = Optimizer::new(spec.optimizer, net.params.len());
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut history = Vec::with_capacity(spec.epochs);
    for epoch in 0..spec.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(spec.batch_size) {
            let xb = x.select(Axis(0), batch);
            let yb = y.select(Axis(0), batch);
            let (loss, grad) = net.loss_and_gradient(xb.view(), yb.view());
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Divergence { epoch });
            }
            epoch_loss += loss * batch.len() as f64;
            let lr = spec.learning_rate / (1.0 + spec.decay * opt.iterations() as f64);
            opt.step(&mut net.params, &grad, lr);
        }
        if net.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        history.push(epoch_loss / x.nrows() as f64);
    }
    Ok((net, history))
}

/// Standardizes the table, then fits the network.
pub fn train_mlp(table: &FeatureTable, spec: &MlpSpec) -> Result<TrainedModel> {
    require_both_classes(table, 2)?;
    let (rows, targets) = table_xy(table);
    let standardizer = Standardizer::fit(&rows)?;
    let d = table.n_features();
    let flat: Vec<f64> = rows.iter().flat_map(|r| standardizer.transform(r)).collect();
    let x = Array2::from_shape_vec((rows.len(), d), flat).expect("row-major");
    let y = Array1::from(targets);
    let (network, _) = fit(&x, &y, spec)?;
    Ok(TrainedModel::new(
        table.feature_names().to_vec(),
        Some(standardizer),
        ModelParams::Mlp {
            spec: spec.clone(),
            network,
        },
    ))
}
