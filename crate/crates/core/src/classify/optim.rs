//! Element-wise first-order update rules over a flat parameter vector.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
    AdaMax,
    RmsProp,
    AdaGrad,
    AdaDelta,
    Nadam,
    Ftrl,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 8] = [
        OptimizerKind::Adam,
        OptimizerKind::AdaDelta,
        OptimizerKind::AdaGrad,
        OptimizerKind::AdaMax,
        OptimizerKind::Ftrl,
        OptimizerKind::Nadam,
        OptimizerKind::RmsProp,
        OptimizerKind::Sgd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
            OptimizerKind::AdaMax => "adamax",
            OptimizerKind::RmsProp => "rmsprop",
            OptimizerKind::AdaGrad => "adagrad",
            OptimizerKind::AdaDelta => "adadelta",
            OptimizerKind::Nadam => "nadam",
            OptimizerKind::Ftrl => "ftrl",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.to_ascii_lowercase();
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::invalid(format!("unknown optimizer {s:?}")))
    }
}

/// Constants of the update rules. Defaults follow the common Keras values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerParams {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Decay of the squared-gradient average (RMSProp).
    pub rho: f64,
    /// Decay of both running averages (AdaDelta).
    pub adadelta_rho: f64,
    /// Starting accumulator for AdaGrad and FTRL.
    pub initial_accumulator: f64,
    pub ftrl_l1: f64,
    pub ftrl_l2: f64,
    pub ftrl_beta: f64,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            rho: 0.9,
            adadelta_rho: 0.95,
            initial_accumulator: 0.1,
            ftrl_l1: 0.0,
            ftrl_l2: 0.0,
            ftrl_beta: 0.0,
        }
    }
}

/// Optimizer state for one flat parameter vector.
#[derive(Clone, Debug)]
pub struct Optimizer {
    kind: OptimizerKind,
    params: OptimizerParams,
    step: u64,
    /// First moment / AdaDelta gradient average / FTRL linear term.
    a: Vec<f64>,
    /// Second moment / infinity norm / accumulator / AdaDelta update average.
    b: Vec<f64>,
    /// AdaDelta squared-update average.
    c: Vec<f64>,
    ftrl_initialized: bool,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, n_params: usize) -> Self {
        Self::with_params(kind, n_params, OptimizerParams::default())
    }

    pub fn with_params(kind: OptimizerKind, n_params: usize, params: OptimizerParams) -> Self {
        let b_init = match kind {
            OptimizerKind::AdaGrad | OptimizerKind::Ftrl => params.initial_accumulator,
            _ => 0.0,
        };
        Optimizer {
            kind,
            params,
            step: 0,
            a: vec![0.0; n_params],
            b: vec![b_init; n_params],
            c: vec![0.0; n_params],
            ftrl_initialized: false,
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    /// Number of updates applied so far.
    pub fn iterations(&self) -> u64 {
        self.step
    }

    /// Applies one update with learning rate `lr`.
    pub fn step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        assert_eq!(theta.len(), grad.len(), "parameter/gradient length mismatch");
        assert_eq!(theta.len(), self.a.len(), "optimizer built for another shape");
        self.step += 1;
        let t = self.step as i32;
        let p = self.params;
        match self.kind {
            OptimizerKind::Sgd => {
                for (w, g) in theta.iter_mut().zip(grad) {
                    *w -= lr * g;
                }
            }
            OptimizerKind::Adam => {
                let bc1 = 1.0 - p.beta1.powi(t);
                let bc2 = 1.0 - p.beta2.powi(t);
                for i in 0..theta.len() {
                    let g = grad[i];
                    self.a[i] = p.beta1 * self.a[i] + (1.0 - p.beta1) * g;
                    self.b[i] = p.beta2 * self.b[i] + (1.0 - p.beta2) * g * g;
                    let m_hat = self.a[i] / bc1;
                    let v_hat = self.b[i] / bc2;
                    theta[i] -= lr * m_hat / (v_hat.sqrt() + p.epsilon);
                }
            }
            OptimizerKind::AdaMax => {
                let step_size = lr / (1.0 - p.beta1.powi(t));
                for i in 0..theta.len() {
                    let g = grad[i];
                    self.a[i] = p.beta1 * self.a[i] + (1.0 - p.beta1) * g;
                    self.b[i] = (p.beta2 * self.b[i]).max(g.abs());
                    if self.b[i] > 0.0 {
                        theta[i] -= step_size * self.a[i] / self.b[i];
                    }
                }
            }
            OptimizerKind::RmsProp => {
                for i in 0..theta.len() {
                    let g = grad[i];
                    self.b[i] = p.rho * self.b[i] + (1.0 - p.rho) * g * g;
                    theta[i] -= lr * g / (self.b[i].sqrt() + p.epsilon);
                }
            }
            OptimizerKind::AdaGrad => {
                for i in 0..theta.len() {
                    let g = grad[i];
                    self.b[i] += g * g;
                    theta[i] -= lr * g / (self.b[i].sqrt() + p.epsilon);
                }
            }
            OptimizerKind::AdaDelta => {
                let rho = p.adadelta_rho;
                for i in 0..theta.len() {
                    let g = grad[i];
                    self.a[i] = rho * self.a[i] + (1.0 - rho) * g * g;
                    let delta =
                        -((self.c[i] + p.epsilon).sqrt() / (self.a[i] + p.epsilon).sqrt()) * g;
                    self.c[i] = rho * self.c[i] + (1.0 - rho) * delta * delta;
                    theta[i] += lr * delta;
                }
            }
            OptimizerKind::Nadam => {
                let bc1 = 1.0 - p.beta1.powi(t);
                let bc1_next = 1.0 - p.beta1.powi(t + 1);
                let bc2 = 1.0 - p.beta2.powi(t);
                for i in 0..theta.len() {
                    let g = grad[i];
                    self.a[i] = p.beta1 * self.a[i] + (1.0 - p.beta1) * g;
                    self.b[i] = p.beta2 * self.b[i] + (1.0 - p.beta2) * g * g;
                    let m_bar = p.beta1 * self.a[i] / bc1_next + (1.0 - p.beta1) * g / bc1;
                    let v_hat = self.b[i] / bc2;
                    theta[i] -= lr * m_bar / (v_hat.sqrt() + p.epsilon);
                }
            }
            OptimizerKind::Ftrl => self.ftrl_step(theta, grad, lr),
        }
    }

    /// FTRL-proximal. The linear term starts at the value that reproduces the
    /// initial parameters, so training continues from them rather than from 0.
    fn ftrl_step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        let p = self.params;
        let denom = |acc: f64| (p.ftrl_beta + acc.sqrt()) / lr + 2.0 * p.ftrl_l2;
        if !self.ftrl_initialized {
            for i in 0..theta.len() {
                self.a[i] = -theta[i] * denom(self.b[i]);
            }
            self.ftrl_initialized = true;
        }
        for i in 0..theta.len() {
            let g = grad[i];
            if g == 0.0 {
                continue;
            }
            let acc_new = self.b[i] + g * g;
            let sigma = (acc_new.sqrt() - self.b[i].sqrt()) / lr;
            self.a[i] += g - sigma * theta[i];
            self.b[i] = acc_new;
            let z = self.a[i];
            theta[i] = if z.abs() <= p.ftrl_l1 {
                0.0
            } else {
                -(z - z.signum() * p.ftrl_l1) / denom(acc_new)
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        for kind in OptimizerKind::ALL {
            let mut opt = Optimizer::new(kind, 3);
            let mut theta = vec![0.5, -1.25, 3.0];
            let before = theta.clone();
            opt.step(&mut theta, &[0.0; 3], 1e-3);
            assert_eq!(theta, before, "{kind}");
        }
    }

    #[test]
    fn sgd_is_definitional() {
        let mut opt = Optimizer::new(OptimizerKind::Sgd, 2);
        let mut theta = vec![1.0, 2.0];
        opt.step(&mut theta, &[0.5, -4.0], 0.1);
        assert_eq!(theta, vec![1.0 - 0.1 * 0.5, 2.0 + 0.1 * 4.0]);
    }

    #[test]
    fn adamax_first_step_is_minus_lr() {
        let mut opt = Optimizer::new(OptimizerKind::AdaMax, 1);
        let mut theta = vec![0.0];
        opt.step(&mut theta, &[1.0], 1e-3);
        assert!((theta[0] + 1e-3).abs() < 1e-15);
    }

    #[test]
    fn adamax_hand_evaluated_second_step() {
        // m1 = 0.1, u1 = 1; m2 = 0.09 + 0.1*0.5 = 0.14, u2 = max(0.999, 0.5)
        let mut opt = Optimizer::new(OptimizerKind::AdaMax, 1);
        let mut theta = vec![0.0];
        opt.step(&mut theta, &[1.0], 0.01);
        opt.step(&mut theta, &[0.5], 0.01);
        let expect = -0.01 - (0.01 / (1.0 - 0.81)) * 0.14 / 0.999;
        assert!((theta[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn adam_first_step_is_sign_times_lr() {
        let mut opt = Optimizer::new(OptimizerKind::Adam, 2);
        let mut theta = vec![0.0, 0.0];
        opt.step(&mut theta, &[3.0, -0.2], 0.01);
        assert!((theta[0] + 0.01).abs() < 1e-8);
        assert!((theta[1] - 0.01).abs() < 1e-6);
    }

    #[test]
    fn every_rule_shrinks_a_quadratic() {
        for kind in OptimizerKind::ALL {
            let mut opt = Optimizer::new(kind, 1);
            let mut theta = vec![1.0];
            for _ in 0..100 {
                let g = [2.0 * theta[0]];
                opt.step(&mut theta, &g, 0.1);
            }
            assert!(theta[0].abs() < 1.0, "{kind}: {}", theta[0]);
            assert!(theta[0].is_finite());
        }
    }

    #[test]
    fn names_roundtrip() {
        for kind in OptimizerKind::ALL {
            assert_eq!(kind.name().parse::<OptimizerKind>().unwrap(), kind);
        }
        assert_eq!("AdaMax".parse::<OptimizerKind>().unwrap(), OptimizerKind::AdaMax);
        assert!("lbfgs".parse::<OptimizerKind>().is_err());
    }
}
