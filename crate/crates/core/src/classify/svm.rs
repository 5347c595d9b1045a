//! Linear SVM trained by full-batch subgradient descent on the hinge loss.
//!
//! Minimizes `lambda/2 |w|^2 + mean(max(0, 1 - y (w.x + b)))` with
//! `lambda = 1 / (c n)` and step `1 / (lambda t)`. The returned weights are
//! the running average of the iterates.

use serde::{Deserialize, Serialize};

use super::mlp::sigmoid;
use super::{require_both_classes, table_xy, ModelParams, Standardizer, TrainedModel};
use crate::error::{Error, Result};
use crate::features::FeatureTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 1.0, epochs: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    /// Margin mapped through the logistic function; >= 0.5 means NoBee.
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }

    /// Regularized hinge objective on `(x, y)` with `y` in {-1, +1}.
    pub fn objective(&self, x: &[Vec<f64>], y: &[f64], lambda: f64) -> f64 {
        let hinge = x
            .iter()
            .zip(y)
            .map(|(r, t)| (1.0 - t * self.decision(r)).max(0.0))
            .sum::<f64>()
            / x.len() as f64;
        0.5 * lambda * self.weights.iter().map(|w| w * w).sum::<f64>() + hinge
    }
}

/// Fitted model plus the objective of the averaged iterate after each epoch.
pub fn fit_svm(x: &[Vec<f64>], y: &[f64], params: &SvmParams) -> Result<(LinearSvm, Vec<f64>)> {
    if !(params.c > 0.0 && params.c.is_finite()) || params.epochs == 0 {
        return Err(Error::invalid("c must be positive and epochs at least 1"));
    }
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    let lambda = 1.0 / (params.c * n as f64);
    let mut cur = LinearSvm {
        weights: vec![0.0; d],
        bias: 0.0,
    };
    let mut avg = cur.clone();
    let mut trace = Vec::with_capacity(params.epochs);
    let mut gw = vec![0.0; d];
    for t in 1..=params.epochs {
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for (r, &yi) in x.iter().zip(y) {
            if yi * cur.decision(r) < 1.0 {
                gw.iter_mut().zip(r).for_each(|(g, v)| *g -= yi * v);
                gb -= yi;
            }
        }
        let eta = 1.0 / (lambda * t as f64);
        let shrink = 1.0 - eta * lambda;
        for (w, g) in cur.weights.iter_mut().zip(&gw) {
            *w = shrink * *w - eta * g / n as f64;
        }
        cur.bias -= eta * gb / n as f64;
        let k = t as f64;
        for (a, w) in avg.weights.iter_mut().zip(&cur.weights) {
            *a += (w - *a) / k;
        }
        avg.bias += (cur.bias - avg.bias) / k;
        if !avg.bias.is_finite() || avg.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence { epoch: t - 1 });
        }
        trace.push(avg.objective(x, y, lambda));
    }
    Ok((avg, trace))
}

pub fn train_svm(table: &FeatureTable, params: &SvmParams) -> Result<TrainedModel> {
    require_both_classes(table, 2)?;
    let (rows, targets) = table_xy(table);
    let standardizer = Standardizer::fit(&rows)?;
    let x: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.transform(r)).collect();
    let y: Vec<f64> = targets.iter().map(|t| 2.0 * t - 1.0).collect();
    let (svm, _) = fit_svm(&x, &y, params)?;
    Ok(TrainedModel::new(
        table.feature_names().to_vec(),
        Some(standardizer),
        ModelParams::Svm {
            params: params.clone(),
            svm,
        },
    ))
}
