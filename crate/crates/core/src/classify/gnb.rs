//! Gaussian naive Bayes with variance smoothing.

use serde::{Deserialize, Serialize};

use super::{require_both_classes, ModelParams, TrainedModel};
use crate::error::Result;
use crate::features::FeatureTable;

/// Relative variance floor, scaled by the largest feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

/// Per-class statistics, indexed by `Label::index()` (Bee, NoBee).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

fn mean_var(rows: &[&[f64]], d: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            mean[j] += r[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            var[j] += (r[j] - mean[j]).powi(2);
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

impl GaussianNb {
    /// `targets` are 0 (Bee) or 1 (NoBee). Both classes must be present.
    pub fn fit(rows: &[Vec<f64>], targets: &[usize]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let all: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let (_, total_var) = mean_var(&all, d);
        let eps = (VAR_SMOOTHING * total_var.iter().copied().fold(0.0, f64::max))
            .max(f64::MIN_POSITIVE);
        let fit_class = |c: usize| {
            let members: Vec<&[f64]> = rows
                .iter()
                .zip(targets)
                .filter(|(_, &t)| t == c)
                .map(|(r, _)| r.as_slice())
                .collect();
            let (mean, mut var) = mean_var(&members, d);
            var.iter_mut().for_each(|v| *v += eps);
            (members.len() as f64 / rows.len() as f64, mean, var)
        };
        let (p0, m0, v0) = fit_class(0);
        let (p1, m1, v1) = fit_class(1);
        GaussianNb {
            priors: [p0, p1],
            means: [m0, m1],
            variances: [v0, v1],
        }
    }

    pub fn n_features(&self) -> usize {
        self.means[0].len()
    }

    /// Unnormalized log-posteriors `log P(c) + log p(x | c)`.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (c, slot) in out.iter_mut().enumerate() {
            let mut ll = self.priors[c].ln();
            for ((&v, &m), &s2) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                ll -= 0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + (v - m).powi(2) / s2);
            }
            *slot = ll;
        }
        out
    }

    /// Class posteriors, normalized to sum to 1.
    pub fn posteriors(&self, x: &[f64]) -> [f64; 2] {
        let [a, b] = self.joint_log_likelihood(x);
        let top = a.max(b);
        let (ea, eb) = ((a - top).exp(), (b - top).exp());
        [ea / (ea + eb), eb / (ea + eb)]
    }

    /// Posterior probability of NoBee.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.posteriors(x)[1]
    }
}

pub fn train_gnb(table: &FeatureTable) -> Result<TrainedModel> {
    require_both_classes(table, 2)?;
    let rows: Vec<Vec<f64>> = table.rows().iter().map(|r| r.values.clone()).collect();
    let targets: Vec<usize> = table.rows().iter().map(|r| r.label.index()).collect();
    let model = GaussianNb::fit(&rows, &targets);
    Ok(TrainedModel::new(
        table.feature_names().to_vec(),
        None,
        ModelParams::Gnb { model },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn blobs(n: usize, sep: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        let mut t = Vec::new();
        for i in 0..n {
            let c = i % 2;
            let centre = if c == 0 { -sep } else { sep };
            rows.push(vec![centre + noise.sample(&mut rng), noise.sample(&mut rng)]);
            t.push(c);
        }
        (rows, t)
    }

    #[test]
    fn separated_blobs_are_learned() {
        let (rows, t) = blobs(400, 4.0, 3);
        let nb = GaussianNb::fit(&rows, &t);
        let correct = rows
            .iter()
            .zip(&t)
            .filter(|(r, &c)| (nb.score(r) >= 0.5) as usize == c)
            .count();
        assert!(correct as f64 / 400.0 >= 0.99);
    }

    #[test]
    fn priors_and_posteriors_normalize() {
        let (mut rows, mut t) = blobs(30, 1.0, 4);
        rows.push(vec![0.0, 0.0]);
        t.push(1);
        let nb = GaussianNb::fit(&rows, &t);
        assert!((nb.priors[0] + nb.priors[1] - 1.0).abs() < 1e-12);
        for r in &rows {
            let p = nb.posteriors(r);
            assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn equidistant_point_scores_one_half() {
        let (half, _) = blobs(50, 3.0, 5);
        let mut rows = Vec::new();
        let mut t = Vec::new();
        for r in &half {
            rows.push(vec![r[0].abs() + 1.0, r[1]]);
            t.push(1);
            rows.push(vec![-(r[0].abs() + 1.0), r[1]]);
            t.push(0);
        }
        let nb = GaussianNb::fit(&rows, &t);
        assert!((nb.score(&[0.0, 0.7]) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn constant_feature_stays_finite() {
        let rows = vec![vec![1.0, 2.0], vec![1.0, 3.0], vec![1.0, 9.0], vec![1.0, 8.0]];
        let nb = GaussianNb::fit(&rows, &[0, 0, 1, 1]);
        assert!(nb.score(&[1.0, 2.5]).is_finite());
        assert!(nb.score(&[1.0, 2.5]) < 0.5);
    }
}
