//! Splitting, cross-validation and accuracy reporting.

mod mixed;
mod sweep;
mod synth;

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{Classifier, ModelConfig};
use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::label::Label;
use crate::util::fmt_sig9;

pub use mixed::{
    mixed_validation_cases, run_mixed_validation, Expected, MixedCaseResult, MixedValidationCase,
    MixedValidationReport,
};
pub use sweep::{activation_optimizer_sweep, SweepCell, SweepGrid};
pub use synth::{gen_synthetic_corpus, SynthKind};

/// Row indices of each class, in table order.
fn class_indices(table: &FeatureTable) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, r) in table.rows().iter().enumerate() {
        out[r.label.index()].push(i);
    }
    out
}

/// Stratified holdout: each class contributes `round(count * test_fraction)`
/// rows to the test side. Both sides keep the table's row order.
pub fn stratified_split_indices(
    table: &FeatureTable,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction {test_fraction} must be in (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; table.len()];
    for (label, mut idx) in [Label::Bee, Label::NoBee].into_iter().zip(class_indices(table)) {
        if idx.len() < 2 {
            return Err(Error::degenerate(format!(
                "class {label} has {} rows; at least 2 are needed to split",
                idx.len()
            )));
        }
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        idx.shuffle(&mut rng);
        for &i in &idx[..n_test] {
            in_test[i] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..table.len()).partition(|&i| in_test[i]);
    Ok((train, test))
}

pub fn stratified_split(
    table: &FeatureTable,
    test_fraction: f64,
    seed: u64,
) -> Result<(FeatureTable, FeatureTable)> {
    let (train, test) = stratified_split_indices(table, test_fraction, seed)?;
    Ok((table.select_rows(&train), table.select_rows(&test)))
}

/// Fold number of every row. Each class is shuffled, then dealt round-robin
/// with one counter running across both classes, so fold sizes differ by at
/// most one and each fold gets a proportional share of both classes.
pub fn kfold_assignment(table: &FeatureTable, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if k > table.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} available rows",
            table.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; table.len()];
    let mut next = 0;
    for mut idx in class_indices(table) {
        idx.shuffle(&mut rng);
        for i in idx {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

/// `(train, validation)` row indices per fold.
pub fn kfold_indices(table: &FeatureTable, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let fold = kfold_assignment(table, k, seed)?;
    Ok((0..k)
        .map(|f| (0..table.len()).partition(|&i| fold[i] != f))
        .collect())
}

pub fn kfold(table: &FeatureTable, k: usize, seed: u64) -> Result<Vec<(FeatureTable, FeatureTable)>> {
    Ok(kfold_indices(table, k, seed)?
        .into_iter()
        .map(|(tr, va)| (table.select_rows(&tr), table.select_rows(&va)))
        .collect())
}

fn check_lengths(preds: &[Label], labels: &[Label]) -> Result<()> {
    if preds.len() != labels.len() || preds.is_empty() {
        return Err(Error::invalid(format!(
            "need equal non-empty lengths, got {} predictions and {} labels",
            preds.len(),
            labels.len()
        )));
    }
    Ok(())
}

pub fn accuracy(preds: &[Label], labels: &[Label]) -> Result<f64> {
    check_lengths(preds, labels)?;
    let hits = preds.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// `confusion[true][predicted]`, indexed Bee = 0, NoBee = 1.
pub fn confusion(preds: &[Label], labels: &[Label]) -> Result<[[usize; 2]; 2]> {
    check_lengths(preds, labels)?;
    let mut m = [[0; 2]; 2];
    for (p, l) in preds.iter().zip(labels) {
        m[l.index()][p.index()] += 1;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub confusion: [[usize; 2]; 2],
    pub fold_accuracies: Option<Vec<f64>>,
    pub seed: u64,
    pub model_kind: String,
    pub k_features: usize,
}

impl EvalReport {
    pub fn from_predictions(
        preds: &[Label],
        labels: &[Label],
        model_kind: impl Into<String>,
        k_features: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(EvalReport {
            accuracy: accuracy(preds, labels)?,
            confusion: confusion(preds, labels)?,
            fold_accuracies: None,
            seed,
            model_kind: model_kind.into(),
            k_features,
        })
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    /// Two-column `metric,value` CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let c = &self.confusion;
        let mut rows: Vec<(String, String)> = vec![
            ("model_kind".into(), self.model_kind.clone()),
            ("k_features".into(), self.k_features.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("n".into(), self.total().to_string()),
            ("accuracy".into(), fmt_sig9(self.accuracy)),
            ("true_bee_pred_bee".into(), c[0][0].to_string()),
            ("true_bee_pred_nobee".into(), c[0][1].to_string()),
            ("true_nobee_pred_bee".into(), c[1][0].to_string()),
            ("true_nobee_pred_nobee".into(), c[1][1].to_string()),
        ];
        if let Some(folds) = &self.fold_accuracies {
            rows.extend(
                folds
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (format!("fold{}_accuracy", i + 1), fmt_sig9(*a))),
            );
            rows.push(("cv_mean_accuracy".into(), fmt_sig9(crate::util::mean(folds))));
        }
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        out.write_record(["metric", "value"]).map_err(csv_err)?;
        for (k, v) in rows {
            out.write_record([k, v]).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<report>", e))
    }
}

/// Scores `model` on every row of `table`.
pub fn evaluate(model: &dyn Classifier, table: &FeatureTable, model_kind: &str, seed: u64) -> Result<EvalReport> {
    let preds: Vec<Label> = model.predict_table(table)?.iter().map(|p| p.label).collect();
    EvalReport::from_predictions(&preds, &table.labels(), model_kind, table.n_features(), seed)
}

/// Accuracy of `config` on each of `k` stratified folds, in fold order.
pub fn cross_validate(table: &FeatureTable, config: &ModelConfig, k: usize, seed: u64) -> Result<Vec<f64>> {
    kfold_indices(table, k, seed)?
        .into_par_iter()
        .map(|(tr, va)| {
            let model = config.train(&table.select_rows(&tr))?;
            let valid = table.select_rows(&va);
            let preds: Vec<Label> = model.predict_table(&valid)?.iter().map(|p| p.label).collect();
            accuracy(&preds, &valid.labels())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureRow;
    use proptest::prelude::*;

    fn table(n_bee: usize, n_nobee: usize) -> FeatureTable {
        let rows = (0..n_bee + n_nobee)
            .map(|i| FeatureRow {
                source_id: format!("r{i}"),
                label: if i < n_bee { Label::Bee } else { Label::NoBee },
                values: vec![i as f64],
            })
            .collect();
        FeatureTable::new(vec!["v".into()], rows).unwrap()
    }

    #[test]
    fn split_counts_follow_class_sizes() {
        let t = table(1100, 2970);
        let (train, test) = stratified_split(&t, 0.2, 42).unwrap();
        assert_eq!(test.class_counts(), (220, 594));
        assert_eq!(train.len() + test.len(), t.len());
        let mut ids: Vec<String> = train
            .rows()
            .iter()
            .chain(test.rows())
            .map(|r| r.source_id.clone())
            .collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), t.len());
    }

    #[test]
    fn split_rejects_bad_fraction_and_tiny_class() {
        let t = table(10, 10);
        assert!(stratified_split(&t, 0.0, 1).is_err());
        assert!(stratified_split(&t, 1.0, 1).is_err());
        assert_eq!(stratified_split(&table(1, 10), 0.2, 1).unwrap_err().code(), "E-DEGENERATE");
    }

    #[test]
    fn split_is_seeded() {
        let t = table(50, 50);
        assert_eq!(stratified_split_indices(&t, 0.2, 3).unwrap(), stratified_split_indices(&t, 0.2, 3).unwrap());
        assert_ne!(stratified_split_indices(&t, 0.2, 3).unwrap(), stratified_split_indices(&t, 0.2, 4).unwrap());
    }

    #[test]
    fn ten_rows_ten_folds_is_leave_one_out() {
        let folds = kfold_indices(&table(5, 5), 10, 0).unwrap();
        assert!(folds.iter().all(|(tr, va)| va.len() == 1 && tr.len() == 9));
    }

    #[test]
    fn ten_folds_of_4070_rows_are_equal() {
        let folds = kfold_indices(&table(1100, 2970), 10, 7).unwrap();
        assert!(folds.iter().all(|(_, va)| va.len() == 407));
    }

    #[test]
    fn too_many_folds_is_rejected() {
        assert!(kfold(&table(2, 2), 5, 0).is_err());
        assert!(kfold(&table(2, 2), 1, 0).is_err());
    }

    #[test]
    fn hand_counted_metrics() {
        use Label::{Bee as B, NoBee as N};
        let preds = [B, B, N, N];
        let labels = [B, N, N, N];
        assert_eq!(accuracy(&preds, &labels).unwrap(), 0.75);
        assert_eq!(confusion(&preds, &labels).unwrap(), [[1, 0], [1, 2]]);
        assert_eq!(accuracy(&labels, &labels).unwrap(), 1.0);
        assert_eq!(accuracy(&[N, B, B, B], &labels).unwrap(), 0.0);
        assert!(accuracy(&preds, &labels[..3]).is_err());
    }

    #[test]
    fn report_csv_layout() {
        use Label::{Bee as B, NoBee as N};
        let mut r = EvalReport::from_predictions(&[B, N], &[B, B], "gnb", 26, 42).unwrap();
        r.fold_accuracies = Some(vec![1.0, 0.5]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("metric,value\nmodel_kind,gnb\nk_features,26\nseed,42\nn,2\naccuracy,0.5\n"));
        assert!(text.ends_with("fold2_accuracy,0.5\ncv_mean_accuracy,0.75\n"));
    }

    proptest! {
        #[test]
        fn report_is_self_consistent(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
            let to = |b: bool| if b { Label::NoBee } else { Label::Bee };
            let preds: Vec<Label> = pairs.iter().map(|p| to(p.0)).collect();
            let labels: Vec<Label> = pairs.iter().map(|p| to(p.1)).collect();
            let r = EvalReport::from_predictions(&preds, &labels, "x", 1, 0).unwrap();
            prop_assert_eq!(r.total(), pairs.len());
            let trace = (r.confusion[0][0] + r.confusion[1][1]) as f64;
            prop_assert!((trace / r.total() as f64 - r.accuracy).abs() < 1e-12);
        }

        #[test]
        fn folds_partition_rows(n_bee in 3usize..40, n_nobee in 3usize..40, k in 2usize..6, seed in any::<u64>()) {
            let t = table(n_bee, n_nobee);
            let folds = kfold_indices(&t, k, seed).unwrap();
            let mut seen = vec![0; t.len()];
            for (tr, va) in &folds {
                prop_assert_eq!(tr.len() + va.len(), t.len());
                for &i in va {
                    seen[i] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            let sizes: Vec<usize> = folds.iter().map(|f| f.1.len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }

        #[test]
        fn split_stays_within_one_of_target(n_bee in 2usize..60, n_nobee in 2usize..60, frac in 0.05f64..0.95, seed in any::<u64>()) {
            let t = table(n_bee, n_nobee);
            let (_, test) = stratified_split(&t, frac, seed).unwrap();
            let (b, n) = test.class_counts();
            prop_assert!((b as f64 - n_bee as f64 * frac).abs() <= 1.0);
            prop_assert!((n as f64 - n_nobee as f64 * frac).abs() <= 1.0);
        }
    }
}
