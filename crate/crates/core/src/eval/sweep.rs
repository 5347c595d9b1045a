//! Activation x optimizer accuracy grid for the MLP.

use std::io::Write;

use rayon::prelude::*;

use super::{accuracy, stratified_split};
use crate::classify::{mlp::train_mlp, Activation, Classifier, MlpSpec, OptimizerKind};
use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::label::Label;
use crate::util::fmt_sig9;

#[derive(Clone, Debug, PartialEq)]
pub enum SweepCell {
    Accuracy(f64),
    /// Training failed; holds the error code.
    Failed(String),
}

impl SweepCell {
    pub fn accuracy(&self) -> Option<f64> {
        match self {
            SweepCell::Accuracy(a) => Some(*a),
            SweepCell::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub activations: Vec<Activation>,
    pub optimizers: Vec<OptimizerKind>,
    /// `cells[a][o]`
    pub cells: Vec<Vec<SweepCell>>,
}

impl SweepGrid {
    pub fn cell(&self, activation: Activation, optimizer: OptimizerKind) -> Option<&SweepCell> {
        let a = self.activations.iter().position(|x| *x == activation)?;
        let o = self.optimizers.iter().position(|x| *x == optimizer)?;
        Some(&self.cells[a][o])
    }

    pub fn n_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// One row per activation, one column per optimizer; failed cells hold
    /// their error code.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        let header: Vec<String> = std::iter::once("activation".to_string())
            .chain(self.optimizers.iter().map(|o| o.name().to_string()))
            .collect();
        out.write_record(&header).map_err(csv_err)?;
        for (act, row) in self.activations.iter().zip(&self.cells) {
            let record: Vec<String> = std::iter::once(act.name().to_string())
                .chain(row.iter().map(|c| match c {
                    SweepCell::Accuracy(a) => fmt_sig9(*a),
                    SweepCell::Failed(code) => code.clone(),
                }))
                .collect();
            out.write_record(&record).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<sweep>", e))
    }
}

/// Trains one MLP per (activation, optimizer) pair on a shared stratified
/// 80:20 split; every cell uses `base` with its activation and optimizer
/// replaced, including the same seed. Cells train in parallel.
pub fn activation_optimizer_sweep(
    table: &FeatureTable,
    activations: &[Activation],
    optimizers: &[OptimizerKind],
    base: &MlpSpec,
    seed: u64,
) -> Result<SweepGrid> {
    if activations.is_empty() || optimizers.is_empty() {
        return Err(Error::invalid("sweep needs at least one activation and one optimizer"));
    }
    let (train, test) = stratified_split(table, 0.2, seed)?;
    let labels = test.labels();
    let pairs: Vec<(Activation, OptimizerKind)> = activations
        .iter()
        .flat_map(|&a| optimizers.iter().map(move |&o| (a, o)))
        .collect();
    let flat: Vec<SweepCell> = pairs
        .par_iter()
        .map(|&(a, o)| {
            let spec = MlpSpec {
                hidden_activation: a,
                optimizer: o,
                seed,
                ..base.clone()
            };
            let run = || -> Result<f64> {
                let model = train_mlp(&train, &spec)?;
                let preds: Vec<Label> = model.predict_table(&test)?.iter().map(|p| p.label).collect();
                accuracy(&preds, &labels)
            };
            match run() {
                Ok(acc) => SweepCell::Accuracy(acc),
                Err(e) => SweepCell::Failed(e.code().to_string()),
            }
        })
        .collect();
    let cells = flat.chunks(optimizers.len()).map(<[SweepCell]>::to_vec).collect();
    Ok(SweepGrid {
        activations: activations.to_vec(),
        optimizers: optimizers.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureRow;

    fn easy_table() -> FeatureTable {
        let rows = (0..40)
            .map(|i| {
                let nobee = i % 2 == 1;
                FeatureRow {
                    source_id: format!("r{i}"),
                    label: if nobee { Label::NoBee } else { Label::Bee },
                    values: vec![if nobee { 2.0 } else { -2.0 } + (i as f64 * 0.37).sin(), (i as f64).cos()],
                }
            })
            .collect();
        FeatureTable::new(vec!["a".into(), "b".into()], rows).unwrap()
    }

    fn small() -> MlpSpec {
        MlpSpec {
            hidden_layers: vec![4],
            epochs: 5,
            batch_size: 8,
            ..MlpSpec::default()
        }
    }

    #[test]
    fn full_axes_give_twenty_four_cells() {
        let g = activation_optimizer_sweep(&easy_table(), &Activation::ALL, &OptimizerKind::ALL, &small(), 1)
            .unwrap();
        assert_eq!(g.n_cells(), 24);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(
            text.lines().next().unwrap(),
            "activation,adam,adadelta,adagrad,adamax,ftrl,nadam,rmsprop,sgd"
        );
    }

    #[test]
    fn restricted_axes_give_two_cells() {
        let g = activation_optimizer_sweep(
            &easy_table(),
            &[Activation::Sigmoid],
            &[OptimizerKind::AdaMax, OptimizerKind::Sgd],
            &small(),
            2,
        )
        .unwrap();
        assert_eq!(g.n_cells(), 2);
        assert!(g.cell(Activation::Sigmoid, OptimizerKind::Sgd).unwrap().accuracy().is_some());
    }

    #[test]
    fn divergent_cells_are_recorded() {
        let spec = MlpSpec {
            learning_rate: f64::MAX,
            ..small()
        };
        let g = activation_optimizer_sweep(&easy_table(), &[Activation::Relu], &[OptimizerKind::Sgd], &spec, 2)
            .unwrap();
        assert_eq!(g.cells[0][0], SweepCell::Failed("E-DIVERGENCE".into()));
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "activation,sgd\nrelu,E-DIVERGENCE\n");
    }

    #[test]
    fn sweep_is_deterministic() {
        let t = easy_table();
        let acts = [Activation::Tanh];
        let opts = [OptimizerKind::Adam, OptimizerKind::RmsProp];
        let a = activation_optimizer_sweep(&t, &acts, &opts, &small(), 3).unwrap();
        let b = activation_optimizer_sweep(&t, &acts, &opts, &small(), 3).unwrap();
        assert_eq!(a, b);
    }
}
