//! Activation x optimizer accuracy grid on a small network.

use hive_sound::classify::{Activation, MlpSpec, OptimizerKind};
use hive_sound::eval::{activation_optimizer_sweep, gen_synthetic_corpus};
use hive_sound::features::build_table;
use hive_sound::select::select_preferred;
use hive_sound::FeatureExtractor;

fn main() -> hive_sound::Result<()> {
    let fx = FeatureExtractor::with_defaults(22050)?;
    let table = select_preferred(&build_table(&gen_synthetic_corpus(30, 30, 6)?, &fx)?, 26)?;
    let base = MlpSpec {
        hidden_layers: vec![32, 16],
        epochs: 60,
        batch_size: 16,
        ..MlpSpec::default()
    };
    let grid = activation_optimizer_sweep(&table, &Activation::ALL, &OptimizerKind::ALL, &base, 6)?;
    grid.write_csv(std::io::stdout().lock())
}
