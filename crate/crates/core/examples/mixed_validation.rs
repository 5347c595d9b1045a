//! Scores an MLP on the five mixed bee / no-bee clips.

use hive_sound::classify::{ModelConfig, ModelKind};
use hive_sound::eval::{gen_synthetic_corpus, run_mixed_validation};
use hive_sound::features::build_table;
use hive_sound::select::select_preferred;
use hive_sound::{FeatureExtractor, Label};

fn main() -> hive_sound::Result<()> {
    let fx = FeatureExtractor::with_defaults(22050)?;
    let corpus = gen_synthetic_corpus(50, 50, 3)?;
    let table = select_preferred(&build_table(&corpus, &fx)?, 26)?;
    let mut config = ModelConfig::default_for(ModelKind::Mlp, 3);
    if let ModelConfig::Mlp(spec) = &mut config {
        spec.epochs = 150;
    }
    let model = config.train(&table)?;

    let held_out = gen_synthetic_corpus(1, 1, 300)?;
    let bee = held_out.iter().find(|s| s.label == Label::Bee).expect("bee clip");
    let nobee = held_out.iter().find(|s| s.label == Label::NoBee).expect("nobee clip");
    let report = run_mixed_validation(&model, bee, nobee, &fx)?;
    report.write_csv(std::io::stdout().lock())
}
