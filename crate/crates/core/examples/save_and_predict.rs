//! Trains a model, saves it as JSON, reloads it and classifies fresh clips.

use hive_sound::classify::{Classifier, ModelConfig, ModelKind, TrainedModel};
use hive_sound::eval::gen_synthetic_corpus;
use hive_sound::features::build_table;
use hive_sound::select::select_preferred;
use hive_sound::FeatureExtractor;

fn main() -> hive_sound::Result<()> {
    let fx = FeatureExtractor::with_defaults(22050)?;
    let table = select_preferred(&build_table(&gen_synthetic_corpus(40, 40, 8)?, &fx)?, 26)?;
    let model = ModelConfig::default_for(ModelKind::Gnb, 8).train(&table)?;

    let path = std::env::temp_dir().join("hive-gnb.json");
    model.save(&path)?;
    let model = TrainedModel::load(&path)?;
    println!("loaded {} model over {} features from {}", model.kind(), model.feature_names().len(), path.display());

    for seg in gen_synthetic_corpus(3, 3, 99)? {
        let values = fx.extract(&seg.clip)?.project(model.feature_names())?;
        let p = model.predict(model.feature_names(), &values)?;
        println!("{}  true {:<5}  predicted {:<5}  score {:.3}", seg.source_id, seg.label, p.label, p.score);
    }
    Ok(())
}
