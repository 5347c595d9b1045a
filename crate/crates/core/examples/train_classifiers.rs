//! Trains every model kind on an 80:20 split and reports held-out accuracy,
//! then 5-fold cross-validates the forest.

use hive_sound::classify::{ModelConfig, ModelKind};
use hive_sound::eval::{cross_validate, evaluate, gen_synthetic_corpus, stratified_split};
use hive_sound::features::build_table;
use hive_sound::select::select_preferred;
use hive_sound::util::mean;
use hive_sound::{FeatureExtractor, PipelineConfig};

fn main() -> hive_sound::Result<()> {
    let seed = 5;
    let corpus = gen_synthetic_corpus(60, 60, seed)?;
    let table = build_table(&corpus, &FeatureExtractor::with_defaults(22050)?)?;
    let table = select_preferred(&table, 26)?;
    let (train, test) = stratified_split(&table, 0.2, seed)?;

    let mut cfg = PipelineConfig { seed, ..PipelineConfig::default() };
    cfg.set("epochs", "200")?;
    cfg.set("n_trees", "50")?;
    for kind in ModelKind::ALL {
        let model = cfg.model_config_for(kind).train(&train)?;
        let report = evaluate(&model, &test, kind.name(), seed)?;
        println!("{:<7} accuracy {:.4}  confusion {:?}", kind, report.accuracy, report.confusion);
    }

    let forest: ModelConfig = cfg.model_config_for(ModelKind::Forest);
    let folds = cross_validate(&table, &forest, 5, seed)?;
    println!("forest 5-fold: {folds:.3?} mean {:.4}", mean(&folds));
    Ok(())
}
