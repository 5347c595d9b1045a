//! Extracts the 134 summary features from one bee and one no-bee clip.

use hive_sound::eval::gen_synthetic_corpus;
use hive_sound::FeatureExtractor;

fn main() -> hive_sound::Result<()> {
    let corpus = gen_synthetic_corpus(1, 1, 11)?;
    let fx = FeatureExtractor::with_defaults(22050)?;
    println!("{:<20} {:>14} {:>14}", "feature", "bee", "nobee");
    let bee = fx.extract(&corpus[0].clip)?.to_vec();
    let nobee = fx.extract(&corpus[1].clip)?.to_vec();
    for (i, name) in fx.feature_names().iter().enumerate().take(12) {
        println!("{name:<20} {:>14.4} {:>14.4}", bee[i], nobee[i]);
    }
    println!("... {} features in total", fx.feature_names().len());
    Ok(())
}
