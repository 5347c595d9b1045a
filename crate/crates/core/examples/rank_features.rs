//! Ranks features with Kendall's tau and ANOVA F, then keeps the best 26.

use hive_sound::eval::gen_synthetic_corpus;
use hive_sound::features::build_table;
use hive_sound::select::{rank_features, select_preferred, SelectionMethod};
use hive_sound::FeatureExtractor;

fn main() -> hive_sound::Result<()> {
    let corpus = gen_synthetic_corpus(40, 40, 2)?;
    let table = build_table(&corpus, &FeatureExtractor::with_defaults(22050)?)?;

    for method in [SelectionMethod::KendallTau, SelectionMethod::AnovaF] {
        let report = rank_features(&table, method)?;
        println!("{method}:");
        for name in report.top(8) {
            let score = report.score(name).and_then(|s| s.value()).unwrap_or(f64::NAN);
            println!("  {name:<20} {score:>12.4}");
        }
    }

    let reduced = select_preferred(&table, 26)?;
    println!("reduced table: {} rows x {} features", reduced.len(), reduced.n_features());
    Ok(())
}
