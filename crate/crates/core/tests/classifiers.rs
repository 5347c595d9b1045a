use hive_sound::classify::{
    train, Classifier, ModelConfig, ModelKind, MlpSpec, TrainedModel, TreeParams,
};
use hive_sound::features::{FeatureRow, FeatureTable};
use hive_sound::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn moons(n: usize, seed: u64) -> FeatureTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|i| {
            let upper = i % 2 == 0;
            let t = std::f64::consts::PI * rng.gen_range(0.0..1.0);
            let (x, y) = if upper {
                (t.cos(), t.sin())
            } else {
                (1.0 - t.cos(), 0.5 - t.sin())
            };
            FeatureRow {
                source_id: format!("p{i}"),
                label: if upper { Label::Bee } else { Label::NoBee },
                values: vec![x + rng.gen_range(-0.05..0.05), y + rng.gen_range(-0.05..0.05)],
            }
        })
        .collect();
    FeatureTable::new(vec!["x".into(), "y".into()], rows).unwrap()
}

fn accuracy(model: &dyn Classifier, table: &FeatureTable) -> f64 {
    let preds = model.predict_table(table).unwrap();
    preds
        .iter()
        .zip(table.rows())
        .filter(|(p, r)| p.label == r.label)
        .count() as f64
        / table.len() as f64
}

#[test]
fn mlp_defaults_fit_two_moons() {
    let table = moons(200, 7);
    let model = train(&table, &ModelConfig::Mlp(MlpSpec { seed: 1, ..MlpSpec::default() })).unwrap();
    let acc = accuracy(&model, &table);
    assert_eq!(acc, 1.0, "training accuracy {acc}");
}

#[test]
fn single_class_is_rejected() {
    let rows = (0..4)
        .map(|i| FeatureRow {
            source_id: i.to_string(),
            label: Label::Bee,
            values: vec![i as f64],
        })
        .collect();
    let table = FeatureTable::new(vec!["a".into()], rows).unwrap();
    for kind in [ModelKind::Mlp, ModelKind::Gnb, ModelKind::Svm] {
        let err = train(&table, &ModelConfig::default_for(kind, 0)).unwrap_err();
        assert_eq!(err.code(), "E-DEGENERATE", "{kind}");
    }
}

fn quick_config(kind: ModelKind) -> ModelConfig {
    match ModelConfig::default_for(kind, 3) {
        ModelConfig::Mlp(spec) => ModelConfig::Mlp(MlpSpec {
            hidden_layers: vec![16, 8],
            epochs: 30,
            ..spec
        }),
        other => other,
    }
}

#[test]
fn every_kind_round_trips_bit_for_bit() {
    let table = moons(120, 11);
    let probe = moons(100, 12);
    for kind in ModelKind::ALL {
        let model = train(&table, &quick_config(kind)).unwrap();
        let mut buf = Vec::new();
        model.write_to(&mut buf).unwrap();
        let back = TrainedModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, model, "{kind}");
        for r in probe.rows() {
            let a = model.predict(table.feature_names(), &r.values).unwrap();
            let b = back.predict(table.feature_names(), &r.values).unwrap();
            assert_eq!(a.label, b.label);
            assert_eq!(a.score.to_bits(), b.score.to_bits(), "{kind}");
        }
    }
}

#[test]
fn equal_seeds_give_equal_models() {
    let table = moons(80, 2);
    for kind in ModelKind::ALL {
        let a = train(&table, &quick_config(kind)).unwrap();
        let b = train(&table, &quick_config(kind)).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap(), "{kind}");
    }
}

#[test]
fn feature_layout_is_enforced() {
    let table = moons(40, 3);
    let model = train(&table, &ModelConfig::Gnb).unwrap();
    let swapped = vec!["y".to_string(), "x".to_string()];
    let err = model.predict(&swapped, &[0.0, 0.0]).unwrap_err();
    assert_eq!(err.code(), "E-FEATURES");
}

#[test]
fn predictions_ignore_row_order() {
    let table = moons(60, 4);
    let model = train(&table, &ModelConfig::Forest(Default::default())).unwrap();
    let forward = model.predict_table(&table).unwrap();
    let reversed_idx: Vec<usize> = (0..table.len()).rev().collect();
    let mut backward = model.predict_table(&table.select_rows(&reversed_idx)).unwrap();
    backward.reverse();
    assert_eq!(forward, backward);
}

#[test]
fn overfit_tree_returns_training_labels() {
    let table = moons(100, 5);
    let model = train(&table, &ModelConfig::Tree(TreeParams::default())).unwrap();
    for r in table.rows() {
        assert_eq!(model.predict(table.feature_names(), &r.values).unwrap().label, r.label);
    }
}

#[test]
fn corrupted_model_text_is_rejected() {
    let table = moons(40, 6);
    let model = train(&table, &ModelConfig::Gnb).unwrap();
    let text = model.to_json().unwrap();
    assert!(TrainedModel::from_json(&text.replace("hive-sound-model", "other")).is_err());
    assert!(TrainedModel::from_json(&text.replace("\"version\": 1", "\"version\": 9")).is_err());
    assert!(TrainedModel::from_json("{").is_err());
}
