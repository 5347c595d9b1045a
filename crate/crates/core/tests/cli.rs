use std::path::Path;
use std::process::{Command, Output};

use hive_sound::audio::write_wav;
use hive_sound::AudioClip;

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hive-sound"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn hive-sound")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = bin(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn n_columns(csv: &Path) -> usize {
    std::fs::read_to_string(csv).unwrap().lines().next().unwrap().split(',').count()
}

fn synth_features(dir: &Path) {
    ok(&["synth", "--out-dir", "corpus", "--n-bee", "8", "--n-nobee", "8", "--seed", "3"], dir);
    ok(&["extract", "--manifest", "corpus/manifest.tsv", "--out", "f.csv"], dir);
}

#[test]
fn extract_is_byte_identical_and_select_keeps_k() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    synth_features(dir);
    ok(&["extract", "--manifest", "corpus/manifest.tsv", "--out", "g.csv"], dir);
    let f = std::fs::read(dir.join("f.csv")).unwrap();
    assert_eq!(f, std::fs::read(dir.join("g.csv")).unwrap());
    assert_eq!(n_columns(&dir.join("f.csv")), 2 + 134);

    ok(&["select", "--input", "f.csv", "--k", "26", "--out", "s.csv", "--report", "r.csv"], dir);
    assert_eq!(n_columns(&dir.join("s.csv")), 28);
    let report = std::fs::read_to_string(dir.join("r.csv")).unwrap();
    assert_eq!(report.lines().count(), 1 + 134);

    ok(&["select", "--input", "f.csv", "--k", "5", "--by-score", "--method", "kendall", "--out", "t.csv"], dir);
    assert_eq!(n_columns(&dir.join("t.csv")), 7);
}

#[test]
fn train_evaluate_predict_mixval() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    synth_features(dir);
    ok(&["select", "--input", "f.csv", "--out", "s.csv"], dir);
    let printed = ok(
        &["train", "--input", "s.csv", "--out", "m.json", "--model", "forest", "--set", "n_trees=15", "--report", "tr.csv"],
        dir,
    );
    assert!(printed.starts_with("accuracy "));
    let m1 = std::fs::read(dir.join("m.json")).unwrap();
    ok(
        &["train", "--input", "s.csv", "--out", "m2.json", "--model", "forest", "--set", "n_trees=15"],
        dir,
    );
    assert_eq!(m1, std::fs::read(dir.join("m2.json")).unwrap());

    let eval = ok(&["evaluate", "--model", "m.json", "--input", "f.csv", "--kfold", "2"], dir);
    assert!(eval.starts_with("metric,value\n"));
    assert!(eval.contains("fold2_accuracy,"));

    let line = ok(&["predict", "--model", "m.json", "--wav", "corpus/synth_00000.wav"], dir);
    let fields: Vec<&str> = line.trim_end().split('\t').collect();
    assert_eq!(fields.len(), 3);
    assert!(fields[1] == "bee" || fields[1] == "nobee");

    let mix = ok(
        &["mixval", "--model", "m.json", "--bee", "corpus/synth_00000.wav", "--nobee", "corpus/synth_00008.wav"],
        dir,
    );
    assert_eq!(mix.lines().count(), 7);
}

#[test]
fn sweep_grid_shape() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    synth_features(dir);
    ok(&["select", "--input", "f.csv", "--k", "6", "--out", "s.csv"], dir);
    let grid = ok(
        &[
            "sweep", "--input", "s.csv", "--activations", "relu,tanh", "--optimizers", "adam,sgd,ftrl",
            "--set", "epochs=3", "--set", "hidden_layers=4",
        ],
        dir,
    );
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines[0], "activation,adam,sgd,ftrl");
    assert_eq!(lines.len(), 3);
}

#[test]
fn segment_writes_blocks_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    let samples: Vec<f64> = (0..22050 * 5).map(|i| 0.3 * (i as f64 * 0.05).sin()).collect();
    write_wav(&AudioClip::new(samples, 22050).unwrap(), dir.join("hive.wav")).unwrap();
    std::fs::write(dir.join("hive.tsv"), "0\t3\tbee\n3\t5\tnobee\n").unwrap();
    ok(&["segment", "--wav", "hive.wav", "--annotations", "hive.tsv", "--out-dir", "blocks"], dir);
    let manifest = std::fs::read_to_string(dir.join("blocks/manifest.tsv")).unwrap();
    let labels: Vec<&str> = manifest.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(labels, ["bee", "nobee", "nobee"]);
    assert!(dir.join("blocks/hive_00002.wav").exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    synth_features(dir);
    std::fs::write(dir.join("run.cfg"), "# reduced set\nk_features = 10\n").unwrap();
    ok(&["select", "--config", "run.cfg", "--input", "f.csv", "--out", "a.csv"], dir);
    assert_eq!(n_columns(&dir.join("a.csv")), 12);
    ok(&["select", "--config", "run.cfg", "--input", "f.csv", "--out", "b.csv", "--k", "4"], dir);
    assert_eq!(n_columns(&dir.join("b.csv")), 6);

    std::fs::write(dir.join("bad.cfg"), "colour = blue\n").unwrap();
    let out = bin(&["select", "--config", "bad.cfg", "--input", "f.csv", "--out", "c.csv"], dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_and_error_prefix() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    assert_eq!(bin(&["--help"], dir).status.code(), Some(0));
    assert_eq!(bin(&["train", "--help"], dir).status.code(), Some(0));
    assert_eq!(bin(&["frobnicate"], dir).status.code(), Some(1));
    assert_eq!(bin(&["select", "--k", "many"], dir).status.code(), Some(1));

    let out = bin(&["train", "--input", "missing.csv", "--out", "m.json"], dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[E-IO]: "));

    std::fs::write(dir.join("junk.csv"), "a,b\n1,2\n").unwrap();
    let out = bin(&["select", "--input", "junk.csv", "--out", "x.csv"], dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[E-PARSE]: "));
}
