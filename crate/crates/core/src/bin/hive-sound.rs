//! Command-line front end for the hive-sound pipeline.
//!
//! segment -> extract -> select -> train -> evaluate -> predict, plus mixval,
//! sweep and synth. Exit status: 0 ok, 1 usage error, 2 data error.
//!
//! Usage: hive-sound [--config FILE] [--seed N] [--threads N] <COMMAND> ...

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hive_sound::audio::{self, parse_annotations, read_wav, resample, Segment};
use hive_sound::classify::{Activation, Classifier, OptimizerKind, TrainedModel};
use hive_sound::corpus::{load_segments, save_manifest, write_segments};
use hive_sound::eval::{
    activation_optimizer_sweep, cross_validate, evaluate, gen_synthetic_corpus, run_mixed_validation,
    stratified_split,
};
use hive_sound::features::build_table;
use hive_sound::select::{rank_features, select_from_report, select_preferred};
use hive_sound::util::fmt_sig9;
use hive_sound::{Error, FeatureTable, PipelineConfig};

#[derive(Parser)]
#[command(name = "hive-sound", version, about = "Beehive bee / no-bee sound classification")]
struct Cli {
    /// key = value settings file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every random component [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads, 0 = one per core [default: 0]
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Extra KEY=VALUE setting (repeatable), applied after --config
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AudioOpts {
    /// Pipeline sample rate in Hz [default: 22050]
    #[arg(long)]
    sample_rate: Option<u32>,

    /// Block length in seconds [default: 2]
    #[arg(long)]
    block_seconds: Option<f64>,

    /// FFT size [default: 2048]
    #[arg(long)]
    n_fft: Option<usize>,

    /// STFT hop [default: 512]
    #[arg(long)]
    hop: Option<usize>,

    /// hann or rectangular [default: hann]
    #[arg(long)]
    window: Option<String>,

    /// Cepstral coefficients [default: 128]
    #[arg(long)]
    n_mfcc: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Cut annotated recordings into labeled blocks plus manifest.tsv
    Segment {
        /// Source recording (repeat, paired with --annotations)
        #[arg(long, required = true)]
        wav: Vec<PathBuf>,
        /// start<TAB>end<TAB>label file for the matching --wav
        #[arg(long, required = true)]
        annotations: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        audio: AudioOpts,
    },
    /// Extract the feature table for every block in a manifest
    Extract {
        /// manifest.tsv from segment or synth
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Feature CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        audio: AudioOpts,
    },
    /// Rank features and write the reduced table
    Select {
        /// Feature CSV
        #[arg(long)]
        input: Option<PathBuf>,
        /// Reduced feature CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// feature,score,rank CSV
        #[arg(long)]
        report: Option<PathBuf>,
        /// Features to keep [default: 26]
        #[arg(long)]
        k: Option<usize>,
        /// anova or kendall [default: anova]
        #[arg(long)]
        method: Option<String>,
        /// Keep the top k by score instead of the fixed preference order
        #[arg(long)]
        by_score: bool,
    },
    /// Train a model on a feature CSV
    Train {
        /// Feature CSV
        #[arg(long)]
        input: Option<PathBuf>,
        /// Model JSON
        #[arg(long)]
        out: Option<PathBuf>,
        /// Held-out metrics CSV
        #[arg(long)]
        report: Option<PathBuf>,
        /// mlp, gnb, tree, forest or svm [default: mlp]
        #[arg(long)]
        model: Option<String>,
        /// Held-out fraction, 0 trains on everything [default: 0.2]
        #[arg(long)]
        test_fraction: Option<f64>,
    },
    /// Score a model on a feature CSV
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        /// Feature CSV
        #[arg(long)]
        input: Option<PathBuf>,
        /// Metrics CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also cross-validate the model's settings on k folds
        #[arg(long)]
        kfold: Option<usize>,
    },
    /// Classify each block of a recording
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        wav: PathBuf,
        #[command(flatten)]
        audio: AudioOpts,
    },
    /// Five-clip mixed validation from one bee and one no-bee recording
    Mixval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        bee: PathBuf,
        #[arg(long)]
        nobee: PathBuf,
        /// Report CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        audio: AudioOpts,
    },
    /// Activation x optimizer accuracy grid for the MLP
    Sweep {
        /// Feature CSV
        #[arg(long)]
        input: Option<PathBuf>,
        /// Grid CSV [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma list [default: relu,sigmoid,tanh]
        #[arg(long, value_delimiter = ',')]
        activations: Vec<String>,
        /// Comma list [default: all eight]
        #[arg(long, value_delimiter = ',')]
        optimizers: Vec<String>,
    },
    /// Write a synthetic labeled corpus plus manifest.tsv
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 400)]
        n_bee: usize,
        #[arg(long, default_value_t = 400)]
        n_nobee: usize,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error[E-USAGE]: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}

/// Defaults, then the config file, then --set, then dedicated flags.
fn build_config(cli: &Cli) -> Outcome<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            PipelineConfig::parse_text(&text).map_err(|e| Failure::Usage(e.to_string()))?
        }
        None => PipelineConfig::default(),
    };
    let mut pairs: Vec<(String, String)> = Vec::new();
    for kv in &cli.set {
        match kv.split_once('=') {
            Some((k, v)) => pairs.push((k.into(), v.into())),
            None => return usage(format!("--set expects KEY=VALUE, got {kv:?}")),
        }
    }
    let mut flag = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            pairs.push((k.into(), v));
        }
    };
    flag("seed", cli.seed.map(|v| v.to_string()));
    flag("threads", cli.threads.map(|v| v.to_string()));
    let audio = match &cli.command {
        Command::Segment { audio, .. }
        | Command::Extract { audio, .. }
        | Command::Predict { audio, .. }
        | Command::Mixval { audio, .. } => Some(audio),
        _ => None,
    };
    if let Some(a) = audio {
        flag("sample_rate", a.sample_rate.map(|v| v.to_string()));
        flag("block_seconds", a.block_seconds.map(|v| v.to_string()));
        flag("n_fft", a.n_fft.map(|v| v.to_string()));
        flag("hop", a.hop.map(|v| v.to_string()));
        flag("window", a.window.clone());
        flag("n_mfcc", a.n_mfcc.map(|v| v.to_string()));
    }
    match &cli.command {
        Command::Select { k, method, by_score, .. } => {
            flag("k_features", k.map(|v| v.to_string()));
            flag("selection_method", method.clone());
            if *by_score {
                flag("select_by_score", Some("true".into()));
            }
        }
        Command::Train { model, test_fraction, .. } => {
            flag("model", model.clone());
            flag("test_fraction", test_fraction.map(|v| v.to_string()));
        }
        _ => {}
    }
    for (k, v) in pairs {
        cfg.set(&k, &v).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Outcome {
    let cfg = build_config(&cli)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let input = |given: &Option<PathBuf>, what: &str| -> Outcome<PathBuf> {
        match given.clone().or_else(|| cfg.input.clone()) {
            Some(p) => Ok(p),
            None => usage(format!("{what} needs --input (or `input` in the config)")),
        }
    };
    let output = |given: &Option<PathBuf>| given.clone().or_else(|| cfg.output.clone());

    match &cli.command {
        Command::Segment { wav, annotations, out_dir, .. } => {
            if wav.len() != annotations.len() {
                return usage("each --wav needs a matching --annotations");
            }
            let mut manifest = Vec::new();
            for (w, a) in wav.iter().zip(annotations) {
                let clip = load_clip(w, cfg.sample_rate)?;
                let text = std::fs::read_to_string(a).map_err(|e| Error::Io { path: a.clone(), source: e })?;
                let stem = stem(w);
                let segs = audio::segment(&clip, &parse_annotations(&text)?, cfg.block_seconds, &stem)?;
                manifest.extend(write_segments(out_dir, &stem, &segs)?);
            }
            let path = save_manifest(out_dir, &manifest)?;
            println!("{} segments -> {}", manifest.len(), path.display());
        }
        Command::Extract { manifest, out, .. } => {
            let manifest = input(manifest, "extract")?;
            let segs = load_segments(&manifest, cfg.sample_rate)?;
            let table = build_table(&segs, &cfg.extractor()?)?;
            write_table(&table, output(out).as_deref())?;
        }
        Command::Select { input: given, out, report, .. } => {
            let table = FeatureTable::load_csv(input(given, "select")?)?;
            let ranking = rank_features(&table, cfg.selection_method)?;
            if let Some(path) = report {
                write_file(path, |w| ranking.write_csv(w))?;
            }
            let reduced = if cfg.select_by_score {
                select_from_report(&table, &ranking, cfg.k_features)?
            } else {
                select_preferred(&table, cfg.k_features)?
            };
            write_table(&reduced, output(out).as_deref())?;
        }
        Command::Train { input: given, out, report, .. } => {
            let table = FeatureTable::load_csv(input(given, "train")?)?;
            let Some(model_path) = output(out) else {
                return usage("train needs --out for the model file");
            };
            let (train, test) = if cfg.test_fraction == 0.0 {
                (table.clone(), table)
            } else {
                stratified_split(&table, cfg.test_fraction, cfg.seed)?
            };
            let model = cfg.model_config().train(&train)?;
            model.save(&model_path)?;
            let r = evaluate(&model, &test, model.kind().name(), cfg.seed)?;
            if let Some(path) = report {
                write_file(path, |w| r.write_csv(w))?;
            }
            println!("accuracy {}", fmt_sig9(r.accuracy));
        }
        Command::Evaluate { model, input: given, out, kfold } => {
            let model = TrainedModel::load(model)?;
            let table = FeatureTable::load_csv(input(given, "evaluate")?)?.select_columns(model.feature_names())?;
            let mut r = evaluate(&model, &table, model.kind().name(), cfg.seed)?;
            if let Some(k) = kfold {
                r.fold_accuracies = Some(cross_validate(&table, &model.config(), *k, cfg.seed)?);
            }
            match output(out) {
                Some(path) => {
                    write_file(&path, |w| r.write_csv(w))?;
                    println!("accuracy {}", fmt_sig9(r.accuracy));
                }
                None => r.write_csv(std::io::stdout().lock())?,
            }
        }
        Command::Predict { model, wav, .. } => {
            let model = TrainedModel::load(model)?;
            let clip = load_clip(wav, cfg.sample_rate)?;
            let fx = cfg.extractor()?;
            let blocks = audio::block_len(cfg.block_seconds, cfg.sample_rate);
            if blocks == 0 {
                return usage("block shorter than one sample");
            }
            let mut stdout = std::io::stdout().lock();
            for (i, chunk) in clip.samples().chunks(blocks).enumerate() {
                let samples: Vec<f64> = chunk.iter().copied().cycle().take(blocks).collect();
                let fv = fx.extract(&hive_sound::AudioClip::new(samples, cfg.sample_rate)?)?;
                let p = model.predict(model.feature_names(), &fv.project(model.feature_names())?)?;
                let offset = (i * blocks) as f64 / cfg.sample_rate as f64;
                writeln!(stdout, "{}\t{}\t{}", fmt_sig9(offset), p.label, fmt_sig9(p.score))
                    .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?;
            }
        }
        Command::Mixval { model, bee, nobee, out, .. } => {
            let model = TrainedModel::load(model)?;
            let first_block = |path: &Path, label| -> Outcome<Segment> {
                let clip = load_clip(path, cfg.sample_rate)?;
                let segs = audio::segment(
                    &clip,
                    &[hive_sound::LabeledInterval::new(0.0, clip.duration(), label)?],
                    cfg.block_seconds,
                    &stem(path),
                )?;
                Ok(segs.into_iter().next().expect("non-empty clip yields a block"))
            };
            let b = first_block(bee, hive_sound::Label::Bee)?;
            let n = first_block(nobee, hive_sound::Label::NoBee)?;
            let r = run_mixed_validation(&model, &b, &n, &cfg.extractor()?)?;
            match output(out) {
                Some(path) => {
                    write_file(&path, |w| r.write_csv(w))?;
                    println!("accuracy {}", fmt_sig9(r.accuracy));
                }
                None => r.write_csv(std::io::stdout().lock())?,
            }
        }
        Command::Sweep { input: given, out, activations, optimizers } => {
            let table = FeatureTable::load_csv(input(given, "sweep")?)?;
            let acts: Vec<Activation> = if activations.is_empty() {
                Activation::ALL.to_vec()
            } else {
                parse_list(activations)?
            };
            let opts: Vec<OptimizerKind> = if optimizers.is_empty() {
                OptimizerKind::ALL.to_vec()
            } else {
                parse_list(optimizers)?
            };
            let grid = activation_optimizer_sweep(&table, &acts, &opts, &cfg.mlp, cfg.seed)?;
            match output(out) {
                Some(path) => write_file(&path, |w| grid.write_csv(w))?,
                None => grid.write_csv(std::io::stdout().lock())?,
            }
        }
        Command::Synth { out_dir, n_bee, n_nobee } => {
            let corpus = gen_synthetic_corpus(*n_bee, *n_nobee, cfg.seed)?;
            let entries = write_segments(out_dir, "synth", &corpus)?;
            let path = save_manifest(out_dir, &entries)?;
            println!("{} clips -> {}", entries.len(), path.display());
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Outcome<Vec<T>> {
    items
        .iter()
        .map(|s| s.trim().parse().map_err(|e: Error| Failure::Usage(e.to_string())))
        .collect()
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "clip".into())
}

fn load_clip(path: &Path, sample_rate: u32) -> Outcome<hive_sound::AudioClip> {
    let clip = read_wav(path)?;
    Ok(if clip.sample_rate() == sample_rate {
        clip
    } else {
        resample(&clip, sample_rate)?
    })
}

fn write_file<F>(path: &Path, f: F) -> Outcome
where
    F: FnOnce(std::io::BufWriter<std::fs::File>) -> hive_sound::Result<()>,
{
    let file = std::fs::File::create(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    f(std::io::BufWriter::new(file))?;
    Ok(())
}

fn write_table(table: &FeatureTable, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => table.save_csv(p)?,
        None => table.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}
