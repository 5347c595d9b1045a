//! Writes a small synthetic bee / no-bee corpus to disk.
//!
//! Usage: cargo run --example synth_corpus -- [OUT_DIR]

use std::path::PathBuf;

use hive_sound::corpus::{save_manifest, write_segments};
use hive_sound::eval::gen_synthetic_corpus;

fn main() -> hive_sound::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hive-synth"));
    let corpus = gen_synthetic_corpus(20, 20, 1)?;
    let entries = write_segments(&dir, "synth", &corpus)?;
    let manifest = save_manifest(&dir, &entries)?;
    for e in entries.iter().step_by(10) {
        println!("{}  {}", e.file, e.label);
    }
    println!("{} clips, manifest at {}", entries.len(), manifest.display());
    Ok(())
}
