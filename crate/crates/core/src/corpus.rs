//! On-disk segment corpora: a directory of block WAVs plus `manifest.tsv`.
//!
//! ```text
//! file<TAB>label<TAB>source_id<TAB>offset
//! hive1_00000.wav<TAB>bee<TAB>hive1<TAB>0
//! ```

use std::path::{Path, PathBuf};

use crate::audio::{read_wav, resample, write_wav, Segment};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::util::fmt_sig9;

pub const MANIFEST_NAME: &str = "manifest.tsv";
const HEADER: &str = "file\tlabel\tsource_id\toffset";

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    /// Path relative to the manifest's directory.
    pub file: String,
    pub label: Label,
    pub source_id: String,
    pub offset: f64,
}

impl ManifestEntry {
    /// Row id used in feature tables: the file stem.
    pub fn row_id(&self) -> String {
        Path::new(&self.file)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.file.clone())
    }
}

pub fn format_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            e.file,
            e.label,
            e.source_id,
            fmt_sig9(e.offset)
        ));
    }
    out
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == HEADER => {}
        _ => return Err(Error::Parse(format!("manifest must start with {HEADER:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| Error::Parse(format!("manifest line {}: {m}", i + 1));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", f.len())));
        }
        out.push(ManifestEntry {
            file: f[0].to_string(),
            label: f[1].parse().map_err(|e: Error| err(e.to_string()))?,
            source_id: f[2].to_string(),
            offset: f[3].parse().map_err(|_| err(format!("bad offset {:?}", f[3])))?,
        });
    }
    Ok(out)
}

/// Writes every segment as `<prefix>_<index>.wav` under `dir` and returns
/// the manifest rows. Existing files are overwritten.
pub fn write_segments(dir: &Path, prefix: &str, segments: &[Segment]) -> Result<Vec<ManifestEntry>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    segments
        .iter()
        .enumerate()
        .map(|(i, seg)| {
            let file = format!("{prefix}_{i:05}.wav");
            write_wav(&seg.clip, dir.join(&file))?;
            Ok(ManifestEntry {
                file,
                label: seg.label,
                source_id: seg.source_id.clone(),
                offset: seg.offset,
            })
        })
        .collect()
}

pub fn save_manifest(dir: &Path, entries: &[ManifestEntry]) -> Result<PathBuf> {
    let path = dir.join(MANIFEST_NAME);
    std::fs::write(&path, format_manifest(entries)).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Loads every segment listed in the manifest at `path`, resampled to
/// `sample_rate`. Segment ids are the file stems.
pub fn load_segments(path: &Path, sample_rate: u32) -> Result<Vec<Segment>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text)?
        .into_iter()
        .map(|e| {
            let mut clip = read_wav(base.join(&e.file))?;
            if clip.sample_rate() != sample_rate {
                clip = resample(&clip, sample_rate)?;
            }
            Ok(Segment {
                clip,
                label: e.label,
                source_id: e.row_id(),
                offset: e.offset,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::gen_synthetic_corpus;

    #[test]
    fn manifest_round_trips() {
        let entries = vec![
            ManifestEntry {
                file: "a_00000.wav".into(),
                label: Label::Bee,
                source_id: "a".into(),
                offset: 0.0,
            },
            ManifestEntry {
                file: "a_00001.wav".into(),
                label: Label::NoBee,
                source_id: "a".into(),
                offset: 2.0,
            },
        ];
        let text = format_manifest(&entries);
        assert_eq!(parse_manifest(&text).unwrap(), entries);
        assert_eq!(entries[1].row_id(), "a_00001");
    }

    #[test]
    fn bad_manifests_are_rejected() {
        assert!(parse_manifest("").is_err());
        assert!(parse_manifest("file\tlabel\n").is_err());
        assert!(parse_manifest(&format!("{HEADER}\nx.wav\tbee\ts\n")).is_err());
        assert!(parse_manifest(&format!("{HEADER}\nx.wav\thornet\ts\t0\n")).is_err());
    }

    #[test]
    fn segments_survive_disk() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = gen_synthetic_corpus(1, 1, 5).unwrap();
        let entries = write_segments(dir.path(), "s", &corpus).unwrap();
        let path = save_manifest(dir.path(), &entries).unwrap();
        let back = load_segments(&path, 22050).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in corpus.iter().zip(&back) {
            assert_eq!(a.label, b.label);
            let err = a
                .clip
                .samples()
                .iter()
                .zip(b.clip.samples())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(err <= 0.5 / 32768.0 + 1e-12);
        }
        assert_eq!(back[0].source_id, "s_00000");
    }
}
