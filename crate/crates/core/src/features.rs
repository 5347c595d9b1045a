//! Per-clip spectral and cepstral features and the feature table they feed.
//!
//! Every clip is summarized by 134 scalars, each the mean over STFT frames of
//! a per-frame descriptor:
//!
//! | name                 | per-frame value                                        |
//! |----------------------|--------------------------------------------------------|
//! | `chroma_stft`        | mean of the max-normalized 12-class pitch profile      |
//! | `rmse`               | `sqrt(mean(x^2))` of the raw frame                     |
//! | `spectral_centroid`  | magnitude-weighted mean frequency (Hz)                 |
//! | `spectral_bandwidth` | magnitude-weighted std. deviation around the centroid  |
//! | `rolloff`            | frequency below which 85% of the magnitude lies        |
//! | `zero_crossing_rate` | sign changes per sample                                |
//! | `mfcc1..mfcc128`     | orthonormal DCT-II of log mel energies                 |

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::audio::{AudioClip, Segment};
use crate::dsp::{
    dct_matrix, frame_signal, power_to_db, MelFilterbank, Spectrogram, Stft, StftConfig,
};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::util::{fmt_sig9, mean};

pub const N_MFCC: usize = 128;
pub const N_MELS: usize = 128;
pub const FEATURE_COUNT: usize = 6 + N_MFCC;
pub const ROLLOFF_PERCENT: f64 = 0.85;

/// Reference pitch for chroma class 0 (C4).
pub const CHROMA_REF_HZ: f64 = 261.626;
const CHROMA_MIN_HZ: f64 = 20.0;

pub const SUMMARY_FEATURES: [&str; 6] = [
    "chroma_stft",
    "rmse",
    "spectral_centroid",
    "spectral_bandwidth",
    "rolloff",
    "zero_crossing_rate",
];

/// Canonical column names for `n_mfcc` cepstral coefficients (1-based `mfccN`).
pub fn feature_names(n_mfcc: usize) -> Vec<String> {
    SUMMARY_FEATURES
        .iter()
        .map(|s| s.to_string())
        .chain((1..=n_mfcc).map(|i| format!("mfcc{i}")))
        .collect()
}

pub fn canonical_feature_names() -> Vec<String> {
    feature_names(N_MFCC)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub chroma_stft: f64,
    pub rmse: f64,
    pub spectral_centroid: f64,
    pub spectral_bandwidth: f64,
    pub rolloff: f64,
    pub zero_crossing_rate: f64,
    /// `mfcc[0]` is `mfcc1`.
    pub mfcc: Vec<f64>,
}

impl FeatureVector {
    /// Values in canonical order.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![
            self.chroma_stft,
            self.rmse,
            self.spectral_centroid,
            self.spectral_bandwidth,
            self.rolloff,
            self.zero_crossing_rate,
        ];
        v.extend_from_slice(&self.mfcc);
        v
    }

    pub fn names(&self) -> Vec<String> {
        feature_names(self.mfcc.len())
    }

    /// Values for the named subset, in the requested order.
    pub fn project(&self, names: &[String]) -> Result<Vec<f64>> {
        let all = self.to_vec();
        let canon = self.names();
        names
            .iter()
            .map(|n| {
                canon
                    .iter()
                    .position(|c| c == n)
                    .map(|i| all[i])
                    .ok_or_else(|| Error::invalid(format!("unknown feature {n:?}")))
            })
            .collect()
    }

    /// Checks the range invariants for a clip sampled at `sample_rate`.
    pub fn check_ranges(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        let in_band = |x: f64| (0.0..=nyquist).contains(&x);
        let ok = self.to_vec().iter().all(|v| v.is_finite())
            && in_band(self.spectral_centroid)
            && in_band(self.spectral_bandwidth)
            && in_band(self.rolloff)
            && (0.0..=1.0).contains(&self.zero_crossing_rate)
            && (0.0..=1.0).contains(&self.chroma_stft)
            && self.rmse >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::degenerate(format!("feature out of range: {self:?}")))
        }
    }
}

/// Per-frame `sum f[n] M[n] / sum M[n]`; all-zero frames give 0.
pub fn spectral_centroid_series(spec: &Spectrogram) -> Vec<f64> {
    spec.magnitudes
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter().zip(&spec.bin_freqs).map(|(m, f)| m * f).sum::<f64>() / total
            } else {
                0.0
            }
        })
        .collect()
}

pub fn spectral_centroid(spec: &Spectrogram) -> f64 {
    mean(&spectral_centroid_series(spec))
}

/// Per-frame `sqrt(sum M[n] (f[n] - C)^2 / sum M[n])` around the given centroids.
pub fn spectral_bandwidth_series(spec: &Spectrogram, centroids: &[f64]) -> Vec<f64> {
    spec.magnitudes
        .iter()
        .zip(centroids)
        .map(|(row, &c)| {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                let spread: f64 = row
                    .iter()
                    .zip(&spec.bin_freqs)
                    .map(|(m, f)| m * (f - c).powi(2))
                    .sum();
                (spread / total).sqrt()
            } else {
                0.0
            }
        })
        .collect()
}

pub fn spectral_bandwidth(spec: &Spectrogram, centroids: &[f64]) -> f64 {
    mean(&spectral_bandwidth_series(spec, centroids))
}

/// Frequency of the first bin at which the cumulative magnitude reaches
/// `pct` of the frame total; all-zero frames give 0.
pub fn rolloff_series(spec: &Spectrogram, pct: f64) -> Vec<f64> {
    spec.magnitudes
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return 0.0;
            }
            let threshold = pct * total;
            let mut acc = 0.0;
            for (m, f) in row.iter().zip(&spec.bin_freqs) {
                acc += m;
                if acc >= threshold {
                    return *f;
                }
            }
            *spec.bin_freqs.last().unwrap_or(&0.0)
        })
        .collect()
}

pub fn rolloff(spec: &Spectrogram, pct: f64) -> Result<f64> {
    if !(pct > 0.0 && pct < 1.0) {
        return Err(Error::invalid(format!("roll-off fraction {pct} outside (0, 1)")));
    }
    Ok(mean(&rolloff_series(spec, pct)))
}

/// Sign changes per sample, with `sign(0) = +1`.
pub fn zero_crossing_series(frames: &[&[f64]]) -> Vec<f64> {
    frames
        .iter()
        .map(|frame| {
            let crossings = frame
                .windows(2)
                .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
                .count();
            crossings as f64 / frame.len() as f64
        })
        .collect()
}

pub fn zero_crossing_rate(frames: &[&[f64]]) -> f64 {
    mean(&zero_crossing_series(frames))
}

pub fn rms_series(frames: &[&[f64]]) -> Vec<f64> {
    frames
        .iter()
        .map(|frame| (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt())
        .collect()
}

pub fn rmse(frames: &[&[f64]]) -> f64 {
    mean(&rms_series(frames))
}

/// Pitch class of each bin (`None` below 20 Hz).
pub fn chroma_classes(bin_freqs: &[f64]) -> Vec<Option<usize>> {
    bin_freqs
        .iter()
        .map(|&f| {
            (f >= CHROMA_MIN_HZ)
                .then(|| (12.0 * (f / CHROMA_REF_HZ).log2()).round().rem_euclid(12.0) as usize)
        })
        .collect()
}

/// Per-frame 12-class energy profile normalized by its maximum.
pub fn chroma_series(spec: &Spectrogram) -> Vec<[f64; 12]> {
    let classes = chroma_classes(&spec.bin_freqs);
    spec.magnitudes
        .iter()
        .map(|row| {
            let mut chroma = [0.0; 12];
            for (m, class) in row.iter().zip(&classes) {
                if let Some(c) = class {
                    chroma[*c] += m * m;
                }
            }
            let max = chroma.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                chroma.iter_mut().for_each(|v| *v /= max);
            }
            chroma
        })
        .collect()
}

pub fn chroma_stft(spec: &Spectrogram) -> f64 {
    let per_frame: Vec<f64> = chroma_series(spec)
        .iter()
        .map(|c| c.iter().sum::<f64>() / 12.0)
        .collect();
    mean(&per_frame)
}

/// Cepstral coefficients per frame, `frames x n_coeffs`.
pub fn mfcc_frames(spec: &Spectrogram, fb: &MelFilterbank, n_coeffs: usize) -> Result<Vec<Vec<f64>>> {
    let n_mels = fb.n_mels();
    if n_coeffs > n_mels {
        return Err(Error::invalid(format!(
            "{n_coeffs} coefficients requested from {n_mels} mel bands"
        )));
    }
    if fb.n_bins() != spec.n_bins() {
        return Err(Error::invalid(format!(
            "filterbank has {} bins, spectrogram {}",
            fb.n_bins(),
            spec.n_bins()
        )));
    }
    let basis = dct_matrix(n_mels, n_coeffs);
    Ok(spec
        .magnitudes
        .iter()
        .map(|row| {
            let power: Vec<f64> = row.iter().map(|m| m * m).collect();
            let log_mel: Vec<f64> = fb.apply(&power).into_iter().map(power_to_db).collect();
            basis
                .iter()
                .map(|b| b.iter().zip(&log_mel).map(|(w, v)| w * v).sum())
                .collect()
        })
        .collect())
}

/// Frame-averaged cepstral coefficients, `mfcc1` first.
pub fn mfcc(spec: &Spectrogram, fb: &MelFilterbank, n_coeffs: usize) -> Result<Vec<f64>> {
    let frames = mfcc_frames(spec, fb, n_coeffs)?;
    let n = frames.len().max(1) as f64;
    let mut acc = vec![0.0; n_coeffs];
    for f in &frames {
        acc.iter_mut().zip(f).for_each(|(a, v)| *a += v);
    }
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Holds the STFT plan and mel filterbank so many clips can share them.
pub struct FeatureExtractor {
    stft: Stft,
    filterbank: MelFilterbank,
    n_mfcc: usize,
}

impl FeatureExtractor {
    pub fn new(cfg: StftConfig, filterbank: MelFilterbank, n_mfcc: usize) -> Result<Self> {
        if filterbank.n_bins() != cfg.n_bins() {
            return Err(Error::invalid(format!(
                "filterbank built for {} bins, STFT yields {}",
                filterbank.n_bins(),
                cfg.n_bins()
            )));
        }
        if n_mfcc == 0 || n_mfcc > filterbank.n_mels() {
            return Err(Error::invalid(format!(
                "n_mfcc {n_mfcc} must be in 1..={}",
                filterbank.n_mels()
            )));
        }
        Ok(FeatureExtractor {
            stft: Stft::new(cfg)?,
            filterbank,
            n_mfcc,
        })
    }

    /// n_fft 2048, hop 512, Hann, centred; 128 mels; 128 coefficients.
    pub fn with_defaults(sample_rate: u32) -> Result<Self> {
        let cfg = StftConfig::default();
        let fb = MelFilterbank::full_band(N_MELS, cfg.n_fft, sample_rate)?;
        Self::new(cfg, fb, N_MFCC)
    }

    pub fn config(&self) -> &StftConfig {
        self.stft.config()
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn feature_names(&self) -> Vec<String> {
        feature_names(self.n_mfcc)
    }

    pub fn extract(&self, clip: &AudioClip) -> Result<FeatureVector> {
        let spec = self.stft.process(clip)?;
        let cfg = self.stft.config();
        let signal = cfg.framing_signal(clip.samples());
        let frames = frame_signal(&signal, cfg.n_fft, cfg.hop)?;
        let centroids = spectral_centroid_series(&spec);
        Ok(FeatureVector {
            chroma_stft: chroma_stft(&spec),
            rmse: rmse(&frames),
            spectral_centroid: mean(&centroids),
            spectral_bandwidth: spectral_bandwidth(&spec, &centroids),
            rolloff: mean(&rolloff_series(&spec, ROLLOFF_PERCENT)),
            zero_crossing_rate: zero_crossing_rate(&frames),
            mfcc: mfcc(&spec, &self.filterbank, self.n_mfcc)?,
        })
    }
}

pub fn extract_features(seg: &Segment, cfg: StftConfig, fb: &MelFilterbank) -> Result<FeatureVector> {
    FeatureExtractor::new(cfg, fb.clone(), fb.n_mels())?.extract(&seg.clip)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub source_id: String,
    pub label: Label,
    pub values: Vec<f64>,
}

/// Labeled rows sharing one ordered set of named feature columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    feature_names: Vec<String>,
    rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn new(feature_names: Vec<String>, rows: Vec<FeatureRow>) -> Result<Self> {
        let width = feature_names.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.values.len() != width) {
            return Err(Error::invalid(format!(
                "row {i} ({}) has {} values, expected {width}",
                row.source_id,
                row.values.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = feature_names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::invalid(format!("duplicate feature column {dup:?}")));
        }
        Ok(FeatureTable {
            feature_names,
            rows,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// `(bee, nobee)` row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let nobee = self.rows.iter().filter(|r| r.label == Label::NoBee).count();
        (self.rows.len() - nobee, nobee)
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureTable {
        FeatureTable {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Projects onto the named columns, in the order given.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<FeatureTable> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n.as_ref())
                    .ok_or_else(|| Error::invalid(format!("no feature column {:?}", n.as_ref())))
            })
            .collect::<Result<_>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| FeatureRow {
                source_id: r.source_id.clone(),
                label: r.label,
                values: idx.iter().map(|&j| r.values[j]).collect(),
            })
            .collect();
        FeatureTable::new(
            names.iter().map(|n| n.as_ref().to_string()).collect(),
            rows,
        )
    }

    /// Writes `source_id,label,<features...>` with 9 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["source_id".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec = vec![row.source_id.clone(), row.label.to_string()];
            rec.extend(row.values.iter().map(|&v| fmt_sig9(v)));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers().map_err(csv_err)?.clone();
        if header.len() < 2 || &header[0] != "source_id" || &header[1] != "label" {
            return Err(Error::Parse(
                "feature CSV must start with source_id,label columns".into(),
            ));
        }
        let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let line = i + 2;
            let label: Label = rec[1]
                .parse()
                .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
            let values = rec
                .iter()
                .skip(2)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {line}: bad number {v:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRow {
                source_id: rec[0].to_string(),
                label,
                values,
            });
        }
        FeatureTable::new(names, rows)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Extracts one row per segment (in parallel), preserving input order.
pub fn build_table(segments: &[Segment], extractor: &FeatureExtractor) -> Result<FeatureTable> {
    if segments.is_empty() {
        return Err(Error::invalid("no segments to extract"));
    }
    let rows = segments
        .par_iter()
        .enumerate()
        .map(|(i, seg)| {
            let fv = extractor.extract(&seg.clip)?;
            let id = if seg.source_id.is_empty() {
                format!("segment{i}")
            } else {
                seg.source_id.clone()
            };
            Ok(FeatureRow {
                source_id: id,
                label: seg.label,
                values: fv.to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureTable::new(extractor.feature_names(), rows)
}
