//! Audio ingest and preparation: WAV I/O, resampling, annotation parsing,
//! fixed-length labeled segmentation and mixed-clip construction.

use std::io::{Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::label::Label;

/// Sample rate every clip is brought to before feature extraction.
pub const PIPELINE_SAMPLE_RATE: u32 = 22050;

/// Length of one labeled block, in seconds.
pub const BLOCK_SECONDS: f64 = 2.0;

/// Mono sample buffer with amplitudes in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    /// Rejects non-finite samples, amplitudes outside `[-1, 1]` and a zero rate.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidAudio("sample rate must be positive".into()));
        }
        if let Some((i, x)) = samples
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || x.abs() > 1.0)
        {
            return Err(Error::InvalidAudio(format!(
                "sample {i} = {x} is outside [-1, 1]"
            )));
        }
        Ok(AudioClip {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Multiplies every sample by `gain`, re-validating the amplitude range.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        AudioClip::new(
            self.samples.iter().map(|x| x * gain).collect(),
            self.sample_rate,
        )
    }
}

/// Annotated time span of a recording.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledInterval {
    pub start: f64,
    pub end: f64,
    pub label: Label,
}

impl LabeledInterval {
    pub fn new(start: f64, end: f64, label: Label) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start < 0.0 {
            return Err(Error::invalid(format!(
                "interval bounds must be finite and non-negative: [{start}, {end})"
            )));
        }
        if end <= start {
            return Err(Error::invalid(format!(
                "interval end {end} must be after start {start}"
            )));
        }
        Ok(LabeledInterval { start, end, label })
    }

    /// Length of the intersection with `[start, end)`.
    pub fn overlap(&self, start: f64, end: f64) -> f64 {
        (self.end.min(end) - self.start.max(start)).max(0.0)
    }
}

/// A labeled fixed-length clip cut from a source recording.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub clip: AudioClip,
    pub label: Label,
    pub source_id: String,
    /// Seconds into the source recording.
    pub offset: f64,
}

/// Reads a RIFF/WAVE file (PCM-16 or float-32, mono or stereo) into a mono clip.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_wav_from(std::io::BufReader::new(file))
}

pub fn read_wav_from<R: Read>(reader: R) -> Result<AudioClip> {
    let mut reader = WavReader::new(reader)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels != 1 && channels != 2 {
        return Err(Error::UnsupportedEncoding(format!(
            "{channels} channels (expected 1 or 2)"
        )));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()?,
        (fmt, bits) => {
            return Err(Error::UnsupportedEncoding(format!(
                "{fmt:?} with {bits} bits per sample"
            )))
        }
    };
    if interleaved.len() < channels {
        return Err(Error::InvalidAudio("empty data chunk".into()));
    }
    let mono = if channels == 2 {
        interleaved
            .chunks_exact(2)
            .map(|lr| 0.5 * (lr[0] + lr[1]))
            .collect()
    } else {
        interleaved
    };
    AudioClip::new(mono, spec.sample_rate)
}

/// Writes `clip` as 16-bit PCM mono.
pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_wav_to(clip, std::io::BufWriter::new(file))
}

pub fn write_wav_to<W: Write + Seek>(clip: &AudioClip, writer: W) -> Result<()> {
    if clip.is_empty() {
        return Err(Error::InvalidAudio("cannot write an empty clip".into()));
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::new(writer, spec)?;
    for &x in &clip.samples {
        writer.write_sample(quantize_i16(x))?;
    }
    writer.finalize()?;
    Ok(())
}

/// Scale by 2^15 so that reading back with `/ 32768` is exact up to rounding.
fn quantize_i16(x: f64) -> i16 {
    (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Linear-interpolation resampler.
///
/// Output length is `round(len * target / source)`; output sample `i` is taken
/// at source position `i * source / target`.
pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip> {
    if target_rate == 0 {
        return Err(Error::invalid("target sample rate must be positive"));
    }
    if target_rate == clip.sample_rate || clip.is_empty() {
        return Ok(AudioClip {
            samples: clip.samples.clone(),
            sample_rate: target_rate,
        });
    }
    let src = &clip.samples;
    let ratio = clip.sample_rate as f64 / target_rate as f64;
    let out_len = ((src.len() as f64) / ratio).round().max(1.0) as usize;
    let last = src.len() - 1;
    let samples = (0..out_len)
        .map(|i| {
            let pos = i as f64 * ratio;
            let i0 = (pos.floor() as usize).min(last);
            let i1 = (i0 + 1).min(last);
            let frac = pos - i0 as f64;
            let frac = frac.clamp(0.0, 1.0);
            // Convex combination keeps the result inside [-1, 1].
            (src[i0] + frac * (src[i1] - src[i0])).clamp(-1.0, 1.0)
        })
        .collect();
    Ok(AudioClip {
        samples,
        sample_rate: target_rate,
    })
}

/// Parses the tab-separated annotation format:
///
/// ```text
/// # comment
/// 0.0<TAB>3.5<TAB>bee
/// 3.5<TAB>4.2<TAB>nobee
/// ```
///
/// Returns intervals sorted by start. Overlapping intervals are rejected.
pub fn parse_annotations(text: &str) -> Result<Vec<LabeledInterval>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Annotation {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let start: f64 = fields[0]
            .parse()
            .map_err(|_| err(format!("bad start time {:?}", fields[0])))?;
        let end: f64 = fields[1]
            .parse()
            .map_err(|_| err(format!("bad end time {:?}", fields[1])))?;
        let label: Label = fields[2]
            .parse()
            .map_err(|_| err(format!("unknown label {:?}", fields[2])))?;
        let interval = LabeledInterval::new(start, end, label).map_err(|e| err(e.to_string()))?;
        out.push((line_no, interval));
    }
    out.sort_by(|a, b| a.1.start.total_cmp(&b.1.start));
    for pair in out.windows(2) {
        let (_, prev) = pair[0];
        let (line, next) = pair[1];
        if next.start < prev.end {
            return Err(Error::Annotation {
                line,
                message: format!(
                    "interval [{}, {}) overlaps [{}, {})",
                    next.start, next.end, prev.start, prev.end
                ),
            });
        }
    }
    Ok(out.into_iter().map(|(_, iv)| iv).collect())
}

/// Number of samples in one block of `block_seconds` at `sample_rate`.
pub fn block_len(block_seconds: f64, sample_rate: u32) -> usize {
    (block_seconds * sample_rate as f64).round() as usize
}

/// Cuts `clip` into consecutive non-overlapping blocks.
///
/// A block is `NoBee` when its nominal span `[offset, offset + block_seconds)`
/// overlaps any `NoBee` interval by a positive duration, `Bee` otherwise. A short
/// trailing block is completed by cycling through its own samples.
pub fn segment(
    clip: &AudioClip,
    annotations: &[LabeledInterval],
    block_seconds: f64,
    source_id: &str,
) -> Result<Vec<Segment>> {
    if clip.is_empty() {
        return Err(Error::InvalidAudio("clip has no samples".into()));
    }
    if annotations.is_empty() {
        return Err(Error::invalid("no annotations: block labels cannot be derived"));
    }
    if !(block_seconds.is_finite() && block_seconds > 0.0) {
        return Err(Error::invalid(format!("block length {block_seconds} s")));
    }
    let sr = clip.sample_rate;
    let block = block_len(block_seconds, sr);
    if block == 0 {
        return Err(Error::invalid("block shorter than one sample"));
    }
    let segments = clip
        .samples
        .chunks(block)
        .enumerate()
        .map(|(i, chunk)| {
            let offset = (i * block) as f64 / sr as f64;
            let end = offset + block_seconds;
            let label = if annotations
                .iter()
                .any(|iv| iv.label == Label::NoBee && iv.overlap(offset, end) > 0.0)
            {
                Label::NoBee
            } else {
                Label::Bee
            };
            let samples: Vec<f64> = chunk.iter().copied().cycle().take(block).collect();
            Segment {
                clip: AudioClip {
                    samples,
                    sample_rate: sr,
                },
                label,
                source_id: source_id.to_string(),
                offset,
            }
        })
        .collect();
    Ok(segments)
}

/// Takes the first `split_at` seconds of `a` followed by the head of `b`
/// filling the rest of the block. `split_at == block length` yields `a`.
pub fn mix_segments(a: &Segment, b: &Segment, split_at: f64) -> Result<AudioClip> {
    let sr = a.clip.sample_rate;
    if b.clip.sample_rate != sr {
        return Err(Error::invalid(format!(
            "sample rates differ: {} vs {}",
            sr, b.clip.sample_rate
        )));
    }
    let total = a.clip.len();
    if b.clip.len() != total {
        return Err(Error::invalid("segments have different lengths"));
    }
    let block_seconds = total as f64 / sr as f64;
    if !(split_at > 0.0 && split_at <= block_seconds + 0.5 / sr as f64) {
        return Err(Error::invalid(format!(
            "split point {split_at} s outside (0, {block_seconds}]"
        )));
    }
    let head = ((split_at * sr as f64).round() as usize).clamp(1, total);
    let mut samples = Vec::with_capacity(total);
    samples.extend_from_slice(&a.clip.samples[..head]);
    samples.extend_from_slice(&b.clip.samples[..total - head]);
    Ok(AudioClip {
        samples,
        sample_rate: sr,
    })
}
