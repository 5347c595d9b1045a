//! Shared transforms: framing, STFT magnitudes, mel filterbank, dB compression
//! and the orthonormal DCT-II.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Floor applied before log compression.
pub const AMIN: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    /// Periodic window of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        })
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(Window::Hann),
            "rectangular" | "rect" | "boxcar" => Ok(Window::Rectangular),
            other => Err(Error::invalid(format!("unknown window {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StftConfig {
    pub n_fft: usize,
    pub hop: usize,
    pub window: Window,
    /// Reflection-pad the signal by `n_fft / 2` on both ends.
    pub center_pad: bool,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig {
            n_fft: 2048,
            hop: 512,
            window: Window::Hann,
            center_pad: true,
        }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n_fft.is_power_of_two() {
            return Err(Error::invalid(format!(
                "n_fft {} is not a power of two",
                self.n_fft
            )));
        }
        if self.hop == 0 || self.hop > self.n_fft {
            return Err(Error::invalid(format!(
                "hop {} must be in 1..={}",
                self.hop, self.n_fft
            )));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// The sample sequence frames are cut from: reflection-padded when
    /// `center_pad` is set, the raw signal otherwise.
    pub fn framing_signal(&self, samples: &[f64]) -> Vec<f64> {
        if self.center_pad {
            reflect_pad(samples, self.n_fft / 2)
        } else {
            samples.to_vec()
        }
    }
}

/// Mirror-pads `x` by `pad` samples per side, excluding the edge sample
/// (`[3 2 | 1 2 3 4 | 3 2]`). Signals shorter than the pad reflect repeatedly.
pub fn reflect_pad(x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![x[0]; n + 2 * pad];
    }
    let period = 2 * (n - 1) as i64;
    (0..n + 2 * pad)
        .map(|i| {
            let j = (i as i64 - pad as i64).rem_euclid(period);
            let j = if j < n as i64 { j } else { period - j };
            x[j as usize]
        })
        .collect()
}

/// Consecutive windows of `frame_len` samples advancing by `hop`.
///
/// Produces `1 + (N - frame_len) / hop` frames; fails if the signal is shorter
/// than one frame.
pub fn frame_signal(samples: &[f64], frame_len: usize, hop: usize) -> Result<Vec<&[f64]>> {
    if frame_len == 0 || hop == 0 {
        return Err(Error::invalid("frame length and hop must be positive"));
    }
    if samples.len() < frame_len {
        return Err(Error::invalid(format!(
            "signal of {} samples is shorter than one frame of {frame_len}",
            samples.len()
        )));
    }
    let count = 1 + (samples.len() - frame_len) / hop;
    Ok((0..count)
        .map(|t| &samples[t * hop..t * hop + frame_len])
        .collect())
}

/// Magnitude spectrogram, `frames x bins`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    pub magnitudes: Vec<Vec<f64>>,
    /// `k * sample_rate / n_fft`
    pub bin_freqs: Vec<f64>,
    pub frame_times: Vec<f64>,
    pub n_fft: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn n_bins(&self) -> usize {
        self.bin_freqs.len()
    }

    /// Builds a spectrogram from externally supplied magnitudes, with bin
    /// frequencies derived from `n_fft` and `sample_rate`.
    pub fn from_magnitudes(magnitudes: Vec<Vec<f64>>, n_fft: usize, sample_rate: u32) -> Result<Self> {
        let bins = n_fft / 2 + 1;
        if magnitudes
            .iter()
            .any(|row| row.len() != bins || row.iter().any(|m| !m.is_finite() || *m < 0.0))
        {
            return Err(Error::invalid(format!(
                "every frame needs {bins} finite non-negative magnitudes"
            )));
        }
        let frame_times = (0..magnitudes.len()).map(|t| t as f64).collect();
        Ok(Spectrogram {
            magnitudes,
            bin_freqs: bin_frequencies(n_fft, sample_rate),
            frame_times,
            n_fft,
            sample_rate,
        })
    }

    /// Squared magnitudes.
    pub fn power(&self) -> Vec<Vec<f64>> {
        self.magnitudes
            .iter()
            .map(|row| row.iter().map(|m| m * m).collect())
            .collect()
    }
}

pub fn bin_frequencies(n_fft: usize, sample_rate: u32) -> Vec<f64> {
    (0..=n_fft / 2)
        .map(|k| k as f64 * sample_rate as f64 / n_fft as f64)
        .collect()
}

/// Reusable STFT plan for one configuration.
pub struct Stft {
    cfg: StftConfig,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl Stft {
    pub fn new(cfg: StftConfig) -> Result<Self> {
        cfg.validate()?;
        let fft = FftPlanner::new().plan_fft_forward(cfg.n_fft);
        Ok(Stft {
            window: cfg.window.coefficients(cfg.n_fft),
            cfg,
            fft,
        })
    }

    pub fn config(&self) -> &StftConfig {
        &self.cfg
    }

    pub fn process(&self, clip: &AudioClip) -> Result<Spectrogram> {
        if clip.is_empty() {
            return Err(Error::InvalidAudio("empty clip".into()));
        }
        let n_fft = self.cfg.n_fft;
        let signal = self.cfg.framing_signal(clip.samples());
        let frames = frame_signal(&signal, n_fft, self.cfg.hop)?;
        let sr = clip.sample_rate() as f64;
        let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut magnitudes = Vec::with_capacity(frames.len());
        for frame in &frames {
            for ((b, &x), &w) in buf.iter_mut().zip(frame.iter()).zip(&self.window) {
                *b = Complex::new(x * w, 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            magnitudes.push(buf[..=n_fft / 2].iter().map(|c| c.norm()).collect());
        }
        let centre_offset = if self.cfg.center_pad { 0 } else { n_fft / 2 };
        let frame_times = (0..frames.len())
            .map(|t| (t * self.cfg.hop + centre_offset) as f64 / sr)
            .collect();
        Ok(Spectrogram {
            magnitudes,
            bin_freqs: bin_frequencies(n_fft, clip.sample_rate()),
            frame_times,
            n_fft,
            sample_rate: clip.sample_rate(),
        })
    }
}

/// One-shot STFT; prefer [`Stft`] when transforming many clips.
pub fn stft(clip: &AudioClip, cfg: StftConfig) -> Result<Spectrogram> {
    Stft::new(cfg)?.process(clip)
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters with centers evenly spaced on the mel scale, each scaled
/// to unit area (`2 / (f_upper - f_lower)`).
#[derive(Clone, Debug, PartialEq)]
pub struct MelFilterbank {
    /// `n_mels x bins`
    pub weights: Vec<Vec<f64>>,
    pub centers_hz: Vec<f64>,
    /// Half-open bin range holding the non-zero weights of each filter.
    support: Vec<(usize, usize)>,
}

impl MelFilterbank {
    pub fn new(
        n_mels: usize,
        n_fft: usize,
        sample_rate: u32,
        f_min: f64,
        f_max: f64,
    ) -> Result<Self> {
        if n_mels == 0 {
            return Err(Error::invalid("n_mels must be at least 1"));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if !(f_min >= 0.0 && f_min < f_max && f_max <= nyquist) {
            return Err(Error::invalid(format!(
                "need 0 <= f_min < f_max <= {nyquist}, got {f_min}..{f_max}"
            )));
        }
        let freqs = bin_frequencies(n_fft, sample_rate);
        let (mel_lo, mel_hi) = (hz_to_mel(f_min), hz_to_mel(f_max));
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
            .collect();
        let mut weights = Vec::with_capacity(n_mels);
        let mut support = Vec::with_capacity(n_mels);
        for m in 0..n_mels {
            let (lower, center, upper) = (edges[m], edges[m + 1], edges[m + 2]);
            let norm = 2.0 / (upper - lower);
            let row: Vec<f64> = freqs
                .iter()
                .map(|&f| {
                    let rising = (f - lower) / (center - lower);
                    let falling = (upper - f) / (upper - center);
                    rising.min(falling).max(0.0) * norm
                })
                .collect();
            let first = row.iter().position(|&w| w > 0.0);
            let Some(first) = first else {
                return Err(Error::invalid(format!(
                    "mel filter {m} ({lower:.1}-{upper:.1} Hz) covers no FFT bin; \
                     use fewer mels or a larger n_fft"
                )));
            };
            let last = row.iter().rposition(|&w| w > 0.0).unwrap_or(first);
            support.push((first, last + 1));
            weights.push(row);
        }
        Ok(MelFilterbank {
            weights,
            centers_hz: edges[1..=n_mels].to_vec(),
            support,
        })
    }

    /// Filterbank spanning `0..=sample_rate/2`.
    pub fn full_band(n_mels: usize, n_fft: usize, sample_rate: u32) -> Result<Self> {
        Self::new(n_mels, n_fft, sample_rate, 0.0, sample_rate as f64 / 2.0)
    }

    pub fn n_mels(&self) -> usize {
        self.weights.len()
    }

    pub fn n_bins(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    /// Filter energies for one power-spectrum frame.
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.support)
            .map(|(row, &(lo, hi))| {
                row[lo..hi]
                    .iter()
                    .zip(&power[lo..hi])
                    .map(|(w, p)| w * p)
                    .sum()
            })
            .collect()
    }
}

pub fn mel_filterbank(
    n_mels: usize,
    n_fft: usize,
    sample_rate: u32,
    f_min: f64,
    f_max: f64,
) -> Result<MelFilterbank> {
    MelFilterbank::new(n_mels, n_fft, sample_rate, f_min, f_max)
}

/// `10 * log10(max(power, AMIN))`
pub fn power_to_db(power: f64) -> f64 {
    10.0 * power.max(AMIN).log10()
}

/// Orthonormal DCT-II basis, `n_coeffs x n` (row k = basis vector k).
pub fn dct_matrix(n: usize, n_coeffs: usize) -> Vec<Vec<f64>> {
    let nf = n as f64;
    (0..n_coeffs)
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            (0..n)
                .map(|i| scale * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * nf)).cos())
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II of one vector, truncated to `n_coeffs`.
pub fn dct_ii_vec(x: &[f64], n_coeffs: usize) -> Result<Vec<f64>> {
    if n_coeffs > x.len() {
        return Err(Error::invalid(format!(
            "{n_coeffs} coefficients requested from {} inputs",
            x.len()
        )));
    }
    Ok(dct_matrix(x.len(), n_coeffs)
        .iter()
        .map(|row| row.iter().zip(x).map(|(b, v)| b * v).sum())
        .collect())
}

/// Orthonormal DCT-II along the first axis of a `mels x frames` matrix,
/// returning `n_coeffs x frames`.
pub fn dct_ii(matrix: &[Vec<f64>], n_coeffs: usize) -> Result<Vec<Vec<f64>>> {
    let n_mels = matrix.len();
    if n_coeffs > n_mels {
        return Err(Error::invalid(format!(
            "{n_coeffs} coefficients requested from {n_mels} mel bands"
        )));
    }
    let n_frames = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != n_frames) {
        return Err(Error::invalid("ragged matrix"));
    }
    let basis = dct_matrix(n_mels, n_coeffs);
    Ok(basis
        .iter()
        .map(|row| {
            (0..n_frames)
                .map(|t| row.iter().zip(matrix).map(|(b, m)| b * m[t]).sum())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clip(samples: Vec<f64>, sr: u32) -> AudioClip {
        AudioClip::new(samples, sr).unwrap()
    }

    #[test]
    fn frame_counts() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let frames = frame_signal(&x, 4, 2).unwrap();
        assert_eq!(frames.len(), 4);
        assert_eq!(frames[3], &[6.0, 7.0, 8.0, 9.0]);
        assert_eq!(frame_signal(&x, 10, 3).unwrap().len(), 1);
        assert_eq!(frame_signal(&x, 4, 20).unwrap().len(), 1);
        assert!(frame_signal(&x, 11, 1).is_err());
        assert!(frame_signal(&x, 0, 1).is_err());
    }

    #[test]
    fn frame_count_matches_enumeration() {
        for n in 1..40 {
            let x = vec![0.0; n];
            for len in 1..=n {
                for hop in 1..12 {
                    let brute = (0..n).step_by(hop).filter(|s| s + len <= n).count();
                    assert_eq!(frame_signal(&x, len, hop).unwrap().len(), brute);
                }
            }
        }
    }

    #[test]
    fn reflect_padding() {
        assert_eq!(
            reflect_pad(&[1.0, 2.0, 3.0, 4.0], 2),
            vec![3.0, 2.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0]
        );
        assert_eq!(
            reflect_pad(&[1.0, 2.0], 3),
            vec![2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0]
        );
        assert_eq!(reflect_pad(&[5.0], 2), vec![5.0; 5]);
    }

    #[test]
    fn config_validation() {
        assert!(StftConfig::default().validate().is_ok());
        let bad = StftConfig {
            n_fft: 1000,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad_hop = StftConfig {
            hop: 4096,
            ..Default::default()
        };
        assert!(bad_hop.validate().is_err());
    }

    #[test]
    fn bin_centred_sine_is_orthogonal() {
        let n = 1024;
        let k = 37;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * k as f64 * i as f64 / n as f64).sin())
            .collect();
        let cfg = StftConfig {
            n_fft: n,
            hop: n,
            window: Window::Rectangular,
            center_pad: false,
        };
        let spec = stft(&clip(x, 8192), cfg).unwrap();
        assert_eq!(spec.n_frames(), 1);
        assert_eq!(spec.n_bins(), n / 2 + 1);
        let row = &spec.magnitudes[0];
        let peak = row[k];
        assert!((peak - n as f64 / 2.0).abs() < 1e-6);
        for (j, m) in row.iter().enumerate() {
            if j != k {
                assert!(m / peak < 1e-9, "bin {j}: {m}");
            }
        }
        assert_eq!(spec.bin_freqs[k], k as f64 * 8192.0 / n as f64);
    }

    #[test]
    fn silence_gives_zero_magnitudes() {
        let spec = stft(&clip(vec![0.0; 5000], 22050), StftConfig::default()).unwrap();
        assert!(spec.magnitudes.iter().flatten().all(|&m| m == 0.0));
        assert_eq!(spec.n_frames(), 1 + 5000 / 512);
    }

    #[test]
    fn empty_clip_rejected() {
        assert!(stft(&clip(vec![], 22050), StftConfig::default()).is_err());
    }

    #[test]
    fn parseval_on_random_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 2048;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let cfg = StftConfig {
            n_fft: n,
            hop: n,
            window: Window::Rectangular,
            center_pad: false,
        };
        let spec = stft(&clip(x, 22050), cfg).unwrap();
        let m = &spec.magnitudes[0];
        // Rebuild the full two-sided spectrum from the one-sided half.
        let full: f64 = m[0].powi(2)
            + m[n / 2].powi(2)
            + 2.0 * m[1..n / 2].iter().map(|v| v * v).sum::<f64>();
        let rel = (energy - full / n as f64).abs() / energy;
        assert!(rel < 1e-6, "relative error {rel}");
    }

    #[test]
    fn hann_sine_energy_is_localized() {
        let n = 2048;
        let sr = 22050;
        let k = 41;
        let f = k as f64 * sr as f64 / n as f64;
        let x: Vec<f64> = (0..8192)
            .map(|i| 0.8 * (2.0 * PI * f * i as f64 / sr as f64).sin())
            .collect();
        let spec = stft(&clip(x, sr), StftConfig::default()).unwrap();
        for row in &spec.magnitudes[2..spec.n_frames() - 2] {
            let total: f64 = row.iter().map(|m| m * m).sum();
            let near: f64 = row[k - 2..=k + 2].iter().map(|m| m * m).sum();
            assert!(near / total >= 0.85);
        }
    }

    #[test]
    fn stft_scales_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..6000).map(|_| rng.gen_range(-0.4..0.4)).collect();
        let a = -2.5;
        let scaled: Vec<f64> = x.iter().map(|v| v * a).collect();
        let s1 = stft(&clip(x, 22050), StftConfig::default()).unwrap();
        let s2 = stft(&clip(scaled, 22050), StftConfig::default()).unwrap();
        for (r1, r2) in s1.magnitudes.iter().zip(&s2.magnitudes) {
            for (m1, m2) in r1.iter().zip(r2) {
                assert!((m2 - a.abs() * m1).abs() <= 1e-9 * (1.0 + m2));
            }
        }
    }

    #[test]
    fn single_mel_filter_spans_band() {
        let fb = MelFilterbank::new(1, 2048, 22050, 0.0, 11025.0).unwrap();
        assert_eq!(fb.n_mels(), 1);
        let row = &fb.weights[0];
        assert_eq!(row[0], 0.0);
        assert_eq!(*row.last().unwrap(), 0.0);
        assert!(row[1..row.len() - 1].iter().all(|&w| w > 0.0));
        let c = fb.centers_hz[0];
        assert!((hz_to_mel(c) - hz_to_mel(11025.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn mel_centers_increase_and_rows_nonzero() {
        let fb = MelFilterbank::full_band(128, 2048, 22050).unwrap();
        assert_eq!(fb.n_mels(), 128);
        assert!(fb.centers_hz.windows(2).all(|w| w[1] > w[0]));
        for row in &fb.weights {
            assert!(row.iter().all(|&w| w >= 0.0 && w.is_finite()));
            assert!(row.iter().sum::<f64>() > 0.0);
        }
    }

    #[test]
    fn filterbank_covers_interior_bins() {
        let fb = MelFilterbank::full_band(128, 2048, 22050).unwrap();
        let freqs = bin_frequencies(2048, 22050);
        let (lo, hi) = (fb.centers_hz[0], *fb.centers_hz.last().unwrap());
        for (k, &f) in freqs.iter().enumerate() {
            if f >= lo && f <= hi {
                let total: f64 = fb.weights.iter().map(|r| r[k]).sum();
                assert!(total > 0.0, "bin {k} ({f} Hz) uncovered");
            }
        }
    }

    #[test]
    fn filterbank_rejects_empty_filters() {
        assert!(MelFilterbank::full_band(512, 256, 22050).is_err());
        assert!(MelFilterbank::new(0, 2048, 22050, 0.0, 100.0).is_err());
        assert!(MelFilterbank::new(10, 2048, 22050, 500.0, 100.0).is_err());
        assert!(MelFilterbank::new(10, 2048, 22050, 0.0, 20000.0).is_err());
    }

    #[test]
    fn filterbank_apply_matches_dense_product() {
        let fb = MelFilterbank::full_band(40, 512, 16000).unwrap();
        let power: Vec<f64> = (0..257).map(|k| (k as f64 * 0.37).sin().abs()).collect();
        let fast = fb.apply(&power);
        for (row, got) in fb.weights.iter().zip(fast) {
            let dense: f64 = row.iter().zip(&power).map(|(w, p)| w * p).sum();
            assert!((dense - got).abs() < 1e-12);
        }
    }

    #[test]
    fn db_floor() {
        assert_eq!(power_to_db(1.0), 0.0);
        assert_eq!(power_to_db(0.0), -100.0);
        assert_eq!(power_to_db(100.0), 20.0);
    }

    #[test]
    fn dct_of_constant_column() {
        let m = 16;
        let c = 3.5;
        let col: Vec<Vec<f64>> = vec![vec![c]; m];
        let out = dct_ii(&col, m).unwrap();
        assert!((out[0][0] - c * (m as f64).sqrt()).abs() < 1e-9);
        for row in &out[1..] {
            assert!(row[0].abs() < 1e-9);
        }
    }

    // Independent inverse: DCT-III written from its closed form.
    fn dct_iii(coeffs: &[f64]) -> Vec<f64> {
        let n = coeffs.len();
        let nf = n as f64;
        (0..n)
            .map(|i| {
                coeffs[0] / nf.sqrt()
                    + (1..n)
                        .map(|k| {
                            (2.0 / nf).sqrt()
                                * coeffs[k]
                                * (PI * k as f64 * (i as f64 + 0.5) / nf).cos()
                        })
                        .sum::<f64>()
            })
            .collect()
    }

    #[test]
    fn dct_inverts_dct_iii() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..128).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let back = dct_ii_vec(&dct_iii(&v), 128).unwrap();
        for (a, b) in v.iter().zip(back) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn dct_preserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v: Vec<f64> = (0..128).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let c = dct_ii_vec(&v, 128).unwrap();
        let e1: f64 = v.iter().map(|x| x * x).sum();
        let e2: f64 = c.iter().map(|x| x * x).sum();
        assert!(((e1 - e2) / e1).abs() < 1e-9);
    }

    #[test]
    fn dct_matrix_is_orthonormal() {
        let n = 128;
        let d = dct_matrix(n, n);
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = d[i].iter().zip(&d[j]).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dct_rejects_too_many_coefficients() {
        assert!(dct_ii(&[vec![1.0], vec![2.0]], 3).is_err());
    }
}
