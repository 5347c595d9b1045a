//! Synthetic bee / non-bee clips for tests and demos.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::audio::{AudioClip, Segment, BLOCK_SECONDS, PIPELINE_SAMPLE_RATE};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::util::derive_seed;

/// Sound family of a synthetic clip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    Buzz,
    WhiteNoise,
    Chirp,
    Clicks,
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 20.0)
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn add_scaled(dst: &mut [f64], src: &[f64], gain: f64) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d += gain * s);
}

fn normalize_peak(x: &mut [f64], peak: f64) {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v *= peak / m);
    }
}

fn white(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..n).map(|_| normal.sample(rng)).collect()
}

/// Harmonic hum: fundamental in 190-260 Hz, 4-8 harmonics at 1/h, slow
/// amplitude modulation.
fn buzz(rng: &mut ChaCha8Rng, n: usize, sr: f64) -> Vec<f64> {
    let f0 = rng.gen_range(190.0..260.0);
    let harmonics = rng.gen_range(4..=8);
    let phases: Vec<f64> = (0..harmonics).map(|_| rng.gen_range(0.0..TAU)).collect();
    let am_rate = rng.gen_range(0.5..4.0);
    let am_depth = rng.gen_range(0.1..0.4);
    let am_phase = rng.gen_range(0.0..TAU);
    (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            let tone: f64 = phases
                .iter()
                .enumerate()
                .map(|(h, p)| {
                    let h = (h + 1) as f64;
                    (TAU * f0 * h * t + p).sin() / h
                })
                .sum();
            tone * (1.0 + am_depth * (TAU * am_rate * t + am_phase).sin())
        })
        .collect()
}

/// Linear sweeps between two frequencies in 1-6 kHz, repeated over the clip.
/// Rendered over a broadband noise bed 6-12 dB down.
fn chirp(rng: &mut ChaCha8Rng, n: usize, sr: f64) -> Vec<f64> {
    let (a, b) = (rng.gen_range(1000.0..6000.0), rng.gen_range(1000.0..6000.0));
    let sweeps = rng.gen_range(1..=4) as f64;
    let period = n as f64 / sr / sweeps;
    let mut phase = 0.0;
    (0..n)
        .map(|i| {
            let t = (i as f64 / sr) % period;
            let f = a + (b - a) * t / period;
            phase += TAU * f / sr;
            phase.sin()
        })
        .collect()
}

/// Decaying broadband bursts at random onsets.
fn clicks(rng: &mut ChaCha8Rng, n: usize, sr: f64) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut out = vec![0.0; n];
    let count = rng.gen_range(8..40);
    let decay = sr * rng.gen_range(0.001..0.006);
    for _ in 0..count {
        let onset = rng.gen_range(0..n);
        let amp = rng.gen_range(0.3..1.0);
        for (k, slot) in out[onset..].iter_mut().take((decay * 8.0) as usize).enumerate() {
            *slot += amp * normal.sample(rng) * (-(k as f64) / decay).exp();
        }
    }
    // background hiss so quiet stretches are not digital silence
    let floor = white(rng, n);
    add_scaled(&mut out, &floor, 0.01);
    out
}

fn render(kind: SynthKind, rng: &mut ChaCha8Rng, n: usize, sr: f64) -> Vec<f64> {
    match kind {
        SynthKind::Buzz => {
            let mut x = buzz(rng, n, sr);
            let noise = white(rng, n);
            let g = rms(&x) * db(-30.0) / rms(&noise);
            add_scaled(&mut x, &noise, g);
            x
        }
        SynthKind::WhiteNoise => white(rng, n),
        SynthKind::Chirp => {
            let mut x = chirp(rng, n, sr);
            let bed = white(rng, n);
            let g = rms(&x) * db(rng.gen_range(-12.0..-6.0)) / rms(&bed);
            add_scaled(&mut x, &bed, g);
            x
        }
        SynthKind::Clicks => clicks(rng, n, sr),
    }
}

/// One clip of `kind`; NoBee kinds may carry a faint buzz 15 dB down.
fn synth_clip(kind: SynthKind, seed: u64) -> Result<AudioClip> {
    let sr = PIPELINE_SAMPLE_RATE;
    let n = (BLOCK_SECONDS * sr as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = render(kind, &mut rng, n, sr as f64);
    if kind != SynthKind::Buzz && rng.gen_bool(0.5) {
        let hum = buzz(&mut rng, n, sr as f64);
        let g = rms(&x) * db(-15.0) / rms(&hum);
        add_scaled(&mut x, &hum, g);
    }
    let peak = rng.gen_range(0.3..0.9);
    normalize_peak(&mut x, peak);
    AudioClip::new(x, sr)
}

/// `n_bee` buzz clips followed by `n_nobee` noise/chirp/click clips, 2 s at
/// 22050 Hz each. Clip `i` is seeded from `(seed, i)`, so the corpus is
/// reproducible and a prefix does not depend on the total count.
pub fn gen_synthetic_corpus(n_bee: usize, n_nobee: usize, seed: u64) -> Result<Vec<Segment>> {
    if n_bee == 0 || n_nobee == 0 {
        return Err(Error::invalid("both class counts must be at least 1"));
    }
    let nobee_kinds = [SynthKind::WhiteNoise, SynthKind::Chirp, SynthKind::Clicks];
    let specs = (0..n_bee)
        .map(|i| (Label::Bee, i, derive_seed(seed, i as u64)))
        .chain((0..n_nobee).map(|i| (Label::NoBee, i, derive_seed(seed, (1 << 32) + i as u64))));
    specs
        .map(|(label, i, s)| {
            let kind = match label {
                Label::Bee => SynthKind::Buzz,
                Label::NoBee => nobee_kinds[i % 3],
            };
            Ok(Segment {
                clip: synth_clip(kind, s)?,
                label,
                source_id: format!("synth-{}-{i:04}", label.as_str()),
                offset: 0.0,
            })
        })
        .collect()
}
