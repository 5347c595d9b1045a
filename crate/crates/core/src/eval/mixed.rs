//! Five-clip mixed bee/non-bee validation.

use std::fmt;
use std::io::Write;

use crate::audio::{mix_segments, Segment};
use crate::classify::Classifier;
use crate::error::{Error, Result};
use crate::features::FeatureExtractor;
use crate::label::Label;
use crate::util::fmt_sig9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Bee,
    NoBee,
    DontCare,
}

impl Expected {
    pub fn accepts(self, label: Label) -> bool {
        match self {
            Expected::Bee => label == Label::Bee,
            Expected::NoBee => label == Label::NoBee,
            Expected::DontCare => true,
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Expected::Bee => "bee",
            Expected::NoBee => "nobee",
            Expected::DontCare => "dontcare",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedValidationCase {
    pub name: String,
    /// Consecutive `(label, seconds)` parts.
    pub composition: Vec<(Label, f64)>,
    pub expected: Expected,
}

impl MixedValidationCase {
    /// Expected label is the longer part; equal durations are don't-care.
    pub fn new(name: &str, composition: Vec<(Label, f64)>) -> Self {
        let dur = |l: Label| -> f64 {
            composition
                .iter()
                .filter(|(c, _)| *c == l)
                .map(|(_, d)| d)
                .sum()
        };
        let (bee, nobee) = (dur(Label::Bee), dur(Label::NoBee));
        let expected = if bee > nobee {
            Expected::Bee
        } else if nobee > bee {
            Expected::NoBee
        } else {
            Expected::DontCare
        };
        MixedValidationCase {
            name: name.to_string(),
            composition,
            expected,
        }
    }

    pub fn describe(&self) -> String {
        self.composition
            .iter()
            .map(|(l, d)| format!("{}s {l}", fmt_sig9(*d)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Seconds of bee audio at the start of the mixed clip.
    fn bee_head(&self) -> f64 {
        match self.composition.first() {
            Some((Label::Bee, d)) => *d,
            _ => 0.0,
        }
    }
}

/// The five standard clips: pure bee, pure non-bee, half and half, and the
/// two 1.25 s / 0.75 s splits.
pub fn mixed_validation_cases() -> Vec<MixedValidationCase> {
    use Label::{Bee, NoBee};
    vec![
        MixedValidationCase::new("wavefile1", vec![(Bee, 2.0)]),
        MixedValidationCase::new("wavefile2", vec![(NoBee, 2.0)]),
        MixedValidationCase::new("wavefile3", vec![(Bee, 1.0), (NoBee, 1.0)]),
        MixedValidationCase::new("wavefile4", vec![(Bee, 1.25), (NoBee, 0.75)]),
        MixedValidationCase::new("wavefile5", vec![(Bee, 0.75), (NoBee, 1.25)]),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedCaseResult {
    pub case: MixedValidationCase,
    pub predicted: Label,
    pub score: f64,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedValidationReport {
    pub results: Vec<MixedCaseResult>,
    pub accuracy: f64,
}

impl MixedValidationReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        out.write_record(["wavefile", "composition", "expected", "predicted", "score", "correct"])
            .map_err(csv_err)?;
        for r in &self.results {
            out.write_record([
                r.case.name.clone(),
                r.case.describe(),
                r.case.expected.to_string(),
                r.predicted.to_string(),
                fmt_sig9(r.score),
                r.correct.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.write_record(["accuracy", "", "", "", &fmt_sig9(self.accuracy), ""])
            .map_err(csv_err)?;
        out.flush().map_err(|e| Error::io("<report>", e))
    }
}

/// Builds the five mixed clips from one bee and one non-bee segment and
/// scores `model` on them.
pub fn run_mixed_validation(
    model: &dyn Classifier,
    bee: &Segment,
    nobee: &Segment,
    extractor: &FeatureExtractor,
) -> Result<MixedValidationReport> {
    let block = bee.clip.duration();
    let results = mixed_validation_cases()
        .into_iter()
        .map(|case| {
            let head = case.bee_head();
            let clip = if head == 0.0 {
                nobee.clip.clone()
            } else {
                mix_segments(bee, nobee, head.min(block))?
            };
            let fv = extractor.extract(&clip)?;
            let values = fv.project(model.feature_names())?;
            let p = model.predict(model.feature_names(), &values)?;
            Ok(MixedCaseResult {
                correct: case.expected.accepts(p.label),
                predicted: p.label,
                score: p.score,
                case,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let accuracy = results.iter().filter(|r| r.correct).count() as f64 / results.len() as f64;
    Ok(MixedValidationReport { results, accuracy })
}
