use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Segment class. `NoBee` marks any clip containing external (non-hive) sound.
///
/// Numeric encoding used by every statistic and classifier: `Bee = 0`, `NoBee = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bee,
    NoBee,
}

impl Label {
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Bee => 0.0,
            Label::NoBee => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Label::Bee => 0,
            Label::NoBee => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Bee => "bee",
            Label::NoBee => "nobee",
        }
    }

    /// Threshold rule shared by all classifiers.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.5 {
            Label::NoBee
        } else {
            Label::Bee
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bee" => Ok(Label::Bee),
            "nobee" => Ok(Label::NoBee),
            other => Err(Error::Parse(format!("unknown label token {other:?}"))),
        }
    }
}
