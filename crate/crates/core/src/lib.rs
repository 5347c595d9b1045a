//! Beehive sound classification toolkit.
//!
//! The pipeline runs from annotated recordings to trained classifiers:
//!
//! 1. [`audio`]: read WAV, resample to 22050 Hz, cut labeled 2-second blocks.
//! 2. [`features`]: 134 spectral/cepstral features per block, built on [`dsp`].
//! 3. [`select`]: rank features by Kendall's tau or one-way ANOVA F and keep the best.
//! 4. [`classify`]: MLP, Gaussian naive Bayes, CART tree, random forest, linear SVM.
//! 5. [`eval`]: splits, cross-validation, metrics, mixed-clip validation and a
//!    synthetic corpus generator.

pub mod audio;
pub mod classify;
pub mod config;
pub mod corpus;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod features;
pub mod label;
pub mod select;
pub mod util;

pub use audio::{AudioClip, LabeledInterval, Segment};
pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use features::{FeatureExtractor, FeatureTable, FeatureVector};
pub use label::Label;
