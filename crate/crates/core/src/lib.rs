//! # bciexam-core
//!
//! A P300-speller exam pipeline, end to end: synthesize or load multichannel
//! EEG recordings with stimulus markers, preprocess them (Butterworth
//! band-pass, decimation, post-stimulus segmentation), train and apply a
//! linear discriminant on target/non-target epochs, drive a four-option
//! (A-D) speller over multiple-choice exams, grade sessions, and measure
//! how spelling accuracy degrades as noise is mixed into the evaluation
//! epochs.
//!
//! All numeric code is generic over the scalar type through [`num::Real`]
//! (`f32` or `f64`); the crate root exports `f64` aliases for everyday use.
//! Everything is deterministic: the only entropy source is an explicit
//! 64-bit seed, and derived streams (see [`rng`]) make parallel or partial
//! re-runs reproduce bit-identically.

// `!(a > b)` instead of `a <= b` throughout validation: NaN must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exam;
pub mod lda;
pub mod linalg;
pub mod num;
pub mod rng;
pub mod robustness;
pub mod signal;
pub mod speller;
pub mod spectrum;
pub mod synthgen;

pub use error::{Error, Result};
pub use exam::{Exam, OptionTexts, Question};
pub use lda::SbWeighting;
pub use robustness::SweepReport;
pub use signal::AnswerOption;

/// `f64` aliases for the generic pipeline types.
pub type Recording = signal::Recording<f64>;
pub type StimulusEvent = signal::StimulusEvent;
pub type FilterSpec = signal::FilterSpec<f64>;
pub type FilterCoefficients = signal::FilterCoefficients<f64>;
pub type Epoch = signal::Epoch<f64>;
pub type FeatureVector = signal::FeatureVector<f64>;
pub type PipelineConfig = signal::PipelineConfig<f64>;
pub type LabeledDataset = lda::LabeledDataset<f64>;
pub type ScatterPair = lda::ScatterPair<f64>;
pub type LdaModel = lda::LdaModel<f64>;
pub type FlashSchedule = speller::FlashSchedule;
pub type OptionScores = speller::OptionScores<f64>;
pub type AnswerSelection = speller::AnswerSelection<f64>;
pub type SessionResult = exam::SessionResult<f64>;
pub type SynthConfig = synthgen::SynthConfig<f64>;
