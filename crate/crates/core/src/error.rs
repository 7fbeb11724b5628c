//! Crate-wide error type.
//!
//! Every fallible operation in the pipeline returns one of these variants.
//! `Display` always leads with the variant name so callers (and the CLI)
//! can match on it textually.

use std::fmt;
use std::io;

use crate::signal::AnswerOption;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Filter band violates `0 < low < high < fs/2` (or the band is
    /// otherwise unusable at the given rate).
    InvalidBand { detail: String },
    /// Decimation would fold band-limited content past the new Nyquist.
    AliasRisk {
        band_limit_hz: f64,
        post_nyquist_hz: f64,
    },
    /// Filter coefficients were designed for a different sample rate.
    SampleRateMismatch { designed_hz: f64, actual_hz: f64 },
    /// An epoch window extends past the end of the recording.
    WindowOutOfRange {
        event_index: usize,
        question_id: String,
        option: AnswerOption,
        onset: usize,
        window_samples: usize,
        recording_samples: usize,
    },
    /// A class has fewer samples than the dataset invariant allows.
    EmptyClass { label: String, count: usize },
    /// Regularized within-class scatter is numerically singular.
    SingularWithin { pivot: f64, threshold: f64 },
    /// All class means coincide; no discriminant direction exists.
    DegenerateClasses,
    /// Vector length does not match the model's feature dimension.
    DimensionMismatch { expected: usize, actual: usize },
    /// A question's flash scores never covered this option.
    MissingOption {
        question_id: String,
        option: AnswerOption,
    },
    /// A JSON document does not match its schema; `path` points at the
    /// offending field (e.g. `questions[0].options.C`).
    SchemaError { path: String, detail: String },
    DuplicateQuestionId { question_id: String },
    /// Selections or recording events do not line up with the exam.
    QuestionMismatch { detail: String },
    /// The recording carries no epochs for this exam question.
    MissingQuestionEpochs { question_id: String },
    /// A configuration value violates a module precondition.
    ConfigError { field: String, detail: String },
    Io { path: String, source: io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBand { detail } => write!(f, "InvalidBand: {detail}"),
            Error::AliasRisk {
                band_limit_hz,
                post_nyquist_hz,
            } => write!(
                f,
                "AliasRisk: signal is band-limited to {band_limit_hz} Hz but the decimated \
                 Nyquist frequency is {post_nyquist_hz} Hz"
            ),
            Error::SampleRateMismatch {
                designed_hz,
                actual_hz,
            } => write!(
                f,
                "SampleRateMismatch: coefficients designed for {designed_hz} Hz, \
                 recording is {actual_hz} Hz"
            ),
            Error::WindowOutOfRange {
                event_index,
                question_id,
                option,
                onset,
                window_samples,
                recording_samples,
            } => write!(
                f,
                "WindowOutOfRange: event {event_index} (question {question_id}, option \
                 {option}) window [{onset}, {end}) exceeds recording length \
                 {recording_samples}",
                end = onset + window_samples
            ),
            Error::EmptyClass { label, count } => {
                write!(f, "EmptyClass: class {label:?} has {count} sample(s), need at least 2")
            }
            Error::SingularWithin { pivot, threshold } => write!(
                f,
                "SingularWithin: Cholesky pivot {pivot:e} below threshold {threshold:e}; \
                 increase the shrinkage parameter"
            ),
            Error::DegenerateClasses => {
                write!(f, "DegenerateClasses: class means are identical")
            }
            Error::DimensionMismatch { expected, actual } => write!(
                f,
                "DimensionMismatch: expected feature dimension {expected}, got {actual}"
            ),
            Error::MissingOption {
                question_id,
                option,
            } => write!(
                f,
                "MissingOption: question {question_id} has no flash scores for option {option}"
            ),
            Error::SchemaError { path, detail } => {
                write!(f, "SchemaError: {path}: {detail}")
            }
            Error::DuplicateQuestionId { question_id } => {
                write!(f, "DuplicateQuestionId: {question_id}")
            }
            Error::QuestionMismatch { detail } => write!(f, "QuestionMismatch: {detail}"),
            Error::MissingQuestionEpochs { question_id } => {
                write!(f, "MissingQuestionEpochs: question {question_id}")
            }
            Error::ConfigError { field, detail } => {
                write!(f, "ConfigError: {field}: {detail}")
            }
            Error::Io { path, source } => write!(f, "IoError: {path}: {source}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
