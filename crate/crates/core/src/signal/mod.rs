//! EEG data model and the preprocessing chain: band-pass filtering,
//! decimation, post-stimulus segmentation, feature flattening, and band
//! power.
//!
//! A [`Recording`] is immutable multichannel data plus stimulus markers;
//! every operation returns a new value. Event timing lives in sample
//! indices so decimation can remap onsets exactly.

mod decimate;
mod filter;
mod power;
mod segment;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{real, Real};

pub use decimate::decimate;
pub use filter::{apply_filter, design_bandpass, Biquad, FilterCoefficients};
pub use power::band_power;
pub use segment::{features, segment};

/// One of the four answer choices a flash can present.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum AnswerOption {
    A,
    B,
    C,
    D,
}

impl AnswerOption {
    pub const ALL: [AnswerOption; 4] = [
        AnswerOption::A,
        AnswerOption::B,
        AnswerOption::C,
        AnswerOption::D,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnswerOption::A => "A",
            AnswerOption::B => "B",
            AnswerOption::C => "C",
            AnswerOption::D => "D",
        }
    }

    pub fn index(self) -> usize {
        match self {
            AnswerOption::A => 0,
            AnswerOption::B => 1,
            AnswerOption::C => 2,
            AnswerOption::D => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" => Some(AnswerOption::A),
            "B" => Some(AnswerOption::B),
            "C" => Some(AnswerOption::C),
            "D" => Some(AnswerOption::D),
            _ => None,
        }
    }
}

impl fmt::Display for AnswerOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single option flash: when it happened and what it presented.
///
/// `is_target` is present in training data and absent in evaluation data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StimulusEvent {
    pub onset_sample: usize,
    pub question_id: String,
    pub option: AnswerOption,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_target: Option<bool>,
}

/// Multichannel EEG samples with stimulus markers.
///
/// `samples` is row-major `[n_samples][n_channels]`, in microvolts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording<T> {
    pub sample_rate_hz: T,
    pub channels: Vec<String>,
    pub samples: Vec<Vec<T>>,
    pub events: Vec<StimulusEvent>,
    /// Highest frequency known to carry signal content, set by
    /// `apply_filter`. In-memory metadata only; not part of the file format.
    #[serde(skip)]
    pub band_limit_hz: Option<T>,
}

impl<T: Real> Recording<T> {
    pub fn new(
        sample_rate_hz: T,
        channels: Vec<String>,
        samples: Vec<Vec<T>>,
        events: Vec<StimulusEvent>,
    ) -> Result<Self> {
        let rec = Self {
            sample_rate_hz,
            channels,
            samples,
            events,
            band_limit_hz: None,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz > T::zero()) {
            return Err(Error::ConfigError {
                field: "sample_rate_hz".into(),
                detail: format!("must be positive, got {}", self.sample_rate_hz),
            });
        }
        if self.channels.is_empty() {
            return Err(Error::ConfigError {
                field: "channels".into(),
                detail: "at least one channel is required".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for label in &self.channels {
            if !seen.insert(label) {
                return Err(Error::ConfigError {
                    field: "channels".into(),
                    detail: format!("duplicate channel label {label:?}"),
                });
            }
        }
        for (i, row) in self.samples.iter().enumerate() {
            if row.len() != self.channels.len() {
                return Err(Error::SchemaError {
                    path: format!("samples[{i}]"),
                    detail: format!(
                        "row has {} values, expected {} (one per channel)",
                        row.len(),
                        self.channels.len()
                    ),
                });
            }
        }
        for (i, ev) in self.events.iter().enumerate() {
            if ev.onset_sample >= self.samples.len() {
                return Err(Error::SchemaError {
                    path: format!("events[{i}].onset_sample"),
                    detail: format!(
                        "onset {} outside recording of {} samples",
                        ev.onset_sample,
                        self.samples.len()
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("recording serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(text).map_err(|e| Error::SchemaError {
            path: "recording".into(),
            detail: e.to_string(),
        })?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Band-pass design request: Butterworth high-pass at `low_cut_hz` cascaded
/// with Butterworth low-pass at `high_cut_hz`, each of the given order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec<T> {
    pub low_cut_hz: T,
    pub high_cut_hz: T,
    /// Order of each half; must be even so the cascade splits into
    /// second-order sections.
    pub order: u32,
}

impl<T: Real> FilterSpec<T> {
    pub fn new(low_cut_hz: T, high_cut_hz: T, order: u32) -> Self {
        Self {
            low_cut_hz,
            high_cut_hz,
            order,
        }
    }

    pub fn validate(&self, fs: T) -> Result<()> {
        let nyquist = fs / real(2.0);
        if !(self.low_cut_hz > T::zero()) {
            return Err(Error::InvalidBand {
                detail: format!("low_cut_hz must be positive, got {}", self.low_cut_hz),
            });
        }
        if !(self.low_cut_hz < self.high_cut_hz) {
            return Err(Error::InvalidBand {
                detail: format!(
                    "low_cut_hz {} must be below high_cut_hz {}",
                    self.low_cut_hz, self.high_cut_hz
                ),
            });
        }
        if !(self.high_cut_hz < nyquist) {
            return Err(Error::InvalidBand {
                detail: format!(
                    "high_cut_hz {} must be below the Nyquist frequency {}",
                    self.high_cut_hz, nyquist
                ),
            });
        }
        if self.order == 0 || !self.order.is_multiple_of(2) {
            return Err(Error::InvalidBand {
                detail: format!("order must be a positive even integer, got {}", self.order),
            });
        }
        Ok(())
    }
}

impl<T: Real> Default for FilterSpec<T> {
    fn default() -> Self {
        // 0.5-30 Hz, the standard ERP band.
        Self::new(real(0.5), real(30.0), 4)
    }
}

/// Fixed post-stimulus window cut around one flash.
///
/// `data` is `[n_window_samples][n_channels]`, same layout as `Recording`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epoch<T> {
    pub question_id: String,
    pub option: AnswerOption,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_target: Option<bool>,
    pub data: Vec<Vec<T>>,
    pub effective_rate_hz: T,
}

impl<T: Real> Epoch<T> {
    pub fn n_window_samples(&self) -> usize {
        self.data.len()
    }

    pub fn n_channels(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Root mean square over every sample of every channel.
    pub fn rms(&self) -> T {
        let n = self.data.len() * self.n_channels();
        if n == 0 {
            return T::zero();
        }
        let sum_sq: T = self
            .data
            .iter()
            .flat_map(|row| row.iter())
            .map(|&x| x * x)
            .sum();
        (sum_sq / real(n as f64)).sqrt()
    }
}

/// Flattened classifier input with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub values: Vec<T>,
    pub question_id: String,
    pub option: AnswerOption,
}

/// Parameters of the standard preprocessing chain:
/// band-pass -> decimate -> segment -> flatten.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig<T> {
    pub filter: FilterSpec<T>,
    pub decimation_factor: usize,
    pub window_seconds: T,
    pub standardize: bool,
}

impl<T: Real> Default for PipelineConfig<T> {
    fn default() -> Self {
        Self {
            filter: FilterSpec::default(),
            // Factor 4 keeps the decimated Nyquist (31.25 Hz at the 250 Hz
            // default rate) above the 30 Hz band edge, so the alias check
            // stays satisfied.
            decimation_factor: 4,
            window_seconds: real(0.6),
            standardize: true,
        }
    }
}

impl<T: Real> PipelineConfig<T> {
    pub fn validate(&self, sample_rate_hz: T) -> Result<()> {
        self.filter.validate(sample_rate_hz)?;
        if self.decimation_factor == 0 {
            return Err(Error::ConfigError {
                field: "decimation_factor".into(),
                detail: "must be at least 1".into(),
            });
        }
        if !(self.window_seconds > T::zero()) {
            return Err(Error::ConfigError {
                field: "window_seconds".into(),
                detail: format!("must be positive, got {}", self.window_seconds),
            });
        }
        let decimated_nyquist =
            sample_rate_hz / real(self.decimation_factor as f64) / real(2.0);
        if self.decimation_factor > 1 && !(self.filter.high_cut_hz < decimated_nyquist) {
            return Err(Error::ConfigError {
                field: "decimation_factor".into(),
                detail: format!(
                    "band edge {} Hz reaches the decimated Nyquist frequency {} Hz",
                    self.filter.high_cut_hz, decimated_nyquist
                ),
            });
        }
        Ok(())
    }

    /// Samples per epoch after decimation.
    pub fn window_samples(&self, sample_rate_hz: T) -> usize {
        let rate = sample_rate_hz / real(self.decimation_factor as f64);
        (self.window_seconds * rate)
            .round()
            .to_usize()
            .unwrap_or(0)
    }
}

/// Run the full preprocessing chain on one recording.
pub fn preprocess<T: Real>(
    recording: &Recording<T>,
    config: &PipelineConfig<T>,
) -> Result<Vec<Epoch<T>>> {
    config.validate(recording.sample_rate_hz)?;
    let coeffs = design_bandpass(&config.filter, recording.sample_rate_hz)?;
    let filtered = apply_filter(&coeffs, recording)?;
    let decimated = decimate(&filtered, config.decimation_factor)?;
    segment(&decimated, config.window_seconds)
}
