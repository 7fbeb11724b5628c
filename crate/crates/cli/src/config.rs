//! Flat run configuration: built-in defaults, overridden by an optional
//! JSON config file, overridden by command-line flags.

use std::path::Path;

use bciexam_core::{Error, FilterSpec, PipelineConfig, Result, SbWeighting, SynthConfig};
use serde_json::Value;

/// Every tunable of the pipeline as one flat document.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub filter_low_hz: f64,
    pub filter_high_hz: f64,
    pub filter_order: u32,
    pub decimation_factor: usize,
    pub window_seconds: f64,
    pub standardize: bool,
    pub repetitions: u32,
    pub lambda_rel: f64,
    pub sb_weighting: SbWeighting,
    pub sample_rate_hz: f64,
    pub n_channels: usize,
    pub p300_amplitude_uv: f64,
    pub p300_latency_s: f64,
    pub p300_width_s: f64,
    pub background_noise_uv_rms: f64,
    pub isi_s: f64,
    pub train_targets: usize,
    pub train_nontargets: usize,
    pub student_id: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            filter_low_hz: 0.5,
            filter_high_hz: 30.0,
            filter_order: 4,
            decimation_factor: 4,
            window_seconds: 0.6,
            standardize: true,
            repetitions: 10,
            lambda_rel: 1e-3,
            sb_weighting: SbWeighting::PaperUnweighted,
            sample_rate_hz: 250.0,
            n_channels: 4,
            p300_amplitude_uv: 5.0,
            p300_latency_s: 0.30,
            p300_width_s: 0.08,
            background_noise_uv_rms: 2.0,
            isi_s: 0.4,
            train_targets: 50,
            train_nontargets: 150,
            student_id: "anonymous".into(),
            seed: 1,
        }
    }
}

fn field_error(field: &str, detail: impl Into<String>) -> Error {
    Error::ConfigError {
        field: field.into(),
        detail: detail.into(),
    }
}

fn as_f64(field: &str, value: &Value) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| field_error(field, format!("expected a number, got {value}")))
}

fn as_usize(field: &str, value: &Value) -> Result<usize> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| field_error(field, format!("expected a nonnegative integer, got {value}")))
}

fn as_bool(field: &str, value: &Value) -> Result<bool> {
    value
        .as_bool()
        .ok_or_else(|| field_error(field, format!("expected a boolean, got {value}")))
}

impl RunConfig {
    /// Apply the keys of a JSON config file on top of the current values.
    /// Unknown keys are rejected so typos cannot silently fall back to
    /// defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let root: Value = serde_json::from_str(&text).map_err(|e| Error::SchemaError {
            path: "config".into(),
            detail: format!("invalid JSON: {e}"),
        })?;
        let object = root
            .as_object()
            .ok_or_else(|| field_error("config", "expected a JSON object"))?;

        for (key, value) in object {
            match key.as_str() {
                "filter_low_hz" => self.filter_low_hz = as_f64(key, value)?,
                "filter_high_hz" => self.filter_high_hz = as_f64(key, value)?,
                "filter_order" => self.filter_order = as_usize(key, value)? as u32,
                "decimation_factor" => self.decimation_factor = as_usize(key, value)?,
                "window_seconds" => self.window_seconds = as_f64(key, value)?,
                "standardize" => self.standardize = as_bool(key, value)?,
                "repetitions" => self.repetitions = as_usize(key, value)? as u32,
                "lambda_rel" => self.lambda_rel = as_f64(key, value)?,
                "sb_weighting" => {
                    let s = value
                        .as_str()
                        .ok_or_else(|| field_error(key, "expected a string"))?;
                    self.sb_weighting = SbWeighting::parse(s).ok_or_else(|| {
                        field_error(
                            key,
                            format!("expected paper_unweighted or count_weighted, got {s:?}"),
                        )
                    })?;
                }
                "sample_rate_hz" => self.sample_rate_hz = as_f64(key, value)?,
                "n_channels" => self.n_channels = as_usize(key, value)?,
                "p300_amplitude_uv" => self.p300_amplitude_uv = as_f64(key, value)?,
                "p300_latency_s" => self.p300_latency_s = as_f64(key, value)?,
                "p300_width_s" => self.p300_width_s = as_f64(key, value)?,
                "background_noise_uv_rms" => self.background_noise_uv_rms = as_f64(key, value)?,
                "isi_s" => self.isi_s = as_f64(key, value)?,
                "train_targets" => self.train_targets = as_usize(key, value)?,
                "train_nontargets" => self.train_nontargets = as_usize(key, value)?,
                "student_id" => {
                    self.student_id = value
                        .as_str()
                        .ok_or_else(|| field_error(key, "expected a string"))?
                        .to_string();
                }
                "seed" => {
                    self.seed = value
                        .as_u64()
                        .ok_or_else(|| field_error(key, "expected a 64-bit unsigned integer"))?;
                }
                other => {
                    return Err(field_error(other, "unknown configuration key"));
                }
            }
        }
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            filter: FilterSpec::new(self.filter_low_hz, self.filter_high_hz, self.filter_order),
            decimation_factor: self.decimation_factor,
            window_seconds: self.window_seconds,
            standardize: self.standardize,
        }
    }

    pub fn synth(&self) -> SynthConfig {
        SynthConfig {
            sample_rate_hz: self.sample_rate_hz,
            n_channels: self.n_channels,
            p300_amplitude_uv: self.p300_amplitude_uv,
            p300_latency_s: self.p300_latency_s,
            p300_width_s: self.p300_width_s,
            background_noise_uv_rms: self.background_noise_uv_rms,
            repetitions: self.repetitions,
            isi_s: self.isi_s,
            seed: self.seed,
        }
    }

    /// Check every module precondition before doing any work.
    pub fn validate(&self) -> Result<()> {
        self.pipeline().validate(self.sample_rate_hz)?;
        self.synth().validate(self.window_seconds)?;
        if self.lambda_rel < 0.0 {
            return Err(field_error(
                "lambda_rel",
                format!("shrinkage must be nonnegative, got {}", self.lambda_rel),
            ));
        }
        Ok(())
    }
}

/// Parse a noise-levels spec: `lo..hi`, `lo..hi:step`, or a comma list.
pub fn parse_levels(spec: &str) -> Result<Vec<u32>> {
    let bad = |detail: String| field_error("levels", detail);
    let parse_u32 = |s: &str| -> Result<u32> {
        s.trim()
            .parse::<u32>()
            .map_err(|_| bad(format!("expected an integer in 0..=100, got {s:?}")))
    };

    let levels: Vec<u32> = if let Some((range, step)) = spec.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| bad(format!("expected lo..hi:step, got {spec:?}")))?;
        let (lo, hi, step) = (parse_u32(lo)?, parse_u32(hi)?, parse_u32(step)?);
        if step == 0 {
            return Err(bad("step must be positive".into()));
        }
        (lo..=hi).step_by(step as usize).collect()
    } else if let Some((lo, hi)) = spec.split_once("..") {
        (parse_u32(lo)?..=parse_u32(hi)?).collect()
    } else {
        spec.split(',').map(parse_u32).collect::<Result<Vec<u32>>>()?
    };

    if levels.is_empty() {
        return Err(bad("no levels in spec".into()));
    }
    for pair in levels.windows(2) {
        if pair[0] >= pair[1] {
            return Err(bad(format!(
                "levels must be strictly increasing ({} !< {})",
                pair[0], pair[1]
            )));
        }
    }
    if *levels.last().unwrap() > 100 {
        return Err(bad("levels are percentages in [0, 100]".into()));
    }
    Ok(levels)
}
