//! Seeded synthetic ERP sessions: the stand-in data source for exercising
//! the pipeline at the desk.
//!
//! Target flashes get a positive Gaussian bump added to every channel;
//! everything is bathed in white Gaussian background noise. Streams derive
//! from the config seed with `rng::mix`, so generation is reproducible and
//! independent of evaluation order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exam::Exam;
use crate::lda::LabeledDataset;
use crate::num::{real, Real};
use crate::rng::{fnv1a64, mix, SplitMix64};
use crate::signal::{
    features, preprocess, AnswerOption, PipelineConfig, Recording, StimulusEvent,
};

/// Parameters of the synthetic EEG source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig<T> {
    pub sample_rate_hz: T,
    pub n_channels: usize,
    /// Peak amplitude of the target bump, microvolts.
    pub p300_amplitude_uv: T,
    /// Bump peak delay after flash onset, seconds.
    pub p300_latency_s: T,
    /// Gaussian bump sigma, seconds.
    pub p300_width_s: T,
    /// RMS of the white background noise, microvolts.
    pub background_noise_uv_rms: T,
    /// Flashes per option per question.
    pub repetitions: u32,
    /// Inter-stimulus interval, seconds.
    pub isi_s: T,
    pub seed: u64,
}

impl<T: Real> Default for SynthConfig<T> {
    fn default() -> Self {
        Self {
            sample_rate_hz: real(250.0),
            n_channels: 4,
            p300_amplitude_uv: real(5.0),
            p300_latency_s: real(0.30),
            p300_width_s: real(0.08),
            background_noise_uv_rms: real(2.0),
            repetitions: 10,
            isi_s: real(0.4),
            seed: 1,
        }
    }
}

impl<T: Real> SynthConfig<T> {
    /// Validate against the epoch window the downstream pipeline will cut.
    pub fn validate(&self, epoch_window_s: T) -> Result<()> {
        let positives: [(&str, T); 6] = [
            ("sample_rate_hz", self.sample_rate_hz),
            ("p300_amplitude_uv", self.p300_amplitude_uv),
            ("p300_latency_s", self.p300_latency_s),
            ("p300_width_s", self.p300_width_s),
            ("isi_s", self.isi_s),
            ("epoch_window_s", epoch_window_s),
        ];
        for (field, value) in positives {
            if !(value > T::zero()) {
                return Err(Error::ConfigError {
                    field: field.to_string(),
                    detail: format!("must be positive, got {value}"),
                });
            }
        }
        if self.background_noise_uv_rms < T::zero() {
            return Err(Error::ConfigError {
                field: "background_noise_uv_rms".into(),
                detail: format!("must be nonnegative, got {}", self.background_noise_uv_rms),
            });
        }
        if self.n_channels == 0 {
            return Err(Error::ConfigError {
                field: "n_channels".into(),
                detail: "need at least one channel".into(),
            });
        }
        if self.repetitions == 0 {
            return Err(Error::ConfigError {
                field: "repetitions".into(),
                detail: "need at least one repetition".into(),
            });
        }
        let bump_end = self.p300_latency_s + real::<T>(3.0) * self.p300_width_s;
        if !(bump_end < epoch_window_s) {
            return Err(Error::ConfigError {
                field: "p300_latency_s".into(),
                detail: format!(
                    "latency + 3 sigma = {bump_end} s does not fit the {epoch_window_s} s \
                     epoch window"
                ),
            });
        }
        Ok(())
    }

    fn channel_labels(&self) -> Vec<String> {
        // 10/20-style labels, metadata only.
        const NAMES: [&str; 8] = ["Fz", "Cz", "Pz", "Oz", "C3", "C4", "P3", "P4"];
        (0..self.n_channels)
            .map(|i| {
                if i < NAMES.len() {
                    NAMES[i].to_string()
                } else {
                    format!("Ch{}", i + 1)
                }
            })
            .collect()
    }
}

fn round_to_samples<T: Real>(seconds: T, fs: T) -> usize {
    (seconds * fs).round().to_usize().unwrap_or(0)
}

/// Add the target bump to all channels starting at `onset`.
fn add_bump<T: Real>(samples: &mut [Vec<T>], onset: usize, cfg: &SynthConfig<T>, window: usize) {
    let fs = cfg.sample_rate_hz.to_f64().unwrap();
    let latency = cfg.p300_latency_s.to_f64().unwrap();
    let width = cfg.p300_width_s.to_f64().unwrap();
    let amplitude = cfg.p300_amplitude_uv;
    for t_rel in 0..window {
        let Some(row) = samples.get_mut(onset + t_rel) else {
            break;
        };
        let t = t_rel as f64 / fs;
        let bump = amplitude * real::<T>((-(t - latency).powi(2) / (2.0 * width * width)).exp());
        for value in row.iter_mut() {
            *value += bump;
        }
    }
}

/// Lay out one full exam session: for each question, `repetitions` shuffled
/// blocks of the four options at the configured inter-stimulus interval.
/// Target-option flashes (per `target_answers`) carry the bump; events are
/// emitted with `is_target` filled in.
pub fn gen_session<T: Real>(
    exam: &Exam,
    target_answers: &BTreeMap<String, AnswerOption>,
    cfg: &SynthConfig<T>,
    epoch_window_s: T,
) -> Result<Recording<T>> {
    cfg.validate(epoch_window_s)?;
    exam.validate()?;
    for question in &exam.questions {
        if !target_answers.contains_key(&question.question_id) {
            return Err(Error::ConfigError {
                field: "target_answers".into(),
                detail: format!("no target for question {:?}", question.question_id),
            });
        }
    }

    let fs = cfg.sample_rate_hz;
    let isi_samples = round_to_samples(cfg.isi_s, fs).max(1);
    let window_samples = round_to_samples(epoch_window_s, fs).max(1);
    let n_flashes = exam.questions.len() * 4 * cfg.repetitions as usize;
    // One ISI per flash plus a tail long enough for the last epoch even
    // after decimation slop.
    let n_samples = n_flashes * isi_samples + window_samples + isi_samples;

    let mut noise = SplitMix64::new(mix(cfg.seed, fnv1a64(b"session-noise")));
    let sigma = cfg.background_noise_uv_rms;
    let mut samples: Vec<Vec<T>> = (0..n_samples)
        .map(|_| {
            (0..cfg.n_channels)
                .map(|_| sigma * real(noise.next_gaussian()))
                .collect()
        })
        .collect();

    let mut events = Vec::with_capacity(n_flashes);
    let mut flash_index = 0usize;
    for question in &exam.questions {
        let target = target_answers[&question.question_id];
        let schedule_seed = mix(cfg.seed, fnv1a64(question.question_id.as_bytes()));
        let schedule =
            crate::speller::make_schedule(&question.question_id, cfg.repetitions, schedule_seed);
        for option in schedule.flashes() {
            let onset = flash_index * isi_samples;
            let is_target = option == target;
            if is_target {
                add_bump(&mut samples, onset, cfg, window_samples);
            }
            events.push(StimulusEvent {
                onset_sample: onset,
                question_id: question.question_id.clone(),
                option,
                is_target: Some(is_target),
            });
            flash_index += 1;
        }
    }

    Recording::new(fs, cfg.channel_labels(), samples, events)
}

/// Standalone labeled training epochs with the session morphology, run
/// through the standard preprocessing chain. Class 0 is target.
pub fn gen_training_set<T: Real>(
    cfg: &SynthConfig<T>,
    pipeline: &PipelineConfig<T>,
    n_target: usize,
    n_nontarget: usize,
) -> Result<LabeledDataset<T>> {
    cfg.validate(pipeline.window_seconds)?;
    pipeline.validate(cfg.sample_rate_hz)?;
    if n_target < 2 || n_nontarget < 2 {
        return Err(Error::ConfigError {
            field: "n_target/n_nontarget".into(),
            detail: format!("need at least 2 of each, got {n_target}/{n_nontarget}"),
        });
    }

    let fs = cfg.sample_rate_hz;
    // Two seconds of lead-in so the causal filter is settled at the
    // stimulus, matching mid-session conditions.
    let settle = round_to_samples(real(2.0), fs);
    let window = round_to_samples(pipeline.window_seconds, fs).max(1);
    let n_samples = settle + window + round_to_samples(real(0.2), fs) + pipeline.decimation_factor;

    let train_stream = mix(cfg.seed, fnv1a64(b"training-set"));
    let mut targets = Vec::with_capacity(n_target);
    let mut non_targets = Vec::with_capacity(n_nontarget);
    for i in 0..(n_target + n_nontarget) {
        let is_target = i < n_target;
        let mut noise = SplitMix64::new(mix(train_stream, i as u64));
        let sigma = cfg.background_noise_uv_rms;
        let mut samples: Vec<Vec<T>> = (0..n_samples)
            .map(|_| {
                (0..cfg.n_channels)
                    .map(|_| sigma * real(noise.next_gaussian()))
                    .collect()
            })
            .collect();
        if is_target {
            add_bump(&mut samples, settle, cfg, window);
        }
        let recording = Recording::new(
            fs,
            cfg.channel_labels(),
            samples,
            vec![StimulusEvent {
                onset_sample: settle,
                question_id: format!("train-{i:04}"),
                option: AnswerOption::A,
                is_target: Some(is_target),
            }],
        )?;
        let epochs = preprocess(&recording, pipeline)?;
        let fv = features(&epochs[0], pipeline.standardize);
        if is_target {
            targets.push(fv);
        } else {
            non_targets.push(fv);
        }
    }
    LabeledDataset::binary(targets, non_targets)
}

/// Answer key of an exam as a target map: the simulated student attends the
/// correct option of every question.
pub fn targets_from_answer_key(exam: &Exam) -> BTreeMap<String, AnswerOption> {
    exam.questions
        .iter()
        .map(|q| (q.question_id.clone(), q.answer))
        .collect()
}
