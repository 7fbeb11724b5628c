//! Post-stimulus segmentation and feature flattening.


use crate::error::{Error, Result};
use crate::num::{real_of_usize, Real};
use crate::signal::{Epoch, FeatureVector, Recording};

/// Cut one fixed-length epoch per stimulus event.
///
/// Every epoch spans `[onset, onset + round(window_seconds * fs))`; an event
/// whose window does not fit inside the recording raises `WindowOutOfRange`.
pub fn segment<T: Real>(recording: &Recording<T>, window_seconds: T) -> Result<Vec<Epoch<T>>> {
    if !(window_seconds > T::zero()) {
        return Err(Error::ConfigError {
            field: "window_seconds".into(),
            detail: format!("must be positive, got {window_seconds}"),
        });
    }
    let n_window = (window_seconds * recording.sample_rate_hz)
        .round()
        .to_usize()
        .unwrap_or(0);
    if n_window == 0 {
        return Err(Error::ConfigError {
            field: "window_seconds".into(),
            detail: format!(
                "window of {window_seconds} s rounds to zero samples at {} Hz",
                recording.sample_rate_hz
            ),
        });
    }

    let mut epochs = Vec::with_capacity(recording.events.len());
    for (index, event) in recording.events.iter().enumerate() {
        let end = event.onset_sample + n_window;
        if end > recording.n_samples() {
            return Err(Error::WindowOutOfRange {
                event_index: index,
                question_id: event.question_id.clone(),
                option: event.option,
                onset: event.onset_sample,
                window_samples: n_window,
                recording_samples: recording.n_samples(),
            });
        }
        epochs.push(Epoch {
            question_id: event.question_id.clone(),
            option: event.option,
            is_target: event.is_target,
            data: recording.samples[event.onset_sample..end].to_vec(),
            effective_rate_hz: recording.sample_rate_hz,
        });
    }
    Ok(epochs)
}

/// Flatten an epoch channel-major: all samples of channel 0, then channel 1,
/// and so on.
///
/// With `standardize` the vector is centered and scaled by its population
/// standard deviation; zero-variance vectors map to all zeros.
pub fn features<T: Real>(epoch: &Epoch<T>, standardize: bool) -> FeatureVector<T> {
    let n_samples = epoch.n_window_samples();
    let n_channels = epoch.n_channels();
    let mut values = Vec::with_capacity(n_samples * n_channels);
    for ch in 0..n_channels {
        for row in &epoch.data {
            values.push(row[ch]);
        }
    }

    if standardize && !values.is_empty() {
        let n = real_of_usize::<T>(values.len());
        let mean = values.iter().copied().sum::<T>() / n;
        let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
        if var > T::zero() {
            let std = var.sqrt();
            for v in &mut values {
                *v = (*v - mean) / std;
            }
        } else {
            for v in &mut values {
                *v = T::zero();
            }
        }
    }

    FeatureVector {
        values,
        question_id: epoch.question_id.clone(),
        option: epoch.option,
    }
}
