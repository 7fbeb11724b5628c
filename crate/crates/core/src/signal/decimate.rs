//! Sample-rate reduction by integer factor.


use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::signal::Recording;

/// Keep every `factor`-th sample, divide the rate, and remap event onsets to
/// `floor(onset / factor)`.
///
/// Anti-aliasing is the caller's job (run `apply_filter` first). When the
/// recording carries a band-limit annotation the fold-over condition is
/// enforced: content above the decimated Nyquist frequency raises
/// `AliasRisk`. Unannotated recordings are taken at the caller's word.
pub fn decimate<T: Real>(recording: &Recording<T>, factor: usize) -> Result<Recording<T>> {
    if factor == 0 {
        return Err(Error::ConfigError {
            field: "factor".into(),
            detail: "decimation factor must be at least 1".into(),
        });
    }
    if factor == 1 {
        return Ok(recording.clone());
    }
    let new_rate = recording.sample_rate_hz / real(factor as f64);
    if let Some(band_limit) = recording.band_limit_hz {
        let post_nyquist = new_rate / real(2.0);
        if !(band_limit < post_nyquist) {
            return Err(Error::AliasRisk {
                band_limit_hz: band_limit.to_f64().unwrap_or(f64::NAN),
                post_nyquist_hz: post_nyquist.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let samples: Vec<Vec<T>> = recording
        .samples
        .iter()
        .step_by(factor)
        .cloned()
        .collect();
    let events = recording
        .events
        .iter()
        .map(|ev| {
            let mut ev = ev.clone();
            ev.onset_sample /= factor;
            ev
        })
        .collect();

    Ok(Recording {
        sample_rate_hz: new_rate,
        channels: recording.channels.clone(),
        samples,
        events,
        band_limit_hz: recording.band_limit_hz,
    })
}
