//! Band power from the one-sided periodogram. Alpha (8-12 Hz) is the
//! conventional attention band.


use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::signal::Epoch;
use crate::spectrum::periodogram;

/// Per-channel power in `[band_low_hz, band_high_hz]`: the sum of
/// periodogram bins (`|X_k|^2 / n`) whose frequency `k * fs / n` falls in
/// the band, endpoints included.
pub fn band_power<T: Real>(
    epoch: &Epoch<T>,
    band_low_hz: T,
    band_high_hz: T,
) -> Result<Vec<T>> {
    let nyquist = epoch.effective_rate_hz / real(2.0);
    if !(band_low_hz >= T::zero() && band_low_hz < band_high_hz && band_high_hz <= nyquist) {
        return Err(Error::InvalidBand {
            detail: format!(
                "need 0 <= low < high <= {nyquist} (effective Nyquist), got [{band_low_hz}, \
                 {band_high_hz}]"
            ),
        });
    }

    let n = epoch.n_window_samples();
    let fs = epoch.effective_rate_hz;
    let mut out = Vec::with_capacity(epoch.n_channels());
    for ch in 0..epoch.n_channels() {
        let series: Vec<T> = epoch.data.iter().map(|row| row[ch]).collect();
        let psd = periodogram(&series);
        let mut power = T::zero();
        for (k, &p) in psd.iter().enumerate() {
            let freq = real::<T>(k as f64) * fs / real(n as f64);
            if freq >= band_low_hz && freq <= band_high_hz {
                power += p;
            }
        }
        out.push(power);
    }
    Ok(out)
}
