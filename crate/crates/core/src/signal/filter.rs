//! Butterworth band-pass design (bilinear transform with prewarping) and
//! causal single-pass filtering.
//!
//! The band-pass is realized as an order-N Butterworth high-pass at the low
//! cut cascaded with an order-N Butterworth low-pass at the high cut, each
//! split into second-order sections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::signal::{FilterSpec, Recording};

/// One second-order section, `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad<T> {
    pub b0: T,
    pub b1: T,
    pub b2: T,
    pub a1: T,
    pub a2: T,
}

impl<T: Real> Biquad<T> {
    /// Complex response at normalized angular frequency `omega` (rad/sample).
    fn response(&self, omega: f64) -> (f64, f64) {
        let b0 = self.b0.to_f64().unwrap();
        let b1 = self.b1.to_f64().unwrap();
        let b2 = self.b2.to_f64().unwrap();
        let a1 = self.a1.to_f64().unwrap();
        let a2 = self.a2.to_f64().unwrap();
        // e^{-j omega} and e^{-2j omega}
        let (c1, s1) = (omega.cos(), -omega.sin());
        let (c2, s2) = ((2.0 * omega).cos(), -(2.0 * omega).sin());
        let num = (b0 + b1 * c1 + b2 * c2, b1 * s1 + b2 * s2);
        let den = (1.0 + a1 * c1 + a2 * c2, a1 * s1 + a2 * s2);
        let d = den.0 * den.0 + den.1 * den.1;
        (
            (num.0 * den.0 + num.1 * den.1) / d,
            (num.1 * den.0 - num.0 * den.1) / d,
        )
    }
}

/// A designed cascade plus the parameters it was designed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoefficients<T> {
    pub sections: Vec<Biquad<T>>,
    pub design_fs_hz: T,
    pub low_cut_hz: T,
    pub high_cut_hz: T,
}

impl<T: Real> FilterCoefficients<T> {
    /// Magnitude of the cascade response at `freq_hz`.
    pub fn magnitude_at(&self, freq_hz: T) -> T {
        let fs = self.design_fs_hz.to_f64().unwrap();
        let omega = std::f64::consts::TAU * freq_hz.to_f64().unwrap() / fs;
        let mut acc = (1.0f64, 0.0f64);
        for s in &self.sections {
            let r = s.response(omega);
            acc = (acc.0 * r.0 - acc.1 * r.1, acc.0 * r.1 + acc.1 * r.0);
        }
        real((acc.0 * acc.0 + acc.1 * acc.1).sqrt())
    }
}

/// Design the band-pass cascade for a recording at `fs`.
pub fn design_bandpass<T: Real>(spec: &FilterSpec<T>, fs: T) -> Result<FilterCoefficients<T>> {
    spec.validate(fs)?;
    let n = spec.order as usize;
    let fs_f = fs.to_f64().unwrap();
    let k = 2.0 * fs_f;

    let mut sections = Vec::with_capacity(n);
    // High-pass half at the low cut, then low-pass half at the high cut.
    for (cut, highpass) in [(spec.low_cut_hz, true), (spec.high_cut_hz, false)] {
        let warped = k * (std::f64::consts::PI * cut.to_f64().unwrap() / fs_f).tan();
        for pair in 0..n / 2 {
            // Butterworth pole-pair damping: q = 2 sin((2k+1) pi / 2n).
            let q = 2.0 * ((2 * pair + 1) as f64 * std::f64::consts::PI / (2.0 * n as f64)).sin();
            let a0 = k * k + q * warped * k + warped * warped;
            let a1 = 2.0 * (warped * warped - k * k) / a0;
            let a2 = (k * k - q * warped * k + warped * warped) / a0;
            let section = if highpass {
                // Numerator K^2 (1 - z^-1)^2; the shared gain keeps the
                // coefficient sum exactly zero, so DC is rejected exactly.
                let g = k * k / a0;
                Biquad {
                    b0: real(g),
                    b1: real(-2.0 * g),
                    b2: real(g),
                    a1: real(a1),
                    a2: real(a2),
                }
            } else {
                // Numerator W^2 (1 + z^-1)^2.
                let g = warped * warped / a0;
                Biquad {
                    b0: real(g),
                    b1: real(2.0 * g),
                    b2: real(g),
                    a1: real(a1),
                    a2: real(a2),
                }
            };
            sections.push(section);
        }
    }

    Ok(FilterCoefficients {
        sections,
        design_fs_hz: fs,
        low_cut_hz: spec.low_cut_hz,
        high_cut_hz: spec.high_cut_hz,
    })
}

/// Filter every channel independently: causal, single forward pass, zero
/// initial state. Events pass through unchanged; the output carries the
/// band-limit annotation used by `decimate`.
pub fn apply_filter<T: Real>(
    coeffs: &FilterCoefficients<T>,
    recording: &Recording<T>,
) -> Result<Recording<T>> {
    if coeffs.design_fs_hz != recording.sample_rate_hz {
        return Err(Error::SampleRateMismatch {
            designed_hz: coeffs.design_fs_hz.to_f64().unwrap_or(f64::NAN),
            actual_hz: recording.sample_rate_hz.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n_channels = recording.n_channels();
    let n_samples = recording.n_samples();
    let n_sections = coeffs.sections.len();

    // Direct form II transposed state, per channel per section.
    let mut state = vec![(T::zero(), T::zero()); n_channels * n_sections];
    let mut samples = vec![vec![T::zero(); n_channels]; n_samples];
    for ch in 0..n_channels {
        for (out_row, in_row) in samples.iter_mut().zip(&recording.samples) {
            let mut x = in_row[ch];
            for (si, s) in coeffs.sections.iter().enumerate() {
                let slot = &mut state[ch * n_sections + si];
                let y = s.b0 * x + slot.0;
                slot.0 = s.b1 * x - s.a1 * y + slot.1;
                slot.1 = s.b2 * x - s.a2 * y;
                x = y;
            }
            out_row[ch] = x;
        }
    }

    let band_limit = match recording.band_limit_hz {
        Some(existing) => existing.min(coeffs.high_cut_hz),
        None => coeffs.high_cut_hz,
    };
    Ok(Recording {
        sample_rate_hz: recording.sample_rate_hz,
        channels: recording.channels.clone(),
        samples,
        events: recording.events.clone(),
        band_limit_hz: Some(band_limit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::test_support::mono_recording;
    use crate::signal::{AnswerOption, StimulusEvent};
    use crate::spectrum::dft_real;

    fn default_coeffs() -> FilterCoefficients<f64> {
        design_bandpass(&FilterSpec::new(0.5, 30.0, 4), 250.0).unwrap()
    }

    /// Continuous-time Butterworth magnitude for the same cascade; the
    /// independent cross-check for the digital design.
    fn analytic_magnitude(f: f64, low: f64, high: f64, order: u32) -> f64 {
        let n2 = 2 * order as i32;
        let hp = (f / low).powi(n2) / (1.0 + (f / low).powi(n2));
        let lp = 1.0 / (1.0 + (f / high).powi(n2));
        (hp * lp).sqrt()
    }

    #[test]
    fn dc_gain_is_exactly_zero() {
        let coeffs = default_coeffs();
        assert_eq!(coeffs.magnitude_at(0.0), 0.0);
        // The high-pass numerator sums to zero bit-exactly.
        for s in &coeffs.sections[..2] {
            assert_eq!(s.b0 + s.b1 + s.b2, 0.0);
        }
    }

    #[test]
    fn passband_center_gain_in_contract_range() {
        let coeffs = default_coeffs();
        let center = (0.5f64 * 30.0).sqrt();
        let gain = coeffs.magnitude_at(center);
        assert!((0.95..=1.0).contains(&gain), "gain {gain}");
        let analytic = analytic_magnitude(center, 0.5, 30.0, 4);
        assert!((gain - analytic).abs() < 1e-3, "digital {gain} vs analytic {analytic}");
    }

    #[test]
    fn sixty_hz_attenuation_at_least_20_db() {
        let coeffs = default_coeffs();
        let gain = coeffs.magnitude_at(60.0);
        let att_db = -20.0 * gain.log10();
        assert!(att_db >= 20.0, "attenuation {att_db} dB");
        // Warping only sharpens the digital low-pass, so the analytic
        // continuous-time attenuation is a lower bound.
        let analytic_db = -20.0 * analytic_magnitude(60.0, 0.5, 30.0, 4).log10();
        assert!(att_db >= analytic_db - 0.5, "{att_db} vs analytic {analytic_db}");
    }

    #[test]
    fn matches_reference_design_magnitudes() {
        // |H| of the same cascade designed with scipy.signal.butter
        // (highpass 0.5 Hz order 4 + lowpass 30 Hz order 4, fs 250,
        // bilinear transform), frozen from an offline run.
        let reference = [
            (0.25, 0.06237583316097892),
            (0.5, 0.7071067811858628),
            (1.0, 0.9980531916682002),
            (2.0, 0.9999923826007681),
            (3.872983346207417, 0.9999999354269359),
            (10.0, 0.9999462918447343),
            (20.0, 0.9847185285230097),
            (30.0, 0.7071067811865465),
            (45.0, 0.1497904565751609),
            (60.0, 0.03158422130604761),
            (100.0, 0.00027388550025949645),
        ];
        let coeffs = default_coeffs();
        for (f, expected) in reference {
            let got = coeffs.magnitude_at(f);
            assert!(
                ((got - expected) / expected).abs() < 1e-8,
                "f={f}: got {got}, reference {expected}"
            );
        }
    }

    #[test]
    fn rejects_invalid_bands() {
        assert!(matches!(
            design_bandpass(&FilterSpec::new(30.0, 0.5, 4), 250.0),
            Err(Error::InvalidBand { .. })
        ));
        assert!(matches!(
            design_bandpass(&FilterSpec::new(0.5, 130.0, 4), 250.0),
            Err(Error::InvalidBand { .. })
        ));
    }

    #[test]
    fn zero_signal_stays_zero() {
        let coeffs = default_coeffs();
        let rec = mono_recording(250.0, vec![0.0; 500]);
        let out = apply_filter(&coeffs, &rec).unwrap();
        assert!(out.samples.iter().all(|row| row[0] == 0.0));
    }

    #[test]
    fn constant_signal_decays_to_nothing() {
        // DC rejection of a constant 7.0. The 0.5 Hz high-pass settles
        // slowly: the step response is still ~0.43 after 2 s and first
        // drops below 1e-3 around 8 s (verified against a scipy sosfilt
        // run), so the settle window here is 8 s.
        let coeffs = default_coeffs();
        let rec = mono_recording(250.0, vec![7.0; 10 * 250]);
        let out = apply_filter(&coeffs, &rec).unwrap();
        let settle = 8 * 250;
        let max_tail = out.samples[settle..]
            .iter()
            .map(|row| row[0].abs())
            .fold(0.0, f64::max);
        assert!(max_tail < 1e-3, "still {max_tail} after 8 s");
        // And the response at 2 s matches the reference magnitude, not zero.
        let at_2s = out.samples[2 * 250][0].abs();
        assert!((0.1..1.0).contains(&at_2s), "unexpected 2 s value {at_2s}");
    }

    #[test]
    fn impulse_response_dft_matches_design_response() {
        let coeffs = default_coeffs();
        let n = 8192; // tail beyond 8192 samples is ~1e-17, far below tolerance
        let mut impulse = vec![0.0; n];
        impulse[0] = 1.0;
        let rec = mono_recording(250.0, impulse);
        let out = apply_filter(&coeffs, &rec).unwrap();
        let h: Vec<f64> = out.samples.iter().map(|row| row[0]).collect();
        let (re, im) = dft_real(&h);
        for k in 0..=n / 2 {
            let dft_mag = (re[k] * re[k] + im[k] * im[k]).sqrt();
            let design_mag = coeffs.magnitude_at(k as f64 * 250.0 / n as f64);
            assert!(
                (dft_mag - design_mag).abs() < 1e-9,
                "bin {k}: dft {dft_mag} vs design {design_mag}"
            );
        }
    }

    #[test]
    fn filtering_is_linear() {
        let coeffs = default_coeffs();
        let mut rng = crate::rng::SplitMix64::new(17);
        let x: Vec<f64> = (0..400).map(|_| rng.next_gaussian()).collect();
        let y: Vec<f64> = (0..400).map(|_| rng.next_gaussian()).collect();
        let (a, b) = (2.5, -1.25);
        let combined: Vec<f64> = x.iter().zip(&y).map(|(&xv, &yv)| a * xv + b * yv).collect();

        let fx = apply_filter(&coeffs, &mono_recording(250.0, x)).unwrap();
        let fy = apply_filter(&coeffs, &mono_recording(250.0, y)).unwrap();
        let fc = apply_filter(&coeffs, &mono_recording(250.0, combined)).unwrap();

        let mut max_rel = 0.0f64;
        let scale = fc
            .samples
            .iter()
            .map(|r| r[0].abs())
            .fold(0.0, f64::max)
            .max(1e-30);
        for t in 0..400 {
            let expect = a * fx.samples[t][0] + b * fy.samples[t][0];
            max_rel = max_rel.max((fc.samples[t][0] - expect).abs() / scale);
        }
        assert!(max_rel < 1e-9, "relative error {max_rel}");
    }

    #[test]
    fn events_and_metadata_pass_through() {
        let coeffs = default_coeffs();
        let mut rec = mono_recording(250.0, vec![1.0; 100]);
        rec.events.push(StimulusEvent {
            onset_sample: 10,
            question_id: "q1".into(),
            option: AnswerOption::B,
            is_target: Some(true),
        });
        let out = apply_filter(&coeffs, &rec).unwrap();
        assert_eq!(out.events, rec.events);
        assert_eq!(out.channels, rec.channels);
        assert_eq!(out.band_limit_hz, Some(30.0));
    }

    #[test]
    fn rejects_rate_mismatch() {
        let coeffs = default_coeffs();
        let rec = mono_recording(200.0, vec![0.0; 10]);
        assert!(matches!(
            apply_filter(&coeffs, &rec),
            Err(Error::SampleRateMismatch { .. })
        ));
    }

    #[test]
    fn f32_design_tracks_f64() {
        let c64 = default_coeffs();
        let c32 = design_bandpass(&FilterSpec::<f32>::new(0.5, 30.0, 4), 250.0).unwrap();
        for f in [1.0f64, 10.0, 30.0, 60.0] {
            let m64 = c64.magnitude_at(f);
            let m32 = c32.magnitude_at(f as f32) as f64;
            assert!((m64 - m32).abs() < 1e-4, "f={f}: {m64} vs {m32}");
        }
    }
}
