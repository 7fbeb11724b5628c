//! Noise-robustness experiment: inject graded noise into evaluation epochs
//! and chart how spelling accuracy degrades.
//!
//! The noise model is a convex mix: at level L percent, each sample becomes
//! `(1 - L/100) x + (L/100) e` with `e` white Gaussian matched to the
//! epoch's RMS. Level 0 is the identity, level 100 is pure noise, so the
//! curve is anchored at the clean accuracy and at 4-option chance.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;


use crate::error::{Error, Result};
use crate::exam::{epochs_by_question, Exam};
use crate::lda::LdaModel;
use crate::num::{real, Real};
use crate::rng::{mix, SplitMix64};
use crate::signal::{preprocess, Epoch, PipelineConfig, Recording};
use crate::speller::answer_question;

/// Accuracy per noise level: the artifact's noise-vs-accuracy table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub levels: Vec<u32>,
    pub accuracy_pct: Vec<f64>,
    pub clean_accuracy_pct: f64,
    pub trials_per_level: u32,
    pub seed: u64,
}

impl SweepReport {
    /// Centered moving average over `window` levels (window truncated at
    /// the ends). Used to judge the monotone trend through plateaus.
    pub fn smoothed(&self, window: usize) -> Vec<f64> {
        let half = window / 2;
        let n = self.accuracy_pct.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half + 1).min(n);
                self.accuracy_pct[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
            })
            .collect()
    }
}

/// Mix an epoch with RMS-matched white Gaussian noise.
///
/// Level 0 returns the epoch unchanged (and draws nothing from the stream);
/// level 100 returns pure noise. Zero-RMS epochs mix against noise of 1 uV
/// RMS so silence still degrades.
pub fn inject_noise<T: Real>(
    epoch: &Epoch<T>,
    level_pct: u32,
    noise_stream: &mut SplitMix64,
) -> Epoch<T> {
    assert!(level_pct <= 100, "noise level is a percentage");
    if level_pct == 0 {
        return epoch.clone();
    }
    let alpha = real::<T>(level_pct as f64 / 100.0);
    let keep = T::one() - alpha;
    let rms = epoch.rms();
    let sigma = if rms > T::zero() { rms } else { T::one() };
    let mut out = epoch.clone();
    for row in &mut out.data {
        for value in row.iter_mut() {
            let noise = sigma * real::<T>(noise_stream.next_gaussian());
            *value = keep * *value + alpha * noise;
        }
    }
    out
}

/// Per-session evaluation state reused across levels and trials.
struct PreparedSession<T> {
    /// Epochs grouped per exam question, in exam order.
    grouped: Vec<Vec<Epoch<T>>>,
}

fn prepare_sessions<T: Real>(
    exam: &Exam,
    sessions: &[Recording<T>],
    pipeline: &PipelineConfig<T>,
) -> Result<Vec<PreparedSession<T>>> {
    sessions
        .iter()
        .map(|recording| {
            let epochs = preprocess(recording, pipeline)?;
            let grouped = epochs_by_question(exam, &epochs)?;
            let grouped = grouped
                .into_iter()
                .zip(&exam.questions)
                .map(|(group, question)| {
                    if group.is_empty() {
                        Err(Error::MissingQuestionEpochs {
                            question_id: question.question_id.clone(),
                        })
                    } else {
                        Ok(group.into_iter().cloned().collect())
                    }
                })
                .collect::<Result<Vec<Vec<Epoch<T>>>>>()?;
            Ok(PreparedSession { grouped })
        })
        .collect()
}

/// Answer every question of every prepared session, mapping each epoch
/// through `transform` first; returns the number of correct answers.
fn count_correct<T: Real, F>(
    exam: &Exam,
    model: &LdaModel<T>,
    sessions: &[PreparedSession<T>],
    standardize: bool,
    mut transform: F,
) -> Result<u64>
where
    F: FnMut(&Epoch<T>) -> Epoch<T>,
{
    let mut correct = 0u64;
    for session in sessions {
        for (question, group) in exam.questions.iter().zip(&session.grouped) {
            let noisy: Vec<Epoch<T>> = group.iter().map(&mut transform).collect();
            let selection = answer_question(model, &noisy, standardize)?;
            if selection.selected == question.answer {
                correct += 1;
            }
        }
    }
    Ok(correct)
}

/// Re-run the sessions at every noise level, `trials` times each with fresh
/// noise, and tabulate per-question accuracy.
///
/// Each (level, trial) pair draws from its own derived stream
/// (`mix(seed, level * 10^6 + trial)`), so levels are reproducible in
/// isolation and results do not depend on evaluation order. Level 0 equals
/// the clean accuracy exactly.
pub fn noise_sweep<T: Real>(
    model: &LdaModel<T>,
    exam: &Exam,
    sessions: &[Recording<T>],
    pipeline: &PipelineConfig<T>,
    levels: &[u32],
    trials: u32,
    seed: u64,
) -> Result<SweepReport> {
    if levels.is_empty() {
        return Err(Error::ConfigError {
            field: "levels".into(),
            detail: "need at least one noise level".into(),
        });
    }
    for pair in levels.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::ConfigError {
                field: "levels".into(),
                detail: format!("levels must be strictly increasing ({} !< {})", pair[0], pair[1]),
            });
        }
    }
    if *levels.last().unwrap() > 100 {
        return Err(Error::ConfigError {
            field: "levels".into(),
            detail: "levels are percentages in [0, 100]".into(),
        });
    }
    if trials == 0 {
        return Err(Error::ConfigError {
            field: "trials".into(),
            detail: "need at least one trial".into(),
        });
    }
    if sessions.is_empty() {
        return Err(Error::ConfigError {
            field: "sessions".into(),
            detail: "need at least one session recording".into(),
        });
    }

    let prepared = prepare_sessions(exam, sessions, pipeline)?;
    let decisions_per_run = (exam.questions.len() * sessions.len()) as u64;

    let clean_correct = count_correct(exam, model, &prepared, pipeline.standardize, Epoch::clone)?;
    let clean_accuracy_pct = 100.0 * clean_correct as f64 / decisions_per_run as f64;

    let mut accuracy_pct = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut correct_total = 0u64;
        for trial in 0..trials {
            let stream_seed = mix(seed, level as u64 * 1_000_000 + trial as u64);
            let mut stream = SplitMix64::new(stream_seed);
            correct_total += count_correct(
                exam,
                model,
                &prepared,
                pipeline.standardize,
                |epoch| inject_noise(epoch, level, &mut stream),
            )?;
        }
        // Single integer-to-float division keeps level 0 bit-equal to the
        // clean accuracy.
        accuracy_pct
            .push(100.0 * correct_total as f64 / (decisions_per_run * trials as u64) as f64);
    }

    Ok(SweepReport {
        levels: levels.to_vec(),
        accuracy_pct,
        clean_accuracy_pct,
        trials_per_level: trials,
        seed,
    })
}

/// `noise_pct,accuracy_pct` rows, ascending levels, two decimals.
pub fn report_to_csv(report: &SweepReport) -> String {
    let mut out = String::from("noise_pct,accuracy_pct\n");
    for (&level, &acc) in report.levels.iter().zip(&report.accuracy_pct) {
        writeln!(out, "{level},{acc:.2}").unwrap();
    }
    out
}

pub fn write_report_csv(report: &SweepReport, path: &Path) -> Result<()> {
    fs::write(path, report_to_csv(report)).map_err(|e| Error::io(path, e))
}

/// Parse a sweep CSV back into `(levels, accuracy_pct)`.
pub fn parse_report_csv(text: &str) -> Result<(Vec<u32>, Vec<f64>)> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "noise_pct,accuracy_pct" {
        return Err(Error::SchemaError {
            path: "csv".into(),
            detail: format!("unexpected header {header:?}"),
        });
    }
    let mut levels = Vec::new();
    let mut accuracies = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (level, acc) = line.split_once(',').ok_or_else(|| Error::SchemaError {
            path: format!("csv row {}", i + 1),
            detail: "expected two comma-separated fields".into(),
        })?;
        levels.push(level.parse::<u32>().map_err(|e| Error::SchemaError {
            path: format!("csv row {}", i + 1),
            detail: e.to_string(),
        })?);
        accuracies.push(acc.parse::<f64>().map_err(|e| Error::SchemaError {
            path: format!("csv row {}", i + 1),
            detail: e.to_string(),
        })?);
    }
    Ok((levels, accuracies))
}

pub fn read_report_csv(path: &Path) -> Result<(Vec<u32>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report_csv(&text)
}

/// Single-polyline accuracy curve, both axes spanning 0-100.
pub fn report_to_svg(report: &SweepReport) -> String {
    const WIDTH: f64 = 560.0;
    const HEIGHT: f64 = 420.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 20.0;
    const BOTTOM: f64 = 50.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |level: f64| LEFT + level / 100.0 * plot_w;
    let y = |acc: f64| TOP + (100.0 - acc) / 100.0 * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, r#"  <rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    // Axes.
    writeln!(
        svg,
        r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        x(0.0),
        y(0.0),
        x(100.0),
        y(0.0)
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        x(0.0),
        y(0.0),
        x(0.0),
        y(100.0)
    )
    .unwrap();
    // Ticks and labels every 25 on both axes.
    for tick in (0..=100).step_by(25) {
        let t = tick as f64;
        writeln!(
            svg,
            r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            x(t),
            y(0.0),
            x(t),
            y(0.0) + 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{tick}</text>"#,
            x(t),
            y(0.0) + 20.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            x(0.0) - 5.0,
            y(t),
            x(0.0),
            y(t)
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{tick}</text>"#,
            x(0.0) - 8.0,
            y(t) + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">noise level (%)</text>"#,
        x(50.0),
        HEIGHT - 8.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <text x="14" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {:.2})">accuracy (%)</text>"#,
        y(50.0),
        y(50.0)
    )
    .unwrap();
    // The curve itself.
    let points: Vec<String> = report
        .levels
        .iter()
        .zip(&report.accuracy_pct)
        .map(|(&level, &acc)| format!("{:.2},{:.2}", x(level as f64), y(acc)))
        .collect();
    writeln!(
        svg,
        r##"  <polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##,
        points.join(" ")
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

pub fn render_curve_svg(report: &SweepReport, path: &Path) -> Result<()> {
    fs::write(path, report_to_svg(report)).map_err(|e| Error::io(path, e))
}
