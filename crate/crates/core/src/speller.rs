//! Four-option P300 speller: flash scheduling, per-flash score aggregation
//! over repetitions, and answer selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lda::LdaModel;
use crate::num::{real_of_usize, Real};
use crate::rng::SplitMix64;
use crate::signal::{features, AnswerOption, Epoch};

/// Flash order for one question: `repetitions` blocks, each a uniformly
/// shuffled permutation of the four options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlashSchedule {
    pub question_id: String,
    pub blocks: Vec<[AnswerOption; 4]>,
    pub repetitions: u32,
    pub seed: u64,
}

impl FlashSchedule {
    /// Flashes in presentation order.
    pub fn flashes(&self) -> impl Iterator<Item = AnswerOption> + '_ {
        self.blocks.iter().flatten().copied()
    }
}

/// Build a schedule of `repetitions` shuffled blocks, deterministic in the
/// seed (Fisher-Yates on a splitmix64 stream).
pub fn make_schedule(question_id: &str, repetitions: u32, seed: u64) -> FlashSchedule {
    assert!(repetitions >= 1, "at least one repetition per question");
    let mut rng = SplitMix64::new(seed);
    let blocks = (0..repetitions)
        .map(|_| {
            let mut block = AnswerOption::ALL;
            rng.shuffle(&mut block);
            block
        })
        .collect();
    FlashSchedule {
        question_id: question_id.to_string(),
        blocks,
        repetitions,
        seed,
    }
}

/// Per-option flash scores plus their means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionScores<T> {
    pub question_id: String,
    /// Individual flash scores, indexed by `AnswerOption::index()`.
    pub scores: [Vec<T>; 4],
    /// Arithmetic mean per option.
    pub aggregate: [T; 4],
}

/// Mean the flash scores per option; every option must have scored at least
/// once.
pub fn aggregate<T: Real>(
    question_id: &str,
    flash_scores: &[(AnswerOption, T)],
) -> Result<OptionScores<T>> {
    let mut scores: [Vec<T>; 4] = Default::default();
    for &(option, score) in flash_scores {
        scores[option.index()].push(score);
    }
    let mut aggregate = [T::zero(); 4];
    for option in AnswerOption::ALL {
        let s = &scores[option.index()];
        if s.is_empty() {
            return Err(Error::MissingOption {
                question_id: question_id.to_string(),
                option,
            });
        }
        aggregate[option.index()] =
            s.iter().copied().sum::<T>() / real_of_usize(s.len());
    }
    Ok(OptionScores {
        question_id: question_id.to_string(),
        scores,
        aggregate,
    })
}

/// The option the speller settles on for one question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSelection<T> {
    pub question_id: String,
    pub selected: AnswerOption,
    /// Best aggregate minus runner-up aggregate; zero on a tie.
    pub margin: T,
    pub tie: bool,
}

/// Pick the option with the highest aggregate score. Exact ties go to the
/// alphabetically smallest option and are flagged.
pub fn select<T: Real>(option_scores: &OptionScores<T>) -> AnswerSelection<T> {
    let agg = &option_scores.aggregate;
    let mut best = AnswerOption::A;
    for option in AnswerOption::ALL {
        if agg[option.index()] > agg[best.index()] {
            best = option;
        }
    }
    let runner_up = AnswerOption::ALL
        .iter()
        .filter(|&&o| o != best)
        .map(|&o| agg[o.index()])
        .fold(T::neg_infinity(), T::max);
    let margin = agg[best.index()] - runner_up;
    AnswerSelection {
        question_id: option_scores.question_id.clone(),
        selected: best,
        margin,
        tie: margin == T::zero(),
    }
}

/// Score every epoch of one question through the model and select the
/// answer: features -> score -> aggregate -> select.
pub fn answer_question<T: Real>(
    model: &LdaModel<T>,
    epochs: &[Epoch<T>],
    standardize: bool,
) -> Result<AnswerSelection<T>> {
    let first = epochs.first().ok_or_else(|| Error::MissingOption {
        question_id: String::new(),
        option: AnswerOption::A,
    })?;
    let question_id = first.question_id.clone();
    let mut flash_scores = Vec::with_capacity(epochs.len());
    for epoch in epochs {
        if epoch.question_id != question_id {
            return Err(Error::QuestionMismatch {
                detail: format!(
                    "epochs mix questions {question_id:?} and {:?}",
                    epoch.question_id
                ),
            });
        }
        let fv = features(epoch, standardize);
        flash_scores.push((epoch.option, model.score(&fv.values)?));
    }
    Ok(select(&aggregate(&question_id, &flash_scores)?))
}
