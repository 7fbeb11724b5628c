//! Exam authoring, storage, session evaluation, and grading.
//!
//! Exams live as JSON documents; loading validates the full schema and
//! reports the exact field path of the first violation. Saving is canonical
//! (fixed key order, stable float formatting), so save -> load -> save is
//! byte-identical.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lda::LdaModel;
use crate::num::Real;
use crate::signal::{preprocess, AnswerOption, Epoch, PipelineConfig, Recording};
use crate::speller::{answer_question, AnswerSelection};

/// The four answer texts of one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionTexts {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    #[serde(rename = "D")]
    pub d: String,
}

impl OptionTexts {
    pub fn get(&self, option: AnswerOption) -> &str {
        match option {
            AnswerOption::A => &self.a,
            AnswerOption::B => &self.b,
            AnswerOption::C => &self.c,
            AnswerOption::D => &self.d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: String,
    pub stem: String,
    pub options: OptionTexts,
    pub answer: AnswerOption,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exam {
    pub exam_id: String,
    pub title: String,
    pub questions: Vec<Question>,
}

impl Exam {
    pub fn validate(&self) -> Result<()> {
        if self.questions.is_empty() {
            return Err(Error::SchemaError {
                path: "questions".into(),
                detail: "an exam needs at least one question".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for q in &self.questions {
            if !seen.insert(&q.question_id) {
                return Err(Error::DuplicateQuestionId {
                    question_id: q.question_id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn question(&self, question_id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.question_id == question_id)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("exam serializes");
        text.push('\n');
        text
    }
}

// -- schema walk ------------------------------------------------------------

fn expect_object<'v>(
    value: &'v Value,
    path: &str,
) -> Result<&'v serde_json::Map<String, Value>> {
    value.as_object().ok_or_else(|| Error::SchemaError {
        path: path.to_string(),
        detail: "expected a JSON object".into(),
    })
}

fn expect_string(map: &serde_json::Map<String, Value>, path: &str, key: &str) -> Result<String> {
    let full = if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    };
    match map.get(key) {
        None => Err(Error::SchemaError {
            path: full,
            detail: "missing field".into(),
        }),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(other) => Err(Error::SchemaError {
            path: full,
            detail: format!("expected a string, got {other}"),
        }),
    }
}

fn parse_exam_value(root: &Value) -> Result<Exam> {
    let obj = expect_object(root, "")?;
    let exam_id = expect_string(obj, "", "exam_id")?;
    let title = expect_string(obj, "", "title")?;
    let questions_value = obj.get("questions").ok_or_else(|| Error::SchemaError {
        path: "questions".into(),
        detail: "missing field".into(),
    })?;
    let questions_array = questions_value.as_array().ok_or_else(|| Error::SchemaError {
        path: "questions".into(),
        detail: "expected an array".into(),
    })?;

    let mut questions = Vec::with_capacity(questions_array.len());
    for (i, q_value) in questions_array.iter().enumerate() {
        let q_path = format!("questions[{i}]");
        let q_obj = expect_object(q_value, &q_path)?;
        let question_id = expect_string(q_obj, &q_path, "question_id")?;
        let stem = expect_string(q_obj, &q_path, "stem")?;

        let options_path = format!("{q_path}.options");
        let options_value = q_obj.get("options").ok_or_else(|| Error::SchemaError {
            path: options_path.clone(),
            detail: "missing field".into(),
        })?;
        let options_obj = expect_object(options_value, &options_path)?;
        let mut texts = Vec::with_capacity(4);
        for option in AnswerOption::ALL {
            let full = format!("{options_path}.{option}");
            let text = match options_obj.get(option.as_str()) {
                None => {
                    return Err(Error::SchemaError {
                        path: full,
                        detail: "missing field".into(),
                    })
                }
                Some(Value::String(s)) => s.clone(),
                Some(other) => {
                    return Err(Error::SchemaError {
                        path: full,
                        detail: format!("expected a string, got {other}"),
                    })
                }
            };
            if text.is_empty() {
                return Err(Error::SchemaError {
                    path: full,
                    detail: "option text must not be empty".into(),
                });
            }
            texts.push(text);
        }

        let answer_str = expect_string(q_obj, &q_path, "answer")?;
        let answer = AnswerOption::parse(&answer_str).ok_or_else(|| Error::SchemaError {
            path: format!("{q_path}.answer"),
            detail: format!("expected one of A, B, C, D; got {answer_str:?}"),
        })?;

        questions.push(Question {
            question_id,
            stem,
            options: OptionTexts {
                a: texts[0].clone(),
                b: texts[1].clone(),
                c: texts[2].clone(),
                d: texts[3].clone(),
            },
            answer,
        });
    }

    let exam = Exam {
        exam_id,
        title,
        questions,
    };
    exam.validate()?;
    Ok(exam)
}

/// Parse and validate an exam document, naming the offending field on any
/// schema violation.
pub fn exam_from_json(text: &str) -> Result<Exam> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::SchemaError {
        path: "exam".into(),
        detail: format!("invalid JSON: {e}"),
    })?;
    parse_exam_value(&root)
}

pub fn load_exam(path: &Path) -> Result<Exam> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    exam_from_json(&text)
}

pub fn save_exam(exam: &Exam, path: &Path) -> Result<()> {
    exam.validate()?;
    fs::write(path, exam.to_json()).map_err(|e| Error::io(path, e))
}

// -- exam store ---------------------------------------------------------

/// The exam database is a directory of JSON files keyed by exam id:
/// `<dir>/<exam_id>.json`.
pub fn store_exam(dir: &Path, exam: &Exam) -> Result<std::path::PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{}.json", exam.exam_id));
    save_exam(exam, &path)?;
    Ok(path)
}

/// Fetch one exam from the store by id.
pub fn fetch_exam(dir: &Path, exam_id: &str) -> Result<Exam> {
    load_exam(&dir.join(format!("{exam_id}.json")))
}

/// Exam ids present in the store, sorted.
pub fn list_exams(dir: &Path) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    ids.sort();
    Ok(ids)
}

// -- grading ------------------------------------------------------------

/// One student's pass over one exam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult<T> {
    pub exam_id: String,
    pub student_id: String,
    pub selections: Vec<AnswerSelection<T>>,
    pub grade_percent: f64,
    pub n_correct: usize,
}

impl<T: Real> SessionResult<T> {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("result serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::SchemaError {
            path: "session_result".into(),
            detail: e.to_string(),
        })
    }
}

/// Count selections matching the answer key. Selections must line up with
/// the exam's questions by id and order.
pub fn grade<T: Real>(
    exam: &Exam,
    selections: Vec<AnswerSelection<T>>,
    student_id: &str,
) -> Result<SessionResult<T>> {
    if selections.len() != exam.questions.len() {
        return Err(Error::QuestionMismatch {
            detail: format!(
                "{} selections for {} questions",
                selections.len(),
                exam.questions.len()
            ),
        });
    }
    let mut n_correct = 0usize;
    for (question, selection) in exam.questions.iter().zip(&selections) {
        if question.question_id != selection.question_id {
            return Err(Error::QuestionMismatch {
                detail: format!(
                    "expected question {:?}, selection is for {:?}",
                    question.question_id, selection.question_id
                ),
            });
        }
        if selection.selected == question.answer {
            n_correct += 1;
        }
    }
    Ok(SessionResult {
        exam_id: exam.exam_id.clone(),
        student_id: student_id.to_string(),
        selections,
        grade_percent: 100.0 * n_correct as f64 / exam.questions.len() as f64,
        n_correct,
    })
}

/// Group epochs by question id, preserving epoch order within a question.
/// Events naming questions outside the exam are a mismatch.
pub fn epochs_by_question<'e, T: Real>(
    exam: &Exam,
    epochs: &'e [Epoch<T>],
) -> Result<Vec<Vec<&'e Epoch<T>>>> {
    let index_of = |qid: &str| exam.questions.iter().position(|q| q.question_id == qid);
    let mut grouped: Vec<Vec<&Epoch<T>>> = vec![Vec::new(); exam.questions.len()];
    for epoch in epochs {
        match index_of(&epoch.question_id) {
            Some(i) => grouped[i].push(epoch),
            None => {
                return Err(Error::QuestionMismatch {
                    detail: format!(
                        "recording has epochs for question {:?}, which is not in exam {:?}",
                        epoch.question_id, exam.exam_id
                    ),
                })
            }
        }
    }
    Ok(grouped)
}

/// Full evaluation pass: preprocess -> segment -> answer each question ->
/// grade. Deterministic in its inputs.
pub fn run_session<T: Real>(
    exam: &Exam,
    model: &LdaModel<T>,
    recording: &Recording<T>,
    pipeline: &PipelineConfig<T>,
    student_id: &str,
) -> Result<SessionResult<T>> {
    exam.validate()?;
    let epochs = preprocess(recording, pipeline)?;
    let grouped = epochs_by_question(exam, &epochs)?;
    let mut selections = Vec::with_capacity(exam.questions.len());
    for (question, group) in exam.questions.iter().zip(&grouped) {
        if group.is_empty() {
            return Err(Error::MissingQuestionEpochs {
                question_id: question.question_id.clone(),
            });
        }
        let owned: Vec<Epoch<T>> = group.iter().map(|&e| e.clone()).collect();
        selections.push(answer_question(model, &owned, pipeline.standardize)?);
    }
    grade(exam, selections, student_id)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// A deterministic n-question exam whose answer key cycles A, B, C, D.
    pub fn sample_exam(n_questions: usize) -> Exam {
        let questions = (0..n_questions)
            .map(|i| Question {
                question_id: format!("q{:02}", i + 1),
                stem: format!("Question {} of the sample exam", i + 1),
                options: OptionTexts {
                    a: "first".into(),
                    b: "second".into(),
                    c: "third".into(),
                    d: "fourth".into(),
                },
                answer: AnswerOption::from_index(i % 4),
            })
            .collect();
        Exam {
            exam_id: "sample".into(),
            title: "Sample exam".into(),
            questions,
        }
    }
}
