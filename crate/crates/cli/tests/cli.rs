//! CLI behavior: exit codes, error naming, output shapes, config
//! precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bciexam_core::exam::{save_exam, Exam, OptionTexts, Question};
use bciexam_core::signal::AnswerOption;
use bciexam_core::LabeledDataset;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bciexam"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn demo_exam(n: usize) -> Exam {
    Exam {
        exam_id: "cli-test".into(),
        title: "CLI test exam".into(),
        questions: (0..n)
            .map(|i| Question {
                question_id: format!("q{i}"),
                stem: format!("Question {i}"),
                options: OptionTexts {
                    a: "a".into(),
                    b: "b".into(),
                    c: "c".into(),
                    d: "d".into(),
                },
                answer: AnswerOption::from_index((i + 1) % 4),
            })
            .collect(),
    }
}

/// Synth + train once, leaving exam/rec/train/model files in the dir.
fn prepared_workspace(n_questions: usize) -> TempDir {
    let dir = TempDir::new().unwrap();
    save_exam(&demo_exam(n_questions), &dir.path().join("exam.json")).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--exam",
            "exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
            "--n-target",
            "20",
            "--n-nontarget",
            "60",
            "--seed",
            "3",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let out = run_in(
        dir.path(),
        &["train", "--training", "train.json", "--model-out", "model.json"],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    dir
}

#[test]
fn synth_writes_both_outputs() {
    let dir = TempDir::new().unwrap();
    save_exam(&demo_exam(2), &dir.path().join("exam.json")).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--exam",
            "exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
            "--n-target",
            "4",
            "--n-nontarget",
            "8",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    assert!(dir.path().join("rec.json").is_file());
    assert!(dir.path().join("train.json").is_file());
    assert!(stdout_of(&out).starts_with("synth:"));
}

#[test]
fn missing_exam_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--exam",
            "no-such-exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("exam not found"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn bad_band_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    save_exam(&demo_exam(1), &dir.path().join("exam.json")).unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"filter_low_hz": 40.0, "filter_high_hz": 30.0}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--config",
            "cfg.json",
            "--exam",
            "exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    let err = stderr_of(&out);
    assert!(err.contains("low_cut_hz"), "stderr: {err}");
    assert!(!dir.path().join("rec.json").exists(), "no partial outputs");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    save_exam(&demo_exam(1), &dir.path().join("exam.json")).unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"filtre_low_hz": 1.0}"#).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--config",
            "cfg.json",
            "--exam",
            "exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("filtre_low_hz"));
}

#[test]
fn train_reports_training_accuracy() {
    let dir = prepared_workspace(2);
    assert!(dir.path().join("model.json").is_file());
    let out = run_in(
        dir.path(),
        &["train", "--training", "train.json", "--model-out", "model2.json"],
    );
    assert_eq!(exit_code(&out), 0);
    let stdout = stdout_of(&out);
    let acc_line = stdout
        .lines()
        .find(|l| l.starts_with("train_acc="))
        .expect("train_acc line");
    let acc: f64 = acc_line.trim_start_matches("train_acc=").parse().unwrap();
    assert!((0.0..=100.0).contains(&acc));

    // The printed accuracy is recomputable from the model and the data.
    let model = bciexam_core::LdaModel::load(&dir.path().join("model2.json")).unwrap();
    let training = LabeledDataset::load(&dir.path().join("train.json")).unwrap();
    let recomputed = model.training_accuracy(&training).unwrap();
    assert_eq!(acc, format!("{recomputed:.2}").parse::<f64>().unwrap());
}

#[test]
fn degenerate_training_data_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    // Identical class means: fit must refuse.
    let ds = LabeledDataset::new(
        vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ],
        vec![0, 0, 1, 1],
        vec!["target".into(), "non-target".into()],
    )
    .unwrap();
    ds.save(&dir.path().join("degenerate.json")).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "train",
            "--training",
            "degenerate.json",
            "--model-out",
            "model.json",
        ],
    );
    assert_eq!(exit_code(&out), 3);
    assert!(
        stderr_of(&out).contains("DegenerateClasses"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn exam_run_grades_the_synthetic_session() {
    let dir = prepared_workspace(4);
    let out = run_in(
        dir.path(),
        &[
            "exam-run",
            "--exam",
            "exam.json",
            "--model",
            "model.json",
            "--recording",
            "rec.json",
            "--result-out",
            "result.json",
            "--student",
            "cli-student",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap())
            .unwrap();
    assert_eq!(result["grade_percent"], 100.0);
    assert_eq!(result["student_id"], "cli-student");
    assert_eq!(result["selections"].as_array().unwrap().len(), 4);
}

#[test]
fn mismatched_recording_is_a_domain_error() {
    let dir = prepared_workspace(2);
    // A recording generated for a different exam.
    let mut other = demo_exam(2);
    other.exam_id = "other".into();
    for q in &mut other.questions {
        q.question_id = format!("other-{}", q.question_id);
    }
    save_exam(&other, &dir.path().join("other-exam.json")).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--exam",
            "other-exam.json",
            "--out-recording",
            "other-rec.json",
            "--out-training",
            "unused-train.json",
            "--n-target",
            "4",
            "--n-nontarget",
            "8",
        ],
    );
    assert_eq!(exit_code(&out), 0);
    let out = run_in(
        dir.path(),
        &[
            "exam-run",
            "--exam",
            "exam.json",
            "--model",
            "model.json",
            "--recording",
            "other-rec.json",
            "--result-out",
            "result.json",
        ],
    );
    assert_eq!(exit_code(&out), 3);
    assert!(
        stderr_of(&out).contains("QuestionMismatch"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn sweep_full_range_writes_101_rows() {
    let dir = prepared_workspace(2);
    let out = run_in(
        dir.path(),
        &[
            "sweep",
            "--exam",
            "exam.json",
            "--model",
            "model.json",
            "--recording",
            "rec.json",
            "--levels",
            "0..100",
            "--trials",
            "5",
            "--csv",
            "sweep.csv",
            "--svg",
            "sweep.svg",
            "--seed",
            "5",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 102, "header + 101 rows");
    let svg = fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn sweep_level_list_writes_one_row_each() {
    let dir = prepared_workspace(2);
    let out = run_in(
        dir.path(),
        &[
            "sweep",
            "--exam",
            "exam.json",
            "--model",
            "model.json",
            "--recording",
            "rec.json",
            "--levels",
            "0,50,100",
            "--trials",
            "2",
            "--csv",
            "sweep.csv",
            "--svg",
            "sweep.svg",
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("noise_pct,accuracy_pct\n0,"));
}

#[test]
fn bad_levels_spec_is_usage_error() {
    let dir = prepared_workspace(2);
    for levels in ["100..0", "0..200", "abc", "5,5"] {
        let out = run_in(
            dir.path(),
            &[
                "sweep",
                "--exam",
                "exam.json",
                "--model",
                "model.json",
                "--recording",
                "rec.json",
                "--levels",
                levels,
                "--csv",
                "sweep.csv",
                "--svg",
                "sweep.svg",
            ],
        );
        assert_eq!(exit_code(&out), 2, "levels {levels:?}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let make = |dir: &Path, args: &[&str]| -> Vec<u8> {
        save_exam(&demo_exam(1), &dir.join("exam.json")).unwrap();
        let mut full = vec![
            "synth",
            "--exam",
            "exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
            "--n-target",
            "4",
            "--n-nontarget",
            "8",
        ];
        full.extend_from_slice(args);
        let out = run_in(dir, &full);
        assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
        fs::read(dir.join("rec.json")).unwrap()
    };

    // File sets the seed: equivalent to passing it as a flag.
    let dir_a = TempDir::new().unwrap();
    fs::write(dir_a.path().join("cfg.json"), r#"{"seed": 5}"#).unwrap();
    let with_file = make(dir_a.path(), &["--config", "cfg.json"]);
    let dir_b = TempDir::new().unwrap();
    let with_flag = make(dir_b.path(), &["--seed", "5"]);
    assert_eq!(with_file, with_flag);

    // Flag beats file.
    let dir_c = TempDir::new().unwrap();
    fs::write(dir_c.path().join("cfg.json"), r#"{"seed": 5}"#).unwrap();
    let overridden = make(dir_c.path(), &["--config", "cfg.json", "--seed", "9"]);
    let dir_d = TempDir::new().unwrap();
    let direct = make(dir_d.path(), &["--seed", "9"]);
    assert_eq!(overridden, direct);
    assert_ne!(with_file, direct, "seeds 5 and 9 differ");
}

#[test]
fn malformed_exam_json_names_the_path() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("exam.json"),
        r#"{"exam_id": "x", "title": "t", "questions": [
            {"question_id": "q1", "stem": "s",
             "options": {"A": "a", "B": "b", "D": "d"}, "answer": "A"}
        ]}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--exam",
            "exam.json",
            "--out-recording",
            "rec.json",
            "--out-training",
            "train.json",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("questions[0].options.C"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn training_file_not_found_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["train", "--training", "absent.json", "--model-out", "m.json"],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("training set not found"));
}
