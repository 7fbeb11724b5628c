//! Command-line front end: generate synthetic sessions, train the
//! discriminant, run exams, and sweep noise levels.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 domain error,
//! 4 I/O error. Every command is deterministic given its arguments; the
//! only entropy source is `--seed`.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bciexam_core::exam::{load_exam, run_session};
use bciexam_core::lda::fit;
use bciexam_core::robustness::{noise_sweep, render_curve_svg, write_report_csv};
use bciexam_core::synthgen::{gen_session, gen_training_set, targets_from_answer_key};
use bciexam_core::{Error, LabeledDataset, LdaModel, Recording, Result, SbWeighting};
use clap::{Args, Parser, Subcommand};

use config::{parse_levels, RunConfig};

#[derive(Parser)]
#[command(
    name = "bciexam",
    version,
    about = "P300-speller exam evaluation toolkit: synthesize EEG sessions, train an LDA \
             classifier, run multiple-choice exams, and chart noise robustness"
)]
struct Cli {
    /// Random seed; the only entropy source of any command.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON config file with pipeline/synthesis overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic exam session recording plus a training set.
    Synth(SynthArgs),
    /// Fit the LDA discriminant on a training set.
    Train(TrainArgs),
    /// Evaluate a recorded session against an exam and grade it.
    ExamRun(ExamRunArgs),
    /// Re-run a session under graded noise and chart the accuracy curve.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Exam definition (JSON).
    #[arg(long)]
    exam: PathBuf,
    /// Where to write the session recording (JSON).
    #[arg(long)]
    out_recording: PathBuf,
    /// Where to write the labeled training set (JSON).
    #[arg(long)]
    out_training: PathBuf,
    /// Target epochs in the training set.
    #[arg(long)]
    n_target: Option<usize>,
    /// Non-target epochs in the training set.
    #[arg(long)]
    n_nontarget: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled training set (JSON), as written by `synth`.
    #[arg(long)]
    training: PathBuf,
    /// Where to write the fitted model (JSON).
    #[arg(long)]
    model_out: PathBuf,
    /// Shrinkage strength, relative to the mean within-class variance.
    #[arg(long)]
    lambda_rel: Option<f64>,
    /// Between-class scatter weighting: paper_unweighted or count_weighted.
    #[arg(long)]
    sb_weighting: Option<String>,
}

#[derive(Args)]
struct ExamRunArgs {
    #[arg(long)]
    exam: PathBuf,
    /// Fitted model (JSON), as written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Session recording (JSON).
    #[arg(long)]
    recording: PathBuf,
    /// Where to write the graded session result (JSON).
    #[arg(long)]
    result_out: PathBuf,
    /// Student identifier recorded in the result.
    #[arg(long)]
    student: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    exam: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    recording: PathBuf,
    /// Noise levels: `lo..hi`, `lo..hi:step`, or a comma list (percent).
    #[arg(long)]
    levels: String,
    /// Fresh-noise re-runs per level.
    #[arg(long, default_value_t = 5)]
    trials: u32,
    /// Where to write the level/accuracy table (CSV).
    #[arg(long)]
    csv: PathBuf,
    /// Where to write the accuracy curve (SVG).
    #[arg(long)]
    svg: PathBuf,
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::ConfigError { .. }
        | Error::InvalidBand { .. }
        | Error::SchemaError { .. }
        | Error::DuplicateQuestionId { .. } => 2,
        Error::Io { source, .. } => {
            if source.kind() == std::io::ErrorKind::NotFound {
                2
            } else {
                4
            }
        }
        _ => 3,
    }
}

/// Input files get a role-named existence check so a bad path fails as a
/// usage error ("exam not found: ..."), not as a generic I/O failure.
fn require_input(role: &str, path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::ConfigError {
            field: role.to_string(),
            detail: format!("{role} not found: {}", path.display()),
        })
    }
}

fn load_run_config(cli: &Cli) -> Result<RunConfig> {
    let mut run = RunConfig::default();
    if let Some(path) = &cli.config {
        require_input("config", path)?;
        run.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        run.seed = seed;
    }
    Ok(run)
}

fn cmd_synth(run: &RunConfig, args: &SynthArgs) -> Result<()> {
    require_input("exam", &args.exam)?;
    let exam = load_exam(&args.exam)?;
    let synth = run.synth();
    let pipeline = run.pipeline();

    let recording = gen_session(
        &exam,
        &targets_from_answer_key(&exam),
        &synth,
        run.window_seconds,
    )?;
    recording.save(&args.out_recording)?;

    let n_target = args.n_target.unwrap_or(run.train_targets);
    let n_nontarget = args.n_nontarget.unwrap_or(run.train_nontargets);
    let training = gen_training_set(&synth, &pipeline, n_target, n_nontarget)?;
    training.save(&args.out_training)?;

    println!(
        "synth: exam={} questions={} events={} samples={} training={}+{} -> {}, {}",
        exam.exam_id,
        exam.questions.len(),
        recording.events.len(),
        recording.n_samples(),
        n_target,
        n_nontarget,
        args.out_recording.display(),
        args.out_training.display()
    );
    Ok(())
}

fn cmd_train(run: &RunConfig, args: &TrainArgs) -> Result<()> {
    require_input("training set", &args.training)?;
    let dataset = LabeledDataset::load(&args.training)?;
    let lambda = args.lambda_rel.unwrap_or(run.lambda_rel);
    let weighting = match &args.sb_weighting {
        Some(s) => SbWeighting::parse(s).ok_or_else(|| Error::ConfigError {
            field: "sb_weighting".into(),
            detail: format!("expected paper_unweighted or count_weighted, got {s:?}"),
        })?,
        None => run.sb_weighting,
    };
    if lambda < 0.0 {
        return Err(Error::ConfigError {
            field: "lambda_rel".into(),
            detail: format!("shrinkage must be nonnegative, got {lambda}"),
        });
    }

    let model = fit(&dataset, lambda, weighting)?;
    model.save(&args.model_out)?;
    println!("train_acc={:.2}", model.training_accuracy(&dataset)?);
    println!(
        "train: vectors={} dim={} lambda_rel={} sb_weighting={} -> {}",
        dataset.n_samples(),
        dataset.feature_dim,
        lambda,
        weighting.as_str(),
        args.model_out.display()
    );
    Ok(())
}

fn cmd_exam_run(run: &RunConfig, args: &ExamRunArgs) -> Result<()> {
    require_input("exam", &args.exam)?;
    require_input("model", &args.model)?;
    require_input("recording", &args.recording)?;
    let exam = load_exam(&args.exam)?;
    let model = LdaModel::load(&args.model)?;
    let recording = Recording::load(&args.recording)?;
    let student = args.student.clone().unwrap_or_else(|| run.student_id.clone());

    let result = run_session(&exam, &model, &recording, &run.pipeline(), &student)?;
    result.save(&args.result_out)?;
    println!(
        "exam-run: exam={} student={} grade={:.2} correct={}/{} -> {}",
        result.exam_id,
        result.student_id,
        result.grade_percent,
        result.n_correct,
        exam.questions.len(),
        args.result_out.display()
    );
    Ok(())
}

fn cmd_sweep(run: &RunConfig, args: &SweepArgs) -> Result<()> {
    require_input("exam", &args.exam)?;
    require_input("model", &args.model)?;
    require_input("recording", &args.recording)?;
    let exam = load_exam(&args.exam)?;
    let model = LdaModel::load(&args.model)?;
    let recording = Recording::load(&args.recording)?;
    let levels = parse_levels(&args.levels)?;

    let report = noise_sweep(
        &model,
        &exam,
        std::slice::from_ref(&recording),
        &run.pipeline(),
        &levels,
        args.trials,
        run.seed,
    )?;
    write_report_csv(&report, &args.csv)?;
    render_curve_svg(&report, &args.svg)?;
    println!(
        "sweep: levels={} trials={} clean={:.2} floor={:.2} -> {}, {}",
        report.levels.len(),
        report.trials_per_level,
        report.clean_accuracy_pct,
        report.accuracy_pct.last().copied().unwrap_or(f64::NAN),
        args.csv.display(),
        args.svg.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match load_run_config(&cli) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    // Validate every module precondition up front so a bad band or window
    // fails before any file is written.
    let outcome = run.validate().and_then(|()| match &cli.command {
        Command::Synth(args) => cmd_synth(&run, args),
        Command::Train(args) => cmd_train(&run, args),
        Command::ExamRun(args) => cmd_exam_run(&run, args),
        Command::Sweep(args) => cmd_sweep(&run, args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
