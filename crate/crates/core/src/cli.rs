//! `repad detect` replays a series through the detector; `repad evaluate`
//! scores a finished report against labels.
//!
//! Exit codes: 0 success, 1 data or I/O error, 2 usage or configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data_io::{self, ReportWriter, RunSummary};
use crate::detector::{Detector, DetectorConfig, Verdict};
use crate::error::{Error, Result};
use crate::evaluation::{self, EvalWindow, EvaluationSummary, LeadStatus};
use crate::lstm::{ForecastScaling, LstmConfig};
use crate::metrics::DEFAULT_EPSILON;

#[derive(Debug, Parser)]
#[command(name = "repad", version, about = "Streaming anomaly detection with on-line LSTM forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a series through the detector and write a per-point report.
    Detect(DetectArgs),
    /// Score a report against labeled anomalies.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scaling {
    /// Z-score each window by its own statistics.
    Window,
    /// Z-score by the statistics of the model's training window.
    Training,
}

impl From<Scaling> for ForecastScaling {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::Window => ForecastScaling::Window,
            Scaling::Training => ForecastScaling::Training,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Input series (CSV with timestamp and value columns).
    #[arg(long)]
    pub input: PathBuf,
    /// Per-point report destination (CSV).
    #[arg(long)]
    pub report: PathBuf,
    /// Run summary destination (JSON).
    #[arg(long)]
    pub summary: PathBuf,
    /// Look-back: points per training window.
    #[arg(short = 'b', long = "lookback", default_value_t = 3)]
    pub b: usize,
    /// Predict-forward horizon. Only 1 is supported.
    #[arg(short = 'f', long = "horizon", default_value_t = 1)]
    pub f: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Floor for the relative-error denominator.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10)]
    pub hidden_units: usize,
    #[arg(long, default_value_t = 0.15)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub min_epochs: usize,
    #[arg(long, default_value_t = 50)]
    pub max_epochs: usize,
    /// Permit --max-epochs above 50.
    #[arg(long)]
    pub allow_extended_epochs: bool,
    #[arg(long, default_value_t = 1e-4)]
    pub early_stop_delta: f64,
    #[arg(long, default_value_t = 3)]
    pub early_stop_patience: usize,
    /// Statistics used to scale each forecast window.
    #[arg(long, value_enum, default_value_t = Scaling::Window)]
    pub forecast_scaling: Scaling,
    /// Suppress per-anomaly notifications.
    #[arg(long)]
    pub quiet: bool,
}

impl DetectArgs {
    pub fn detector_config(&self) -> DetectorConfig {
        DetectorConfig {
            lookback: self.b,
            horizon: self.f,
            epsilon: self.epsilon,
            lstm: LstmConfig {
                hidden_units: self.hidden_units,
                learning_rate: self.learning_rate,
                max_epochs: self.max_epochs,
                min_epochs: self.min_epochs,
                early_stop_delta: self.early_stop_delta,
                early_stop_patience: self.early_stop_patience,
                seed: self.seed,
                allow_extended_epochs: self.allow_extended_epochs,
                forecast_scaling: self.forecast_scaling.into(),
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Report written by `repad detect`.
    #[arg(long)]
    pub report: PathBuf,
    /// Label file (JSON map keyed by dataset, or a plain list).
    #[arg(long)]
    pub labels: PathBuf,
    /// Dataset key inside the label map.
    #[arg(long, default_value = "")]
    pub dataset_key: String,
    #[arg(long, default_value_t = 1440)]
    pub pre_window_minutes: i64,
    #[arg(long, default_value_t = 60)]
    pub grace_minutes: i64,
    /// Evaluation summary destination (JSON).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Look-back of the run; inferred from the report when omitted.
    #[arg(short = 'b', long = "lookback")]
    pub b: Option<usize>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Argument(_) => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Detect(args) => run_detect(&args, out).map(|_| ()),
        Command::Evaluate(args) => run_evaluate(&args, out).map(|_| ()),
    }
}

fn emit(out: &mut impl Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(line)
        .and_then(|_| out.write_all(b"\n"))
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(Path::new("<stdout>"), e))
}

/// Streams the input through one detector. The report is written row by row;
/// the per-point timing covers only the detector step.
pub fn run_detect(args: &DetectArgs, out: &mut impl Write) -> Result<RunSummary> {
    let config = args.detector_config();
    config.validate()?;
    let series = data_io::read_series(&args.input)?;
    if let Some(c) = data_io::cadence(&series) {
        if c.irregular_gaps > 0 {
            eprintln!(
                "repad: warning: {} of {} gaps differ from the modal interval of {}s",
                c.irregular_gaps,
                series.len() - 1,
                c.modal_interval.num_seconds()
            );
        }
    }

    let mut detector = Detector::new(config.clone())?;
    let mut report = ReportWriter::create(&args.report)?;
    let mut records = Vec::with_capacity(series.len());
    for obs in &series {
        let record = detector.step(obs.value, obs.timestamp)?;
        report.write(&record)?;
        if record.verdict == Verdict::Anomaly && !args.quiet {
            emit(
                out,
                format_args!(
                    "anomaly index={} timestamp={} value={}",
                    record.index,
                    data_io::format_timestamp(&record.timestamp),
                    record.value
                ),
            )?;
        }
        records.push(record);
    }
    report.finish()?;

    let mut summary = RunSummary::from_records(&records, &config)?;
    summary.training = Some(detector.forecaster().stats());
    data_io::write_summary(&summary, &args.summary)?;
    Ok(summary)
}

fn status_label(s: LeadStatus) -> &'static str {
    match s {
        LeadStatus::Proactive => "proactive",
        LeadStatus::OnTime => "on time",
        LeadStatus::Late => "late",
        LeadStatus::Missed => "missed",
    }
}

/// Scores an existing report. Never re-runs detection.
pub fn run_evaluate(args: &EvaluateArgs, out: &mut impl Write) -> Result<EvaluationSummary> {
    let window = EvalWindow {
        pre_window_minutes: args.pre_window_minutes,
        grace_minutes: args.grace_minutes,
    };
    window.validate()?;
    let records = data_io::read_report(&args.report)?;
    let labels = data_io::read_labels(&args.labels, &args.dataset_key)?;
    let b = match args.b.or_else(|| evaluation::infer_lookback(&records)) {
        Some(b) => b,
        None => {
            return Err(Error::Argument(
                "cannot infer the look-back from this report; pass --lookback".into(),
            ))
        }
    };
    let summary = evaluation::evaluate(&records, &labels, window, b)?;

    emit(out, format_args!("dataset: {}", summary.dataset_key))?;
    emit(
        out,
        format_args!(
            "window: {} min before, {} min after each label",
            window.pre_window_minutes, window.grace_minutes
        ),
    )?;
    for (k, r) in summary.labels.iter().enumerate() {
        let ts = data_io::format_timestamp(&r.label_timestamp);
        match (r.lead_time_minutes, r.first_report_timestamp) {
            (Some(lead), Some(first)) => emit(
                out,
                format_args!(
                    "label {}: {ts}  {}  first report {}  lead {lead} min",
                    k + 1,
                    status_label(r.status),
                    data_io::format_timestamp(&first)
                ),
            )?,
            _ => emit(out, format_args!("label {}: {ts}  {}", k + 1, status_label(r.status)))?,
        }
    }
    for s in &summary.sign_spans {
        emit(
            out,
            format_args!(
                "sign {}: {} false warnings since the preceding label",
                data_io::format_timestamp(&s.sign_timestamp),
                s.false_warnings
            ),
        )?;
    }
    emit(
        out,
        format_args!(
            "anomaly reports: {}  false warnings: {}",
            summary.anomaly_count, summary.false_warning_count
        ),
    )?;
    match summary.retraining_ratio {
        Some(r) => emit(
            out,
            format_args!(
                "retraining: {} points, ratio {:.2}%",
                summary.retrain_count,
                100.0 * r
            ),
        )?,
        None => emit(out, format_args!("retraining: {} points", summary.retrain_count))?,
    }
    emit(
        out,
        format_args!(
            "detection time: avg {:.6} s, std {:.6} s",
            summary.avg_detection_time_s, summary.std_detection_time_s
        ),
    )?;

    if let Some(path) = &args.summary {
        data_io::write_json(&summary, path)?;
    }
    Ok(summary)
}
