//! Real-time proactive anomaly detection for streaming time series.
//!
//! A tiny LSTM is retrained on the last few points and forecasts the next
//! one. The average absolute relative error of recent forecasts is compared
//! against a three-sigma threshold over every error seen so far. When the
//! error breaks the threshold the model is retrained once more on the
//! preceding window; only if that still fails is the point reported.
//!
//! ```no_run
//! use repad::{Detector, DetectorConfig, data_io};
//!
//! let series = data_io::read_series("cpu.csv")?;
//! let mut detector = Detector::new(DetectorConfig::default())?;
//! for obs in &series {
//!     let record = detector.step(obs.value, obs.timestamp)?;
//!     if record.verdict == repad::Verdict::Anomaly {
//!         println!("anomaly at {}", record.timestamp);
//!     }
//! }
//! # Ok::<(), repad::Error>(())
//! ```

pub mod cli;
pub mod data_io;
pub mod detector;
pub mod error;
pub mod evaluation;
pub mod lstm;
pub mod metrics;

pub use data_io::{LabelSet, Observation, RunSummary};
pub use detector::{
    phase_of, DetectionRecord, Detector, DetectorConfig, Forecaster, LstmForecaster, Phase,
    TrainingStats, Verdict,
};
pub use error::{Error, Result};
pub use evaluation::{EvalWindow, EvaluationSummary, LeadStatus, LeadTimeResult};
pub use lstm::{ForecastScaling, LstmConfig, LstmModel, TrainOutcome};
pub use metrics::{aare, threshold, AareHistory, AareValue};
