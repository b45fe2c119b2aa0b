//! Scoring a finished detection run against labeled anomaly instants.
//!
//! A label at `T` owns the evaluation window `[T - pre_window, T + grace]`.
//! Its lead time is measured from the earliest anomaly report inside that
//! window. Reports outside every window are false warnings.

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::data_io::LabelSet;
use crate::detector::{DetectionRecord, Verdict};
use crate::error::{Error, Result};
use crate::metrics::mean_and_std;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalWindow {
    pub pre_window_minutes: i64,
    pub grace_minutes: i64,
}

impl Default for EvalWindow {
    fn default() -> Self {
        Self {
            pre_window_minutes: 1440,
            grace_minutes: 60,
        }
    }
}

impl EvalWindow {
    pub fn validate(&self) -> Result<()> {
        if self.pre_window_minutes <= 0 || self.grace_minutes < 0 {
            return Err(Error::Argument(format!(
                "pre-window must be positive and grace non-negative (got {} and {})",
                self.pre_window_minutes, self.grace_minutes
            )));
        }
        Ok(())
    }

    fn contains(&self, label: NaiveDateTime, at: NaiveDateTime) -> bool {
        at >= label - Duration::minutes(self.pre_window_minutes)
            && at <= label + Duration::minutes(self.grace_minutes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeadStatus {
    Proactive,
    OnTime,
    Late,
    Missed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadTimeResult {
    pub label_timestamp: NaiveDateTime,
    pub first_report_index: Option<usize>,
    pub first_report_timestamp: Option<NaiveDateTime>,
    /// Minutes from the first report to the label; positive is early.
    pub lead_time_minutes: Option<f64>,
    pub status: LeadStatus,
}

fn check_ordered(records: &[DetectionRecord]) -> Result<()> {
    for w in records.windows(2) {
        if w[1].index <= w[0].index || w[1].timestamp < w[0].timestamp {
            return Err(Error::Ordering(format!(
                "record {} ({}) follows record {} ({})",
                w[1].index, w[1].timestamp, w[0].index, w[0].timestamp
            )));
        }
    }
    Ok(())
}

fn anomalies(records: &[DetectionRecord]) -> impl Iterator<Item = &DetectionRecord> {
    records.iter().filter(|r| r.verdict == Verdict::Anomaly)
}

pub fn lead_time(
    records: &[DetectionRecord],
    labels: &[NaiveDateTime],
    window: EvalWindow,
) -> Result<Vec<LeadTimeResult>> {
    window.validate()?;
    check_ordered(records)?;
    Ok(labels
        .iter()
        .map(|&label| {
            let first = anomalies(records).find(|r| window.contains(label, r.timestamp));
            match first {
                Some(r) => {
                    let lead = (label - r.timestamp).num_seconds() as f64 / 60.0;
                    let status = if lead > 0.0 {
                        LeadStatus::Proactive
                    } else if lead == 0.0 {
                        LeadStatus::OnTime
                    } else {
                        LeadStatus::Late
                    };
                    LeadTimeResult {
                        label_timestamp: label,
                        first_report_index: Some(r.index),
                        first_report_timestamp: Some(r.timestamp),
                        lead_time_minutes: Some(lead),
                        status,
                    }
                }
                None => LeadTimeResult {
                    label_timestamp: label,
                    first_report_index: None,
                    first_report_timestamp: None,
                    lead_time_minutes: None,
                    status: LeadStatus::Missed,
                },
            }
        })
        .collect())
}

/// Assigns each anomaly report to the label whose window holds it, preferring
/// the nearest label and then the earlier one. `None` marks a false warning.
pub fn attribute(
    records: &[DetectionRecord],
    labels: &[NaiveDateTime],
    window: EvalWindow,
) -> Result<Vec<(usize, Option<usize>)>> {
    window.validate()?;
    check_ordered(records)?;
    Ok(anomalies(records)
        .map(|r| {
            let owner = labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| window.contains(l, r.timestamp))
                .min_by_key(|(k, &l)| ((l - r.timestamp).num_seconds().abs(), *k))
                .map(|(k, _)| k);
            (r.index, owner)
        })
        .collect())
}

pub fn false_warnings(
    records: &[DetectionRecord],
    labels: &[NaiveDateTime],
    window: EvalWindow,
) -> Result<usize> {
    Ok(attribute(records, labels, window)?
        .iter()
        .filter(|(_, owner)| owner.is_none())
        .count())
}

/// False warnings strictly between `from` and `to`.
pub fn false_warnings_between(
    records: &[DetectionRecord],
    labels: &[NaiveDateTime],
    from: NaiveDateTime,
    to: NaiveDateTime,
    window: EvalWindow,
) -> Result<usize> {
    window.validate()?;
    check_ordered(records)?;
    Ok(anomalies(records)
        .filter(|r| r.timestamp > from && r.timestamp < to)
        .filter(|r| !labels.iter().any(|&l| window.contains(l, r.timestamp)))
        .count())
}

pub fn retraining_ratio(records: &[DetectionRecord], b: usize) -> Result<f64> {
    let eligible = records.len().checked_sub(2 * b - 1).filter(|n| *n > 0).ok_or_else(|| {
        Error::State(format!(
            "{} points never reach the first AARE at t = {}",
            records.len(),
            2 * b - 1
        ))
    })?;
    Ok(records.iter().filter(|r| r.retrained).count() as f64 / eligible as f64)
}

/// Mean and population standard deviation of per-point decision time, seconds.
pub fn timing_stats(records: &[DetectionRecord]) -> Result<(f64, f64)> {
    let times: Vec<f64> = records.iter().map(|r| r.decision_time).collect();
    mean_and_std(&times).ok_or_else(|| Error::State("no records to time".into()))
}

/// Look-back recovered from a report: the first `AareBootstrap` row sits at
/// `t = 2b - 1`.
pub fn infer_lookback(records: &[DetectionRecord]) -> Option<usize> {
    records
        .iter()
        .find(|r| r.phase == crate::Phase::AareBootstrap)
        .map(|r| (r.index + 1) / 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignSpan {
    pub sign_timestamp: NaiveDateTime,
    /// Latest labeled anomaly before the sign, if any.
    pub preceding_label: Option<NaiveDateTime>,
    pub false_warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub dataset_key: String,
    pub window: EvalWindow,
    pub total_points: usize,
    pub labels: Vec<LeadTimeResult>,
    pub anomaly_count: usize,
    pub false_warning_count: usize,
    pub sign_spans: Vec<SignSpan>,
    pub retrain_count: usize,
    pub retraining_ratio: Option<f64>,
    pub avg_detection_time_s: f64,
    pub std_detection_time_s: f64,
}

pub fn evaluate(
    records: &[DetectionRecord],
    labels: &LabelSet,
    window: EvalWindow,
    lookback: usize,
) -> Result<EvaluationSummary> {
    let lead = lead_time(records, &labels.anomalies, window)?;
    let false_warning_count = false_warnings(records, &labels.anomalies, window)?;
    let mut sign_spans = Vec::with_capacity(labels.signs.len());
    for &sign in &labels.signs {
        let preceding = labels.anomalies.iter().copied().filter(|&l| l < sign).max();
        let from = preceding.unwrap_or(NaiveDateTime::MIN);
        sign_spans.push(SignSpan {
            sign_timestamp: sign,
            preceding_label: preceding,
            false_warnings: false_warnings_between(records, &labels.anomalies, from, sign, window)?,
        });
    }
    let (avg, std) = timing_stats(records)?;
    Ok(EvaluationSummary {
        dataset_key: labels.dataset_key.clone(),
        window,
        total_points: records.len(),
        labels: lead,
        anomaly_count: anomalies(records).count(),
        false_warning_count,
        sign_spans,
        retrain_count: records.iter().filter(|r| r.retrained).count(),
        retraining_ratio: retraining_ratio(records, lookback).ok(),
        avg_detection_time_s: avg,
        std_detection_time_s: std,
    })
}
