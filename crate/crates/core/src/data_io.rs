//! Series and label ingestion, per-point reports, and run summaries.
//!
//! Series files are comma-separated with a header. The columns named
//! `timestamp` and `value` are used when present, otherwise the first two
//! columns. Timestamps are `YYYY-MM-DD HH:MM:SS` with optional fractional
//! seconds, or `YYYY-MM-DD HH:MM`; a `T` separator is also accepted.
//!
//! Label files are JSON, either a plain array of timestamps or an object keyed
//! by dataset path (the NAB `combined_labels.json` layout). A keyed entry may
//! also be an object `{"anomalies": [...], "signs": [...]}`.
//!
//! Reports have the header given by [`REPORT_HEADER`]. Undefined fields are
//! left empty, floats are written in shortest round-trip form, and booleans
//! as `true`/`false`.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{Duration, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::detector::{DetectionRecord, DetectorConfig, TrainingStats};
use crate::error::{Error, Result};
use crate::evaluation;
use crate::lstm::ForecastScaling;

pub const REPORT_HEADER: [&str; 10] = [
    "index",
    "timestamp",
    "value",
    "predicted",
    "aare",
    "thd",
    "phase",
    "verdict",
    "retrained",
    "decision_time_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub timestamp: NaiveDateTime,
    pub value: f64,
}

const TIMESTAMP_FORMATS: [&str; 4] = [
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M",
    "%Y-%m-%dT%H:%M",
];

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

/// `YYYY-MM-DD HH:MM:SS`, with nanoseconds appended only when non-zero.
pub fn format_timestamp(ts: &NaiveDateTime) -> String {
    if ts.nanosecond() == 0 {
        ts.format("%Y-%m-%d %H:%M:%S").to_string()
    } else {
        ts.format("%Y-%m-%d %H:%M:%S%.9f").to_string()
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Data {
            line,
            message: format!("{other:?}"),
        },
    }
}

pub fn read_series(path: impl AsRef<Path>) -> Result<Vec<Observation>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);

    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.is_empty() {
        return Err(Error::data_at(1, "missing header"));
    }
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (ts_col, value_col) = match (find("timestamp"), find("value")) {
        (Some(t), Some(v)) => (t, v),
        _ if headers.len() >= 2 => (0, 1),
        _ => {
            return Err(Error::data_at(
                1,
                "header must name a timestamp and a value column",
            ))
        }
    };

    let mut out = Vec::new();
    let mut previous: Option<NaiveDateTime> = None;
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(out.len() + 2, |p| p.line() as usize);
        let field = |col: usize| {
            row.get(col)
                .ok_or_else(|| Error::data_at(line, format!("missing column {}", col + 1)))
        };
        let raw_ts = field(ts_col)?;
        let timestamp = parse_timestamp(raw_ts)
            .ok_or_else(|| Error::data_at(line, format!("unparsable timestamp '{raw_ts}'")))?;
        let raw_value = field(value_col)?;
        let value: f64 = raw_value
            .parse()
            .map_err(|_| Error::data_at(line, format!("unparsable value '{raw_value}'")))?;
        if !value.is_finite() {
            return Err(Error::data_at(line, format!("non-finite value '{raw_value}'")));
        }
        if previous.is_some_and(|p| timestamp < p) {
            return Err(Error::data_at(line, format!("timestamp {raw_ts} goes backwards")));
        }
        previous = Some(timestamp);
        out.push(Observation { timestamp, value });
    }

    if out.is_empty() {
        return Err(Error::data(format!("{} holds no observations", path.display())));
    }
    Ok(out)
}

pub fn write_series(path: impl AsRef<Path>, series: &[Observation]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(create(path)?);
    let wrap = |e| csv_error(path, e);
    w.write_record(["timestamp", "value"]).map_err(wrap)?;
    for o in series {
        w.write_record([format_timestamp(&o.timestamp), o.value.to_string()])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Sampling cadence of a series: the most common gap and how many gaps differ
/// from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cadence {
    pub modal_interval: Duration,
    pub irregular_gaps: usize,
}

pub fn cadence(series: &[Observation]) -> Option<Cadence> {
    let mut counts: HashMap<i64, usize> = HashMap::new();
    for w in series.windows(2) {
        *counts
            .entry((w[1].timestamp - w[0].timestamp).num_seconds())
            .or_default() += 1;
    }
    let (&modal, &hits) = counts
        .iter()
        .max_by_key(|(gap, n)| (**n, std::cmp::Reverse(**gap)))?;
    Some(Cadence {
        modal_interval: Duration::seconds(modal),
        irregular_gaps: series.len() - 1 - hits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelSet {
    pub dataset_key: String,
    pub anomalies: Vec<NaiveDateTime>,
    #[serde(default)]
    pub signs: Vec<NaiveDateTime>,
}

fn parse_label_list(value: &Value, what: &str) -> Result<Vec<NaiveDateTime>> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::data(format!("{what} must be a list of timestamps")))?;
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let s = item
            .as_str()
            .ok_or_else(|| Error::data(format!("{what}: expected a timestamp string, got {item}")))?;
        let ts = parse_timestamp(s)
            .ok_or_else(|| Error::data(format!("{what}: malformed timestamp '{s}'")))?;
        if out.last().is_some_and(|last| ts <= *last) {
            return Err(Error::data(format!("{what}: timestamps not strictly increasing at '{s}'")));
        }
        out.push(ts);
    }
    Ok(out)
}

fn parse_label_entry(key: &str, value: &Value) -> Result<LabelSet> {
    match value {
        Value::Object(map) => {
            let anomalies = map
                .get("anomalies")
                .ok_or_else(|| Error::data(format!("{key}: entry lacks an 'anomalies' list")))?;
            let signs = match map.get("signs") {
                Some(v) => parse_label_list(v, key)?,
                None => Vec::new(),
            };
            Ok(LabelSet {
                dataset_key: key.to_string(),
                anomalies: parse_label_list(anomalies, key)?,
                signs,
            })
        }
        other => Ok(LabelSet {
            dataset_key: key.to_string(),
            anomalies: parse_label_list(other, key)?,
            signs: Vec::new(),
        }),
    }
}

/// Looks up a dataset's labels.
///
/// In map mode `dataset_key` matches an entry exactly, or by its trailing path
/// components (`machine_temperature_system_failure.csv` finds
/// `realKnownCause/machine_temperature_system_failure.csv`), or by file stem.
/// In plain-list mode the whole list is returned and the key is only recorded.
pub fn read_labels(path: impl AsRef<Path>, dataset_key: &str) -> Result<LabelSet> {
    let path = path.as_ref();
    let root: Value = serde_json::from_reader(std::io::BufReader::new(open(path)?))
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;

    match &root {
        Value::Array(_) => parse_label_entry(dataset_key, &root),
        Value::Object(map) => {
            if let Some(v) = map.get(dataset_key) {
                return parse_label_entry(dataset_key, v);
            }
            let stem = |k: &str| {
                let file = k.rsplit('/').next().unwrap_or(k);
                file.strip_suffix(".csv").unwrap_or(file).to_string()
            };
            let wanted = stem(dataset_key);
            let hits: Vec<_> = map
                .iter()
                .filter(|(k, _)| k.ends_with(&format!("/{dataset_key}")) || stem(k) == wanted)
                .collect();
            match hits.as_slice() {
                [(k, v)] => parse_label_entry(k, v),
                [] => Err(Error::Lookup(format!(
                    "no labels for '{dataset_key}' in {}",
                    path.display()
                ))),
                _ => Err(Error::Lookup(format!(
                    "'{dataset_key}' matches {} label entries in {}",
                    hits.len(),
                    path.display()
                ))),
            }
        }
        _ => Err(Error::data(format!(
            "{}: expected a JSON list or object",
            path.display()
        ))),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn report_row(r: &DetectionRecord) -> [String; 10] {
    [
        r.index.to_string(),
        format_timestamp(&r.timestamp),
        r.value.to_string(),
        opt(r.predicted),
        opt(r.aare),
        opt(r.threshold),
        r.phase.to_string(),
        r.verdict.to_string(),
        r.retrained.to_string(),
        r.decision_time.to_string(),
    ]
}

/// Writes report rows as they are produced, flushing after each.
pub struct ReportWriter {
    path: std::path::PathBuf,
    inner: csv::Writer<File>,
}

impl ReportWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut inner = csv::Writer::from_writer(create(&path)?);
        inner
            .write_record(REPORT_HEADER)
            .map_err(|e| csv_error(&path, e))?;
        Ok(Self { path, inner })
    }

    pub fn write(&mut self, record: &DetectionRecord) -> Result<()> {
        self.inner
            .write_record(report_row(record))
            .map_err(|e| csv_error(&self.path, e))?;
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn write_report(records: &[DetectionRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = ReportWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<DetectionRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_reader(open(path)?);
    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    if headers.iter().ne(REPORT_HEADER) {
        return Err(Error::data_at(1, "not a detection report header"));
    }

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let bad = |what: &str, raw: &str| Error::data_at(line, format!("bad {what} '{raw}'"));
        let num = |k: usize| -> Result<f64> {
            row[k].parse().map_err(|_| bad(REPORT_HEADER[k], &row[k]))
        };
        let opt_num = |k: usize| -> Result<Option<f64>> {
            if row[k].is_empty() {
                Ok(None)
            } else {
                num(k).map(Some)
            }
        };
        out.push(DetectionRecord {
            index: row[0].parse().map_err(|_| bad("index", &row[0]))?,
            timestamp: parse_timestamp(&row[1]).ok_or_else(|| bad("timestamp", &row[1]))?,
            value: num(2)?,
            predicted: opt_num(3)?,
            aare: opt_num(4)?,
            threshold: opt_num(5)?,
            phase: row[6].parse().map_err(|_| bad("phase", &row[6]))?,
            verdict: row[7].parse().map_err(|_| bad("verdict", &row[7]))?,
            retrained: row[8].parse().map_err(|_| bad("retrained", &row[8]))?,
            decision_time: num(9)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedAnomaly {
    pub index: usize,
    pub timestamp: NaiveDateTime,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub b: usize,
    pub f: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub min_epochs: usize,
    pub max_epochs: usize,
    pub early_stop_delta: f64,
    pub early_stop_patience: usize,
    pub forecast_scaling: ForecastScaling,
}

impl From<&DetectorConfig> for ConfigEcho {
    fn from(c: &DetectorConfig) -> Self {
        Self {
            b: c.lookback,
            f: c.horizon,
            seed: c.lstm.seed,
            epsilon: c.epsilon,
            hidden_units: c.lstm.hidden_units,
            learning_rate: c.lstm.learning_rate,
            min_epochs: c.lstm.min_epochs,
            max_epochs: c.lstm.max_epochs,
            early_stop_delta: c.lstm.early_stop_delta,
            early_stop_patience: c.lstm.early_stop_patience,
            forecast_scaling: c.lstm.forecast_scaling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub total_points: usize,
    pub retrain_count: usize,
    /// `retrain_count / (total_points - (2b - 1))`; absent for runs too short
    /// to reach the first AARE.
    pub retraining_ratio: Option<f64>,
    /// Percentage with the underlying fraction, e.g. `0.94% (=38/4027)`.
    pub retraining_ratio_text: Option<String>,
    pub avg_detection_time_s: f64,
    pub std_detection_time_s: f64,
    pub anomaly_count: usize,
    pub anomalies: Vec<ReportedAnomaly>,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingStats>,
}

impl RunSummary {
    pub fn from_records(records: &[DetectionRecord], config: &DetectorConfig) -> Result<Self> {
        let b = config.lookback;
        let retrain_count = records.iter().filter(|r| r.retrained).count();
        let ratio = evaluation::retraining_ratio(records, b).ok();
        let text = ratio.map(|r| {
            format!(
                "{:.2}% (={}/{})",
                100.0 * r,
                retrain_count,
                records.len() - (2 * b - 1)
            )
        });
        let (avg, std) = evaluation::timing_stats(records)?;
        let anomalies: Vec<_> = records
            .iter()
            .filter(|r| r.verdict == crate::Verdict::Anomaly)
            .map(|r| ReportedAnomaly {
                index: r.index,
                timestamp: r.timestamp,
                value: r.value,
            })
            .collect();
        Ok(Self {
            total_points: records.len(),
            retrain_count,
            retraining_ratio: ratio,
            retraining_ratio_text: text,
            avg_detection_time_s: avg,
            std_detection_time_s: std,
            anomaly_count: anomalies.len(),
            anomalies,
            config: config.into(),
            training: None,
        })
    }
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    writeln!(f).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    serde_json::from_reader(std::io::BufReader::new(open(path)?))
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))
}

pub fn write_summary(summary: &RunSummary, path: impl AsRef<Path>) -> Result<()> {
    write_json(summary, path)
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<RunSummary> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Phase, Verdict};
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use std::fs;

    fn at(h: u32, m: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2014, 4, 10).unwrap().and_hms_opt(h, m, 0).unwrap()
    }

    fn record(index: usize, verdict: Verdict) -> DetectionRecord {
        DetectionRecord {
            index,
            timestamp: at(0, 2) + Duration::minutes(5 * index as i64),
            value: 40.5 + index as f64,
            phase: if verdict == Verdict::Pending { Phase::Collecting } else { Phase::Detecting },
            predicted: (verdict != Verdict::Pending).then_some(41.0),
            aare: (verdict != Verdict::Pending).then_some(0.012),
            threshold: (verdict != Verdict::Pending).then_some(0.2),
            verdict,
            retrained: verdict == Verdict::Anomaly,
            decision_time: 0.001,
        }
    }

    #[test]
    fn timestamp_formats() {
        assert_eq!(parse_timestamp("2014-04-10 00:02:00"), Some(at(0, 2)));
        assert_eq!(parse_timestamp("2014-04-10 00:02"), Some(at(0, 2)));
        assert_eq!(parse_timestamp("2014-04-10T00:02:00"), Some(at(0, 2)));
        assert_eq!(parse_timestamp("2013-12-11 06:00:00.000000"), Some(
            NaiveDate::from_ymd_opt(2013, 12, 11).unwrap().and_hms_opt(6, 0, 0).unwrap()
        ));
        assert_eq!(parse_timestamp("10/04/2014"), None);
        assert_eq!(format_timestamp(&at(23, 57)), "2014-04-10 23:57:00");
    }

    #[test]
    fn reads_single_row_and_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("one.csv");
        fs::write(&p, "timestamp,value\n2014-04-10 00:02:00,42.1\n").unwrap();
        let s = read_series(&p).unwrap();
        assert_eq!(s, vec![Observation { timestamp: at(0, 2), value: 42.1 }]);

        fs::write(&p, "timestamp,value\n2014-04-10 00:02:00,1\n2014-04-10 00:07:00,abc\n").unwrap();
        match read_series(&p) {
            Err(Error::Data { line: Some(3), .. }) => {}
            other => panic!("{other:?}"),
        }
        fs::write(&p, "timestamp,value\nyesterday,1\n").unwrap();
        assert!(matches!(read_series(&p), Err(Error::Data { line: Some(2), .. })));
        fs::write(&p, "timestamp,value\n").unwrap();
        assert!(matches!(read_series(&p), Err(Error::Data { .. })));
        fs::write(&p, "").unwrap();
        assert!(matches!(read_series(&p), Err(Error::Data { .. })));
        assert!(matches!(read_series(dir.path().join("missing.csv")), Err(Error::Io { .. })));
    }

    #[test]
    fn column_order_follows_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("swapped.csv");
        fs::write(&p, "value,timestamp\n3.5,2014-04-10 00:02\n").unwrap();
        assert_eq!(read_series(&p).unwrap()[0].value, 3.5);
    }

    #[test]
    fn cadence_flags_gaps() {
        let s: Vec<_> = [0, 5, 10, 20, 25]
            .iter()
            .map(|m| Observation { timestamp: at(0, 0) + Duration::minutes(*m), value: 1.0 })
            .collect();
        let c = cadence(&s).unwrap();
        assert_eq!(c.modal_interval, Duration::minutes(5));
        assert_eq!(c.irregular_gaps, 1);
        assert!(cadence(&s[..1]).is_none());
    }

    #[test]
    fn label_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let combined = dir.path().join("combined_labels.json");
        fs::write(
            &combined,
            r#"{
              "realKnownCause/machine_temperature_system_failure.csv": [
                "2013-12-11 06:00:00.000000", "2013-12-16 17:25:00.000000", "2014-01-28 13:55:00.000000"
              ],
              "realAWSCloudwatch/rds_cpu_utilization_e47b3b.csv": [
                "2014-04-13 06:52:00.000000", "2014-04-18 23:27:00.000000"
              ],
              "synthetic/with_signs.csv": {"anomalies": ["2014-01-02 00:00:00"], "signs": ["2014-01-01 12:00:00"]}
            }"#,
        )
        .unwrap();

        let l = read_labels(&combined, "realKnownCause/machine_temperature_system_failure.csv").unwrap();
        assert_eq!(l.anomalies.len(), 3);
        let l = read_labels(&combined, "rds_cpu_utilization_e47b3b").unwrap();
        assert_eq!(l.anomalies.len(), 2);
        assert_eq!(l.dataset_key, "realAWSCloudwatch/rds_cpu_utilization_e47b3b.csv");
        let l = read_labels(&combined, "with_signs.csv").unwrap();
        assert_eq!((l.anomalies.len(), l.signs.len()), (1, 1));
        assert!(matches!(read_labels(&combined, "nope.csv"), Err(Error::Lookup(_))));

        let plain = dir.path().join("plain.json");
        fs::write(&plain, "[]").unwrap();
        assert!(read_labels(&plain, "anything").unwrap().anomalies.is_empty());
        fs::write(&plain, r#"["2014-04-10 00:02", "not a time"]"#).unwrap();
        assert!(matches!(read_labels(&plain, "x"), Err(Error::Data { .. })));
        fs::write(&plain, r#"["2014-04-10 00:07", "2014-04-10 00:02"]"#).unwrap();
        assert!(matches!(read_labels(&plain, "x"), Err(Error::Data { .. })));
    }

    #[test]
    fn report_rows_and_empty_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("report.csv");
        let mut records: Vec<_> = (0..10).map(|i| record(i, Verdict::NotAnomaly)).collect();
        records[0] = record(0, Verdict::Pending);
        records[8] = record(8, Verdict::Anomaly);
        write_report(&records, &p).unwrap();

        let text = fs::read_to_string(&p).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[0], REPORT_HEADER.join(","));
        assert_eq!(lines[1], "0,2014-04-10 00:02:00,40.5,,,,Collecting,Pending,false,0.001");
        assert_eq!(read_report(&p).unwrap(), records);
    }

    #[test]
    fn summary_ratio_text() {
        let cfg = DetectorConfig::default();
        let mut records: Vec<_> = (0..4032).map(|i| record(i, Verdict::NotAnomaly)).collect();
        for r in records.iter_mut().skip(100).step_by(100).take(38) {
            r.retrained = true;
        }
        let s = RunSummary::from_records(&records, &cfg).unwrap();
        assert_eq!(s.retrain_count, 38);
        assert_eq!(s.retraining_ratio_text.as_deref(), Some("0.94% (=38/4027)"));

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("summary.json");
        write_summary(&s, &p).unwrap();
        assert_eq!(read_summary(&p).unwrap(), s);
    }

    proptest! {
        #[test]
        fn series_round_trip(values in prop::collection::vec(-1e6f64..1e6, 1..50), step in 1i64..3600) {
            let series: Vec<_> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| Observation { timestamp: at(0, 0) + Duration::seconds(step * i as i64), value: v })
                .collect();
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("s.csv");
            write_series(&p, &series).unwrap();
            prop_assert_eq!(read_series(&p).unwrap(), series);
        }
    }
}
