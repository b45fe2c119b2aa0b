//! The streaming detection loop.
//!
//! Each call to [`Detector::step`] ingests one observation and walks through
//! four phases keyed on the time index `t` and the look-back `b`:
//!
//! | phase           | range              | work                                              |
//! |-----------------|--------------------|---------------------------------------------------|
//! | `Collecting`    | `t < b-1`          | buffer the value                                  |
//! | `WarmupTrain`   | `b-1 <= t < 2b-1`  | train on the last `b` values, forecast `t+1`      |
//! | `AareBootstrap` | `2b-1 <= t < 2b+1` | score AARE, retrain, forecast `t+1`               |
//! | `Detecting`     | `t >= 2b+1`        | score, compare with threshold, double-check       |
//!
//! In `Detecting`, an AARE above the threshold triggers a retrain on the `b`
//! values preceding `t`. The candidate re-forecasts `v_t`; if the rescored AARE
//! is still above the threshold the point is reported as an anomaly and the
//! candidate is dropped, otherwise the candidate replaces the current model.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::{self, LstmConfig, LstmModel};
use crate::metrics::{self, AareHistory, AareValue, DEFAULT_EPSILON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Look-back `b`: values per training window and per AARE window.
    pub lookback: usize,
    /// Predict-forward horizon; only 1 is supported.
    pub horizon: usize,
    /// Floor for the AARE denominator.
    pub epsilon: f64,
    pub lstm: LstmConfig,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            lookback: 3,
            horizon: 1,
            epsilon: DEFAULT_EPSILON,
            lstm: LstmConfig::default(),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lookback < 2 {
            return Err(Error::Config(format!(
                "look-back must be at least 2, got {}",
                self.lookback
            )));
        }
        if self.horizon != 1 {
            return Err(Error::Config(format!(
                "only a predict-forward horizon of 1 is supported, got {}",
                self.horizon
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        self.lstm.validate()
    }

    /// First time index at which an AARE value exists (`2b - 1`).
    pub fn first_aare_index(&self) -> usize {
        2 * self.lookback - 1
    }

    /// First time index that can receive a verdict (`2b + 1`).
    pub fn preparation_period(&self) -> usize {
        2 * self.lookback + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Collecting,
    WarmupTrain,
    AareBootstrap,
    Detecting,
}

pub fn phase_of(t: usize, b: usize) -> Phase {
    if t + 1 < b {
        Phase::Collecting
    } else if t < 2 * b - 1 {
        Phase::WarmupTrain
    } else if t < 2 * b + 1 {
        Phase::AareBootstrap
    } else {
        Phase::Detecting
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Pending,
    NotAnomaly,
    Anomaly,
}

macro_rules! name_enum {
    ($ty:ident { $($variant:ident),+ }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => stringify!($variant)),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $(stringify!($variant) => Ok($ty::$variant),)+
                    other => Err(Error::data(format!(
                        concat!("unknown ", stringify!($ty), " '{}'"), other
                    ))),
                }
            }
        }
    };
}

name_enum!(Phase { Collecting, WarmupTrain, AareBootstrap, Detecting });
name_enum!(Verdict { Pending, NotAnomaly, Anomaly });

/// Outcome of one detector step.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub index: usize,
    pub timestamp: NaiveDateTime,
    pub value: f64,
    pub phase: Phase,
    /// Forecast of this point, after any re-forecast by a retrained candidate.
    pub predicted: Option<f64>,
    /// Final AARE at this point.
    pub aare: Option<f64>,
    pub threshold: Option<f64>,
    pub verdict: Verdict,
    pub retrained: bool,
    /// Wall-clock seconds spent deciding this point, training included.
    pub decision_time: f64,
}

/// Trains models on a look-back window and forecasts with them.
///
/// The detector only talks to its predictor through this trait, so tests can
/// swap the LSTM for a scripted predictor.
pub trait Forecaster {
    type Model: Clone;

    fn fit(&mut self, window: &[f64]) -> Result<Self::Model>;

    /// Forecast for time index `target_index`, given the `b` values that
    /// precede it.
    fn forecast(&self, model: &Self::Model, window: &[f64], target_index: usize) -> Result<f64>;
}

/// Running statistics over every training call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingStats {
    pub calls: usize,
    pub total_epochs: usize,
    pub min_epochs: Option<usize>,
    pub max_epochs: Option<usize>,
}

impl TrainingStats {
    fn record(&mut self, epochs: usize) {
        self.calls += 1;
        self.total_epochs += epochs;
        self.min_epochs = Some(self.min_epochs.map_or(epochs, |m| m.min(epochs)));
        self.max_epochs = Some(self.max_epochs.map_or(epochs, |m| m.max(epochs)));
    }
}

/// The LSTM predictor. Every training call starts from the same seeded
/// initialization.
#[derive(Debug, Clone)]
pub struct LstmForecaster {
    config: LstmConfig,
    stats: TrainingStats,
}

impl LstmForecaster {
    pub fn new(config: LstmConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            stats: TrainingStats::default(),
        })
    }

    pub fn stats(&self) -> TrainingStats {
        self.stats
    }
}

impl Forecaster for LstmForecaster {
    type Model = LstmModel;

    fn fit(&mut self, window: &[f64]) -> Result<LstmModel> {
        let outcome = lstm::train(window, &self.config)?;
        self.stats.record(outcome.epochs_used);
        Ok(outcome.model)
    }

    fn forecast(&self, model: &LstmModel, window: &[f64], _target_index: usize) -> Result<f64> {
        lstm::predict_next_with(model, window, self.config.forecast_scaling)
    }
}

pub struct Detector<F: Forecaster = LstmForecaster> {
    config: DetectorConfig,
    forecaster: F,
    /// Index of the newest ingested point.
    t: Option<usize>,
    /// Up to `b + 1` newest values; the back is `v_t`.
    recent: VecDeque<f64>,
    /// `(index, forecast)` pairs for the newest `b + 1` forecast targets.
    predictions: VecDeque<(usize, f64)>,
    history: AareHistory,
    model: Option<F::Model>,
    retrain_count: usize,
    anomaly_count: usize,
    last_timestamp: Option<NaiveDateTime>,
}

impl Detector<LstmForecaster> {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        config.validate()?;
        let forecaster = LstmForecaster::new(config.lstm.clone())?;
        Self::with_forecaster(config, forecaster)
    }
}

struct Decision<M> {
    predicted: Option<f64>,
    aare: Option<f64>,
    threshold: Option<f64>,
    verdict: Verdict,
    retrained: bool,
    /// New current model, if this step replaces it.
    model: Option<M>,
    /// Forecast of `v_t` made by a retrained candidate.
    reforecast: Option<f64>,
    next_forecast: Option<f64>,
}

impl<F: Forecaster> Detector<F> {
    pub fn with_forecaster(config: DetectorConfig, forecaster: F) -> Result<Self> {
        config.validate()?;
        let b = config.lookback;
        Ok(Self {
            history: AareHistory::new(config.first_aare_index()),
            recent: VecDeque::with_capacity(b + 1),
            predictions: VecDeque::with_capacity(b + 2),
            config,
            forecaster,
            t: None,
            model: None,
            retrain_count: 0,
            anomaly_count: 0,
            last_timestamp: None,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn forecaster(&self) -> &F {
        &self.forecaster
    }

    /// Index of the newest ingested point, `None` before the first.
    pub fn current_index(&self) -> Option<usize> {
        self.t
    }

    /// Phase the next ingested point will fall in.
    pub fn next_phase(&self) -> Phase {
        phase_of(self.t.map_or(0, |t| t + 1), self.config.lookback)
    }

    pub fn history(&self) -> &AareHistory {
        &self.history
    }

    pub fn model(&self) -> Option<&F::Model> {
        self.model.as_ref()
    }

    pub fn retrain_count(&self) -> usize {
        self.retrain_count
    }

    pub fn anomaly_count(&self) -> usize {
        self.anomaly_count
    }

    /// Ingests one observation and returns the decision for it.
    ///
    /// A rejected point (non-finite value, timestamp going backwards, or a
    /// failed training call) leaves the detector unchanged.
    pub fn step(&mut self, value: f64, timestamp: NaiveDateTime) -> Result<DetectionRecord> {
        if !value.is_finite() {
            return Err(Error::data(format!("non-finite observation {value}")));
        }
        if let Some(last) = self.last_timestamp {
            if timestamp < last {
                return Err(Error::Ordering(format!(
                    "timestamp {timestamp} precedes previous point at {last}"
                )));
            }
        }

        let started = Instant::now();
        let t = self.t.map_or(0, |t| t + 1);
        let b = self.config.lookback;
        let phase = phase_of(t, b);

        let mut recent = self.recent.clone();
        recent.push_back(value);
        if recent.len() > b + 1 {
            recent.pop_front();
        }

        let history_len = self.history.len();
        let decision = match self.decide(t, phase, &recent) {
            Ok(d) => d,
            Err(e) => {
                self.history.truncate(history_len);
                return Err(e);
            }
        };

        self.t = Some(t);
        self.recent = recent;
        self.last_timestamp = Some(timestamp);
        if let Some(v) = decision.reforecast {
            self.set_prediction(t, v);
        }
        if let Some(v) = decision.next_forecast {
            self.set_prediction(t + 1, v);
        }
        if let Some(m) = decision.model {
            self.model = Some(m);
        }
        if decision.retrained {
            self.retrain_count += 1;
        }
        if decision.verdict == Verdict::Anomaly {
            self.anomaly_count += 1;
        }

        Ok(DetectionRecord {
            index: t,
            timestamp,
            value,
            phase,
            predicted: decision.predicted,
            aare: decision.aare,
            threshold: decision.threshold,
            verdict: decision.verdict,
            retrained: decision.retrained,
            decision_time: started.elapsed().as_secs_f64(),
        })
    }

    fn decide(&mut self, t: usize, phase: Phase, recent: &VecDeque<f64>) -> Result<Decision<F::Model>> {
        let b = self.config.lookback;
        let mut d = Decision {
            predicted: self.prediction_for(t),
            aare: None,
            threshold: None,
            verdict: Verdict::Pending,
            retrained: false,
            model: None,
            reforecast: None,
            next_forecast: None,
        };
        // [v_{t-b+1} ..= v_t] once enough values exist
        let latest: Vec<f64> = recent.iter().rev().take(b).rev().copied().collect();

        match phase {
            Phase::Collecting => {}
            Phase::WarmupTrain => {
                let m = self.forecaster.fit(&latest)?;
                d.next_forecast = Some(self.forecaster.forecast(&m, &latest, t + 1)?);
                d.model = Some(m);
            }
            Phase::AareBootstrap => {
                let score = self.score(t, &latest, None)?;
                let m = self.forecaster.fit(&latest)?;
                d.next_forecast = Some(self.forecaster.forecast(&m, &latest, t + 1)?);
                self.history.push(AareValue { value: score, time_index: t })?;
                d.aare = Some(score);
                d.model = Some(m);
            }
            Phase::Detecting => {
                let first = self.score(t, &latest, None)?;
                self.history.push(AareValue { value: first, time_index: t })?;
                let thd = metrics::threshold(&self.history)?;
                d.threshold = Some(thd);

                let current = self
                    .model
                    .as_ref()
                    .ok_or_else(|| Error::State("no model at detection time".into()))?;

                if first <= thd {
                    d.aare = Some(first);
                    d.verdict = Verdict::NotAnomaly;
                    d.next_forecast = Some(self.forecaster.forecast(current, &latest, t + 1)?);
                } else {
                    d.retrained = true;
                    // [v_{t-b} ..= v_{t-1}]
                    let preceding: Vec<f64> = recent.iter().take(b).copied().collect();
                    let candidate = self.forecaster.fit(&preceding)?;
                    let reforecast = self.forecaster.forecast(&candidate, &preceding, t)?;
                    let second = self.score(t, &latest, Some(reforecast))?;
                    self.history.replace_last(second)?;
                    d.aare = Some(second);
                    d.predicted = Some(reforecast);
                    d.reforecast = Some(reforecast);

                    let current = self.model.as_ref().expect("checked above");
                    if second <= thd {
                        d.verdict = Verdict::NotAnomaly;
                        d.next_forecast =
                            Some(self.forecaster.forecast(&candidate, &latest, t + 1)?);
                        d.model = Some(candidate);
                    } else {
                        d.verdict = Verdict::Anomaly;
                        d.next_forecast = Some(self.forecaster.forecast(current, &latest, t + 1)?);
                    }
                }
            }
        }
        Ok(d)
    }

    /// AARE at `t` over `[t-b+1, t]`, optionally overriding the forecast of `v_t`.
    fn score(&self, t: usize, latest: &[f64], forecast_t: Option<f64>) -> Result<f64> {
        let b = self.config.lookback;
        let predicted = (t + 1 - b..=t)
            .map(|y| match (y == t, forecast_t) {
                (true, Some(v)) => Ok(v),
                _ => self
                    .prediction_for(y)
                    .ok_or_else(|| Error::State(format!("no forecast recorded for t = {y}"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        metrics::aare(latest, &predicted, self.config.epsilon)
    }

    fn prediction_for(&self, index: usize) -> Option<f64> {
        self.predictions
            .iter()
            .rev()
            .find(|(i, _)| *i == index)
            .map(|(_, v)| *v)
    }

    fn set_prediction(&mut self, index: usize, value: f64) {
        if let Some(slot) = self.predictions.iter_mut().find(|(i, _)| *i == index) {
            slot.1 = value;
        } else {
            self.predictions.push_back((index, value));
        }
        while self.predictions.len() > self.config.lookback + 1 {
            self.predictions.pop_front();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, NaiveDate};

    fn ts(i: usize) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2014, 4, 10)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
            + Duration::minutes(5 * i as i64)
    }

    /// Replays a fixed script of forecasts and records every training window.
    /// Models are numbered by fit order; `candidate` makes one model forecast
    /// a fixed value instead.
    struct Scripted {
        forecasts: Vec<f64>,
        fits: Vec<Vec<f64>>,
        candidate: Option<(usize, f64)>,
    }

    impl Scripted {
        fn new(forecasts: Vec<f64>) -> Self {
            Self { forecasts, fits: vec![], candidate: None }
        }
    }

    impl Forecaster for Scripted {
        type Model = usize;

        fn fit(&mut self, window: &[f64]) -> Result<usize> {
            self.fits.push(window.to_vec());
            Ok(self.fits.len())
        }

        fn forecast(&self, model: &usize, _window: &[f64], target: usize) -> Result<f64> {
            match self.candidate {
                Some((id, v)) if id == *model => Ok(v),
                _ => Ok(self.forecasts.get(target).copied().unwrap_or(1.0)),
            }
        }
    }

    #[test]
    fn phases_at_b3() {
        assert_eq!(phase_of(0, 3), Phase::Collecting);
        assert_eq!(phase_of(1, 3), Phase::Collecting);
        for t in 2..5 {
            assert_eq!(phase_of(t, 3), Phase::WarmupTrain);
        }
        assert_eq!(phase_of(5, 3), Phase::AareBootstrap);
        assert_eq!(phase_of(6, 3), Phase::AareBootstrap);
        assert_eq!(phase_of(7, 3), Phase::Detecting);
    }

    #[test]
    fn config_checks() {
        let d = Detector::new(DetectorConfig::default()).unwrap();
        assert_eq!(d.next_phase(), Phase::Collecting);
        assert_eq!(d.current_index(), None);

        let cfg = DetectorConfig { lookback: 2, ..Default::default() };
        assert_eq!(cfg.preparation_period(), 5);

        let cfg = DetectorConfig { horizon: 2, ..Default::default() };
        assert!(matches!(Detector::new(cfg), Err(Error::Config(_))));
        let cfg = DetectorConfig { lookback: 1, ..Default::default() };
        assert!(matches!(Detector::new(cfg), Err(Error::Config(_))));
    }

    #[test]
    fn training_windows_follow_the_schedule() {
        let series: Vec<f64> = (0..8).map(|i| 10.0 + i as f64).collect();
        let mut d = Detector::with_forecaster(DetectorConfig::default(), Scripted::new(series.clone())).unwrap();

        for (i, &v) in series.iter().enumerate() {
            let r = d.step(v, ts(i)).unwrap();
            match i {
                0 | 1 => {
                    assert_eq!(r.verdict, Verdict::Pending);
                    assert!(d.forecaster().fits.is_empty());
                }
                2 => assert_eq!(d.forecaster().fits, vec![vec![10.0, 11.0, 12.0]]),
                5 => {
                    assert_eq!(r.aare, Some(0.0));
                    assert_eq!(r.threshold, None);
                    assert_eq!(d.history().len(), 1);
                }
                7 => {
                    assert_eq!(r.verdict, Verdict::NotAnomaly);
                    assert!(!r.retrained);
                    assert_eq!(r.threshold, Some(0.0));
                }
                _ => {}
            }
        }
        // trainings at t = 2, 3, 4, 5, 6; none at 7
        assert_eq!(d.forecaster().fits.len(), 5);
        assert_eq!(d.forecaster().fits[4], vec![14.0, 15.0, 16.0]);
        assert_eq!(d.retrain_count(), 0);
    }

    /// Perfect forecasts up to t = 19, then `v_20` jumps to 100.
    fn jump_fixture() -> (Vec<f64>, Vec<f64>) {
        let mut series: Vec<f64> = (0..21).map(|i| 10.0 + i as f64).collect();
        series[20] = 100.0;
        let mut forecasts = series.clone();
        forecasts[20] = 30.0;
        (series, forecasts)
    }

    #[test]
    fn exceedance_retrains_on_preceding_window() {
        let (series, forecasts) = jump_fixture();
        let mut d = Detector::with_forecaster(DetectorConfig::default(), Scripted::new(forecasts)).unwrap();
        let recs: Vec<_> = series.iter().enumerate().map(|(i, &v)| d.step(v, ts(i)).unwrap()).collect();

        assert!(recs[..20].iter().all(|r| !r.retrained && r.verdict != Verdict::Anomaly));
        let r = &recs[20];
        assert!(r.retrained);
        assert_eq!(r.verdict, Verdict::Anomaly);
        assert_eq!(d.retrain_count(), 1);
        assert_eq!(d.anomaly_count(), 1);
        let fits = &d.forecaster().fits;
        assert_eq!(fits.last().unwrap(), &vec![27.0, 28.0, 29.0]);
        // the candidate is discarded
        assert_eq!(d.model().copied(), Some(5));
        // history keeps the rescored value
        assert_eq!(d.history().values().last().copied(), r.aare);
        assert_eq!(d.history().len(), 20 - 5 + 1);
    }

    #[test]
    fn successful_double_check_adopts_candidate() {
        let (series, forecasts) = jump_fixture();
        let mut f = Scripted::new(forecasts);
        f.candidate = Some((6, 100.0));
        let mut d = Detector::with_forecaster(DetectorConfig::default(), f).unwrap();
        let recs: Vec<_> = series.iter().enumerate().map(|(i, &v)| d.step(v, ts(i)).unwrap()).collect();
        let r = &recs[20];
        assert!(r.retrained);
        assert_eq!(r.verdict, Verdict::NotAnomaly);
        assert_eq!(r.predicted, Some(100.0));
        assert_eq!(r.aare, Some(0.0));
        assert_eq!(d.model().copied(), Some(6));
    }

    #[test]
    fn rejected_points_leave_state_alone() {
        let mut d = Detector::new(DetectorConfig::default()).unwrap();
        d.step(1.0, ts(1)).unwrap();
        assert!(matches!(d.step(f64::NAN, ts(2)), Err(Error::Data { .. })));
        assert!(matches!(d.step(2.0, ts(0)), Err(Error::Ordering(_))));
        assert_eq!(d.current_index(), Some(0));
        // equal timestamps are fine
        assert_eq!(d.step(2.0, ts(1)).unwrap().index, 1);
    }

    #[test]
    fn lstm_detector_records() {
        let mut d = Detector::new(DetectorConfig::default()).unwrap();
        let recs: Vec<_> = (0..12)
            .map(|i| d.step(50.0 + (i as f64 * 0.7).sin(), ts(i)).unwrap())
            .collect();
        assert!(recs[..7].iter().all(|r| r.verdict == Verdict::Pending));
        assert!(recs[..3].iter().all(|r| r.predicted.is_none()));
        assert!(recs[3..].iter().all(|r| r.predicted.is_some()));
        assert!(recs[..5].iter().all(|r| r.aare.is_none()));
        assert!(recs[5..].iter().all(|r| r.aare.is_some()));
        assert!(recs[..7].iter().all(|r| r.threshold.is_none()));
        assert!(recs[7..].iter().all(|r| r.threshold.is_some()));
        assert!(recs.iter().all(|r| r.decision_time >= 0.0));
        let stats = d.forecaster().stats();
        assert_eq!(stats.calls, 5 + d.retrain_count());
        assert!(stats.min_epochs.unwrap() >= 1 && stats.max_epochs.unwrap() <= 50);
    }

    #[test]
    fn names_round_trip() {
        for p in [Phase::Collecting, Phase::WarmupTrain, Phase::AareBootstrap, Phase::Detecting] {
            assert_eq!(p.as_str().parse::<Phase>().unwrap(), p);
        }
        for v in [Verdict::Pending, Verdict::NotAnomaly, Verdict::Anomaly] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
        assert!("anomaly".parse::<Verdict>().is_err());
    }
}
