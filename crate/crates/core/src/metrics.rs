//! Prediction-error score (AARE) and the dynamic three-sigma threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default floor for the AARE denominator.
pub const DEFAULT_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AareValue {
    pub value: f64,
    pub time_index: usize,
}

/// Average absolute relative error over an aligned window.
///
/// `observed[k]` is paired with the prediction made for the same time point,
/// `predicted[k]`. Each term is `|v - v̂| / max(|v|, epsilon)`.
pub fn aare(observed: &[f64], predicted: &[f64], epsilon: f64) -> Result<f64> {
    if observed.is_empty() || observed.len() != predicted.len() {
        return Err(Error::Argument(format!(
            "aare needs two non-empty windows of equal length (got {} and {})",
            observed.len(),
            predicted.len()
        )));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Argument(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    if observed.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::data("non-finite value in aare window"));
    }
    let sum: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(v, p)| (v - p).abs() / v.abs().max(epsilon))
        .sum();
    Ok(sum / observed.len() as f64)
}

/// Every AARE value computed since detection bookkeeping began, contiguous in
/// time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AareHistory {
    start: usize,
    values: Vec<f64>,
}

impl AareHistory {
    /// An empty history whose first entry must carry `start` as its index.
    pub fn new(start: usize) -> Self {
        Self {
            start,
            values: Vec::new(),
        }
    }

    pub fn from_values(start: usize, values: Vec<f64>) -> Result<Self> {
        let mut h = Self::new(start);
        for (k, v) in values.into_iter().enumerate() {
            h.push(AareValue {
                value: v,
                time_index: start + k,
            })?;
        }
        Ok(h)
    }

    pub fn push(&mut self, v: AareValue) -> Result<()> {
        let expected = self.start + self.values.len();
        if v.time_index != expected {
            return Err(Error::Ordering(format!(
                "AARE for t = {} appended where t = {expected} was expected",
                v.time_index
            )));
        }
        if !(v.value.is_finite() && v.value >= 0.0) {
            return Err(Error::data(format!("AARE must be finite and >= 0, got {}", v.value)));
        }
        self.values.push(v.value);
        Ok(())
    }

    /// Overwrites the newest entry, keeping its time index.
    pub fn replace_last(&mut self, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::data(format!("AARE must be finite and >= 0, got {value}")));
        }
        match self.values.last_mut() {
            Some(last) => {
                *last = value;
                Ok(())
            }
            None => Err(Error::State("no AARE value to replace".into())),
        }
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.values.truncate(len);
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn last_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.start + self.values.len() - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Arithmetic mean and population standard deviation.
pub fn mean_and_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// `mean + 3 * std` over the whole history.
pub fn threshold(history: &AareHistory) -> Result<f64> {
    let (mean, std) = mean_and_std(history.values())
        .ok_or_else(|| Error::State("threshold needs at least one AARE value".into()))?;
    Ok(mean + 3.0 * std)
}
