//! Single-hidden-layer LSTM regressor trained on a short look-back window.
//!
//! The network reads one scalar per step and emits one scalar per step: the
//! forecast of the value that follows the current input. Gates use sigmoid
//! activations, the candidate and cell output use tanh, and the output layer
//! is linear. Training is full-batch gradient descent on mean squared error
//! with back-propagation through time and a bounded early-stopping rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Epoch cap used unless [`LstmConfig::allow_extended_epochs`] is set.
pub const DEFAULT_EPOCH_CAP: usize = 50;

const GATES: usize = 4;

/// Gate order inside the stacked weight and bias vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    Candidate = 3,
}

/// Statistics used to scale a forecast window before it enters the network.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForecastScaling {
    /// Each window is z-scored by its own mean and std, so a model trained at
    /// one level keeps forecasting shape after the series moves.
    #[default]
    Window,
    /// Windows are z-scored by the statistics stored with the model.
    Training,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub min_epochs: usize,
    /// Relative loss improvement below which an epoch counts as stalled.
    pub early_stop_delta: f64,
    /// Consecutive stalled epochs that end training.
    pub early_stop_patience: usize,
    pub seed: u64,
    /// Lifts the 50-epoch ceiling on `max_epochs`.
    #[serde(default)]
    pub allow_extended_epochs: bool,
    #[serde(default)]
    pub forecast_scaling: ForecastScaling,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            hidden_units: 10,
            learning_rate: 0.15,
            max_epochs: DEFAULT_EPOCH_CAP,
            min_epochs: 1,
            early_stop_delta: 1e-4,
            early_stop_patience: 3,
            seed: 42,
            allow_extended_epochs: false,
            forecast_scaling: ForecastScaling::Window,
        }
    }
}

impl LstmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::Config("hidden_units must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.min_epochs == 0 || self.min_epochs > self.max_epochs {
            return Err(Error::Config(format!(
                "epoch bounds must satisfy 1 <= min_epochs <= max_epochs, got {}..{}",
                self.min_epochs, self.max_epochs
            )));
        }
        if self.max_epochs > DEFAULT_EPOCH_CAP && !self.allow_extended_epochs {
            return Err(Error::Config(format!(
                "max_epochs {} exceeds the cap of {DEFAULT_EPOCH_CAP} without an explicit override",
                self.max_epochs
            )));
        }
        if !(self.early_stop_delta.is_finite() && self.early_stop_delta >= 0.0) {
            return Err(Error::Config(format!(
                "early_stop_delta must be non-negative, got {}",
                self.early_stop_delta
            )));
        }
        if self.early_stop_patience == 0 {
            return Err(Error::Config("early_stop_patience must be at least 1".into()));
        }
        Ok(())
    }
}

/// Z-score statistics of the window a model was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: f64,
    pub std: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Self {
            mean: 0.0,
            std: 1.0,
        }
    }
}

impl Normalization {
    /// Population mean and standard deviation of `values`; a constant window
    /// gets `std = 1`.
    pub fn fit(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        let std = if std > 1e-12 * mean.abs().max(1.0) {
            std
        } else {
            1.0
        };
        Self { mean, std }
    }

    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn denormalize(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Trainable parameters. Also used as the gradient container.
///
/// Layout: gate `g`, unit `j` lives at `g * hidden + j` in `input_weights`
/// and `biases`; the recurrent weight from unit `k` into gate `g` of unit `j`
/// lives at `(g * hidden + j) * hidden + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub hidden: usize,
    pub input_weights: Vec<f64>,
    pub recurrent_weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl LstmParams {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            hidden,
            input_weights: vec![0.0; GATES * hidden],
            recurrent_weights: vec![0.0; GATES * hidden * hidden],
            biases: vec![0.0; GATES * hidden],
            output_weights: vec![0.0; hidden],
            output_bias: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.input_weights.len()
            + self.recurrent_weights.len()
            + self.biases.len()
            + self.output_weights.len()
            + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All parameters flattened in a fixed order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.input_weights);
        out.extend_from_slice(&self.recurrent_weights);
        out.extend_from_slice(&self.biases);
        out.extend_from_slice(&self.output_weights);
        out.push(self.output_bias);
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::Argument(format!(
                "expected {} parameters, got {}",
                self.len(),
                flat.len()
            )));
        }
        let mut rest = flat;
        for dst in [
            &mut self.input_weights,
            &mut self.recurrent_weights,
            &mut self.biases,
            &mut self.output_weights,
        ] {
            let (head, tail) = rest.split_at(dst.len());
            dst.copy_from_slice(head);
            rest = tail;
        }
        self.output_bias = rest[0];
        Ok(())
    }

    /// `self += scale * other`
    fn add_scaled(&mut self, scale: f64, other: &LstmParams) {
        let pairs = [
            (&mut self.input_weights, &other.input_weights),
            (&mut self.recurrent_weights, &other.recurrent_weights),
            (&mut self.biases, &other.biases),
            (&mut self.output_weights, &other.output_weights),
        ];
        for (dst, src) in pairs {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
        self.output_bias += scale * other.output_bias;
    }

    fn check_shapes(&self) -> Result<()> {
        let h = self.hidden;
        if h == 0
            || self.input_weights.len() != GATES * h
            || self.recurrent_weights.len() != GATES * h * h
            || self.biases.len() != GATES * h
            || self.output_weights.len() != h
        {
            return Err(Error::Argument(format!(
                "parameter shapes inconsistent with {h} hidden units"
            )));
        }
        Ok(())
    }

    fn all_finite(&self) -> bool {
        self.input_weights
            .iter()
            .chain(&self.recurrent_weights)
            .chain(&self.biases)
            .chain(&self.output_weights)
            .all(|w| w.is_finite())
            && self.output_bias.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub params: LstmParams,
    pub norm: Normalization,
    /// Length of the window the model was trained on, if trained.
    pub lookback: Option<usize>,
}

impl LstmModel {
    pub fn hidden_units(&self) -> usize {
        self.params.hidden
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: LstmModel,
    pub epochs_used: usize,
    /// Mean squared error (normalized units) of the returned model.
    pub final_loss: f64,
    /// Loss before training followed by the loss after each epoch.
    pub loss_history: Vec<f64>,
}

pub fn init_model(config: &LstmConfig) -> Result<LstmModel> {
    config.validate()?;
    let h = config.hidden_units;
    let scale = 1.0 / (h as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| rng.gen_range(-0.5..=0.5) * scale)
            .collect()
    };

    let input_weights = draw(GATES * h);
    let recurrent_weights = draw(GATES * h * h);
    let output_weights = draw(h);
    let mut biases = vec![0.0; GATES * h];
    let forget = Gate::Forget as usize * h;
    biases[forget..forget + h].fill(1.0);

    Ok(LstmModel {
        params: LstmParams {
            hidden: h,
            input_weights,
            recurrent_weights,
            biases,
            output_weights,
            output_bias: 0.0,
        },
        norm: Normalization::default(),
        lookback: None,
    })
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations of one time step, kept for back-propagation.
struct StepCache {
    x: f64,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Post-activation gate values, stacked like the biases.
    gates: Vec<f64>,
    c: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
}

fn run(params: &LstmParams, inputs: &[f64]) -> (Vec<f64>, Vec<StepCache>) {
    let hn = params.hidden;
    let mut h = vec![0.0; hn];
    let mut c = vec![0.0; hn];
    let mut outputs = Vec::with_capacity(inputs.len());
    let mut caches = Vec::with_capacity(inputs.len());

    for &x in inputs {
        let mut gates = vec![0.0; GATES * hn];
        for (row, gate) in gates.iter_mut().enumerate() {
            let w = &params.recurrent_weights[row * hn..(row + 1) * hn];
            let pre = params.input_weights[row] * x
                + params.biases[row]
                + w.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
            *gate = if row / hn == Gate::Candidate as usize {
                pre.tanh()
            } else {
                sigmoid(pre)
            };
        }

        let mut c_new = vec![0.0; hn];
        let mut tanh_c = vec![0.0; hn];
        let mut h_new = vec![0.0; hn];
        for j in 0..hn {
            let i = gates[Gate::Input as usize * hn + j];
            let f = gates[Gate::Forget as usize * hn + j];
            let o = gates[Gate::Output as usize * hn + j];
            let g = gates[Gate::Candidate as usize * hn + j];
            c_new[j] = f * c[j] + i * g;
            tanh_c[j] = c_new[j].tanh();
            h_new[j] = o * tanh_c[j];
        }

        let y = params.output_bias
            + params
                .output_weights
                .iter()
                .zip(&h_new)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        outputs.push(y);

        caches.push(StepCache {
            x,
            h_prev: std::mem::replace(&mut h, h_new.clone()),
            c_prev: std::mem::replace(&mut c, c_new.clone()),
            gates,
            c: c_new,
            tanh_c,
            h: h_new,
        });
    }
    (outputs, caches)
}

/// One output per input; output `k` forecasts the value following input `k`.
/// The recurrence starts from zero hidden and cell state. Values are in the
/// model's normalized units.
pub fn forward(model: &LstmModel, inputs: &[f64]) -> Result<Vec<f64>> {
    if inputs.is_empty() {
        return Err(Error::Argument("forward needs at least one input".into()));
    }
    model.params.check_shapes()?;
    Ok(run(&model.params, inputs).0)
}

/// Mean squared error of `params` over (`inputs`, `targets`) and its gradient
/// with respect to every parameter, by back-propagation through time.
pub fn loss_and_gradient(
    params: &LstmParams,
    inputs: &[f64],
    targets: &[f64],
) -> Result<(f64, LstmParams)> {
    if inputs.is_empty() || inputs.len() != targets.len() {
        return Err(Error::Argument(format!(
            "need equal, non-empty inputs and targets (got {} and {})",
            inputs.len(),
            targets.len()
        )));
    }
    params.check_shapes()?;

    let hn = params.hidden;
    let n = inputs.len() as f64;
    let (outputs, caches) = run(params, inputs);
    let loss = outputs
        .iter()
        .zip(targets)
        .map(|(y, t)| (y - t).powi(2))
        .sum::<f64>()
        / n;

    let mut grad = LstmParams::zeros(hn);
    let mut dh_next = vec![0.0; hn];
    let mut dc_next = vec![0.0; hn];
    let mut d_pre = vec![0.0; GATES * hn];

    for (k, step) in caches.iter().enumerate().rev() {
        let dy = 2.0 * (outputs[k] - targets[k]) / n;
        grad.output_bias += dy;
        for j in 0..hn {
            grad.output_weights[j] += dy * step.h[j];
        }

        for j in 0..hn {
            let i = step.gates[Gate::Input as usize * hn + j];
            let f = step.gates[Gate::Forget as usize * hn + j];
            let o = step.gates[Gate::Output as usize * hn + j];
            let g = step.gates[Gate::Candidate as usize * hn + j];

            let dh = dy * params.output_weights[j] + dh_next[j];
            let d_o = dh * step.tanh_c[j];
            let dc = dh * o * (1.0 - step.tanh_c[j] * step.tanh_c[j]) + dc_next[j];

            d_pre[Gate::Input as usize * hn + j] = dc * g * i * (1.0 - i);
            d_pre[Gate::Forget as usize * hn + j] = dc * step.c_prev[j] * f * (1.0 - f);
            d_pre[Gate::Output as usize * hn + j] = d_o * o * (1.0 - o);
            d_pre[Gate::Candidate as usize * hn + j] = dc * i * (1.0 - g * g);
            dc_next[j] = dc * f;
        }
        debug_assert_eq!(step.c.len(), hn);

        dh_next.fill(0.0);
        for (row, &d) in d_pre.iter().enumerate() {
            grad.input_weights[row] += d * step.x;
            grad.biases[row] += d;
            let w = &params.recurrent_weights[row * hn..(row + 1) * hn];
            let gw = &mut grad.recurrent_weights[row * hn..(row + 1) * hn];
            for m in 0..hn {
                gw[m] += d * step.h_prev[m];
                dh_next[m] += d * w[m];
            }
        }
    }

    Ok((loss, grad))
}

fn mse(params: &LstmParams, inputs: &[f64], targets: &[f64]) -> f64 {
    let (outputs, _) = run(params, inputs);
    outputs
        .iter()
        .zip(targets)
        .map(|(y, t)| (y - t).powi(2))
        .sum::<f64>()
        / inputs.len() as f64
}

/// Trains a fresh model on one look-back window.
///
/// The window is z-scored by its own statistics, then every value except the
/// last is used as an input whose target is the value after it. Each epoch is
/// one full-batch gradient step. Training ends at `max_epochs`, or once
/// `early_stop_patience` consecutive epochs improve the loss by less than
/// `early_stop_delta` (relative) and at least `min_epochs` have run.
pub fn train(window: &[f64], config: &LstmConfig) -> Result<TrainOutcome> {
    if window.len() < 2 {
        return Err(Error::Argument(format!(
            "training window needs at least 2 values, got {}",
            window.len()
        )));
    }
    if let Some(pos) = window.iter().position(|v| !v.is_finite()) {
        return Err(Error::data(format!(
            "non-finite value {} at window position {pos}",
            window[pos]
        )));
    }

    let mut model = init_model(config)?;
    model.norm = Normalization::fit(window);
    model.lookback = Some(window.len());

    let z: Vec<f64> = window.iter().map(|&v| model.norm.normalize(v)).collect();
    let (inputs, targets) = (&z[..z.len() - 1], &z[1..]);

    let mut loss = mse(&model.params, inputs, targets);
    let mut loss_history = Vec::with_capacity(config.max_epochs + 1);
    loss_history.push(loss);
    let mut stalled = 0;
    let mut epochs = 0;

    while epochs < config.max_epochs {
        let (_, grad) = loss_and_gradient(&model.params, inputs, targets)?;
        model.params.add_scaled(-config.learning_rate, &grad);
        epochs += 1;

        let next = mse(&model.params, inputs, targets);
        if !next.is_finite() || !model.params.all_finite() {
            return Err(Error::Numerical(format!(
                "training diverged at epoch {epochs}"
            )));
        }
        let improvement = if loss > 0.0 { (loss - next) / loss } else { 0.0 };
        if improvement < config.early_stop_delta {
            stalled += 1;
        } else {
            stalled = 0;
        }
        loss = next;
        loss_history.push(loss);

        if epochs >= config.min_epochs && stalled >= config.early_stop_patience {
            break;
        }
    }

    Ok(TrainOutcome {
        model,
        epochs_used: epochs,
        final_loss: loss,
        loss_history,
    })
}

/// Forecasts the value that follows `window`, in raw units, using the
/// statistics of the window the model was trained on.
pub fn predict_next(model: &LstmModel, window: &[f64]) -> Result<f64> {
    predict_scaled(model, window, model.norm)
}

/// Forecasts the value that follows `window` under the given scaling.
pub fn predict_next_with(model: &LstmModel, window: &[f64], scaling: ForecastScaling) -> Result<f64> {
    match scaling {
        ForecastScaling::Training => predict_next(model, window),
        ForecastScaling::Window => predict_scaled(model, window, Normalization::fit(window)),
    }
}

fn predict_scaled(model: &LstmModel, window: &[f64], norm: Normalization) -> Result<f64> {
    if let Some(b) = model.lookback {
        if window.len() != b {
            return Err(Error::Argument(format!(
                "model expects a window of {b} values, got {}",
                window.len()
            )));
        }
    }
    if window.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("non-finite value in prediction window"));
    }
    let z: Vec<f64> = window.iter().map(|&v| norm.normalize(v)).collect();
    let out = forward(model, &z)?;
    Ok(norm.denormalize(*out.last().expect("non-empty")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_model(hidden: usize) -> LstmModel {
        LstmModel {
            params: LstmParams::zeros(hidden),
            norm: Normalization::default(),
            lookback: None,
        }
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let cfg = LstmConfig::default();
        assert_eq!(init_model(&cfg).unwrap(), init_model(&cfg).unwrap());

        let a = init_model(&LstmConfig { seed: 1, ..cfg.clone() }).unwrap();
        let b = init_model(&LstmConfig { seed: 2, ..cfg }).unwrap();
        assert_ne!(a.params.to_flat(), b.params.to_flat());
    }

    #[test]
    fn init_layout() {
        let m = init_model(&LstmConfig::default()).unwrap();
        let h = m.hidden_units();
        assert_eq!(h, 10);
        assert_eq!(m.params.recurrent_weights.len(), 4 * h * h);
        assert_eq!(m.params.output_bias, 0.0);
        for g in [Gate::Input, Gate::Output, Gate::Candidate] {
            let s = g as usize * h;
            assert!(m.params.biases[s..s + h].iter().all(|&b| b == 0.0));
        }
        let s = Gate::Forget as usize * h;
        assert!(m.params.biases[s..s + h].iter().all(|&b| b == 1.0));
        let bound = 0.5 / (h as f64).sqrt();
        assert!(m.params.input_weights.iter().all(|w| w.abs() <= bound));
        assert_eq!(m.norm, Normalization::default());
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            LstmConfig { hidden_units: 0, ..Default::default() },
            LstmConfig { learning_rate: 0.0, ..Default::default() },
            LstmConfig { learning_rate: -0.1, ..Default::default() },
            LstmConfig { min_epochs: 0, ..Default::default() },
            LstmConfig { min_epochs: 10, max_epochs: 5, ..Default::default() },
            LstmConfig { max_epochs: 51, ..Default::default() },
            LstmConfig { early_stop_delta: -1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(init_model(&cfg), Err(Error::Config(_))), "{cfg:?}");
        }
        let extended = LstmConfig {
            max_epochs: 200,
            allow_extended_epochs: true,
            ..Default::default()
        };
        assert!(extended.validate().is_ok());
    }

    #[test]
    fn zero_model_outputs_zero() {
        let m = zero_model(10);
        assert_eq!(forward(&m, &[0.3, -2.0, 7.5]).unwrap(), vec![0.0; 3]);
        assert_eq!(predict_next(&m, &[12.0, 40.0, -3.0]).unwrap(), 0.0);
    }

    #[test]
    fn forward_shapes_and_errors() {
        let m = init_model(&LstmConfig::default()).unwrap();
        assert_eq!(forward(&m, &[0.1, 0.2, 0.3]).unwrap().len(), 3);
        assert!(matches!(forward(&m, &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn prediction_is_denormalized() {
        let mut m = init_model(&LstmConfig::default()).unwrap();
        m.norm = Normalization { mean: 40.0, std: 2.5 };
        let window = [38.0, 41.0, 43.0];
        let z: Vec<f64> = window.iter().map(|v| (v - 40.0) / 2.5).collect();
        let raw = *forward(&m, &z).unwrap().last().unwrap();
        let p = predict_next(&m, &window).unwrap();
        assert!((p - (2.5 * raw + 40.0)).abs() < 1e-12);
    }

    #[test]
    fn window_scaling_is_level_invariant() {
        let out = train(&[10.0, 12.0, 11.0], &LstmConfig::default()).unwrap();
        let w = ForecastScaling::Window;
        let base = predict_next_with(&out.model, &[10.0, 12.0, 11.0], w).unwrap();
        let shifted = predict_next_with(&out.model, &[510.0, 512.0, 511.0], w).unwrap();
        assert!((shifted - 500.0 - base).abs() < 1e-9);
        assert_eq!(
            predict_next_with(&out.model, &[10.0, 12.0, 11.0], ForecastScaling::Training).unwrap(),
            predict_next(&out.model, &[10.0, 12.0, 11.0]).unwrap()
        );
        // on the training window itself both scalings agree
        assert!((base - predict_next(&out.model, &[10.0, 12.0, 11.0]).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn normalization_round_trip_and_constant_guard() {
        let n = Normalization::fit(&[3.0, 9.0, 27.0, -4.5]);
        for x in [-1e3, -4.5, 0.0, 3.0, 1e-9, 77.7] {
            assert!((n.denormalize(n.normalize(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
        assert_eq!(Normalization::fit(&[5.0, 5.0, 5.0]).std, 1.0);
    }

    #[test]
    fn constant_window_is_learnable() {
        let out = train(&[5.0, 5.0, 5.0], &LstmConfig::default()).unwrap();
        let p = predict_next(&out.model, &[5.0, 5.0, 5.0]).unwrap();
        assert!((p - 5.0).abs() <= 0.5, "prediction {p}");
    }

    #[test]
    fn train_is_deterministic_and_bounded() {
        let cfg = LstmConfig::default();
        let a = train(&[10.0, 20.0, 30.0], &cfg).unwrap();
        let b = train(&[10.0, 20.0, 30.0], &cfg).unwrap();
        assert_eq!(a, b);
        assert!((1..=50).contains(&a.epochs_used));
        assert!(a.final_loss >= 0.0);
        assert_eq!(a.loss_history.len(), a.epochs_used + 1);

        let p1 = predict_next(&a.model, &[10.0, 20.0, 30.0]).unwrap();
        let p2 = predict_next(&a.model, &[10.0, 20.0, 30.0]).unwrap();
        assert!(p1.is_finite());
        assert_eq!(p1.to_bits(), p2.to_bits());
    }

    #[test]
    fn train_rejects_bad_windows() {
        let cfg = LstmConfig::default();
        assert!(matches!(train(&[1.0], &cfg), Err(Error::Argument(_))));
        assert!(matches!(train(&[1.0, f64::NAN, 2.0], &cfg), Err(Error::Data { .. })));
        assert!(matches!(train(&[1.0, f64::INFINITY], &cfg), Err(Error::Data { .. })));
    }

    #[test]
    fn predict_checks_window_length() {
        let out = train(&[1.0, 2.0, 3.0], &LstmConfig::default()).unwrap();
        assert!(matches!(predict_next(&out.model, &[1.0, 2.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn min_epochs_respected() {
        let cfg = LstmConfig {
            min_epochs: 20,
            early_stop_delta: 10.0,
            ..Default::default()
        };
        let out = train(&[1.0, 4.0, 2.0], &cfg).unwrap();
        assert_eq!(out.epochs_used, 20);

        let cfg = LstmConfig { early_stop_delta: 10.0, ..Default::default() };
        let out = train(&[1.0, 4.0, 2.0], &cfg).unwrap();
        assert_eq!(out.epochs_used, cfg.early_stop_patience);
    }

    #[test]
    fn flat_round_trip() {
        let m = init_model(&LstmConfig { hidden_units: 3, ..Default::default() }).unwrap();
        let flat = m.params.to_flat();
        let mut p = LstmParams::zeros(3);
        p.set_flat(&flat).unwrap();
        assert_eq!(p, m.params);
        assert!(p.set_flat(&flat[1..]).is_err());
    }
}
