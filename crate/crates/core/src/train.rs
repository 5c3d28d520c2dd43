//! Gradient ascent on the circuit angles.
//!
//! Each epoch computes a gradient at the current angles, takes an ascent
//! step, re-evaluates the objective and keeps the best angles seen so far.
//! The step size is halved (by default) whenever the objective has failed
//! to beat the running best by `min_delta` for `patience` epochs in a row.
//!
//! Seeds: the initial evaluation uses `derive(seed, 0, 0)`; epoch `e`
//! evaluates at `derive(seed, e, 0)` and builds its gradient from
//! `derive(seed, e, 1)`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{init_params, run_ansatz, AnsatzParams};
use crate::binn::{self, LabeledPoint};
use crate::data::Dataset;
use crate::grad::{exact_objective_gradient, shift_gradient, GradientVector};
use crate::objectives::{self, CostTable, Evaluation, ObjectiveSpec};
use crate::qsim::{BitString, Sampler};
use crate::{seed, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientMode {
    /// Parameter shift applied to the whole (sampled) objective.
    Shift,
    /// Exact gradient of the population objective.
    Exact,
}

/// Something the optimiser can climb.
pub trait Objective: Sync {
    fn evaluate(&self, params: &AnsatzParams, rng_seed: u64) -> Result<Evaluation>;
    fn gradient(&self, params: &AnsatzParams, rng_seed: u64) -> Result<GradientVector>;
}

/// One of the three circuit objectives over a cost table.
#[derive(Clone, Copy, Debug)]
pub struct CircuitObjective<'a> {
    pub spec: ObjectiveSpec,
    pub table: &'a CostTable,
    pub grad_mode: GradientMode,
}

impl<'a> CircuitObjective<'a> {
    pub fn new(spec: ObjectiveSpec, table: &'a CostTable, grad_mode: GradientMode) -> Self {
        Self {
            spec,
            table,
            grad_mode,
        }
    }
}

impl Objective for CircuitObjective<'_> {
    fn evaluate(&self, params: &AnsatzParams, rng_seed: u64) -> Result<Evaluation> {
        objectives::evaluate(params, &self.spec, self.table, rng_seed)
    }

    fn gradient(&self, params: &AnsatzParams, rng_seed: u64) -> Result<GradientVector> {
        match self.grad_mode {
            GradientMode::Shift => shift_gradient(
                params,
                |p, s| objectives::objective(p, &self.spec, self.table, s),
                rng_seed,
            ),
            GradientMode::Exact => exact_objective_gradient(params, &self.spec, self.table),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_epochs: usize,
    pub patience: usize,
    pub min_delta: f64,
    pub decay_factor: f64,
    pub learning_rate: f64,
    pub objective: ObjectiveSpec,
    pub grad_mode: GradientMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_epochs: 200,
            patience: 3,
            min_delta: 1e-4,
            decay_factor: 0.5,
            learning_rate: 1.0,
            objective: ObjectiveSpec::mle(),
            grad_mode: GradientMode::Shift,
        }
    }
}

impl TrainConfig {
    pub fn with_objective(objective: ObjectiveSpec) -> Self {
        Self {
            objective,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.decay_factor > 0.0 && self.decay_factor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "decay factor must lie in (0, 1), got {}",
                self.decay_factor
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.patience == 0 {
            return Err(Error::InvalidArgument("patience must be at least 1".into()));
        }
        self.objective.validate()
    }
}

/// Reduce-on-plateau step size.
#[derive(Clone, Debug, PartialEq)]
pub struct PlateauScheduler {
    lr: f64,
    patience: usize,
    min_delta: f64,
    decay_factor: f64,
    stalled: usize,
}

impl PlateauScheduler {
    pub fn new(config: &TrainConfig) -> Self {
        Self {
            lr: config.learning_rate,
            patience: config.patience,
            min_delta: config.min_delta,
            decay_factor: config.decay_factor,
            stalled: 0,
        }
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr
    }

    /// `improvement` = this epoch's objective minus the best before it.
    pub fn step(&mut self, improvement: f64) {
        if improvement >= self.min_delta {
            self.stalled = 0;
            return;
        }
        self.stalled += 1;
        if self.stalled >= self.patience {
            self.lr *= self.decay_factor;
            self.stalled = 0;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub objective: f64,
    pub likelihood: f64,
    pub regularizer: f64,
    pub grad_mean_abs: f64,
    /// Step size used for this epoch's update.
    pub lr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub seed: u64,
    pub initial: Evaluation,
    pub epochs: Vec<EpochRecord>,
    pub best_objective: f64,
    /// 0 when the initial angles were never beaten.
    pub best_epoch: usize,
    /// Seed under which `best_params` scored `best_objective`.
    pub best_eval_seed: u64,
    pub best_params: AnsatzParams,
    pub final_learning_rate: f64,
}

impl RunTrace {
    /// Running maximum of the recorded objective, one entry per epoch.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = self.initial.value;
        self.epochs
            .iter()
            .map(|e| {
                best = best.max(e.objective);
                best
            })
            .collect()
    }
}

pub fn eval_seed(run_seed: u64, epoch: usize) -> u64 {
    seed::derive(run_seed, epoch as u64, 0)
}

pub fn gradient_seed(run_seed: u64, epoch: usize) -> u64 {
    seed::derive(run_seed, epoch as u64, 1)
}

/// Runs the ascent loop on any [`Objective`].
pub fn fit_objective<O: Objective>(
    init: &AnsatzParams,
    config: &TrainConfig,
    objective: &O,
    rng_seed: u64,
) -> Result<(AnsatzParams, RunTrace)> {
    config.validate()?;
    let mut params = init.clone();
    let initial_seed = eval_seed(rng_seed, 0);
    let initial = objective.evaluate(&params, initial_seed)?;

    let mut best_params = params.clone();
    let mut best_objective = initial.value;
    let mut best_epoch = 0;
    let mut best_eval_seed = initial_seed;
    let mut scheduler = PlateauScheduler::new(config);
    let mut epochs = Vec::with_capacity(config.n_epochs);

    for epoch in 1..=config.n_epochs {
        let grad = objective.gradient(&params, gradient_seed(rng_seed, epoch))?;
        let lr = scheduler.learning_rate();
        for (theta, g) in params.angles_mut().iter_mut().zip(grad.as_slice()) {
            *theta += lr * g;
        }
        let seed = eval_seed(rng_seed, epoch);
        let eval = objective.evaluate(&params, seed)?;
        let improvement = eval.value - best_objective;
        if eval.value > best_objective {
            best_objective = eval.value;
            best_params = params.clone();
            best_epoch = epoch;
            best_eval_seed = seed;
        }
        scheduler.step(improvement);
        epochs.push(EpochRecord {
            epoch,
            objective: eval.value,
            likelihood: eval.likelihood,
            regularizer: eval.regularizer,
            grad_mean_abs: grad.mean_abs(),
            lr,
        });
    }

    let trace = RunTrace {
        seed: rng_seed,
        initial,
        epochs,
        best_objective,
        best_epoch,
        best_eval_seed,
        best_params: best_params.clone(),
        final_learning_rate: scheduler.learning_rate(),
    };
    Ok((best_params, trace))
}

/// Trains the circuit objective in `config` from `init` on `table`.
pub fn fit(
    init: &AnsatzParams,
    config: &TrainConfig,
    table: &CostTable,
    rng_seed: u64,
) -> Result<(AnsatzParams, RunTrace)> {
    let objective = CircuitObjective::new(config.objective, table, config.grad_mode);
    fit_objective(init, config, &objective, rng_seed)
}

/// Init seeds used by [`multi_seed`]: `base_seed, base_seed + 1, …`.
pub fn init_seeds(n_keys: usize, base_seed: u64) -> Vec<u64> {
    (0..n_keys as u64)
        .map(|i| base_seed.wrapping_add(i))
        .collect()
}

/// `n_keys` independent fits. Run `i` initialises its angles from seed
/// `base_seed + i` and draws its measurements from streams derived from the
/// same seed, so two methods given the same `base_seed` start identically.
pub fn multi_seed(
    config: &TrainConfig,
    table: &CostTable,
    n_layers: usize,
    n_keys: usize,
    base_seed: u64,
) -> Result<Vec<RunTrace>> {
    if n_keys == 0 {
        return Err(Error::InvalidArgument("n_keys must be at least 1".into()));
    }
    init_seeds(n_keys, base_seed)
        .into_par_iter()
        .map(|s| {
            let init = init_params(table.n_qubits(), n_layers, s)?;
            fit(&init, config, table, s).map(|(_, trace)| trace)
        })
        .collect()
}

/// How a trained distribution is turned into one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Most frequent configuration among the shots (ties: smallest index).
    pub config: BitString,
    pub train_bce: f64,
    pub test_bce: f64,
    pub test_accuracy: f64,
    /// Test metrics averaged over every shot rather than the modal one.
    pub sample_mean_test_bce: f64,
    pub sample_mean_test_accuracy: f64,
    pub distinct_configs: usize,
}

fn metrics(config: BitString, data: &[LabeledPoint]) -> Result<(f64, f64)> {
    let net = binn::decode(config)?;
    Ok((binn::bce(&net, data)?, binn::accuracy(&net, data)?))
}

/// Measures `n_shots` configurations from `params` and scores them on the test split.
pub fn select_configuration(
    params: &AnsatzParams,
    dataset: &Dataset,
    n_shots: usize,
    rng_seed: u64,
) -> Result<Selection> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let probs = run_ansatz(params).probabilities();
    let shots = Sampler::new(&probs, params.n_qubits()).draw(n_shots, &mut seed::rng(rng_seed));

    let mut counts: HashMap<BitString, usize> = HashMap::new();
    for &s in &shots {
        *counts.entry(s).or_default() += 1;
    }
    let config = counts
        .iter()
        .max_by(|(a, ca), (b, cb)| ca.cmp(cb).then(b.cmp(a)))
        .map(|(b, _)| *b)
        .expect("at least one shot");

    let mut test_metrics = HashMap::new();
    for &b in counts.keys() {
        test_metrics.insert(b, metrics(b, &dataset.test)?);
    }
    let n = shots.len() as f64;
    let sample_mean_test_bce = shots.iter().map(|b| test_metrics[b].0).sum::<f64>() / n;
    let sample_mean_test_accuracy = shots.iter().map(|b| test_metrics[b].1).sum::<f64>() / n;
    let (test_bce, test_accuracy) = test_metrics[&config];
    Ok(Selection {
        config,
        train_bce: metrics(config, &dataset.train)?.0,
        test_bce,
        test_accuracy,
        sample_mean_test_bce,
        sample_mean_test_accuracy,
        distinct_configs: counts.len(),
    })
}

/// Seed for the post-training selection draw of run `run_seed`.
pub fn selection_seed(run_seed: u64) -> u64 {
    seed::derive(run_seed, u64::MAX, 0)
}
