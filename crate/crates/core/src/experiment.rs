//! Multi-method experiment runs and their on-disk outputs.
//!
//! An experiment trains every requested method from the same initial seeds,
//! scores the configuration each run selects, and writes:
//!
//! ```text
//! <out>/report.json              summary + per-seed records (docs/report.schema.json)
//! <out>/dataset.csv              x1,x2,y,split
//! <out>/traces/<label>_<seed>.csv epoch,objective,likelihood,regularizer,grad_mean_abs,lr
//! <out>/gradients.csv            method,epoch,grad_mean_abs_mean,grad_mean_abs_std
//! <out>/landscape_<label>.csv    a,b,objective
//! ```
//!
//! Labels are `mle`, `elbo` and `selbo-<λ>`. Everything except the
//! `generated_at` timestamp is a function of the arguments.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzParams;
use crate::binn::CONFIG_BITS;
use crate::data::{self, Dataset, DatasetKind};
use crate::objectives::{CostTable, LikelihoodMode, ObjectiveKind, ObjectiveSpec};
use crate::oracle::{self, ExhaustiveResult};
use crate::qsim::BitString;
use crate::stats::{summarize, StdKind, Summary};
use crate::train::{
    init_seeds, multi_seed, select_configuration, selection_seed, CircuitObjective, GradientMode,
    Objective, RunTrace, TrainConfig,
};
use crate::{seed, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_LAMBDA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Elbo,
    Selbo,
    Exhaustive,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Method::Mle),
            "elbo" => Ok(Method::Elbo),
            "selbo" => Ok(Method::Selbo),
            "exhaustive" => Ok(Method::Exhaustive),
            other => Err(Error::InvalidArgument(format!(
                "unknown method {other:?} (expected mle, elbo, selbo or exhaustive)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mle => "mle",
            Method::Elbo => "elbo",
            Method::Selbo => "selbo",
            Method::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeArgs {
    pub resolution: usize,
    pub extent: f64,
}

impl Default for LandscapeArgs {
    fn default() -> Self {
        Self {
            resolution: 11,
            extent: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentArgs {
    pub dataset: DatasetKind,
    pub methods: Vec<Method>,
    pub lambdas: Vec<f64>,
    pub layers: usize,
    pub shots: usize,
    pub prior_shots: usize,
    pub epochs: usize,
    pub seeds: usize,
    pub base_seed: u64,
    /// Dataset generator seed; defaults to `base_seed`.
    pub data_seed: Option<u64>,
    pub likelihood_mode: LikelihoodMode,
    pub grad_mode: GradientMode,
    pub std_kind: StdKind,
    pub landscape: Option<LandscapeArgs>,
}

impl Default for ExperimentArgs {
    fn default() -> Self {
        Self {
            dataset: DatasetKind::Gaussian,
            methods: vec![Method::Mle],
            lambdas: Vec::new(),
            layers: 1,
            shots: 100,
            prior_shots: 100,
            epochs: 200,
            seeds: 100,
            base_seed: 0,
            data_seed: None,
            likelihood_mode: LikelihoodMode::Sampled,
            grad_mode: GradientMode::Shift,
            std_kind: StdKind::Sample,
            landscape: None,
        }
    }
}

/// One trained method: an objective plus, for SELBO, its λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodRun {
    pub kind: ObjectiveKind,
    pub lambda: Option<f64>,
}

impl MethodRun {
    pub fn label(&self) -> String {
        match (self.kind, self.lambda) {
            (ObjectiveKind::Mle, _) => "mle".into(),
            (ObjectiveKind::Elbo, _) => "elbo".into(),
            (ObjectiveKind::Selbo, Some(l)) => format!("selbo-{l}"),
            (ObjectiveKind::Selbo, None) => "selbo".into(),
        }
    }
}

impl ExperimentArgs {
    fn lambdas_or_default(&self) -> Vec<f64> {
        if self.lambdas.is_empty() {
            vec![DEFAULT_LAMBDA]
        } else {
            self.lambdas.clone()
        }
    }

    /// Rejects inconsistent flag combinations.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one method is required".into(),
            ));
        }
        let has_selbo = self.methods.contains(&Method::Selbo);
        if !self.lambdas.is_empty() && !has_selbo {
            return Err(Error::InvalidArgument(
                "--lambda only applies to --method selbo".into(),
            ));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and >= 0, got {l}"
            )));
        }
        if self.layers == 0 || self.epochs == 0 || self.seeds == 0 || self.shots == 0 {
            return Err(Error::InvalidArgument(
                "layers, epochs, seeds and shots must all be at least 1".into(),
            ));
        }
        if has_selbo && (self.shots < 2 || self.prior_shots < 2) {
            return Err(Error::TooFewSamples(self.shots, self.prior_shots));
        }
        if let Some(l) = &self.landscape {
            if l.resolution == 0 || !(l.extent >= 0.0 && l.extent.is_finite()) {
                return Err(Error::InvalidArgument(
                    "landscape needs resolution >= 1 and a finite extent >= 0".into(),
                ));
            }
        }
        for m in self.method_runs() {
            self.train_config(m).validate()?;
        }
        Ok(())
    }

    /// The trained methods in report order; SELBO expands over λ.
    pub fn method_runs(&self) -> Vec<MethodRun> {
        let mut out = Vec::new();
        for m in &self.methods {
            match m {
                Method::Mle => out.push(MethodRun {
                    kind: ObjectiveKind::Mle,
                    lambda: None,
                }),
                Method::Elbo => out.push(MethodRun {
                    kind: ObjectiveKind::Elbo,
                    lambda: None,
                }),
                Method::Selbo => {
                    out.extend(self.lambdas_or_default().into_iter().map(|l| MethodRun {
                        kind: ObjectiveKind::Selbo,
                        lambda: Some(l),
                    }))
                }
                Method::Exhaustive => {}
            }
        }
        out
    }

    pub fn objective_spec(&self, run: MethodRun) -> ObjectiveSpec {
        let base = match run.kind {
            ObjectiveKind::Mle => ObjectiveSpec::mle(),
            ObjectiveKind::Elbo => ObjectiveSpec::elbo(),
            ObjectiveKind::Selbo => ObjectiveSpec::selbo(run.lambda.unwrap_or(DEFAULT_LAMBDA)),
        };
        ObjectiveSpec {
            n_shots: self.shots,
            prior_shots: self.prior_shots,
            likelihood_mode: self.likelihood_mode,
            ..base
        }
    }

    pub fn train_config(&self, run: MethodRun) -> TrainConfig {
        TrainConfig {
            n_epochs: self.epochs,
            grad_mode: self.grad_mode,
            ..TrainConfig::with_objective(self.objective_spec(run))
        }
    }

    pub fn data_seed(&self) -> u64 {
        self.data_seed.unwrap_or(self.base_seed)
    }
}

/// Per-seed outcome of one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub best_objective: f64,
    pub best_epoch: usize,
    pub final_learning_rate: f64,
    pub selected_config: BitString,
    pub selected_train_bce: f64,
    pub test_bce: f64,
    pub test_accuracy: f64,
    pub sample_mean_test_bce: f64,
    pub sample_mean_test_accuracy: f64,
    pub distinct_configs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub label: String,
    pub method: ObjectiveKind,
    pub lambda: Option<f64>,
    pub init_seeds: Vec<u64>,
    /// Modal-configuration test metrics (headline numbers).
    pub test_bce: Summary,
    pub test_accuracy: Summary,
    /// Test metrics averaged over all measured configurations.
    pub sample_mean_test_bce: Summary,
    pub sample_mean_test_accuracy: Summary,
    pub runs: Vec<SeedRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub dataset: DatasetKind,
    pub data_seed: u64,
    pub base_seed: u64,
    pub n_keys: usize,
    pub n_qubits: usize,
    pub layers: usize,
    pub shots: usize,
    pub prior_shots: usize,
    pub bandwidth: f64,
    pub epochs: usize,
    pub patience: usize,
    pub min_delta: f64,
    pub decay_factor: f64,
    pub learning_rate: f64,
    pub likelihood_mode: LikelihoodMode,
    pub grad_mode: GradientMode,
    pub std_kind: StdKind,
    pub methods: Vec<Method>,
    pub lambdas: Vec<f64>,
    pub landscape: Option<LandscapeArgs>,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    /// Unix seconds; the only field that differs between identical runs.
    pub generated_at: u64,
    pub config: ReportConfig,
    pub init_seeds: Vec<u64>,
    pub shared_init_seeds: bool,
    pub methods: Vec<MethodReport>,
    pub exhaustive: Option<ExhaustiveResult>,
}

/// Objective values on a 2-D slice `θ* + a·d₁ + b·d₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct Landscape {
    pub directions: [Vec<f64>; 2],
    /// `(a, b, objective)`, `a` varying slowest.
    pub points: Vec<(f64, f64, f64)>,
}

/// Everything one experiment produces.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub dataset: Dataset,
    /// `(label, traces)` in report order.
    pub traces: Vec<(String, Vec<RunTrace>)>,
    pub landscapes: Vec<(String, Landscape)>,
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Two seeded orthonormal directions in angle space.
pub fn orthonormal_directions(dim: usize, rng_seed: u64) -> Result<[Vec<f64>; 2]> {
    if dim < 2 {
        return Err(Error::InvalidArgument(
            "a 2-D slice needs at least 2 parameters".into(),
        ));
    }
    let mut rng = seed::rng(rng_seed);
    let mut gaussian =
        || -> Vec<f64> { (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut d1 = gaussian();
    let n1 = norm(&d1);
    d1.iter_mut().for_each(|x| *x /= n1);
    let mut d2 = gaussian();
    let proj: f64 = d1.iter().zip(&d2).map(|(a, b)| a * b).sum();
    d2.iter_mut().zip(&d1).for_each(|(x, a)| *x -= proj * a);
    let n2 = norm(&d2);
    d2.iter_mut().for_each(|x| *x /= n2);
    Ok([d1, d2])
}

/// Grid coordinates `−extent … extent`; a single point sits at 0.
pub fn grid_axis(resolution: usize, extent: f64) -> Vec<f64> {
    if resolution == 1 {
        return vec![0.0];
    }
    (0..resolution)
        .map(|i| -extent + 2.0 * extent * i as f64 / (resolution - 1) as f64)
        .collect()
}

/// Evaluates `objective` on a `resolution × resolution` grid around `center`.
/// Every grid point uses `eval_seed`, so sampled objectives share their
/// random numbers across the slice.
pub fn landscape_slice<O: Objective>(
    center: &AnsatzParams,
    objective: &O,
    resolution: usize,
    extent: f64,
    direction_seed: u64,
    eval_seed: u64,
) -> Result<Landscape> {
    let directions = orthonormal_directions(center.len(), direction_seed)?;
    let axis = grid_axis(resolution, extent);
    let coords: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .collect();
    let points = coords
        .into_par_iter()
        .map(|(a, b)| {
            let mut p = center.clone();
            for (i, theta) in p.angles_mut().iter_mut().enumerate() {
                *theta += a * directions[0][i] + b * directions[1][i];
            }
            objective.evaluate(&p, eval_seed).map(|e| (a, b, e.value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Landscape { directions, points })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientRow {
    pub method: String,
    pub epoch: usize,
    pub mean: f64,
    pub std: f64,
}

/// Per-epoch mean and spread over seeds of the mean absolute gradient.
pub fn gradient_trace_export(
    traces: &[(String, Vec<RunTrace>)],
    kind: StdKind,
) -> Vec<GradientRow> {
    let mut rows = Vec::new();
    for (label, runs) in traces {
        let n_epochs = runs.iter().map(|r| r.epochs.len()).min().unwrap_or(0);
        for e in 0..n_epochs {
            let values: Vec<f64> = runs.iter().map(|r| r.epochs[e].grad_mean_abs).collect();
            let s = summarize(&values, kind);
            rows.push(GradientRow {
                method: label.clone(),
                epoch: runs[0].epochs[e].epoch,
                mean: s.mean,
                std: s.std,
            });
        }
    }
    rows
}

fn seed_record(trace: &RunTrace, dataset: &Dataset, shots: usize) -> Result<SeedRecord> {
    let sel = select_configuration(
        &trace.best_params,
        dataset,
        shots,
        selection_seed(trace.seed),
    )?;
    Ok(SeedRecord {
        seed: trace.seed,
        best_objective: trace.best_objective,
        best_epoch: trace.best_epoch,
        final_learning_rate: trace.final_learning_rate,
        selected_config: sel.config,
        selected_train_bce: sel.train_bce,
        test_bce: sel.test_bce,
        test_accuracy: sel.test_accuracy,
        sample_mean_test_bce: sel.sample_mean_test_bce,
        sample_mean_test_accuracy: sel.sample_mean_test_accuracy,
        distinct_configs: sel.distinct_configs,
    })
}

/// Summaries recomputed from per-seed records.
pub fn summarize_runs(
    label: String,
    run: MethodRun,
    init_seeds: Vec<u64>,
    runs: Vec<SeedRecord>,
    kind: StdKind,
) -> MethodReport {
    let col = |f: fn(&SeedRecord) -> f64| -> Summary {
        summarize(&runs.iter().map(f).collect::<Vec<_>>(), kind)
    };
    MethodReport {
        label,
        method: run.kind,
        lambda: run.lambda,
        init_seeds,
        test_bce: col(|r| r.test_bce),
        test_accuracy: col(|r| r.test_accuracy),
        sample_mean_test_bce: col(|r| r.sample_mean_test_bce),
        sample_mean_test_accuracy: col(|r| r.sample_mean_test_accuracy),
        runs,
    }
}

fn landscape_direction_seed(base_seed: u64) -> u64 {
    seed::derive(base_seed, u64::MAX - 1, 0)
}

fn landscape_eval_seed(base_seed: u64) -> u64 {
    seed::derive(base_seed, u64::MAX - 2, 0)
}

/// Trains and scores every requested method on `dataset` using `table`.
pub fn run_on_dataset(
    args: &ExperimentArgs,
    dataset: &Dataset,
    table: &CostTable,
) -> Result<ExperimentOutput> {
    args.validate()?;
    let seeds = init_seeds(args.seeds, args.base_seed);
    let mut methods = Vec::new();
    let mut traces = Vec::new();
    let mut landscapes = Vec::new();

    for run in args.method_runs() {
        let config = args.train_config(run);
        let label = run.label();
        let runs = multi_seed(&config, table, args.layers, args.seeds, args.base_seed)?;
        let records = runs
            .par_iter()
            .map(|t| seed_record(t, dataset, args.shots))
            .collect::<Result<Vec<_>>>()?;
        let used: Vec<u64> = runs.iter().map(|t| t.seed).collect();
        methods.push(summarize_runs(
            label.clone(),
            run,
            used,
            records,
            args.std_kind,
        ));

        if let Some(l) = &args.landscape {
            let objective = CircuitObjective::new(config.objective, table, config.grad_mode);
            let slice = landscape_slice(
                &runs[0].best_params,
                &objective,
                l.resolution,
                l.extent,
                landscape_direction_seed(args.base_seed),
                landscape_eval_seed(args.base_seed),
            )?;
            landscapes.push((label.clone(), slice));
        }
        traces.push((label, runs));
    }

    let exhaustive = if args.methods.contains(&Method::Exhaustive) {
        Some(oracle::exhaustive_from_table(table, dataset)?)
    } else {
        None
    };

    let shared_init_seeds = methods.iter().all(|m| m.init_seeds == seeds);
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        generated_at: unix_now(),
        config: ReportConfig {
            dataset: args.dataset,
            data_seed: args.data_seed(),
            base_seed: args.base_seed,
            n_keys: args.seeds,
            n_qubits: table.n_qubits(),
            layers: args.layers,
            shots: args.shots,
            prior_shots: args.prior_shots,
            bandwidth: table.n_qubits() as f64 / 4.0,
            epochs: args.epochs,
            patience: TrainConfig::default().patience,
            min_delta: TrainConfig::default().min_delta,
            decay_factor: TrainConfig::default().decay_factor,
            learning_rate: TrainConfig::default().learning_rate,
            likelihood_mode: args.likelihood_mode,
            grad_mode: args.grad_mode,
            std_kind: args.std_kind,
            methods: args.methods.clone(),
            lambdas: if args.methods.contains(&Method::Selbo) {
                args.lambdas_or_default()
            } else {
                Vec::new()
            },
            landscape: args.landscape,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        init_seeds: seeds,
        shared_init_seeds,
        methods,
        exhaustive,
    };
    Ok(ExperimentOutput {
        report,
        dataset: dataset.clone(),
        traces,
        landscapes,
    })
}

/// Generates the dataset, builds its cost table and runs every method.
pub fn run_experiment(args: &ExperimentArgs) -> Result<ExperimentOutput> {
    args.validate()?;
    let dataset = data::generate(args.dataset, args.data_seed());
    let table = oracle::cost_table(&dataset.train)?;
    debug_assert_eq!(table.n_qubits(), CONFIG_BITS);
    run_on_dataset(args, &dataset, &table)
}

pub fn write_trace_csv<W: Write>(trace: &RunTrace, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "epoch",
        "objective",
        "likelihood",
        "regularizer",
        "grad_mean_abs",
        "lr",
    ])?;
    for e in &trace.epochs {
        w.write_record([
            e.epoch.to_string(),
            e.objective.to_string(),
            e.likelihood.to_string(),
            e.regularizer.to_string(),
            e.grad_mean_abs.to_string(),
            e.lr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_landscape_csv<W: Write>(landscape: &Landscape, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["a", "b", "objective"])?;
    for (a, b, v) in &landscape.points {
        w.write_record([a.to_string(), b.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_gradient_csv<W: Write>(rows: &[GradientRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["method", "epoch", "grad_mean_abs_mean", "grad_mean_abs_std"])?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.epoch.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every output file under `dir`, creating it if needed.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&output.report)?;
    fs::write(dir.join("report.json"), json + "\n")?;
    data::save_csv(&output.dataset, dir.join("dataset.csv"))?;

    if !output.traces.is_empty() {
        let trace_dir = dir.join("traces");
        fs::create_dir_all(&trace_dir)?;
        for (label, runs) in &output.traces {
            for t in runs {
                let f = fs::File::create(trace_dir.join(format!("{label}_{}.csv", t.seed)))?;
                write_trace_csv(t, std::io::BufWriter::new(f))?;
            }
        }
        let rows = gradient_trace_export(&output.traces, output.report.config.std_kind);
        write_gradient_csv(&rows, fs::File::create(dir.join("gradients.csv"))?)?;
    }
    for (label, l) in &output.landscapes {
        write_landscape_csv(
            l,
            fs::File::create(dir.join(format!("landscape_{label}.csv")))?,
        )?;
    }
    Ok(())
}

/// Copy of a report JSON value with the timestamp removed.
pub fn strip_timestamp(mut report: serde_json::Value) -> serde_json::Value {
    if let Some(obj) = report.as_object_mut() {
        obj.remove("generated_at");
    }
    report
}
