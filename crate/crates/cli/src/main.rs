//! `qhypernet`: train circuit-generated binary networks and write reports.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};
use qhypernet::data::DatasetKind;
use qhypernet::experiment::{run_experiment, write_outputs, ExperimentArgs, LandscapeArgs, Method};
use qhypernet::objectives::LikelihoodMode;
use qhypernet::stats::{StdKind, Summary};
use qhypernet::train::GradientMode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DatasetArg {
    Gaussian,
    Moon,
    Rings,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Mle,
    Elbo,
    Selbo,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LikelihoodArg {
    Sampled,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GradArg {
    Shift,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StdArg {
    Sample,
    Population,
}

/// Train a variational circuit whose measurements are binary network weights.
#[derive(Debug, Parser)]
#[command(name = "qhypernet", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "gaussian")]
    dataset: DatasetArg,
    /// Repeat to run several methods with shared initial seeds.
    #[arg(long = "method", value_enum, required = true)]
    methods: Vec<MethodArg>,
    /// SELBO regularisation strength; repeatable [default: 0.01].
    #[arg(long = "lambda")]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// Measurements per objective evaluation.
    #[arg(long, default_value_t = 100)]
    shots: usize,
    /// Uniform-prior samples for the MMD term.
    #[arg(long, default_value_t = 100)]
    prior_shots: usize,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// Number of initialisations.
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// Dataset generator seed [default: --base-seed].
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long, value_enum, default_value = "sampled")]
    likelihood_mode: LikelihoodArg,
    #[arg(long, value_enum, default_value = "shift")]
    grad_mode: GradArg,
    #[arg(long = "std", value_enum, default_value = "sample")]
    std_kind: StdArg,
    /// Grid points per axis of the loss-landscape slice.
    #[arg(long, default_value_t = 11)]
    landscape_resolution: usize,
    #[arg(long, default_value_t = 1.0)]
    landscape_extent: f64,
    #[arg(long)]
    no_landscape: bool,
    #[arg(long, default_value = "qhypernet-out")]
    out: PathBuf,
}

impl Cli {
    fn experiment_args(&self) -> ExperimentArgs {
        ExperimentArgs {
            dataset: match self.dataset {
                DatasetArg::Gaussian => DatasetKind::Gaussian,
                DatasetArg::Moon => DatasetKind::Moon,
                DatasetArg::Rings => DatasetKind::Rings,
            },
            methods: self
                .methods
                .iter()
                .map(|m| match m {
                    MethodArg::Mle => Method::Mle,
                    MethodArg::Elbo => Method::Elbo,
                    MethodArg::Selbo => Method::Selbo,
                    MethodArg::Exhaustive => Method::Exhaustive,
                })
                .collect(),
            lambdas: self.lambdas.clone(),
            layers: self.layers,
            shots: self.shots,
            prior_shots: self.prior_shots,
            epochs: self.epochs,
            seeds: self.seeds,
            base_seed: self.base_seed,
            data_seed: self.data_seed,
            likelihood_mode: match self.likelihood_mode {
                LikelihoodArg::Sampled => LikelihoodMode::Sampled,
                LikelihoodArg::Exact => LikelihoodMode::Exact,
            },
            grad_mode: match self.grad_mode {
                GradArg::Shift => GradientMode::Shift,
                GradArg::Exact => GradientMode::Exact,
            },
            std_kind: match self.std_kind {
                StdArg::Sample => StdKind::Sample,
                StdArg::Population => StdKind::Population,
            },
            landscape: (!self.no_landscape).then_some(LandscapeArgs {
                resolution: self.landscape_resolution,
                extent: self.landscape_extent,
            }),
        }
    }
}

fn show(s: &Summary) -> String {
    format!("{:.3} ± {:.3}", s.mean, s.std)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.experiment_args();
    if let Err(e) = args.validate() {
        Cli::command().error(ErrorKind::ArgumentConflict, e).exit();
    }
    match run(&cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli, args: &ExperimentArgs) -> anyhow::Result<()> {
    let out = run_experiment(args).context("experiment failed")?;
    write_outputs(&out, &cli.out)
        .with_context(|| format!("writing outputs to {}", cli.out.display()))?;

    println!(
        "{:<16} {:>15} {:>15}",
        "method", "test BCE", "test accuracy"
    );
    for m in &out.report.methods {
        println!(
            "{:<16} {:>15} {:>15}",
            m.label,
            show(&m.test_bce),
            show(&m.test_accuracy)
        );
    }
    if let Some(ex) = &out.report.exhaustive {
        println!(
            "{:<16} {:>15.3} {:>15.3}",
            "exhaustive", ex.test_loss, ex.test_accuracy
        );
    }
    println!("wrote {}", cli.out.join("report.json").display());
    Ok(())
}
