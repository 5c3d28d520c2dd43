mod common;

use std::fs;

use qhypernet::ansatz::AnsatzParams;
use qhypernet::data::{generate, DatasetKind};
use qhypernet::experiment::{
    gradient_trace_export, landscape_slice, orthonormal_directions, run_experiment,
    strip_timestamp, write_outputs, ExperimentArgs, LandscapeArgs, Method,
};
use qhypernet::grad::GradientVector;
use qhypernet::objectives::{objective, Evaluation, LikelihoodMode, ObjectiveSpec};
use qhypernet::oracle::cost_table;
use qhypernet::stats::StdKind;
use qhypernet::train::{fit_objective, CircuitObjective, GradientMode, Objective, TrainConfig};
use qhypernet::Result;
use serde_json::Value;

fn small(methods: Vec<Method>) -> ExperimentArgs {
    ExperimentArgs {
        methods,
        seeds: 2,
        epochs: 3,
        ..ExperimentArgs::default()
    }
}

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(report: &Value) {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn report_matches_schema_and_its_own_records() {
    let args = ExperimentArgs {
        landscape: Some(LandscapeArgs {
            resolution: 2,
            extent: 0.5,
        }),
        ..small(vec![
            Method::Mle,
            Method::Elbo,
            Method::Selbo,
            Method::Exhaustive,
        ])
    };
    let out = run_experiment(&args).unwrap();
    let json = serde_json::to_value(&out.report).unwrap();
    assert_valid(&json);

    let r = &out.report;
    assert!(r.shared_init_seeds);
    assert_eq!(r.methods.len(), 3);
    assert_eq!(r.methods[2].label, "selbo-0.01");
    for m in &r.methods {
        assert_eq!(m.runs.len(), args.seeds);
        assert_eq!(m.init_seeds, r.init_seeds);
        let acc: Vec<f64> = m.runs.iter().map(|x| x.test_accuracy).collect();
        let bce: Vec<f64> = m.runs.iter().map(|x| x.test_bce).collect();
        let (am, asd) = common::two_pass(&acc, 1);
        let (bm, bsd) = common::two_pass(&bce, 1);
        assert!(
            (m.test_accuracy.mean - am).abs() < 1e-12 && (m.test_accuracy.std - asd).abs() < 1e-12
        );
        assert!((m.test_bce.mean - bm).abs() < 1e-12 && (m.test_bce.std - bsd).abs() < 1e-12);
        let ex = r.exhaustive.as_ref().unwrap();
        assert!(m
            .runs
            .iter()
            .all(|x| ex.best_train_loss <= x.selected_train_bce));
    }
    assert_eq!(out.landscapes.len(), 3);
}

#[test]
fn exhaustive_only_report() {
    let out = run_experiment(&small(vec![Method::Exhaustive])).unwrap();
    let json = serde_json::to_value(&out.report).unwrap();
    assert_valid(&json);
    assert!(out.report.methods.is_empty());
    let mut keys: Vec<&str> = json["exhaustive"]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "best_config",
            "best_train_loss",
            "evaluated_configs",
            "log_marginal_likelihood",
            "test_accuracy",
            "test_loss"
        ]
    );
    assert_eq!(json["exhaustive"]["evaluated_configs"], 16384);
}

#[test]
fn rerun_is_byte_identical_apart_from_timestamp() {
    let args = small(vec![Method::Mle, Method::Selbo]);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        write_outputs(&run_experiment(&args).unwrap(), d.path()).unwrap();
    }
    let strip = |p: &std::path::Path| -> String {
        fs::read_to_string(p.join("report.json"))
            .unwrap()
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"generated_at\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(dirs[0].path()), strip(dirs[1].path()));
    for f in [
        "dataset.csv",
        "gradients.csv",
        "traces/mle_0.csv",
        "traces/selbo-0.01_1.csv",
    ] {
        assert_eq!(
            fs::read(dirs[0].path().join(f)).unwrap(),
            fs::read(dirs[1].path().join(f)).unwrap(),
            "{f}"
        );
    }
    let header = fs::read_to_string(dirs[0].path().join("traces/mle_0.csv")).unwrap();
    assert!(header.starts_with("epoch,objective,likelihood,regularizer,grad_mean_abs,lr\n"));
    let v: Value =
        serde_json::from_str(&fs::read_to_string(dirs[0].path().join("report.json")).unwrap())
            .unwrap();
    assert!(strip_timestamp(v).get("generated_at").is_none());
}

#[test]
fn zero_lambda_matches_mle_per_seed() {
    let args = ExperimentArgs {
        lambdas: vec![0.0],
        ..small(vec![Method::Mle, Method::Selbo])
    };
    let out = run_experiment(&args).unwrap();
    let (mle, selbo) = (&out.traces[0].1, &out.traces[1].1);
    for (a, b) in mle.iter().zip(selbo) {
        assert_eq!(
            a.epochs.iter().map(|e| e.likelihood).collect::<Vec<_>>(),
            b.epochs.iter().map(|e| e.likelihood).collect::<Vec<_>>()
        );
    }
    assert_eq!(out.report.methods[0].runs, out.report.methods[1].runs);
}

#[test]
fn invalid_flag_combinations() {
    let lambda_without_selbo = ExperimentArgs {
        lambdas: vec![0.1],
        ..small(vec![Method::Mle])
    };
    assert!(run_experiment(&lambda_without_selbo).is_err());
    assert!(run_experiment(&small(vec![])).is_err());
    let zero_seeds = ExperimentArgs {
        seeds: 0,
        ..small(vec![Method::Mle])
    };
    assert!(run_experiment(&zero_seeds).is_err());
}

#[test]
fn landscape_grid_matches_direct_evaluation() {
    let d = generate(DatasetKind::Moon, 0);
    let table = cost_table(&d.train).unwrap();
    let spec = ObjectiveSpec::elbo().with_likelihood_mode(LikelihoodMode::Exact);
    let obj = CircuitObjective::new(spec, &table, GradientMode::Exact);
    let center = common::random_params(14, 1, 2);
    let slice = landscape_slice(&center, &obj, 3, 0.4, 9, 0).unwrap();
    assert_eq!(slice.points.len(), 9);
    let dirs = orthonormal_directions(center.len(), 9).unwrap();
    assert_eq!(slice.directions, dirs);
    for &(a, b, v) in &slice.points {
        let mut p = center.clone();
        for (i, t) in p.angles_mut().iter_mut().enumerate() {
            *t += a * dirs[0][i] + b * dirs[1][i];
        }
        assert!((objective(&p, &spec, &table, 0).unwrap() - v).abs() < 1e-12);
    }
    let mid = slice.points[4];
    assert_eq!((mid.0, mid.1), (0.0, 0.0));
    assert!((mid.2 - objective(&center, &spec, &table, 0).unwrap()).abs() < 1e-12);
}

struct Flat;

impl Objective for Flat {
    fn evaluate(&self, _: &AnsatzParams, _: u64) -> Result<Evaluation> {
        Ok(Evaluation {
            value: 1.0,
            likelihood: 1.0,
            regularizer: 0.0,
        })
    }

    fn gradient(&self, p: &AnsatzParams, _: u64) -> Result<GradientVector> {
        Ok(GradientVector::zeros(p.len()))
    }
}

#[test]
fn gradient_export() {
    let init = common::random_params(2, 1, 0);
    let c = TrainConfig {
        n_epochs: 6,
        ..TrainConfig::default()
    };
    let flat: Vec<_> = (0..3)
        .map(|s| fit_objective(&init, &c, &Flat, s).unwrap().1)
        .collect();
    let rows = gradient_trace_export(&[("flat".into(), flat)], StdKind::Sample);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.mean == 0.0 && r.std == 0.0));

    let table = common::random_table(3, 5);
    let cfg = TrainConfig {
        n_epochs: 8,
        ..TrainConfig::with_objective(ObjectiveSpec::mle())
    };
    let runs = qhypernet::train::multi_seed(&cfg, &table, 1, 5, 0).unwrap();
    let rows = gradient_trace_export(&[("mle".into(), runs.clone())], StdKind::Sample);
    for (e, row) in rows.iter().enumerate() {
        let col: Vec<f64> = runs.iter().map(|r| r.epochs[e].grad_mean_abs).collect();
        let (m, sd) = common::two_pass(&col, 1);
        assert!((row.mean - m).abs() < 1e-12 && (row.std - sd).abs() < 1e-12);
        assert_eq!(row.epoch, e + 1);
    }
    let single = gradient_trace_export(&[("mle".into(), runs[..1].to_vec())], StdKind::Sample);
    assert!(single.iter().all(|r| r.std == 0.0));
}
