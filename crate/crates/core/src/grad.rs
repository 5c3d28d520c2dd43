//! Gradients with respect to the circuit angles.
//!
//! Three routes:
//!
//! * [`shift_gradient`]: the parameter-shift rule applied to an arbitrary
//!   objective, `(f(θ + π/2·eᵢ) − f(θ − π/2·eᵢ)) / 2`. Exact for expectations
//!   of a fixed observable; for entropy or MMD terms it is what a hardware
//!   loop would compute, not the true derivative.
//! * [`exact_distribution_gradient`]: exact chain rule through the Born
//!   probabilities. Each `q(σ)` is itself an expectation, so its derivative
//!   obeys the shift identity, and `∂/∂θᵢ Σ w(σ) q(σ)` follows for any
//!   weights `w` evaluated at the unshifted point.
//! * [`finite_difference`]: central differences, used as a test oracle.
//!
//! Shift evaluation `i` (0-based flat angle index) draws its measurements
//! from seed slots `2i + 1` (plus) and `2i + 2` (minus) of the caller's seed.

use std::f64::consts::FRAC_PI_2;
use std::ops::Index;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{run_ansatz, AnsatzParams};
use crate::objectives::{kernel_smooth, CostTable, ObjectiveKind, ObjectiveSpec};
use crate::{seed, Error, Result};

/// One partial derivative per angle, in [`AnsatzParams`] layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientVector(pub Vec<f64>);

impl GradientVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Mean absolute partial derivative.
    pub fn mean_abs(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|g| g.abs()).sum::<f64>() / self.0.len() as f64
    }

    pub fn max_abs_diff(&self, other: &GradientVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for GradientVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub fn plus_slot(i: usize) -> u64 {
    2 * i as u64 + 1
}

pub fn minus_slot(i: usize) -> u64 {
    2 * i as u64 + 2
}

/// Parameter-shift estimate of `∇f`; `2·len(θ)` evaluations, each with its own seed.
pub fn shift_gradient<F>(
    params: &AnsatzParams,
    objective: F,
    rng_seed: u64,
) -> Result<GradientVector>
where
    F: Fn(&AnsatzParams, u64) -> Result<f64> + Sync,
{
    let partials = (0..params.len())
        .into_par_iter()
        .map(|i| {
            let plus = objective(
                &params.nudged(i, FRAC_PI_2),
                seed::derive(rng_seed, 0, plus_slot(i)),
            )?;
            let minus = objective(
                &params.nudged(i, -FRAC_PI_2),
                seed::derive(rng_seed, 0, minus_slot(i)),
            )?;
            Ok((plus - minus) / 2.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GradientVector(partials))
}

/// Exact `∂/∂θᵢ Σ_σ w(σ)·q_θ(σ)` with `w` held fixed; `weights` is indexed
/// by basis index.
pub fn exact_distribution_gradient(
    params: &AnsatzParams,
    weights: &[f64],
) -> Result<GradientVector> {
    if weights.len() != 1 << params.n_qubits() {
        return Err(Error::InvalidArgument(format!(
            "{} weights supplied for a {}-qubit distribution",
            weights.len(),
            params.n_qubits()
        )));
    }
    let expectation = |p: &AnsatzParams| -> f64 {
        run_ansatz(p)
            .probabilities()
            .iter()
            .zip(weights)
            .map(|(q, w)| q * w)
            .sum()
    };
    let partials = (0..params.len())
        .into_par_iter()
        .map(|i| {
            (expectation(&params.nudged(i, FRAC_PI_2)) - expectation(&params.nudged(i, -FRAC_PI_2)))
                / 2.0
        })
        .collect();
    Ok(GradientVector(partials))
}

/// Per-configuration weights whose exact distribution gradient is the true
/// gradient of the population version of `spec` at `params`:
///
/// * MLE:   `log p(σ)`
/// * ELBO:  `log p(σ) − 1 − ln q(σ)` (entropy term; `q = 0` contributes nothing)
/// * SELBO: `log p(σ) − 2λ·(K q)(σ)` (the `K·uniform` part is constant and drops)
pub fn exact_weights(
    params: &AnsatzParams,
    spec: &ObjectiveSpec,
    table: &CostTable,
) -> Result<Vec<f64>> {
    if params.n_qubits() != table.n_qubits() {
        return Err(Error::InvalidArgument(format!(
            "circuit has {} qubits but the cost table covers {}",
            params.n_qubits(),
            table.n_qubits()
        )));
    }
    let ll = table.log_likelihoods();
    let weights = match spec.kind {
        ObjectiveKind::Mle => ll.to_vec(),
        ObjectiveKind::Elbo => {
            let q = run_ansatz(params).probabilities();
            ll.iter()
                .zip(&q)
                .map(|(l, &p)| if p > 0.0 { l - 1.0 - p.ln() } else { *l })
                .collect()
        }
        ObjectiveKind::Selbo => {
            let n = params.n_qubits();
            let q = run_ansatz(params).probabilities();
            let kq = kernel_smooth(&q, n, spec.bandwidth_for(n));
            ll.iter()
                .zip(&kq)
                .map(|(l, k)| l - 2.0 * spec.lambda * k)
                .collect()
        }
    };
    Ok(weights)
}

/// True gradient of the population objective described by `spec`.
pub fn exact_objective_gradient(
    params: &AnsatzParams,
    spec: &ObjectiveSpec,
    table: &CostTable,
) -> Result<GradientVector> {
    if spec.access != crate::objectives::Access::Full {
        return Err(Error::NeedsFullAccess("the exact gradient"));
    }
    exact_distribution_gradient(params, &exact_weights(params, spec, table)?)
}

/// Central differences; both sides of each component share `rng_seed`.
pub fn finite_difference<F>(
    params: &AnsatzParams,
    objective: F,
    step: f64,
    rng_seed: u64,
) -> Result<GradientVector>
where
    F: Fn(&AnsatzParams, u64) -> Result<f64> + Sync,
{
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let partials = (0..params.len())
        .into_par_iter()
        .map(|i| {
            let plus = objective(&params.nudged(i, step), rng_seed)?;
            let minus = objective(&params.nudged(i, -step), rng_seed)?;
            Ok((plus - minus) / (2.0 * step))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GradientVector(partials))
}
