//! Brute force over all 2^14 network configurations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binn::{self, LabeledPoint, CONFIG_BITS};
use crate::data::Dataset;
use crate::objectives::CostTable;
use crate::qsim::BitString;
use crate::Result;

/// Every configuration, in basis-index order.
pub fn all_configs() -> impl Iterator<Item = BitString> {
    (0..1usize << CONFIG_BITS).map(|i| BitString::new(i, CONFIG_BITS).expect("14-bit index"))
}

/// Mean log-likelihood of every configuration on `train`.
pub fn cost_table(train: &[LabeledPoint]) -> Result<CostTable> {
    let values = (0..1usize << CONFIG_BITS)
        .into_par_iter()
        .map(|i| {
            let config = binn::decode(BitString::new(i, CONFIG_BITS)?)?;
            binn::log_likelihood(&config, train)
        })
        .collect::<Result<Vec<f64>>>()?;
    CostTable::new(CONFIG_BITS, values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveResult {
    pub best_config: BitString,
    pub best_train_loss: f64,
    pub test_loss: f64,
    pub test_accuracy: f64,
    /// `ln[(1/N_t) Σ_σ exp(mean log-likelihood(σ))]`.
    pub log_marginal_likelihood: f64,
    pub evaluated_configs: usize,
}

/// Index of the largest entry; ties go to the smallest index.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `ln[(1/n) Σ exp(vᵢ)]` evaluated with the max subtracted.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln() - (values.len() as f64).ln()
}

/// Log marginal likelihood under the uniform prior over the table's configurations.
pub fn log_marginal_likelihood(table: &CostTable) -> f64 {
    log_mean_exp(table.log_likelihoods())
}

/// Best training configuration and its held-out metrics.
pub fn exhaustive_search(dataset: &Dataset) -> Result<ExhaustiveResult> {
    let table = cost_table(&dataset.train)?;
    exhaustive_from_table(&table, dataset)
}

/// As [`exhaustive_search`], reusing an already built table for `dataset.train`.
pub fn exhaustive_from_table(table: &CostTable, dataset: &Dataset) -> Result<ExhaustiveResult> {
    let best = argmax_first(table.log_likelihoods());
    let best_config = BitString::new(best, CONFIG_BITS)?;
    let net = binn::decode(best_config)?;
    Ok(ExhaustiveResult {
        best_config,
        best_train_loss: table.bce(best_config),
        test_loss: binn::bce(&net, &dataset.test)?,
        test_accuracy: binn::accuracy(&net, &dataset.test)?,
        log_marginal_likelihood: log_marginal_likelihood(table),
        evaluated_configs: table.len(),
    })
}
