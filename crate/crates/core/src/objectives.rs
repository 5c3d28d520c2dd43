//! Training objectives and their ingredients.
//!
//! All objectives are maximised:
//!
//! * MLE:   `E_q[log p(Y|X,σ)]`
//! * ELBO:  `E_q[log p(Y|X,σ)] + H(q)` (the constant `−log N_t` dropped)
//! * SELBO: `E_q[log p(Y|X,σ)] − λ·MMD²_u(q, uniform)`
//!
//! `q` is the Born distribution of the circuit. The per-configuration
//! log-likelihoods live in a precomputed [`CostTable`], so drawing a shot and
//! looking up its entry is the same as decoding the bitstring and running
//! the network on the training set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{run_ansatz, AnsatzParams};
use crate::qsim::{BitString, Sampler};
use crate::{seed, Error, Result};

/// Diagonal of the cost operator: mean log-likelihood of every configuration
/// on the training set, indexed by basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct CostTable {
    n_qubits: usize,
    log_likelihood: Vec<f64>,
}

impl CostTable {
    pub fn new(n_qubits: usize, log_likelihood: Vec<f64>) -> Result<Self> {
        if log_likelihood.len() != 1 << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "cost table for {n_qubits} qubits needs {} entries, got {}",
                1usize << n_qubits,
                log_likelihood.len()
            )));
        }
        if let Some(i) = log_likelihood.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cost table entry {i} is not finite"
            )));
        }
        Ok(Self {
            n_qubits,
            log_likelihood,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.log_likelihood.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_likelihood.is_empty()
    }

    pub fn log_likelihood(&self, config: BitString) -> f64 {
        self.log_likelihood[config.index()]
    }

    /// Mean training BCE of `config`.
    pub fn bce(&self, config: BitString) -> f64 {
        -self.log_likelihood(config)
    }

    pub fn log_likelihoods(&self) -> &[f64] {
        &self.log_likelihood
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Mle,
    Elbo,
    Selbo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LikelihoodMode {
    /// Monte Carlo mean over measured shots.
    Sampled,
    /// `Σ q(σ)·log p(Y|X,σ)` over every configuration.
    Exact,
}

/// What the objective may see of the circuit's output distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    /// Amplitudes are available (simulation).
    Full,
    /// Only measurement outcomes are available (hardware).
    SamplesOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    /// MMD weight; only read for SELBO.
    pub lambda: f64,
    /// Circuit shots per evaluation (`N_qc`).
    pub n_shots: usize,
    /// Prior samples per SELBO evaluation.
    pub prior_shots: usize,
    /// RBF bandwidth; `None` means `n_qubits / 4`.
    pub bandwidth: Option<f64>,
    pub likelihood_mode: LikelihoodMode,
    pub access: Access,
}

impl ObjectiveSpec {
    pub fn mle() -> Self {
        Self {
            kind: ObjectiveKind::Mle,
            lambda: 0.0,
            n_shots: 100,
            prior_shots: 100,
            bandwidth: None,
            likelihood_mode: LikelihoodMode::Sampled,
            access: Access::Full,
        }
    }

    pub fn elbo() -> Self {
        Self {
            kind: ObjectiveKind::Elbo,
            ..Self::mle()
        }
    }

    pub fn selbo(lambda: f64) -> Self {
        Self {
            kind: ObjectiveKind::Selbo,
            lambda,
            ..Self::mle()
        }
    }

    pub fn with_likelihood_mode(mut self, mode: LikelihoodMode) -> Self {
        self.likelihood_mode = mode;
        self
    }

    pub fn bandwidth_for(&self, n_qubits: usize) -> f64 {
        self.bandwidth.unwrap_or(n_qubits as f64 / 4.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_shots == 0 {
            return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
        }
        if self.kind == ObjectiveKind::Selbo {
            if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "lambda must be a finite non-negative number, got {}",
                    self.lambda
                )));
            }
            if self.n_shots < 2 || self.prior_shots < 2 {
                return Err(Error::TooFewSamples(self.n_shots, self.prior_shots));
            }
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "bandwidth must be positive, got {h}"
                )));
            }
        }
        if self.access == Access::SamplesOnly {
            if self.kind == ObjectiveKind::Elbo {
                return Err(Error::NeedsFullAccess("the explicit ELBO"));
            }
            if self.likelihood_mode == LikelihoodMode::Exact {
                return Err(Error::NeedsFullAccess("exact likelihood mode"));
            }
        }
        Ok(())
    }
}

/// One objective value with its two parts.
///
/// `regularizer` is the penalty in its natural units: 0 for MLE, the full
/// `KL(q‖uniform) = N·ln 2 − H(q)` for ELBO and the unscaled `MMD²_u` for SELBO.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub likelihood: f64,
    pub regularizer: f64,
}

/// Born distribution of the circuit plus the evaluation's random stream.
struct Distribution {
    probs: Vec<f64>,
    sampler: Option<Sampler>,
    n_qubits: usize,
}

impl Distribution {
    fn new(params: &AnsatzParams) -> Self {
        Self {
            probs: run_ansatz(params).probabilities(),
            sampler: None,
            n_qubits: params.n_qubits(),
        }
    }

    fn shots(&mut self, n: usize, rng: &mut seed::Rng) -> Vec<BitString> {
        let sampler = self
            .sampler
            .get_or_insert_with(|| Sampler::new(&self.probs, self.n_qubits));
        sampler.draw(n, rng)
    }
}

fn check_table(params: &AnsatzParams, table: &CostTable) -> Result<()> {
    if params.n_qubits() != table.n_qubits() {
        return Err(Error::InvalidArgument(format!(
            "circuit has {} qubits but the cost table covers {}",
            params.n_qubits(),
            table.n_qubits()
        )));
    }
    Ok(())
}

fn mean_over_shots(shots: &[BitString], table: &CostTable) -> f64 {
    shots.iter().map(|&b| table.log_likelihood(b)).sum::<f64>() / shots.len() as f64
}

fn exact_expectation(probs: &[f64], values: &[f64]) -> f64 {
    probs.iter().zip(values).map(|(p, v)| p * v).sum()
}

/// `E_q[log p(Y|X,σ)]`, by `n_shots` measurements or exactly.
pub fn expected_log_likelihood(
    params: &AnsatzParams,
    table: &CostTable,
    n_shots: usize,
    rng_seed: u64,
    mode: LikelihoodMode,
) -> Result<f64> {
    check_table(params, table)?;
    let mut dist = Distribution::new(params);
    match mode {
        LikelihoodMode::Exact => Ok(exact_expectation(&dist.probs, table.log_likelihoods())),
        LikelihoodMode::Sampled => {
            if n_shots == 0 {
                return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
            }
            let shots = dist.shots(n_shots, &mut seed::rng(rng_seed));
            Ok(mean_over_shots(&shots, table))
        }
    }
}

/// Shannon entropy in nats, with `0·ln 0 = 0`.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// `KL(q ‖ uniform) = N·ln 2 − H(q)`.
pub fn kl_uniform_of(probs: &[f64], n_qubits: usize) -> f64 {
    n_qubits as f64 * std::f64::consts::LN_2 - entropy(probs)
}

pub fn entropy_exact(params: &AnsatzParams) -> f64 {
    entropy(&run_ansatz(params).probabilities())
}

pub fn kl_uniform(params: &AnsatzParams) -> f64 {
    kl_uniform_of(&run_ansatz(params).probabilities(), params.n_qubits())
}

/// `exp(−‖x − y‖² / h²)` on {0,1} vectors.
pub fn rbf_kernel(x: BitString, y: BitString, h: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::BitLength {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok((-(x.hamming(y) as f64) / (h * h)).exp())
}

/// Kernel values indexed by Hamming distance.
fn kernel_table(n_bits: usize, h: f64) -> Vec<f64> {
    (0..=n_bits)
        .map(|d| (-(d as f64) / (h * h)).exp())
        .collect()
}

fn within_sum(xs: &[BitString], k: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            acc += k[a.hamming(*b) as usize];
        }
    }
    2.0 * acc
}

fn cross_sum(xs: &[BitString], ys: &[BitString], k: &[f64]) -> f64 {
    xs.iter()
        .map(|a| ys.iter().map(|b| k[a.hamming(*b) as usize]).sum::<f64>())
        .sum()
}

/// Unbiased estimate of `MMD²` from samples `xs ~ q` and `ys ~ p`.
pub fn mmd2_unbiased(xs: &[BitString], ys: &[BitString], h: f64) -> Result<f64> {
    let (n, m) = (xs.len(), ys.len());
    if n < 2 || m < 2 {
        return Err(Error::TooFewSamples(n, m));
    }
    let bits = xs[0].len();
    if let Some(bad) = xs.iter().chain(ys).find(|b| b.len() != bits) {
        return Err(Error::BitLength {
            expected: bits,
            actual: bad.len(),
        });
    }
    let k = kernel_table(bits, h);
    let (nf, mf) = (n as f64, m as f64);
    Ok(
        within_sum(xs, &k) / (nf * (nf - 1.0)) + within_sum(ys, &k) / (mf * (mf - 1.0))
            - 2.0 * cross_sum(xs, ys, &k) / (nf * mf),
    )
}

fn prior_draws<R: Rng>(n_qubits: usize, m: usize, rng: &mut R) -> Vec<BitString> {
    (0..m)
        .map(|_| {
            let index = rng.random_range(0..1usize << n_qubits);
            BitString::new(index, n_qubits).expect("index within register")
        })
        .collect()
}

/// `m` configurations from the uniform prior over `n_qubits` bits.
pub fn sample_prior(n_qubits: usize, m: usize, rng_seed: u64) -> Result<Vec<BitString>> {
    if m < 2 {
        return Err(Error::TooFewSamples(m, m));
    }
    if n_qubits == 0 || n_qubits > crate::qsim::MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    Ok(prior_draws(n_qubits, m, &mut seed::rng(rng_seed)))
}

/// `(K q)(σ) = Σ_τ k(σ, τ) q(τ)` for the RBF kernel on {0,1}^N.
///
/// The kernel factorises over bits, so the product is N butterfly passes
/// with the 2×2 block `[[1, e], [e, 1]]`, `e = exp(−1/h²)`.
pub fn kernel_smooth(q: &[f64], n_qubits: usize, h: f64) -> Vec<f64> {
    debug_assert_eq!(q.len(), 1 << n_qubits);
    let e = (-1.0 / (h * h)).exp();
    let mut v = q.to_vec();
    for bit in 0..n_qubits {
        let stride = 1 << bit;
        for block in (0..v.len()).step_by(stride << 1) {
            for i in block..block + stride {
                let (a, b) = (v[i], v[i + stride]);
                v[i] = a + e * b;
                v[i + stride] = e * a + b;
            }
        }
    }
    v
}

/// Population `MMD²(q, uniform)` for the RBF kernel.
pub fn mmd2_uniform_exact(q: &[f64], n_qubits: usize, h: f64) -> f64 {
    let e = (-1.0 / (h * h)).exp();
    // every row of K has the same sum, so E_{y~u} k(σ, y) = ((1+e)/2)^N
    let uniform_row = ((1.0 + e) / 2.0).powi(n_qubits as i32);
    let kq = kernel_smooth(q, n_qubits, h);
    let qkq: f64 = q.iter().zip(&kq).map(|(a, b)| a * b).sum();
    qkq - uniform_row
}

/// Evaluates `spec` at `params`. Measurements come from the stream seeded by
/// `rng_seed`: circuit shots first, then prior samples.
pub fn evaluate(
    params: &AnsatzParams,
    spec: &ObjectiveSpec,
    table: &CostTable,
    rng_seed: u64,
) -> Result<Evaluation> {
    spec.validate()?;
    check_table(params, table)?;
    let n = params.n_qubits();
    let mut dist = Distribution::new(params);
    let mut rng = seed::rng(rng_seed);

    // one batch of N_qc shots serves both the likelihood and the MMD term
    let mut shots = None;
    let likelihood = match spec.likelihood_mode {
        LikelihoodMode::Exact => exact_expectation(&dist.probs, table.log_likelihoods()),
        LikelihoodMode::Sampled => {
            let s = dist.shots(spec.n_shots, &mut rng);
            let ll = mean_over_shots(&s, table);
            shots = Some(s);
            ll
        }
    };

    let eval = match spec.kind {
        ObjectiveKind::Mle => Evaluation {
            value: likelihood,
            likelihood,
            regularizer: 0.0,
        },
        ObjectiveKind::Elbo => {
            let h = entropy(&dist.probs);
            Evaluation {
                value: likelihood + h,
                likelihood,
                regularizer: n as f64 * std::f64::consts::LN_2 - h,
            }
        }
        ObjectiveKind::Selbo => {
            let xs = match shots {
                Some(s) => s,
                None => dist.shots(spec.n_shots, &mut rng),
            };
            let ys = prior_draws(n, spec.prior_shots, &mut rng);
            let mmd2 = mmd2_unbiased(&xs, &ys, spec.bandwidth_for(n))?;
            Evaluation {
                value: likelihood - spec.lambda * mmd2,
                likelihood,
                regularizer: mmd2,
            }
        }
    };
    Ok(eval)
}

/// Objective value only; see [`evaluate`].
pub fn objective(
    params: &AnsatzParams,
    spec: &ObjectiveSpec,
    table: &CostTable,
    rng_seed: u64,
) -> Result<f64> {
    evaluate(params, spec, table, rng_seed).map(|e| e.value)
}

/// The full bound `E_q[log p] − KL(q ‖ uniform)`, computed exactly.
pub fn elbo_exact(params: &AnsatzParams, table: &CostTable) -> Result<f64> {
    check_table(params, table)?;
    let probs = run_ansatz(params).probabilities();
    Ok(exact_expectation(&probs, table.log_likelihoods())
        - kl_uniform_of(&probs, params.n_qubits()))
}
