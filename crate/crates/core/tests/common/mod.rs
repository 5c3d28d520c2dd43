//! Independent reference implementations used across the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qhypernet::ansatz::{AnsatzParams, Axis, ParamIndex};
use qhypernet::objectives::CostTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn ry(theta: f64) -> Matrix {
    let (s, co) = (theta / 2.0).sin_cos();
    vec![vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]]
}

pub fn rz(theta: f64) -> Matrix {
    let h = theta / 2.0;
    vec![
        vec![Complex64::from_polar(1.0, -h), c(0.0, 0.0)],
        vec![c(0.0, 0.0), Complex64::from_polar(1.0, h)],
    ]
}

fn x_gate() -> Matrix {
    vec![
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ]
}

fn projector(bit: usize) -> Matrix {
    let mut m = vec![vec![c(0.0, 0.0); 2]; 2];
    m[bit][bit] = c(1.0, 0.0);
    m
}

/// Tensor product with qubit 0 as the rightmost (least significant) factor.
fn embed(n: usize, factors: &dyn Fn(usize) -> Matrix) -> Matrix {
    let mut out = factors(n - 1);
    for q in (0..n - 1).rev() {
        out = kron(&out, &factors(q));
    }
    out
}

pub fn single_qubit_op(n: usize, qubit: usize, gate: &Matrix) -> Matrix {
    embed(n, &|q| {
        if q == qubit {
            gate.clone()
        } else {
            identity(2)
        }
    })
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t`.
pub fn cx_op(n: usize, control: usize, target: usize) -> Matrix {
    let idle = embed(n, &|q| {
        if q == control {
            projector(0)
        } else {
            identity(2)
        }
    });
    let flip = embed(n, &|q| {
        if q == control {
            projector(1)
        } else if q == target {
            x_gate()
        } else {
            identity(2)
        }
    });
    idle.iter()
        .zip(&flip)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// The entangler chain written out from the 1-based rule: odd layers pair
/// (1,2),(3,4),…; even layers pair (2,3),(4,5),….
fn chain(n: usize, layer_one_based: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut m = if layer_one_based % 2 == 1 { 1 } else { 2 };
    while m < n {
        out.push((m - 1, m));
        m += 2;
    }
    out
}

/// Amplitudes of the layered circuit, by dense matrix products.
pub fn dense_amplitudes(params: &AnsatzParams) -> Vec<Complex64> {
    let n = params.n_qubits();
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    for layer in 0..params.n_layers() {
        for q in 0..n {
            let rz_angle = params.get(ParamIndex::new(Axis::Rz, q, layer)).unwrap();
            let ry_angle = params.get(ParamIndex::new(Axis::Ry, q, layer)).unwrap();
            v = apply(&single_qubit_op(n, q, &rz(rz_angle)), &v);
            v = apply(&single_qubit_op(n, q, &ry(ry_angle)), &v);
        }
        for (ctl, tgt) in chain(n, layer + 1) {
            v = apply(&cx_op(n, ctl, tgt), &v);
        }
    }
    v
}

pub fn dense_probabilities(params: &AnsatzParams) -> Vec<f64> {
    dense_amplitudes(params)
        .iter()
        .map(|a| a.norm_sqr())
        .collect()
}

/// Random angles in [0, 2π) from a generator unrelated to the library's.
pub fn random_params(n: usize, layers: usize, seed: u64) -> AnsatzParams {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let angles = (0..2 * n * layers)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    AnsatzParams::from_angles(n, layers, angles).unwrap()
}

/// A cost table of random negative log-likelihoods.
pub fn random_table(n: usize, seed: u64) -> CostTable {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xC057);
    CostTable::new(n, (0..1 << n).map(|_| -3.0 * rng.random::<f64>()).collect()).unwrap()
}

/// Two-pass mean and standard deviation (`ddof` = 1 for sample, 0 for population).
pub fn two_pass(values: &[f64], ddof: usize) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() <= ddof {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - ddof as f64)).sqrt())
}

/// Mean and standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let (m, s) = two_pass(values, 1);
    (m, s / (values.len() as f64).sqrt())
}
