//! Layered hardware-efficient circuit and its parameter layout.
//!
//! Each layer rotates every qubit (RZ, then RY) and then applies a chain of
//! CX gates on neighbouring pairs. Counting layers and qubits from 1, odd
//! layers entangle (1,2), (3,4), … and even layers (2,3), (4,5), …
//!
//! Angles are stored flat with the axis varying fastest, then the qubit,
//! then the layer; [`ParamIndex::flat`] is the single source of that layout.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qsim::{self, StateVector, MAX_QUBITS};
use crate::{seed, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Ry = 0,
    Rz = 1,
}

/// Position of one angle: rotation axis, 0-based qubit, 0-based layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamIndex {
    pub axis: Axis,
    pub qubit: usize,
    pub layer: usize,
}

impl ParamIndex {
    pub fn new(axis: Axis, qubit: usize, layer: usize) -> Self {
        Self { axis, qubit, layer }
    }

    /// From the 1-based `(j, k)` numbering used when writing the circuit down.
    pub fn from_one_based(axis: Axis, qubit: usize, layer: usize) -> Result<Self> {
        if qubit == 0 || layer == 0 {
            return Err(Error::InvalidArgument(
                "1-based qubit and layer numbers start at 1".into(),
            ));
        }
        Ok(Self::new(axis, qubit - 1, layer - 1))
    }

    pub fn flat(self, n_qubits: usize) -> usize {
        (self.layer * n_qubits + self.qubit) * 2 + self.axis as usize
    }

    pub fn from_flat(flat: usize, n_qubits: usize) -> Self {
        let axis = if flat.is_multiple_of(2) {
            Axis::Ry
        } else {
            Axis::Rz
        };
        let rest = flat / 2;
        Self::new(axis, rest % n_qubits, rest / n_qubits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Rotation angles of an `n_layers`-deep circuit on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    n_qubits: usize,
    n_layers: usize,
    angles: Vec<f64>,
}

impl AnsatzParams {
    pub fn from_angles(n_qubits: usize, n_layers: usize, angles: Vec<f64>) -> Result<Self> {
        check_sizes(n_qubits, n_layers)?;
        if angles.len() != 2 * n_qubits * n_layers {
            return Err(Error::InvalidArgument(format!(
                "expected {} angles for {n_qubits} qubits x {n_layers} layers, got {}",
                2 * n_qubits * n_layers,
                angles.len()
            )));
        }
        Ok(Self {
            n_qubits,
            n_layers,
            angles,
        })
    }

    pub fn zeros(n_qubits: usize, n_layers: usize) -> Result<Self> {
        Self::from_angles(n_qubits, n_layers, vec![0.0; 2 * n_qubits * n_layers])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angles_mut(&mut self) -> &mut [f64] {
        &mut self.angles
    }

    fn check_index(&self, idx: ParamIndex) -> Result<()> {
        if idx.qubit >= self.n_qubits || idx.layer >= self.n_layers {
            return Err(Error::ParamIndex(idx));
        }
        Ok(())
    }

    pub fn get(&self, idx: ParamIndex) -> Result<f64> {
        self.check_index(idx)?;
        Ok(self.angles[idx.flat(self.n_qubits)])
    }

    pub fn set(&mut self, idx: ParamIndex, angle: f64) -> Result<()> {
        self.check_index(idx)?;
        self.angles[idx.flat(self.n_qubits)] = angle;
        Ok(())
    }

    /// Copy with flat component `i` moved by `delta`.
    pub(crate) fn nudged(&self, i: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.angles[i] += delta;
        out
    }
}

fn check_sizes(n_qubits: usize, n_layers: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    if n_layers == 0 {
        return Err(Error::InvalidArgument(
            "circuit needs at least one layer".into(),
        ));
    }
    Ok(())
}

/// Angles drawn i.i.d. uniform on [0, 2π).
pub fn init_params(n_qubits: usize, n_layers: usize, rng_seed: u64) -> Result<AnsatzParams> {
    check_sizes(n_qubits, n_layers)?;
    let mut rng = seed::rng(rng_seed);
    let angles = (0..2 * n_qubits * n_layers)
        .map(|_| rng.random::<f64>() * TAU)
        .collect();
    AnsatzParams::from_angles(n_qubits, n_layers, angles)
}

/// 0-based `(control, target)` pairs of the CX chain closing 0-based `layer`.
pub fn entangler_pairs(n_qubits: usize, layer: usize) -> Vec<(usize, usize)> {
    // 1-based: layer k starts at m = 1 for odd k, m = 2 for even k
    let k = layer + 1;
    let first = if k % 2 == 1 { 1 } else { 2 };
    (first..n_qubits).step_by(2).map(|m| (m - 1, m)).collect()
}

/// Prepares `U(θ)|0…0⟩`.
pub fn run_ansatz(params: &AnsatzParams) -> StateVector {
    let n = params.n_qubits;
    let mut state = qsim::zero_state(n).expect("sizes validated at construction");
    for layer in 0..params.n_layers {
        for qubit in 0..n {
            let ry = params.angles[ParamIndex::new(Axis::Ry, qubit, layer).flat(n)];
            let rz = params.angles[ParamIndex::new(Axis::Rz, qubit, layer).flat(n)];
            state.apply_rz(qubit, rz).expect("qubit in range");
            state.apply_ry(qubit, ry).expect("qubit in range");
        }
        for (control, target) in entangler_pairs(n, layer) {
            state.apply_cx(control, target).expect("qubits in range");
        }
    }
    state
}

/// Copy of `params` with the angle at `idx` moved by `sign`·π/2.
pub fn shift_params(params: &AnsatzParams, idx: ParamIndex, sign: Sign) -> Result<AnsatzParams> {
    params.check_index(idx)?;
    Ok(params.nudged(idx.flat(params.n_qubits), sign.value() * FRAC_PI_2))
}
