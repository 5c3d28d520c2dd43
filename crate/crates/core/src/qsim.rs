//! Dense state-vector simulation.
//!
//! Basis-state indices follow one rule everywhere in the crate: the index of
//! `|σ₀ σ₁ … σ_{N−1}⟩` is `Σ σᵢ·2^i`, so qubit 0 is the least significant
//! bit. Bitstrings print with qubit 0 first (leftmost).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{seed, Error, Result};

/// Largest register [`zero_state`] will allocate (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;

/// One computational-basis outcome of an `len`-qubit register.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    index: u32,
    len: u8,
}

impl BitString {
    /// Basis state with integer index `index` (qubit 0 = least significant bit).
    pub fn new(index: usize, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_QUBITS {
            return Err(Error::QubitCount(len));
        }
        if index >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            index: index as u32,
            len: len as u8,
        })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => index |= 1 << i,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "bit value {other} is not 0 or 1"
                    )))
                }
            }
        }
        Self::new(index, bits.len())
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Value of qubit `i`.
    pub fn bit(self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.index >> i) & 1) as u8
    }

    pub fn to_bits(self) -> Vec<u8> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }

    /// Number of positions where the two strings differ; equals the squared
    /// Euclidean distance of the {0,1} vectors.
    pub fn hamming(self, other: BitString) -> u32 {
        (self.index ^ other.index).count_ones()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::BitChar(other)),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Pure state of an `n_qubits` register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// `|0…0⟩` on `n_qubits` qubits.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        n_qubits,
        amplitudes,
    })
}

impl StateVector {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Calls `f(i0, i1)` for every index pair that differs only in `qubit`,
    /// with `i0` holding the 0 component.
    #[inline]
    fn for_each_pair(dim: usize, qubit: usize, mut f: impl FnMut(usize, usize)) {
        let stride = 1 << qubit;
        for block in (0..dim).step_by(stride << 1) {
            for i0 in block..block + stride {
                f(i0, i0 + stride);
            }
        }
    }

    /// RY(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]] on `qubit`.
    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        let amps = &mut self.amplitudes;
        Self::for_each_pair(amps.len(), qubit, |i0, i1| {
            let (a0, a1) = (amps[i0], amps[i1]);
            amps[i0] = a0 * c - a1 * s;
            amps[i1] = a0 * s + a1 * c;
        });
        Ok(())
    }

    /// RZ(θ) = diag(e^{−iθ/2}, e^{iθ/2}) on `qubit`.
    pub fn apply_rz(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (angle / 2.0).sin_cos();
        let phase0 = Complex64::new(c, -s);
        let phase1 = Complex64::new(c, s);
        let amps = &mut self.amplitudes;
        Self::for_each_pair(amps.len(), qubit, |i0, i1| {
            amps[i0] *= phase0;
            amps[i1] *= phase1;
        });
        Ok(())
    }

    /// Flips `target` on every basis state whose `control` bit is 1.
    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::SameQubit(control));
        }
        let cmask = 1 << control;
        let amps = &mut self.amplitudes;
        Self::for_each_pair(amps.len(), target, |i0, i1| {
            if i0 & cmask != 0 {
                amps.swap(i0, i1);
            }
        });
        Ok(())
    }

    /// Born-rule distribution over basis indices.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `n_shots` i.i.d. measurements in the computational basis.
    pub fn sample(&self, n_shots: usize, rng_seed: u64) -> Result<Vec<BitString>> {
        if n_shots == 0 {
            return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
        }
        let sampler = Sampler::new(&self.probabilities(), self.n_qubits);
        Ok(sampler.draw(n_shots, &mut seed::rng(rng_seed)))
    }
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    cumulative: Vec<f64>,
    n_qubits: usize,
}

impl Sampler {
    pub fn new(probabilities: &[f64], n_qubits: usize) -> Self {
        debug_assert_eq!(probabilities.len(), 1 << n_qubits);
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            cumulative,
            n_qubits,
        }
    }

    pub fn draw_one<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        // first index whose cumulative mass exceeds u; zero-probability
        // outcomes have no width and are never selected
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        BitString {
            index: idx as u32,
            len: self.n_qubits as u8,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<BitString> {
        (0..n).map(|_| self.draw_one(rng)).collect()
    }
}
