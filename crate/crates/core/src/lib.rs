//! Quantum hypernetworks for binary neural networks.
//!
//! A layered RY/RZ/CX circuit is simulated exactly on a dense state vector.
//! Each measured bitstring is decoded into a 14-parameter binary neural
//! network, and the circuit angles are trained by gradient ascent on one of
//! three objectives:
//!
//! * maximum likelihood (expected log-likelihood under the Born distribution),
//! * the explicit evidence lower bound (likelihood plus exact Shannon entropy),
//! * a surrogate bound that swaps the KL term for a scaled, sample-based
//!   squared maximum mean discrepancy against the uniform prior.
//!
//! Module map:
//!
//! | module         | contents                                                   |
//! |----------------|------------------------------------------------------------|
//! | [`qsim`]       | state vector, RY/RZ/CX gates, Born probabilities, sampling |
//! | [`ansatz`]     | layered circuit, parameter layout, parameter shifts        |
//! | [`binn`]       | bitstring decoding, forward pass, likelihood, accuracy     |
//! | [`data`]       | toy datasets and their CSV format                          |
//! | [`oracle`]     | per-configuration cost table and exhaustive search          |
//! | [`objectives`] | likelihood, entropy/KL, RBF kernel, MMD², objective values |
//! | [`grad`]       | parameter-shift, exact and finite-difference gradients     |
//! | [`train`]      | gradient ascent with plateau decay and best tracking       |
//! | [`experiment`] | multi-method runs, JSON report, traces and landscapes      |

pub mod ansatz;
pub mod binn;
pub mod data;
mod error;
pub mod experiment;
pub mod grad;
pub mod objectives;
pub mod oracle;
pub mod qsim;
pub mod seed;
pub mod stats;
pub mod train;

pub use error::{Error, Result};
