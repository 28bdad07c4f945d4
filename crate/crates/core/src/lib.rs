//! Perturbation-constrained molecular communication through a membrane.
//!
//! An enzyme `E` converts a regulated substrate `S` into a membrane-permeable
//! product `P` under Michaelis-Menten kinetics. The substrate may only be
//! depleted by a bounded amount `delta`, which caps the number of product
//! molecules available per transmission slot. Each molecule crosses the
//! membrane independently with probability `q`, giving a binomial channel
//! whose capacity is computed with the Blahut-Arimoto algorithm.
//!
//! Module layout follows the pipeline:
//!
//! - [`numerics`]: Lambert W, Brent root finding, adaptive Simpson, RK4.
//! - [`kinetics`]: mass-action ODEs and the pseudo-steady-state solution.
//! - [`perturbation`]: slot time `t*`, maximum product and molecule cap.
//! - [`channel`]: binomial membrane channel.
//! - [`capacity`]: Blahut-Arimoto and a grid-search oracle.
//! - [`cli`]: experiment configuration, sweeps and CSV output.

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod error;
pub mod kinetics;
pub mod numerics;
pub mod perturbation;

pub use error::{Error, Result};
