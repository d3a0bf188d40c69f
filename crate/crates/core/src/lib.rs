//! Exact frequency-domain toolkit for vector-valued wavelet systems on
//! finite sums of L2(R).
//!
//! Candidate wavelets are represented by piecewise-constant spectra with
//! rational-multiple-of-pi breakpoints, which makes every characterization
//! equation piecewise constant on a computable refinement: checking at cell
//! midpoints is exhaustive, not sampled.

pub mod error;
pub mod rational;
pub mod spectrum;
pub mod structure;
pub mod fiber;
pub mod invariants;
pub mod characterization;
pub mod builtins;
pub mod docs;
pub mod cli;

pub use error::Error;
pub use rational::{Ratio, RationalPi};
pub use spectrum::{PeriodicStep, StepSpectrum, Window};
pub use structure::AffineStructure;
pub use fiber::{Fiber, FiberIndex, VectorFunction};
