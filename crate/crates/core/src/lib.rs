//! Quantum circuit simulation: state vectors, density matrices, a gate
//! library, noise channels, multi-shot execution and standard algorithms.

pub mod algorithms;
pub mod backend;
pub mod bench;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod gates;
mod kernel;
pub mod matrix;
pub mod noise;
pub mod pauli;
pub mod qstate;
pub mod viz;

pub use circuit::{Circuit, CircuitElement};
pub use error::{Error, Result};
pub use gates::GateDef;
pub use kernel::Execution;
pub use matrix::{Matrix, C64};
pub use noise::{NoiseChannel, NoiseKind};
pub use pauli::{Pauli, PauliHamiltonian, PauliString};
pub use qstate::{DensityMatrix, StateVector};
