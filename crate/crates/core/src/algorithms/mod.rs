//! Standard algorithms built on the circuit API.

mod fourier;
mod optimize;
mod oracles;
mod shor;
mod teleport;
mod variational;

pub use fourier::{iqft, qft, qpe};
pub use optimize::{gradient_descent, nelder_mead, Method, Minimum, OptimizerConfig};
pub use oracles::{bernstein_vazirani, deutsch_jozsa, dj_with_oracle, grover, grover_success_probability, DjOracle};
pub use shor::{
    continued_fraction_order, factor, mod_pow, multiplier_gate, order_finding_circuit, shor_order_finding, ShorOutcome,
};
pub use teleport::{bob_state, teleportation};
pub use variational::{
    cut_value, energy, parameter_shift_gradient, qaoa, qaoa_problem, vqe, Ansatz, AnsatzOp, QaoaResult, VqeResult,
    WeightedEdge,
};
