//! Quantum Fourier transform and phase estimation.

use std::f64::consts::PI;

use crate::circuit::{Circuit, CircuitElement};
use crate::error::{Error, Result};
use crate::gates::{cp, h, swap, GateDef};
use crate::qstate::{basis_state, tensor_combine, StateVector};

/// QFT on wires `0..n`: `|j⟩ -> N^{-1/2} Σ_k ω^{jk} |k⟩` with `ω = e^{2πi/N}`.
pub fn qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n, 0)?;
    for j in 0..n {
        c.append(h(j))?;
        for k in j + 1..n {
            c.append(cp(PI / (1u64 << (k - j)) as f64, k, j))?;
        }
    }
    for j in 0..n / 2 {
        c.append(swap(j, n - 1 - j))?;
    }
    Ok(c)
}

/// Inverse QFT: adjoint gates in reverse order.
pub fn iqft(n: usize) -> Result<Circuit> {
    qft(n)?.inverse()
}

/// Phase estimation of `u` on `eigenstate` with `t` counting qubits.
///
/// Counting qubits occupy wires `0..t` (wire 0 is the most significant bit of
/// the estimate) and `u` acts on wires `t..t+k`. The counting register is
/// measured, so its outcome `m` estimates the phase as `m / 2^t`.
pub fn qpe(u: &GateDef, eigenstate: &StateVector, t: usize) -> Result<Circuit> {
    let k = u.arity();
    if eigenstate.num_qubits() != k {
        return Err(Error::Domain(format!(
            "eigenstate has {} qubit(s), the unitary acts on {k}",
            eigenstate.num_qubits()
        )));
    }
    if t == 0 {
        return Err(Error::Domain("phase estimation needs a counting qubit".into()));
    }
    let work: Vec<usize> = (t..t + k).collect();
    let mut c = Circuit::new(t + k, 0)?;
    c.set_initial_state(tensor_combine(&[basis_state(t, 0)?, eigenstate.clone()])?)?;
    for q in 0..t {
        c.append(h(q))?;
    }
    let mut power = u.matrix().clone();
    for j in (0..t).rev() {
        let step = GateDef::arbitrary(format!("{}^{}", u.name(), 1u64 << (t - 1 - j)), power.clone(), &work)?;
        c.append(GateDef::controlled(&step, &[j])?)?;
        power = power.matmul(&power);
    }
    let inv = iqft(t)?;
    c.extend(&inv)?;
    let counting: Vec<usize> = (0..t).collect();
    c.append(CircuitElement::measure(&counting, None)?)?;
    Ok(c)
}
