//! Teleportation of `alpha|0⟩ + sqrt(1 - alpha²)|1⟩` from wire 0 to wire 2.

use crate::circuit::{Circuit, CircuitElement};
use crate::error::Result;
use crate::gates::{cx, h, x, z};
use crate::qstate::{create_state, StateVector};

/// Bell pair on wires 1 and 2, Bell-basis measurement of wires 0 and 1 into
/// bits `a` and `b`, then `Z` on wire 2 if `a = 1` and `X` if `b = 1`.
pub fn teleportation(alpha: f64) -> Result<Circuit> {
    let qubits = [create_state(0, alpha)?, create_state(1, 1.0)?, create_state(2, 1.0)?];
    let mut c = Circuit::with_qubits(3, 0, &qubits)?;
    c.append(h(1))?.append(cx(1, 2))?;
    c.append(cx(0, 1))?.append(h(0))?;
    c.append(CircuitElement::measure(&[0, 1], Some(&["a", "b"]))?)?;
    c.append(CircuitElement::if_cbit("a", 1, z(2))?)?;
    c.append(CircuitElement::if_cbit("b", 1, x(2))?)?;
    Ok(c)
}

/// Bob's qubit after a run; wires 0 and 1 are collapsed so the state factors.
pub fn bob_state(final_state: &StateVector) -> Result<StateVector> {
    final_state.qubit_state(2)
}
