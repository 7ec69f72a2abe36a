//! Direct execution of a circuit on a state vector: gates in program order,
//! noise as sampled Kraus branches, projective measurement with collapse.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitElement};
use crate::error::{Error, Result};
use crate::gates::GateDef;
use crate::kernel::{self, Execution};
use crate::matrix::{C64, ZERO};
use crate::noise::sample_kraus_in_place;
use crate::pauli::PauliHamiltonian;
use crate::qstate::{
    basis_state, bit_position, index_to_bitstring, sv_to_probability, ClassicalRegister,
    StateVector,
};

/// Result of a single run of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Final (post-collapse) state.
    pub statevector: StateVector,
    pub classical: ClassicalRegister,
    /// Values of every measured classical bit, in register order.
    pub measured_bitstring: Option<String>,
    pub measured_index: Option<usize>,
}

impl RunOutcome {
    /// Outcome distribution of the final state.
    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        sv_to_probability(&self.statevector)
    }
}

#[inline]
pub(crate) fn apply_gate_slice(amps: &mut [C64], num_qubits: usize, g: &GateDef, exec: Execution) {
    let c = g.num_controls();
    let (controls, targets) = g.targets().split_at(c);
    kernel::apply(
        amps,
        num_qubits,
        g.active_matrix().as_slice(),
        targets,
        controls,
        exec,
    );
}

fn check_range(g: &GateDef, n: usize) -> Result<()> {
    match g.targets().iter().find(|&&t| t >= n) {
        Some(&wire) => Err(Error::WireOutOfRange { wire, width: n }),
        None => Ok(()),
    }
}

/// Applies `g` in place.
pub fn apply_gate_in_place(sv: &mut StateVector, g: &GateDef, exec: Execution) -> Result<()> {
    let n = sv.num_qubits();
    check_range(g, n)?;
    apply_gate_slice(sv.amplitudes_mut(), n, g, exec);
    Ok(())
}

/// Returns `g|ψ⟩`.
pub fn apply_gate(sv: &StateVector, g: &GateDef) -> Result<StateVector> {
    let mut out = sv.clone();
    apply_gate_in_place(&mut out, g, Execution::default())?;
    Ok(out)
}

/// Measures `qubits` (first listed is the most significant bit of the
/// returned outcome), collapsing and renormalizing the state in place.
pub(crate) fn measure_in_place<R: Rng + ?Sized>(
    sv: &mut StateVector,
    qubits: &[usize],
    rng: &mut R,
) -> usize {
    let n = sv.num_qubits();
    let m = qubits.len();
    let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << bit_position(q, n)).collect();
    let outcome_of = |i: usize| {
        masks
            .iter()
            .fold(0usize, |acc, &mask| (acc << 1) | usize::from(i & mask != 0))
    };
    let mut probs = vec![0.0f64; 1 << m];
    for (i, a) in sv.amplitudes().iter().enumerate() {
        probs[outcome_of(i)] += a.norm_sqr();
    }
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc && *p > 0.0 {
            pick = k;
            break;
        }
    }
    for (i, a) in sv.amplitudes_mut().iter_mut().enumerate() {
        if outcome_of(i) != pick {
            *a = ZERO;
        }
    }
    sv.renormalize();
    pick
}

/// Executes `elements` against a state and classical register.
pub(crate) fn execute<R: Rng + ?Sized>(
    sv: &mut StateVector,
    reg: &mut ClassicalRegister,
    elements: &[CircuitElement],
    rng: &mut R,
    exec: Execution,
) -> Result<()> {
    for e in elements {
        match e {
            CircuitElement::Gate(g) => apply_gate_in_place(sv, g, exec)?,
            CircuitElement::Noise(ch) => {
                sample_kraus_in_place(sv, ch, rng);
            }
            CircuitElement::Measure { qubits, clbits } => {
                if qubits.is_empty() {
                    continue;
                }
                let outcome = measure_in_place(sv, qubits, rng);
                let m = qubits.len();
                for (j, label) in clbits.iter().enumerate() {
                    let bit = ((outcome >> (m - 1 - j)) & 1) as u8;
                    reg.set(label, bit)?;
                }
            }
            CircuitElement::ClassicalControl { clbit, value, gate } => {
                if !reg.contains(clbit) {
                    return Err(Error::UnknownClbit(clbit.clone()));
                }
                match reg.get(clbit) {
                    None => return Err(Error::UnsetClbit(clbit.clone())),
                    Some(v) if v == *value => apply_gate_in_place(sv, gate, exec)?,
                    Some(_) => {}
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn outcome_bits(circuit: &Circuit, reg: &ClassicalRegister) -> Option<String> {
    let labels = circuit.measured_clbits();
    if labels.is_empty() {
        return None;
    }
    Some(
        labels
            .iter()
            .map(|l| match reg.get(l) {
                Some(1) => '1',
                _ => '0',
            })
            .collect(),
    )
}

/// Runs `circuit` once from its initial state.
pub fn run<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> Result<RunOutcome> {
    run_with(circuit, rng, Execution::default())
}

pub fn run_with<R: Rng + ?Sized>(
    circuit: &Circuit,
    rng: &mut R,
    exec: Execution,
) -> Result<RunOutcome> {
    let mut sv = circuit.initial_state().clone();
    let mut reg = ClassicalRegister::with_labels(circuit.clbits());
    execute(&mut sv, &mut reg, circuit.elements(), rng, exec)?;
    let measured_bitstring = outcome_bits(circuit, &reg);
    let measured_index = measured_bitstring
        .as_deref()
        .and_then(crate::qstate::bitstring_to_index);
    Ok(RunOutcome {
        statevector: sv,
        classical: reg,
        measured_bitstring,
        measured_index,
    })
}

/// [`run`] with a ChaCha stream seeded from `seed`.
pub fn run_seeded(circuit: &Circuit, seed: u64) -> Result<RunOutcome> {
    run(circuit, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Final state of a circuit made only of gates.
pub fn final_state(circuit: &Circuit) -> Result<StateVector> {
    let mut sv = circuit.initial_state().clone();
    for (index, e) in circuit.elements().iter().enumerate() {
        match e {
            CircuitElement::Gate(g) => apply_gate_in_place(&mut sv, g, Execution::default())?,
            other => {
                return Err(Error::NotUnitaryElement {
                    index,
                    kind: other.kind(),
                })
            }
        }
    }
    Ok(sv)
}

/// Samples a full measurement: `(bitstring, index, collapsed state)`.
pub fn measure_all<R: Rng + ?Sized>(sv: &StateVector, rng: &mut R) -> (String, usize, StateVector) {
    let n = sv.num_qubits();
    let mut out = sv.clone();
    let qubits: Vec<usize> = (0..n).collect();
    let index = measure_in_place(&mut out, &qubits, rng);
    let collapsed = basis_state(n, index).expect("index within range");
    (index_to_bitstring(index, n), index, collapsed)
}

/// `⟨ψ|H|ψ⟩`, evaluated term by term by applying each Pauli string.
pub fn expectation(sv: &StateVector, observable: &PauliHamiltonian) -> Result<f64> {
    if observable.num_qubits() != sv.num_qubits() {
        return Err(Error::MalformedPauli(format!(
            "observable on {} qubit(s) applied to a {}-qubit state",
            observable.num_qubits(),
            sv.num_qubits()
        )));
    }
    let mut total = C64::new(0.0, 0.0);
    let mut scratch = sv.clone();
    for (w, p) in observable.terms() {
        scratch
            .amplitudes_mut()
            .copy_from_slice(sv.amplitudes());
        for g in p.gates() {
            apply_gate_in_place(&mut scratch, &g, Execution::Serial)?;
        }
        total += sv.inner(&scratch) * w;
    }
    debug_assert!(total.im.abs() < 1e-10, "imaginary residue {}", total.im);
    Ok(total.re)
}

/// Branches lighter than this are dropped by [`branches`].
const BRANCH_CUTOFF: f64 = 1e-15;

/// One classical history of a circuit: its probability, classical record and
/// final (normalized) state.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub classical: ClassicalRegister,
    pub statevector: StateVector,
}

fn split_on_measure(b: Branch, qubits: &[usize], clbits: &[String], out: &mut Vec<Branch>) -> Result<()> {
    let n = b.statevector.num_qubits();
    let m = qubits.len();
    for outcome in 0..(1usize << m) {
        let mut sv = b.statevector.clone();
        for (i, a) in sv.amplitudes_mut().iter_mut().enumerate() {
            let hit = qubits.iter().enumerate().all(|(j, &q)| {
                (i >> bit_position(q, n)) & 1 == (outcome >> (m - 1 - j)) & 1
            });
            if !hit {
                *a = ZERO;
            }
        }
        let w = sv.norm_sqr();
        if b.probability * w < BRANCH_CUTOFF {
            continue;
        }
        sv.renormalize();
        let mut classical = b.classical.clone();
        for (j, label) in clbits.iter().enumerate() {
            classical.set(label, ((outcome >> (m - 1 - j)) & 1) as u8)?;
        }
        out.push(Branch {
            probability: b.probability * w,
            classical,
            statevector: sv,
        });
    }
    Ok(())
}

fn split_on_noise(b: Branch, ch: &crate::noise::NoiseChannel, out: &mut Vec<Branch>) {
    let n = b.statevector.num_qubits();
    let mut current = vec![b];
    for &t in ch.targets() {
        let mut next = Vec::new();
        for b in current {
            for k in ch.kraus_ops() {
                let mut sv = b.statevector.clone();
                kernel::apply(sv.amplitudes_mut(), n, k.as_slice(), &[t], &[], Execution::Serial);
                let w = sv.norm_sqr();
                if b.probability * w < BRANCH_CUTOFF {
                    continue;
                }
                sv.renormalize();
                next.push(Branch {
                    probability: b.probability * w,
                    classical: b.classical.clone(),
                    statevector: sv,
                });
            }
        }
        current = next;
    }
    out.extend(current);
}

/// Every measurement and noise branch of `circuit` with its exact probability.
/// The number of branches grows with each measured qubit and noise target.
pub fn branches(circuit: &Circuit) -> Result<Vec<Branch>> {
    let mut live = vec![Branch {
        probability: 1.0,
        classical: ClassicalRegister::with_labels(circuit.clbits()),
        statevector: circuit.initial_state().clone(),
    }];
    for e in circuit.elements() {
        match e {
            CircuitElement::Gate(g) => {
                for b in &mut live {
                    apply_gate_in_place(&mut b.statevector, g, Execution::default())?;
                }
            }
            CircuitElement::Noise(ch) => {
                let mut next = Vec::new();
                for b in live {
                    split_on_noise(b, ch, &mut next);
                }
                live = next;
            }
            CircuitElement::Measure { qubits, clbits } => {
                let mut next = Vec::new();
                for b in live {
                    split_on_measure(b, qubits, clbits, &mut next)?;
                }
                live = next;
            }
            CircuitElement::ClassicalControl { clbit, value, gate } => {
                for b in &mut live {
                    match b.classical.get(clbit) {
                        None => return Err(Error::UnsetClbit(clbit.clone())),
                        Some(v) if v == *value => {
                            apply_gate_in_place(&mut b.statevector, gate, Execution::default())?
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    Ok(live)
}

/// Exact distribution of the outcome keys a shot run would report: measured
/// classical bits in register order, or every qubit when nothing is measured.
pub fn outcome_probabilities(circuit: &Circuit) -> Result<BTreeMap<String, f64>> {
    let mut dist = BTreeMap::new();
    let measured = circuit.has_measurement();
    for b in branches(circuit)? {
        if measured {
            let key = outcome_bits(circuit, &b.classical).unwrap_or_default();
            *dist.entry(key).or_insert(0.0) += b.probability;
        } else {
            for (k, p) in sv_to_probability(&b.statevector) {
                *dist.entry(k).or_insert(0.0) += b.probability * p;
            }
        }
    }
    Ok(dist)
}
