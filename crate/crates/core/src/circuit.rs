//! Circuit construction and introspection.

use std::collections::BTreeMap;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::gates::{GateDef, MAX_GATE_QUBITS};
use crate::kernel::Execution;
use crate::matrix::{Matrix, ZERO};
use crate::noise::NoiseChannel;
use crate::qstate::{basis_state, sv_to_density, tensor_combine, DensityMatrix, Qubit, StateVector};

/// One step of a circuit program.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitElement {
    Gate(GateDef),
    Noise(NoiseChannel),
    /// Projective Z-basis measurement of `qubits[i]` into classical bit `clbits[i]`.
    Measure { qubits: Vec<usize>, clbits: Vec<String> },
    /// Applies `gate` iff classical bit `clbit` equals `value`.
    ClassicalControl { clbit: String, value: u8, gate: GateDef },
}

impl CircuitElement {
    /// Measurement of `qubits`. Labels default to `m{qubit}`.
    pub fn measure(qubits: &[usize], labels: Option<&[&str]>) -> Result<Self> {
        let clbits: Vec<String> = match labels {
            Some(l) if l.len() != qubits.len() => {
                return Err(Error::Domain(format!(
                    "{} qubit(s) measured into {} label(s)",
                    qubits.len(),
                    l.len()
                )))
            }
            Some(l) => l.iter().map(|s| s.to_string()).collect(),
            None => qubits.iter().map(|q| format!("m{q}")).collect(),
        };
        for (k, q) in qubits.iter().enumerate() {
            if qubits[..k].contains(q) {
                return Err(Error::DuplicateWire(*q));
            }
            if clbits[..k].contains(&clbits[k]) {
                return Err(Error::DuplicateClbit(clbits[k].clone()));
            }
        }
        Ok(CircuitElement::Measure {
            qubits: qubits.to_vec(),
            clbits,
        })
    }

    /// Measurement of every qubit of an `n`-qubit circuit, labels `m0..m{n-1}`.
    pub fn measure_all(num_qubits: usize) -> Self {
        let qubits: Vec<usize> = (0..num_qubits).collect();
        Self::measure(&qubits, None).expect("distinct qubits")
    }

    pub fn if_cbit(clbit: impl Into<String>, value: u8, gate: GateDef) -> Result<Self> {
        if value > 1 {
            return Err(Error::Domain(format!("classical condition value {value} is not 0 or 1")));
        }
        Ok(CircuitElement::ClassicalControl {
            clbit: clbit.into(),
            value,
            gate,
        })
    }

    /// Quantum wires this element touches.
    pub fn wires(&self) -> Vec<usize> {
        match self {
            CircuitElement::Gate(g) => g.targets().to_vec(),
            CircuitElement::Noise(n) => n.targets().to_vec(),
            CircuitElement::Measure { qubits, .. } => qubits.clone(),
            CircuitElement::ClassicalControl { gate, .. } => gate.targets().to_vec(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CircuitElement::Gate(_) => "gate",
            CircuitElement::Noise(_) => "noise",
            CircuitElement::Measure { .. } => "measure",
            CircuitElement::ClassicalControl { .. } => "classical control",
        }
    }
}

impl From<GateDef> for CircuitElement {
    fn from(g: GateDef) -> Self {
        CircuitElement::Gate(g)
    }
}

impl From<NoiseChannel> for CircuitElement {
    fn from(n: NoiseChannel) -> Self {
        CircuitElement::Noise(n)
    }
}

/// An ordered program over `num_qubits` wires and a labelled classical register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    declared_clbits: usize,
    clbits: IndexSet<String>,
    measured: IndexSet<String>,
    elements: Vec<CircuitElement>,
    initial_state: StateVector,
}

impl Circuit {
    /// `num_qubits` wires in `|0…0⟩` and `num_clbits` declared classical bits
    /// labelled `c0..c{m-1}`.
    pub fn new(num_qubits: usize, num_clbits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Domain("a circuit needs at least one qubit".into()));
        }
        Ok(Self {
            num_qubits,
            declared_clbits: num_clbits,
            clbits: (0..num_clbits).map(|i| format!("c{i}")).collect(),
            measured: IndexSet::new(),
            elements: Vec::new(),
            initial_state: basis_state(num_qubits, 0)?,
        })
    }

    /// A circuit whose initial state is the product of the given qubits.
    pub fn with_qubits(num_qubits: usize, num_clbits: usize, qubits: &[Qubit]) -> Result<Self> {
        if qubits.len() != num_qubits {
            return Err(Error::Domain(format!(
                "{} initial qubit state(s) supplied for {num_qubits} qubit(s)",
                qubits.len()
            )));
        }
        let states: Vec<StateVector> = qubits.iter().map(|q| q.state.clone()).collect();
        let mut c = Self::new(num_qubits, num_clbits)?;
        c.initial_state = tensor_combine(&states)?;
        Ok(c)
    }

    pub fn set_initial_state(&mut self, state: StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Domain(format!(
                "initial state has {} qubit(s), circuit has {}",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        self.initial_state = state;
        Ok(())
    }

    fn check_wires(&self, wires: &[usize]) -> Result<()> {
        match wires.iter().find(|&&w| w >= self.num_qubits) {
            Some(&wire) => Err(Error::WireOutOfRange {
                wire,
                width: self.num_qubits,
            }),
            None => Ok(()),
        }
    }

    /// Appends an element in program order after validating its wires and
    /// classical-bit references.
    pub fn append(&mut self, element: impl Into<CircuitElement>) -> Result<&mut Self> {
        let element = element.into();
        self.check_wires(&element.wires())?;
        match &element {
            CircuitElement::Measure { clbits, .. } => {
                if let Some(dup) = clbits.iter().find(|l| self.measured.contains(*l)) {
                    return Err(Error::DuplicateClbit(dup.clone()));
                }
                for l in clbits {
                    self.clbits.insert(l.clone());
                    self.measured.insert(l.clone());
                }
            }
            CircuitElement::ClassicalControl { clbit, .. } if !self.clbits.contains(clbit) => {
                return Err(Error::UnknownClbit(clbit.clone()));
            }
            _ => {}
        }
        self.elements.push(element);
        Ok(self)
    }

    /// Appends every element of `other`, which must not be wider than `self`.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        for e in other.elements() {
            self.append(e.clone())?;
        }
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn width(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.clbits.len()
    }

    /// Bits declared up front (`c0..`), as opposed to created by measurements.
    pub fn declared_clbits(&self) -> usize {
        self.declared_clbits
    }

    /// Classical-bit labels in declaration order.
    pub fn clbits(&self) -> impl Iterator<Item = &str> {
        self.clbits.iter().map(String::as_str)
    }

    /// Labels written by some measurement, in register order.
    pub fn measured_clbits(&self) -> Vec<&str> {
        self.clbits
            .iter()
            .filter(|l| self.measured.contains(*l))
            .map(String::as_str)
            .collect()
    }

    pub fn has_measurement(&self) -> bool {
        self.elements
            .iter()
            .any(|e| matches!(e, CircuitElement::Measure { .. }))
    }

    pub fn elements(&self) -> &[CircuitElement] {
        &self.elements
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }

    /// The state before running, i.e. the initial state.
    pub fn statevector(&self) -> &StateVector {
        &self.initial_state
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        sv_to_density(&self.initial_state)
    }

    /// Number of gate elements; noise, measurement and classical control are
    /// not counted.
    pub fn size(&self) -> usize {
        self.gates().count()
    }

    fn gates(&self) -> impl Iterator<Item = (usize, &GateDef)> {
        self.elements.iter().enumerate().filter_map(|(i, e)| match e {
            CircuitElement::Gate(g) => Some((i, g)),
            _ => None,
        })
    }

    /// Gate counts by name.
    pub fn gatesinfo(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for (_, g) in self.gates() {
            *m.entry(g.name().to_string()).or_insert(0) += 1;
        }
        m
    }

    /// Greedy left-to-right layering of gate elements: each gate lands in the
    /// layer after the last one that used any of its wires. Returns element
    /// indices per layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut frontier = vec![0usize; self.num_qubits];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, g) in self.gates() {
            let layer = g.targets().iter().map(|&w| frontier[w]).max().unwrap_or(0);
            for &w in g.targets() {
                frontier[w] = layer + 1;
            }
            if layers.len() <= layer {
                layers.resize_with(layer + 1, Vec::new);
            }
            layers[layer].push(i);
        }
        layers
    }

    pub fn depth(&self) -> usize {
        self.layers().len()
    }

    /// The unitary implemented by a gate-only circuit, acting on wires
    /// `0..num_qubits`.
    pub fn to_gate(&self) -> Result<GateDef> {
        self.to_named_gate("circuit")
    }

    pub fn to_named_gate(&self, name: &str) -> Result<GateDef> {
        let matrix = self.unitary()?;
        let targets: Vec<usize> = (0..self.num_qubits).collect();
        GateDef::arbitrary(name, matrix, &targets)
    }

    /// Ordered product of the embedded gate matrices, built column by column.
    pub fn unitary(&self) -> Result<Matrix> {
        if let Some((index, e)) = self
            .elements
            .iter()
            .enumerate()
            .find(|(_, e)| !matches!(e, CircuitElement::Gate(_)))
        {
            return Err(Error::NotUnitaryElement {
                index,
                kind: e.kind(),
            });
        }
        if self.num_qubits > MAX_GATE_QUBITS {
            return Err(Error::TooManyQubits {
                qubits: self.num_qubits,
                limit: MAX_GATE_QUBITS,
                what: "circuit-to-gate conversion",
            });
        }
        let n = self.num_qubits;
        let dim = 1usize << n;
        let mut out = Matrix::zeros(dim);
        let mut column = vec![ZERO; dim];
        for col in 0..dim {
            column.iter_mut().for_each(|z| *z = ZERO);
            column[col] = crate::matrix::ONE;
            for (_, g) in self.gates() {
                crate::engine::apply_gate_slice(&mut column, n, g, Execution::Serial);
            }
            for (row, z) in column.iter().enumerate() {
                out.set(row, col, *z);
            }
        }
        Ok(out)
    }

    /// The inverse program: adjoint gates in reverse order.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut inv = Circuit::new(self.num_qubits, 0)?;
        for (index, e) in self.elements.iter().enumerate().rev() {
            match e {
                CircuitElement::Gate(g) => {
                    inv.append(g.adjoint())?;
                }
                other => {
                    return Err(Error::NotUnitaryElement {
                        index,
                        kind: other.kind(),
                    })
                }
            }
        }
        Ok(inv)
    }
}
