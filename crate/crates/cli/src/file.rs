//! Circuit file format: one version-tagged JSON document per file.
//!
//! ```json
//! {
//!   "version": 1,
//!   "qubits": 3,
//!   "clbits": 0,
//!   "ops": [
//!     {"name":"H","wires":[0]},
//!     {"name":"CX","wires":[0,1]},
//!     {"name":"bitflip","wires":[0],"p":0.1},
//!     {"name":"measure","wires":[0,1],"clbits":["a","b"]},
//!     {"name":"X","wires":[2],"condition":{"clbit":"b","value":1}}
//!   ]
//! }
//! ```
//!
//! Op names are library gate names, the noise channels `bitflip`,
//! `phaseflip` and `depolarizing` (field `p`, one channel per listed wire), or
//! `measure` (labels default to `m{wire}`). Any other name with a `matrix`
//! field (rows of `[re, im]` pairs) is a custom gate. `initial` optionally
//! replaces `|0…0⟩` with explicit `[re, im]` amplitudes.

use std::fmt::Write as _;

use qwire::gates::GateDef;
use qwire::matrix::Matrix;
use qwire::qstate::StateVector;
use qwire::{Circuit, CircuitElement, Error as CoreError, NoiseChannel, NoiseKind, C64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub version: u32,
    pub qubits: usize,
    #[serde(default)]
    pub clbits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<[f64; 2]>>,
    pub ops: Vec<Op>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Op {
    pub name: String,
    pub wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbits: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    pub clbit: String,
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FileError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),

    #[error("field `{field}`: {message}")]
    Header { field: &'static str, message: String },

    #[error("ops[{index}] `{name}`{}, field `{field}`: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Op {
        index: usize,
        line: Option<usize>,
        name: String,
        field: &'static str,
        message: String,
    },
}

fn noise_kind(name: &str) -> Option<NoiseKind> {
    [NoiseKind::BitFlip, NoiseKind::PhaseFlip, NoiseKind::Depolarizing]
        .into_iter()
        .find(|k| k.file_name() == name)
}

/// The op field a core error refers to.
fn blame(e: &CoreError) -> &'static str {
    match e {
        CoreError::UnknownGate(_) => "name",
        CoreError::ParamCount { .. } => "params",
        CoreError::Dimension { .. } | CoreError::NonUnitary { .. } => "matrix",
        CoreError::UnknownClbit(_) => "condition",
        CoreError::DuplicateClbit(_) => "clbits",
        CoreError::Domain(_) => "p",
        _ => "wires",
    }
}

/// Line of the first character of each object in the `ops` array.
fn op_lines(text: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    let (mut depth, mut line) = (0usize, 1usize);
    let (mut in_string, mut escaped) = (false, false);
    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
        }
        if in_string {
            match ch {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '{' | '[' => {
                if ch == '{' && depth == 2 {
                    lines.push(line);
                }
                depth += 1;
            }
            '}' | ']' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    lines
}

impl CircuitFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| FileError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Builds the circuit. `text` is the source the file was parsed from,
    /// used only to report line numbers.
    pub fn to_circuit_with_source(&self, text: Option<&str>) -> Result<Circuit, FileError> {
        if self.version != FORMAT_VERSION {
            return Err(FileError::Version(self.version));
        }
        let header = |field, e: CoreError| FileError::Header { field, message: e.to_string() };
        let mut circuit = Circuit::new(self.qubits, self.clbits).map_err(|e| header("qubits", e))?;
        if let Some(amps) = &self.initial {
            let sv = StateVector::from_amplitudes(amps.iter().map(|a| C64::new(a[0], a[1])).collect())
                .map_err(|e| header("initial", e))?;
            circuit.set_initial_state(sv).map_err(|e| header("initial", e))?;
        }
        let lines = text.map(op_lines).unwrap_or_default();
        for (index, op) in self.ops.iter().enumerate() {
            let fail = |field: &'static str, message: String| FileError::Op {
                index,
                line: lines.get(index).copied(),
                name: op.name.clone(),
                field,
                message,
            };
            let element = op.element().map_err(|(f, m)| fail(f, m))?;
            circuit.append(element).map_err(|e| fail(blame(&e), e.to_string()))?;
        }
        Ok(circuit)
    }

    pub fn to_circuit(&self) -> Result<Circuit, FileError> {
        self.to_circuit_with_source(None)
    }

    /// Parses and builds in one step, with line numbers in op errors.
    pub fn load(text: &str) -> Result<Circuit, FileError> {
        Self::parse(text)?.to_circuit_with_source(Some(text))
    }

    pub fn from_circuit(circuit: &Circuit) -> Self {
        let initial = circuit.initial_state();
        let is_zero = initial.amplitude(0) == C64::new(1.0, 0.0);
        Self {
            version: FORMAT_VERSION,
            qubits: circuit.num_qubits(),
            clbits: circuit.declared_clbits(),
            initial: (!is_zero).then(|| initial.amplitudes().iter().map(|a| [a.re, a.im]).collect()),
            ops: circuit.elements().iter().map(Op::from_element).collect(),
        }
    }

    /// Pretty form with one op per line.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"version\": {},", self.version);
        let _ = writeln!(s, "  \"qubits\": {},", self.qubits);
        let _ = writeln!(s, "  \"clbits\": {},", self.clbits);
        if let Some(init) = &self.initial {
            let _ = writeln!(s, "  \"initial\": {},", serde_json::to_string(init).expect("finite amplitudes"));
        }
        s.push_str("  \"ops\": [");
        for (i, op) in self.ops.iter().enumerate() {
            s.push_str(if i == 0 { "\n" } else { ",\n" });
            s.push_str("    ");
            s.push_str(&serde_json::to_string(op).expect("serializable op"));
        }
        s.push_str(if self.ops.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        s
    }
}

type OpError = (&'static str, String);

impl Op {
    fn gate(name: &str, wires: &[usize], params: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            wires: wires.to_vec(),
            params,
            p: None,
            clbits: None,
            condition: None,
            matrix: None,
        }
    }

    fn from_gate(g: &GateDef) -> Self {
        let mut op = Self::gate(g.name(), g.targets(), Vec::new());
        if g.is_library() {
            op.params = g.params().to_vec();
        } else {
            op.matrix = Some(g.matrix().rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect());
        }
        op
    }

    fn from_element(e: &CircuitElement) -> Self {
        match e {
            CircuitElement::Gate(g) => Self::from_gate(g),
            CircuitElement::Noise(n) => Self {
                p: Some(n.p()),
                ..Self::gate(n.kind().file_name(), n.targets(), Vec::new())
            },
            CircuitElement::Measure { qubits, clbits } => {
                let default = qubits.iter().zip(clbits).all(|(q, l)| *l == format!("m{q}"));
                Self {
                    clbits: (!default).then(|| clbits.clone()),
                    ..Self::gate("measure", qubits, Vec::new())
                }
            }
            CircuitElement::ClassicalControl { clbit, value, gate } => Self {
                condition: Some(Condition {
                    clbit: clbit.clone(),
                    value: *value,
                }),
                ..Self::from_gate(gate)
            },
        }
    }

    fn reject(&self, field: &'static str, present: bool) -> Result<(), OpError> {
        if present {
            Err((field, format!("not allowed on `{}`", self.name)))
        } else {
            Ok(())
        }
    }

    fn element(&self) -> Result<CircuitElement, OpError> {
        let core = |e: CoreError| (blame(&e), e.to_string());
        if self.name == "measure" {
            self.reject("params", !self.params.is_empty())?;
            self.reject("p", self.p.is_some())?;
            self.reject("condition", self.condition.is_some())?;
            self.reject("matrix", self.matrix.is_some())?;
            let labels: Option<Vec<&str>> = self.clbits.as_ref().map(|l| l.iter().map(String::as_str).collect());
            return CircuitElement::measure(&self.wires, labels.as_deref()).map_err(|e| ("clbits", e.to_string()));
        }
        self.reject("clbits", self.clbits.is_some())?;
        if let Some(kind) = noise_kind(&self.name) {
            self.reject("params", !self.params.is_empty())?;
            self.reject("condition", self.condition.is_some())?;
            self.reject("matrix", self.matrix.is_some())?;
            let p = self.p.ok_or(("p", "noise channel needs a probability".to_string()))?;
            return NoiseChannel::on_wires(kind, p, &self.wires).map(CircuitElement::Noise).map_err(core);
        }
        self.reject("p", self.p.is_some())?;
        let gate = match &self.matrix {
            Some(rows) => {
                self.reject("params", !self.params.is_empty())?;
                let rows: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|z| C64::new(z[0], z[1])).collect()).collect();
                let m = Matrix::from_rows(&rows).ok_or(("matrix", "matrix must be square".to_string()))?;
                GateDef::arbitrary(self.name.clone(), m, &self.wires).map_err(core)?
            }
            None => GateDef::library(&self.name, &self.params, &self.wires).map_err(core)?,
        };
        match &self.condition {
            Some(cond) => CircuitElement::if_cbit(cond.clbit.clone(), cond.value, gate).map_err(|e| ("condition", e.to_string())),
            None => Ok(CircuitElement::Gate(gate)),
        }
    }
}
