//! Pauli strings and weighted sums of them, the observables used for
//! expectation values.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::GateDef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of Paulis; character `i` acts on qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::MalformedPauli(String::new()));
        }
        Ok(Self(ops))
    }

    /// Identity everywhere except `ops` on the listed wires.
    pub fn sparse(num_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut v = vec![Pauli::I; num_qubits];
        for &(q, p) in ops {
            if q >= num_qubits {
                return Err(Error::WireOutOfRange {
                    wire: q,
                    width: num_qubits,
                });
            }
            v[q] = p;
        }
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    /// The non-identity factors as single-qubit gates.
    pub(crate) fn gates(&self) -> impl Iterator<Item = GateDef> + '_ {
        self.0.iter().enumerate().filter_map(|(q, p)| match p {
            Pauli::I => None,
            other => Some(
                GateDef::single(&other.symbol().to_string(), &[], q).expect("Pauli gate"),
            ),
        })
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::MalformedPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops).map_err(|_| Error::MalformedPauli(s.to_string()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

/// `Σ w_k P_k` with real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Domain("Hamiltonian has no terms".into()))?;
        let n = first.1.len();
        for (w, p) in &terms {
            if !w.is_finite() {
                return Err(Error::Domain(format!("non-finite weight {w} on {p}")));
            }
            if p.len() != n {
                return Err(Error::MalformedPauli(p.to_string()));
            }
        }
        Ok(Self { terms })
    }

    /// Parses terms such as `[(1.0, "ZZ"), (-0.5, "XI")]`.
    pub fn parse(terms: &[(f64, &str)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(w, s)| Ok((*w, s.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.terms[0].1.len()
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }
}
