//! Quantum state representations.
//!
//! Bit ordering is fixed crate-wide: qubit 0 is the most significant bit of a
//! state-vector index, and character `i` of every bitstring describes qubit
//! `i`. For three qubits, index 4 is `|100⟩` and reads `"100"`.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::matrix::{c, C64, Matrix, ONE, ZERO};

/// Tolerance used when checking that user-supplied states are normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Hard cap on register width for dense state vectors.
pub const MAX_QUBITS: usize = 26;

/// A wire index, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(pub usize);

impl From<usize> for QubitId {
    fn from(i: usize) -> Self {
        QubitId(i)
    }
}

/// Formats `index` as an `n`-character bitstring, qubit 0 leftmost.
pub fn index_to_bitstring(index: usize, num_bits: usize) -> String {
    (0..num_bits)
        .map(|q| {
            if (index >> (num_bits - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Inverse of [`index_to_bitstring`]. Returns `None` on characters other than `0`/`1`.
pub fn bitstring_to_index(bits: &str) -> Option<usize> {
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some((acc << 1) | 1),
        _ => None,
    })
}

/// Bit position (from the least significant end) of qubit `q` in an
/// `n`-qubit index.
#[inline]
pub(crate) fn bit_position(q: usize, num_qubits: usize) -> usize {
    num_qubits - 1 - q
}

/// A pure state of `num_qubits` qubits, stored as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` wires.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        basis_state(num_qubits, 0)
    }

    /// Wraps raw amplitudes. The length must be a power of two and the
    /// vector must be normalized within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let sv = Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!(
                "state is not normalized (norm^2 = {norm})"
            )));
        }
        Ok(sv)
    }

    /// Like [`StateVector::from_amplitudes`] but rescales to unit norm first.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("zero vector cannot be normalized".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amplitudes)
    }

    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    #[inline]
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.num_qubits, other.num_qubits, "width mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability of each basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// State of a single qubit, available only when that qubit is not
    /// entangled with the rest of the register.
    ///
    /// The returned phase is fixed so the first non-negligible amplitude is
    /// real and positive.
    pub fn qubit_state(&self, qubit: usize) -> Result<StateVector> {
        if qubit >= self.num_qubits {
            return Err(Error::WireOutOfRange {
                wire: qubit,
                width: self.num_qubits,
            });
        }
        let pos = bit_position(qubit, self.num_qubits);
        let mask = 1usize << pos;
        // Columns of the 2 x 2^(n-1) reshaping, rows indexed by the qubit's bit.
        let pairs: Vec<(C64, C64)> = (0..self.amplitudes.len())
            .filter(|i| i & mask == 0)
            .map(|i| (self.amplitudes[i], self.amplitudes[i | mask]))
            .collect();
        let (best, _) = pairs
            .iter()
            .enumerate()
            .map(|(k, (a, b))| (k, a.norm_sqr() + b.norm_sqr()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let (a0, a1) = pairs[best];
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        let (mut u0, mut u1) = (a0 / norm, a1 / norm);
        // Residual of projecting every column onto the candidate factor.
        let mut residual = 0.0;
        for (p, q) in &pairs {
            let overlap = u0.conj() * p + u1.conj() * q;
            residual += (p - u0 * overlap).norm_sqr() + (q - u1 * overlap).norm_sqr();
        }
        if residual > 1e-12 {
            return Err(Error::NotProductState(qubit));
        }
        let lead = if u0.norm() > 1e-12 { u0 } else { u1 };
        let phase = lead.conj() / lead.norm();
        u0 *= phase;
        u1 *= phase;
        Ok(StateVector::from_raw(1, vec![u0, u1]))
    }

    /// Equality up to a global phase: `|⟨a|b⟩| = 1` within `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.num_qubits == other.num_qubits && (1.0 - self.inner(other).norm()).abs() < tol
    }
}

/// Computational basis state `|index⟩` on `num_qubits` wires.
pub fn basis_state(num_qubits: usize, index: usize) -> Result<StateVector> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Domain(format!(
            "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    let dim = 1usize << num_qubits;
    if index >= dim {
        return Err(Error::Domain(format!(
            "basis index {index} out of range for {num_qubits} qubit(s)"
        )));
    }
    let mut amps = vec![ZERO; dim];
    amps[index] = ONE;
    Ok(StateVector::from_raw(num_qubits, amps))
}

/// A named single qubit and its state.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubit {
    pub id: QubitId,
    pub name: String,
    pub state: StateVector,
}

impl Qubit {
    /// A qubit in `|0⟩` named `q{index}`.
    pub fn new(index: usize) -> Self {
        Self {
            id: QubitId(index),
            name: format!("q{index}"),
            state: StateVector::from_raw(1, vec![ONE, ZERO]),
        }
    }

    pub fn named(index: usize, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::new(index)
        }
    }
}

/// `alpha|0⟩ + sqrt(1 - alpha²)|1⟩` on qubit `qubit`.
pub fn create_state(qubit: usize, alpha: f64) -> Result<Qubit> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    Ok(Qubit {
        state: StateVector::from_raw(1, vec![c(alpha, 0.0), c(beta, 0.0)]),
        ..Qubit::new(qubit)
    })
}

/// `cos(theta/2)|0⟩ + e^{i phi} sin(theta/2)|1⟩` on qubit `qubit`.
pub fn bloch_state(qubit: usize, theta: f64, phi: f64) -> Qubit {
    let (s, co) = (theta / 2.0).sin_cos();
    Qubit {
        state: StateVector::from_raw(1, vec![c(co, 0.0), C64::from_polar(s, phi)]),
        ..Qubit::new(qubit)
    }
}

/// A register of independently prepared qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiQubit {
    pub qubits: Vec<Qubit>,
}

impl MultiQubit {
    /// `n` qubits, all in `|0⟩`.
    pub fn new(n: usize) -> Self {
        Self {
            qubits: (0..n).map(Qubit::new).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn state(&self) -> Result<StateVector> {
        let states: Vec<StateVector> = self.qubits.iter().map(|q| q.state.clone()).collect();
        tensor_combine(&states)
    }
}

/// Kronecker product of the inputs in wire order: qubit 0 of the first input
/// becomes the most significant bit of the result.
pub fn tensor_combine(states: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::Domain("no states to combine".into()))?;
    let mut acc = first.amplitudes.clone();
    let mut width = first.num_qubits;
    for s in rest {
        width += s.num_qubits;
        if width > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                qubits: width,
                limit: MAX_QUBITS,
                what: "a state vector",
            });
        }
        acc = acc
            .iter()
            .flat_map(|a| s.amplitudes.iter().map(move |b| a * b))
            .collect();
    }
    Ok(StateVector::from_raw(width, acc))
}

/// Outcome probabilities keyed by bitstring; zero-probability outcomes are omitted.
pub fn sv_to_probability(sv: &StateVector) -> BTreeMap<String, f64> {
    sv.amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(i, a)| (index_to_bitstring(i, sv.num_qubits), a.norm_sqr()))
        .collect()
}

/// `|ψ⟩⟨ψ|`
pub fn sv_to_density(sv: &StateVector) -> DensityMatrix {
    let dim = sv.amplitudes.len();
    let mut m = Matrix::zeros(dim);
    for (r, a) in sv.amplitudes.iter().enumerate() {
        for (col, b) in sv.amplitudes.iter().enumerate() {
            m.set(r, col, a * b.conj());
        }
    }
    DensityMatrix {
        num_qubits: sv.num_qubits,
        matrix: m,
    }
}

/// A mixed or pure state as a `2^n x 2^n` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: Matrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within `1e-10`.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Dimension {
                rows: dim,
                cols: dim,
                qubits: 0,
            });
        }
        let herm = matrix.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::Domain(format!(
                "density matrix is not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::Domain(format!("density matrix trace is {tr}")));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub(crate) fn from_raw(num_qubits: usize, matrix: Matrix) -> Self {
        Self { num_qubits, matrix }
    }

    /// The maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            matrix: Matrix::identity(dim).scale(c(1.0 / dim as f64, 0.0)),
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Matrix {
        &mut self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Diagonal entries, i.e. the outcome distribution of a full measurement.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.matrix.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }

    /// Reduced state on `keep` (in the listed order), tracing out every other wire.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits;
        for (k, &q) in keep.iter().enumerate() {
            if q >= n {
                return Err(Error::WireOutOfRange { wire: q, width: n });
            }
            if keep[..k].contains(&q) {
                return Err(Error::DuplicateWire(q));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let kdim = 1usize << keep.len();
        let compose = |kept: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                let bit = (kept >> (keep.len() - 1 - j)) & 1;
                idx |= bit << bit_position(q, n);
            }
            for (j, &q) in traced.iter().enumerate() {
                let bit = (env >> (traced.len() - 1 - j)) & 1;
                idx |= bit << bit_position(q, n);
            }
            idx
        };
        let mut out = Matrix::zeros(kdim);
        for r in 0..kdim {
            for col in 0..kdim {
                let sum: C64 = (0..1usize << traced.len())
                    .map(|e| self.matrix.get(compose(r, e), compose(col, e)))
                    .sum();
                out.set(r, col, sum);
            }
        }
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            matrix: out,
        })
    }
}

/// Classical bits keyed by label, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassicalRegister {
    bits: IndexMap<String, Option<u8>>,
}

impl ClassicalRegister {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            bits: labels.into_iter().map(|l| (l.into(), None)).collect(),
        }
    }

    pub fn declare(&mut self, label: impl Into<String>) {
        self.bits.entry(label.into()).or_insert(None);
    }

    pub fn set(&mut self, label: &str, value: u8) -> Result<()> {
        debug_assert!(value <= 1);
        match self.bits.get_mut(label) {
            Some(slot) => {
                *slot = Some(value);
                Ok(())
            }
            None => Err(Error::UnknownClbit(label.to_string())),
        }
    }

    pub fn get(&self, label: &str) -> Option<u8> {
        self.bits.get(label).copied().flatten()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.bits.contains_key(label)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<u8>)> {
        self.bits.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn amps(sv: &StateVector) -> Vec<(f64, f64)> {
        sv.amplitudes().iter().map(|a| (a.re, a.im)).collect()
    }

    #[test]
    fn basis_states() {
        assert_eq!(amps(&basis_state(1, 0).unwrap()), vec![(1.0, 0.0), (0.0, 0.0)]);
        let s = basis_state(2, 3).unwrap();
        assert_eq!(s.amplitude(3), ONE);
        assert_eq!(s.norm_sqr(), 1.0);
        let s = basis_state(3, 0).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_eq!(s.amplitude(0), ONE);
        assert!(basis_state(2, 4).is_err());
        assert!(basis_state(0, 0).is_err());
    }

    #[test]
    fn create_state_values() {
        let q = create_state(1, 1.0).unwrap();
        assert_eq!(amps(&q.state), vec![(1.0, 0.0), (0.0, 0.0)]);
        let q = create_state(0, 0.7).unwrap();
        assert!((q.state.amplitude(0).re - 0.7).abs() < 1e-15);
        assert!((q.state.amplitude(1).re - 0.714_142_842_854_285).abs() < 1e-12);
        let q = create_state(0, 0.0).unwrap();
        assert_eq!(amps(&q.state), vec![(0.0, 0.0), (1.0, 0.0)]);
        assert!(create_state(0, 1.2).is_err());
        assert!(create_state(0, -0.1).is_err());
    }

    #[test]
    fn tensor_ordering() {
        let zero = basis_state(1, 0).unwrap();
        let one = basis_state(1, 1).unwrap();
        assert_eq!(tensor_combine(&[zero.clone(), one.clone()]).unwrap(), basis_state(2, 1).unwrap());
        assert_eq!(tensor_combine(&[one, zero.clone()]).unwrap(), basis_state(2, 2).unwrap());
        let q = create_state(0, 0.7).unwrap().state;
        let t = tensor_combine(&[q, zero]).unwrap();
        let beta = (1.0f64 - 0.49).sqrt();
        let expected = [0.7, 0.0, beta, 0.0];
        for (a, e) in t.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn probabilities() {
        let p = sv_to_probability(&basis_state(1, 0).unwrap());
        assert_eq!(p, BTreeMap::from([("0".to_string(), 1.0)]));
        let h = FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let p = sv_to_probability(&bell);
        assert_eq!(p.len(), 2);
        assert!((p["00"] - 0.5).abs() < 1e-15 && (p["11"] - 0.5).abs() < 1e-15);
        let p = sv_to_probability(&create_state(0, 0.7).unwrap().state);
        assert!((p["0"] - 0.49).abs() < 1e-12 && (p["1"] - 0.51).abs() < 1e-12);
    }

    #[test]
    fn density_from_state() {
        let rho = sv_to_density(&basis_state(1, 0).unwrap());
        assert_eq!(rho.get(0, 0), ONE);
        assert_eq!(rho.get(1, 1), ZERO);
        let h = FRAC_1_SQRT_2;
        let plus = StateVector::from_amplitudes(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let rho = sv_to_density(&plus);
        for r in 0..2 {
            for col in 0..2 {
                assert!((rho.get(r, col) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let rho = sv_to_density(&bell);
        for r in 0..4 {
            for col in 0..4 {
                let corner = (r == 0 || r == 3) && (col == 0 || col == 3);
                let want = if corner { 0.5 } else { 0.0 };
                assert!((rho.get(r, col).re - want).abs() < 1e-15);
            }
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bitstrings_follow_msb_convention() {
        assert_eq!(index_to_bitstring(4, 3), "100");
        assert_eq!(index_to_bitstring(1, 2), "01");
        assert_eq!(bitstring_to_index("110"), Some(6));
        assert_eq!(bitstring_to_index("1x"), None);
    }

    #[test]
    fn qubit_state_of_product_and_entangled() {
        let q = create_state(0, 0.7).unwrap().state;
        let t = tensor_combine(&[basis_state(1, 1).unwrap(), q.clone()]).unwrap();
        let extracted = t.qubit_state(1).unwrap();
        assert!(extracted.approx_eq_up_to_phase(&q, 1e-12));
        assert_eq!(t.qubit_state(0).unwrap(), basis_state(1, 1).unwrap());
        let h = FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        assert_eq!(bell.qubit_state(0), Err(Error::NotProductState(0)));
    }

    #[test]
    fn partial_trace_of_bell_is_mixed() {
        let h = FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let reduced = sv_to_density(&bell).partial_trace(&[1]).unwrap();
        assert!(reduced.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    }

    #[test]
    fn register_tracks_declaration_order() {
        let mut reg = ClassicalRegister::with_labels(["b", "a"]);
        reg.set("a", 1).unwrap();
        assert_eq!(reg.get("a"), Some(1));
        assert_eq!(reg.get("b"), None);
        assert!(reg.set("zz", 0).is_err());
        let labels: Vec<&str> = reg.iter().map(|(l, _)| l).collect();
        assert_eq!(labels, ["b", "a"]);
    }
}
