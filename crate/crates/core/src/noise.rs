//! Single-qubit Kraus channels, applied either exactly to a density matrix or
//! stochastically to a pure state (one trajectory branch per application).

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::{self, Execution};
use crate::matrix::{c, C64, Matrix, ZERO};
use crate::qstate::{bit_position, DensityMatrix, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    BitFlip,
    PhaseFlip,
    /// `ρ → (1-p)ρ + p I/2`.
    Depolarizing,
}

impl NoiseKind {
    /// Identifier used in circuit files.
    pub fn file_name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bitflip",
            NoiseKind::PhaseFlip => "phaseflip",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "BitFlipNoise",
            NoiseKind::PhaseFlip => "PhaseFlipNoise",
            NoiseKind::Depolarizing => "DepolarizingNoise",
        }
    }

    fn kraus(self, p: f64) -> Vec<Matrix> {
        let x = Matrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
        let y = Matrix::from_array([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]);
        let z = Matrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]);
        let id = Matrix::identity(2);
        let s = |w: f64| c(w.max(0.0).sqrt(), 0.0);
        match self {
            NoiseKind::BitFlip => vec![id.scale(s(1.0 - p)), x.scale(s(p))],
            NoiseKind::PhaseFlip => vec![id.scale(s(1.0 - p)), z.scale(s(p))],
            NoiseKind::Depolarizing => vec![
                id.scale(s(1.0 - 0.75 * p)),
                x.scale(s(p / 4.0)),
                y.scale(s(p / 4.0)),
                z.scale(s(p / 4.0)),
            ],
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bitflip" | "BitFlipNoise" => Ok(NoiseKind::BitFlip),
            "phaseflip" | "PhaseFlipNoise" => Ok(NoiseKind::PhaseFlip),
            "depolarizing" | "DepolarizingNoise" => Ok(NoiseKind::Depolarizing),
            other => Err(Error::UnknownGate(other.to_string())),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// A single-qubit channel applied independently to each target wire.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    kind: NoiseKind,
    p: f64,
    targets: Vec<usize>,
    kraus: Vec<Matrix>,
}

impl NoiseChannel {
    pub fn new(kind: NoiseKind, p: f64, target: usize) -> Result<Self> {
        Self::on_wires(kind, p, &[target])
    }

    /// Independent copies of the channel on each wire in `targets`.
    pub fn on_wires(kind: NoiseKind, p: f64, targets: &[usize]) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("noise probability {p} outside [0, 1]")));
        }
        if targets.is_empty() {
            return Err(Error::Domain("noise channel needs at least one target".into()));
        }
        for (k, t) in targets.iter().enumerate() {
            if targets[..k].contains(t) {
                return Err(Error::DuplicateWire(*t));
            }
        }
        Ok(Self {
            kind,
            p,
            targets: targets.to_vec(),
            kraus: kind.kraus(p),
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn name(&self) -> &'static str {
        self.kind.display_name()
    }

    pub fn kraus_ops(&self) -> &[Matrix] {
        &self.kraus
    }

    /// `Σ K†K`, which is the identity for a trace-preserving channel.
    pub fn completeness(&self) -> Matrix {
        self.kraus
            .iter()
            .map(|k| k.adjoint().matmul(k))
            .fold(Matrix::zeros(2), |acc, m| &acc + &m)
    }

    /// Choi matrix `Σ_i vec(K_i) vec(K_i)†` of the single-wire channel.
    pub fn choi(&self) -> Matrix {
        let mut out = Matrix::zeros(4);
        for k in &self.kraus {
            let v: Vec<C64> = k.as_slice().to_vec();
            for r in 0..4 {
                for col in 0..4 {
                    out.set(r, col, out.get(r, col) + v[r] * v[col].conj());
                }
            }
        }
        out
    }
}

pub fn bit_flip(p: f64, target: usize) -> Result<NoiseChannel> {
    NoiseChannel::new(NoiseKind::BitFlip, p, target)
}

pub fn phase_flip(p: f64, target: usize) -> Result<NoiseChannel> {
    NoiseChannel::new(NoiseKind::PhaseFlip, p, target)
}

pub fn depolarizing(p: f64, target: usize) -> Result<NoiseChannel> {
    NoiseChannel::new(NoiseKind::Depolarizing, p, target)
}

/// `A ρ B†` style update with `left` on the row index and `conj(right)` on the column index.
pub(crate) fn sandwich(
    rho: &mut Matrix,
    num_qubits: usize,
    op: &Matrix,
    targets: &[usize],
    controls: &[usize],
    exec: Execution,
) {
    let n = num_qubits;
    let conj = op.conj();
    let col_targets: Vec<usize> = targets.iter().map(|t| t + n).collect();
    let col_controls: Vec<usize> = controls.iter().map(|t| t + n).collect();
    let data = rho.as_mut_slice();
    kernel::apply(data, 2 * n, op.as_slice(), targets, controls, exec);
    kernel::apply(data, 2 * n, conj.as_slice(), &col_targets, &col_controls, exec);
}

/// `ρ' = Σ K ρ K†` for each target wire in turn.
pub fn apply_channel_density(rho: &DensityMatrix, ch: &NoiseChannel) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if let Some(&t) = ch.targets.iter().find(|&&t| t >= n) {
        return Err(Error::WireOutOfRange { wire: t, width: n });
    }
    let mut current = rho.clone();
    for &t in &ch.targets {
        let mut acc = Matrix::zeros(1 << n);
        for k in &ch.kraus {
            let mut term = current.matrix().clone();
            sandwich(&mut term, n, k, &[t], &[], Execution::Serial);
            acc = &acc + &term;
        }
        *current.matrix_mut() = acc;
    }
    Ok(current)
}

/// 2x2 reduced density matrix of one wire, row-major.
fn reduced_single(sv: &StateVector, q: usize) -> [C64; 4] {
    let mask = 1usize << bit_position(q, sv.num_qubits());
    let amps = sv.amplitudes();
    let mut r = [ZERO; 4];
    for i in (0..amps.len()).filter(|i| i & mask == 0) {
        let (a0, a1) = (amps[i], amps[i | mask]);
        r[0] += a0 * a0.conj();
        r[1] += a0 * a1.conj();
        r[2] += a1 * a0.conj();
        r[3] += a1 * a1.conj();
    }
    r
}

/// `‖K|ψ⟩‖²` from the wire's reduced density matrix: `tr(K ρ_q K†)`.
fn branch_weight(k: &Matrix, rho_q: &[C64; 4]) -> f64 {
    let mut w = 0.0;
    for r in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                w += (k.get(r, a) * rho_q[a * 2 + b] * k.get(r, b).conj()).re;
            }
        }
    }
    w.max(0.0)
}

/// Draws one Kraus branch per target with probability `‖K_i ψ‖²`, applies it
/// and renormalizes. Returns the chosen branch index for each target.
pub(crate) fn sample_kraus_in_place<R: Rng + ?Sized>(
    sv: &mut StateVector,
    ch: &NoiseChannel,
    rng: &mut R,
) -> Vec<usize> {
    let n = sv.num_qubits();
    let mut chosen = Vec::with_capacity(ch.targets.len());
    for &t in &ch.targets {
        let rho_q = reduced_single(sv, t);
        let weights: Vec<f64> = ch.kraus.iter().map(|k| branch_weight(k, &rho_q)).collect();
        let u: f64 = rng.random::<f64>() * weights.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut pick = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc && *w > 0.0 {
                pick = i;
                break;
            }
        }
        kernel::apply(
            sv.amplitudes_mut(),
            n,
            ch.kraus[pick].as_slice(),
            &[t],
            &[],
            Execution::Serial,
        );
        sv.renormalize();
        chosen.push(pick);
    }
    chosen
}

/// One trajectory step: returns the post-channel state and the Kraus index
/// chosen for each target wire.
pub fn sample_kraus<R: Rng + ?Sized>(
    sv: &StateVector,
    ch: &NoiseChannel,
    rng: &mut R,
) -> Result<(StateVector, Vec<usize>)> {
    if let Some(&t) = ch.targets.iter().find(|&&t| t >= sv.num_qubits()) {
        return Err(Error::WireOutOfRange {
            wire: t,
            width: sv.num_qubits(),
        });
    }
    let mut out = sv.clone();
    let idx = sample_kraus_in_place(&mut out, ch, rng);
    Ok((out, idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;
    use crate::qstate::{basis_state, sv_to_density};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn diag(rho: &DensityMatrix) -> Vec<f64> {
        rho.diagonal_probabilities()
    }

    fn plus() -> DensityMatrix {
        let h = FRAC_1_SQRT_2;
        sv_to_density(&StateVector::from_amplitudes(vec![c(h, 0.0), c(h, 0.0)]).unwrap())
    }

    #[test]
    fn probability_range_checked() {
        assert!(bit_flip(-0.01, 0).is_err());
        assert!(depolarizing(1.01, 0).is_err());
        assert!(phase_flip(1.0, 0).is_ok());
    }

    #[test]
    fn completeness_is_identity() {
        for kind in [NoiseKind::BitFlip, NoiseKind::PhaseFlip, NoiseKind::Depolarizing] {
            for p in [0.0, 0.3, 1.0] {
                let ch = NoiseChannel::new(kind, p, 0).unwrap();
                assert!(ch.completeness().max_abs_diff(&Matrix::identity(2)) < 1e-12);
            }
        }
    }

    #[test]
    fn bit_flip_on_zero() {
        let zero = sv_to_density(&basis_state(1, 0).unwrap());
        let out = apply_channel_density(&zero, &bit_flip(0.0, 0).unwrap()).unwrap();
        assert_eq!(out, zero);
        let out = apply_channel_density(&zero, &bit_flip(1.0, 0).unwrap()).unwrap();
        assert!((diag(&out)[1] - 1.0).abs() < 1e-15);
        let out = apply_channel_density(&zero, &bit_flip(0.1, 0).unwrap()).unwrap();
        let d = diag(&out);
        assert!((d[0] - 0.9).abs() < 1e-12 && (d[1] - 0.1).abs() < 1e-12);
        assert!(out.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn phase_flip_on_plus() {
        let out = apply_channel_density(&plus(), &phase_flip(1.0, 0).unwrap()).unwrap();
        assert!((out.get(0, 1) - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((out.get(0, 0) - c(0.5, 0.0)).norm() < 1e-12);
        let out = apply_channel_density(&plus(), &phase_flip(0.5, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-12);
        let zero = sv_to_density(&basis_state(1, 0).unwrap());
        let out = apply_channel_density(&zero, &phase_flip(0.37, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(zero.matrix()) < 1e-15);
    }

    #[test]
    fn depolarizing_values() {
        let zero = sv_to_density(&basis_state(1, 0).unwrap());
        let out = apply_channel_density(&zero, &depolarizing(0.2, 0).unwrap()).unwrap();
        let d = diag(&out);
        assert!((d[0] - 0.9).abs() < 1e-12 && (d[1] - 0.1).abs() < 1e-12);
        let out = apply_channel_density(&plus(), &depolarizing(1.0, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-12);
        let out = apply_channel_density(&zero, &depolarizing(0.0, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(zero.matrix()) < 1e-15);
    }

    #[test]
    fn trajectory_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zero = basis_state(1, 0).unwrap();
        let (out, idx) = sample_kraus(&zero, &bit_flip(0.0, 0).unwrap(), &mut rng).unwrap();
        assert_eq!(out, zero);
        assert_eq!(idx, vec![0]);
        let (out, _) = sample_kraus(&zero, &bit_flip(1.0, 0).unwrap(), &mut rng).unwrap();
        assert_eq!(out.amplitude(1), ONE);
        let ch = bit_flip(0.1, 0).unwrap();
        let flips = (0..10_000)
            .filter(|_| sample_kraus(&zero, &ch, &mut rng).unwrap().1[0] == 1)
            .count();
        let frac = flips as f64 / 10_000.0;
        assert!((frac - 0.1).abs() < 0.01, "flip fraction {frac}");
    }

    #[test]
    fn out_of_range_target() {
        let zero = basis_state(1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_kraus(&zero, &bit_flip(0.1, 2).unwrap(), &mut rng).is_err());
        let rho = sv_to_density(&zero);
        assert!(apply_channel_density(&rho, &bit_flip(0.1, 1).unwrap()).is_err());
    }

    #[test]
    fn multi_wire_constructor() {
        let ch = NoiseChannel::on_wires(NoiseKind::BitFlip, 1.0, &[0, 1]).unwrap();
        let rho = sv_to_density(&basis_state(2, 0).unwrap());
        let out = apply_channel_density(&rho, &ch).unwrap();
        assert!((out.get(3, 3).re - 1.0).abs() < 1e-15);
        assert!(NoiseChannel::on_wires(NoiseKind::BitFlip, 0.1, &[1, 1]).is_err());
    }
}
