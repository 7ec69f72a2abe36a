//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls into the simulator's numerics:
//! operators are embedded with explicit Kronecker products and permutation
//! matrices, and textbook formulas are written out directly.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use qwire::gates::{param_spec, GateFamily, LIBRARY};
use qwire::{Circuit, GateDef, Matrix, StateVector};

pub type CM = DMatrix<Complex64>;
pub type CV = DVector<Complex64>;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_na(m: &Matrix) -> CM {
    CM::from_fn(m.dim(), m.dim(), |r, c| m.get(r, c))
}

pub fn sv_to_na(sv: &StateVector) -> CV {
    CV::from_column_slice(sv.amplitudes())
}

pub fn max_abs(m: &CM) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(dim: usize) -> CM {
    CM::identity(dim, dim)
}

/// Permutation operator sending qubit `order[j]` to position `j` (position 0
/// is the most significant bit).
pub fn qubit_permutation(order: &[usize]) -> CM {
    let n = order.len();
    let dim = 1usize << n;
    let mut p = CM::zeros(dim, dim);
    for src in 0..dim {
        let mut dst = 0usize;
        for (j, &q) in order.iter().enumerate() {
            let bit = (src >> (n - 1 - q)) & 1;
            dst |= bit << (n - 1 - j);
        }
        p[(dst, src)] = c64(1.0, 0.0);
    }
    p
}

/// `u` on `targets` of an `n`-qubit register as a full `2^n x 2^n` matrix:
/// `Pᵀ (u ⊗ I) P`, with `P` moving the targets to the front in order.
pub fn embed(u: &CM, targets: &[usize], n: usize) -> CM {
    let mut order = targets.to_vec();
    order.extend((0..n).filter(|q| !targets.contains(q)));
    let p = qubit_permutation(&order);
    let rest = identity(1 << (n - targets.len()));
    p.transpose() * u.kronecker(&rest) * p
}

/// Product of the embedded gate matrices of a gate-only circuit applied to
/// its initial state.
pub fn reference_state(c: &Circuit) -> CV {
    let n = c.num_qubits();
    let mut psi = sv_to_na(c.initial_state());
    for e in c.elements() {
        match e {
            qwire::CircuitElement::Gate(g) => {
                psi = embed(&to_na(g.matrix()), g.targets(), n) * psi;
            }
            other => panic!("reference_state only handles gates, got {}", other.kind()),
        }
    }
    psi
}

pub fn pauli(ch: char) -> CM {
    let (o, z, i) = (c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0));
    match ch {
        'I' => CM::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CM::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CM::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CM::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("not a Pauli: {ch}"),
    }
}

/// Tensor product of Paulis, character 0 on qubit 0 (most significant).
pub fn pauli_string(s: &str) -> CM {
    s.chars()
        .map(pauli)
        .reduce(|a, b| a.kronecker(&b))
        .expect("non-empty")
}

/// `exp(-iθP/2) = cos(θ/2) I - i sin(θ/2) P` for a Pauli string `P`.
pub fn pauli_rotation(theta: f64, p: &str) -> CM {
    let m = pauli_string(p);
    let dim = m.nrows();
    identity(dim) * c64((theta / 2.0).cos(), 0.0) - m * c64(0.0, (theta / 2.0).sin())
}

/// `N^{-1/2} ω^{jk}` with `ω = e^{2πi/N}`.
pub fn dft(n: usize) -> CM {
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    CM::from_fn(dim, dim, |j, k| {
        Complex64::from_polar(norm, 2.0 * PI * (j * k % dim) as f64 / dim as f64)
    })
}

/// `Σ K ρ K†`.
pub fn apply_kraus(rho: &CM, kraus: &[CM]) -> CM {
    kraus
        .iter()
        .map(|k| k * rho * k.adjoint())
        .fold(CM::zeros(rho.nrows(), rho.ncols()), |a, b| a + b)
}

/// Textbook Kraus sets: bit flip, phase flip, depolarizing.
pub fn kraus_set(kind: &str, p: f64) -> Vec<CM> {
    let r = |w: f64| c64(w.sqrt(), 0.0);
    match kind {
        "bitflip" => vec![pauli('I') * r(1.0 - p), pauli('X') * r(p)],
        "phaseflip" => vec![pauli('I') * r(1.0 - p), pauli('Z') * r(p)],
        "depolarizing" => vec![
            pauli('I') * r(1.0 - 3.0 * p / 4.0),
            pauli('X') * r(p / 4.0),
            pauli('Y') * r(p / 4.0),
            pauli('Z') * r(p / 4.0),
        ],
        _ => panic!("unknown channel {kind}"),
    }
}

pub fn random_params<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(-2.0 * PI..2.0 * PI)).collect()
}

/// A random gate from the full library (including aliases) fitting in `n`
/// wires, with random parameters and distinct random wires.
pub fn random_library_gate<R: Rng>(rng: &mut R, n: usize) -> GateDef {
    loop {
        let spec = &LIBRARY[rng.random_range(0..LIBRARY.len())];
        let wires_needed = match spec.family {
            GateFamily::Control => 1 + rng.random_range(1..=2),
            _ => spec.wires,
        };
        if wires_needed > n {
            continue;
        }
        let mut wires: Vec<usize> = (0..n).collect();
        wires.shuffle(rng);
        wires.truncate(wires_needed);
        let params = random_params(rng, spec.param_count());
        return GateDef::library(spec.name, &params, &wires).expect("valid library gate");
    }
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).expect("nonzero vector")
}

/// Random gate-only circuit on `n` qubits with `len` library gates and a
/// random initial state.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n, 0).unwrap();
    c.set_initial_state(random_state(rng, n)).unwrap();
    for _ in 0..len {
        c.append(random_library_gate(rng, n)).unwrap();
    }
    c
}

pub fn spec_family(name: &str) -> GateFamily {
    param_spec(name).expect("library gate").family
}

/// Brute-force maximum cut over all `2^n` partitions.
pub fn brute_force_maxcut(edges: &[(usize, usize, f64)]) -> f64 {
    let n = edges.iter().map(|e| e.0.max(e.1)).max().unwrap() + 1;
    (0..1u32 << n)
        .map(|mask| {
            edges
                .iter()
                .filter(|&&(u, v, _)| (mask >> u) & 1 != (mask >> v) & 1)
                .map(|e| e.2)
                .sum::<f64>()
        })
        .fold(f64::MIN, f64::max)
}

/// Seeds a test RNG.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
