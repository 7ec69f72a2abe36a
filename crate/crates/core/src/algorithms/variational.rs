//! Parameterized circuits, parameter-shift gradients, VQE and QAOA.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::backend::{simulate, SimJob};
use crate::circuit::Circuit;
use crate::engine::{expectation, final_state};
use crate::error::{Error, Result};
use crate::gates::{h, GateDef};
use crate::pauli::{Pauli, PauliHamiltonian, PauliString};
use crate::qstate::{index_to_bitstring, sv_to_probability};

use super::optimize::{minimize, OptimizerConfig};

/// Gates of the form `exp(-iθG/2)` with `G² = I`.
const SHIFT_ELIGIBLE: &[&str] = &["RX", "RY", "RZ", "RXX", "RYY", "RZZ"];

/// Shots drawn from the optimized QAOA state for the reported bitstring.
const QAOA_SAMPLE_SHOTS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub enum AnsatzOp {
    Fixed(GateDef),
    /// Library gate `name` on `wires` with angle `scale · θ[param]`.
    Rotation {
        name: String,
        wires: Vec<usize>,
        param: usize,
        scale: f64,
    },
}

/// A circuit family indexed by a real parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    num_qubits: usize,
    num_params: usize,
    ops: Vec<AnsatzOp>,
}

impl Ansatz {
    pub fn new(num_qubits: usize, num_params: usize) -> Self {
        Self {
            num_qubits,
            num_params,
            ops: Vec::new(),
        }
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

    pub fn gate(mut self, g: GateDef) -> Result<Self> {
        self.check_wires(g.targets())?;
        self.ops.push(AnsatzOp::Fixed(g));
        Ok(self)
    }

    pub fn rotation(self, name: &str, wires: &[usize], param: usize) -> Result<Self> {
        self.scaled_rotation(name, wires, param, 1.0)
    }

    pub fn scaled_rotation(mut self, name: &str, wires: &[usize], param: usize, scale: f64) -> Result<Self> {
        self.check_wires(wires)?;
        if param >= self.num_params {
            return Err(Error::Domain(format!(
                "parameter {param} outside 0..{}",
                self.num_params
            )));
        }
        GateDef::library(name, &[0.0], wires)?;
        self.ops.push(AnsatzOp::Rotation {
            name: name.to_string(),
            wires: wires.to_vec(),
            param,
            scale,
        });
        Ok(self)
    }

    /// `RY(θ_q)` on every wire followed by a CX chain `0→1→…→n-1`.
    pub fn ry_cx(num_qubits: usize) -> Result<Self> {
        let mut a = Self::new(num_qubits, num_qubits);
        for q in 0..num_qubits {
            a = a.rotation("RY", &[q], q)?;
        }
        for q in 1..num_qubits {
            a = a.gate(crate::gates::cx(q - 1, q))?;
        }
        Ok(a)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn ops(&self) -> &[AnsatzOp] {
        &self.ops
    }

    /// The circuit at `params`, with `shift` added to the angle of the
    /// `occurrence`-th rotation when given.
    fn build(&self, params: &[f64], shift: Option<(usize, f64)>) -> Result<Circuit> {
        if params.len() != self.num_params {
            return Err(Error::ParamCount {
                gate: "ansatz".into(),
                expected: self.num_params,
                got: params.len(),
            });
        }
        let mut c = Circuit::new(self.num_qubits, 0)?;
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                AnsatzOp::Fixed(g) => {
                    c.append(g.clone())?;
                }
                AnsatzOp::Rotation {
                    name,
                    wires,
                    param,
                    scale,
                } => {
                    let extra = match shift {
                        Some((at, s)) if at == i => s,
                        _ => 0.0,
                    };
                    c.append(GateDef::library(name, &[scale * params[*param] + extra], wires)?)?;
                }
            }
        }
        Ok(c)
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        self.build(params, None)
    }
}

fn check_width(ansatz: &Ansatz, hamiltonian: &PauliHamiltonian) -> Result<()> {
    if ansatz.num_qubits() != hamiltonian.num_qubits() {
        return Err(Error::Domain(format!(
            "ansatz on {} qubit(s), Hamiltonian on {}",
            ansatz.num_qubits(),
            hamiltonian.num_qubits()
        )));
    }
    Ok(())
}

/// `⟨ψ(θ)|H|ψ(θ)⟩` on the exact state.
pub fn energy(ansatz: &Ansatz, params: &[f64], hamiltonian: &PauliHamiltonian) -> Result<f64> {
    check_width(ansatz, hamiltonian)?;
    expectation(&final_state(&ansatz.circuit(params)?)?, hamiltonian)
}

fn shifted_energy(ansatz: &Ansatz, params: &[f64], hamiltonian: &PauliHamiltonian, at: usize, s: f64) -> Result<f64> {
    expectation(&final_state(&ansatz.build(params, Some((at, s)))?)?, hamiltonian)
}

/// `∂⟨H⟩/∂θ_k` by the parameter-shift rule, summed over every rotation that
/// `θ_k` drives.
pub fn parameter_shift_gradient(
    ansatz: &Ansatz,
    params: &[f64],
    hamiltonian: &PauliHamiltonian,
    k: usize,
) -> Result<f64> {
    check_width(ansatz, hamiltonian)?;
    if k >= ansatz.num_params() {
        return Err(Error::Domain(format!("parameter {k} outside 0..{}", ansatz.num_params())));
    }
    let mut grad = 0.0;
    for (i, op) in ansatz.ops().iter().enumerate() {
        let AnsatzOp::Rotation { name, param, scale, .. } = op else {
            continue;
        };
        if *param != k {
            continue;
        }
        if !SHIFT_ELIGIBLE.contains(&name.as_str()) {
            return Err(Error::NotShiftEligible(k));
        }
        let plus = shifted_energy(ansatz, params, hamiltonian, i, FRAC_PI_2)?;
        let minus = shifted_energy(ansatz, params, hamiltonian, i, -FRAC_PI_2)?;
        grad += scale * (plus - minus) / 2.0;
    }
    Ok(grad)
}

fn gradient(ansatz: &Ansatz, params: &[f64], hamiltonian: &PauliHamiltonian) -> Result<Vec<f64>> {
    let one = |k: usize| parameter_shift_gradient(ansatz, params, hamiltonian, k);
    #[cfg(feature = "parallel")]
    let out = (0..ansatz.num_params()).into_par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    let out = (0..ansatz.num_params()).map(one).collect();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    /// Energy after each optimizer iteration of the best start.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

/// Minimizes `⟨H⟩` over the ansatz parameters, keeping the best of
/// `cfg.restarts` seeded starts.
pub fn vqe(hamiltonian: &PauliHamiltonian, ansatz: &Ansatz, cfg: &OptimizerConfig) -> Result<VqeResult> {
    cfg.validate()?;
    check_width(ansatz, hamiltonian)?;
    let mut best: Option<VqeResult> = None;
    let mut evaluations = 0;
    for k in 0..cfg.restarts {
        let x0 = cfg.start(k, ansatz.num_params());
        let m = minimize(
            |x| energy(ansatz, x, hamiltonian),
            |x| gradient(ansatz, x, hamiltonian),
            &x0,
            cfg,
        )?;
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.energy) {
            best = Some(VqeResult {
                energy: m.value,
                params: m.x,
                trace: m.trace,
                converged: m.converged,
                evaluations: 0,
            });
        }
    }
    let mut best = best.expect("at least one restart");
    best.evaluations = evaluations;
    Ok(best)
}

/// Undirected edge `(u, v, weight)`.
pub type WeightedEdge = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaResult {
    /// Exact expected cut at the optimized angles.
    pub expected_cut: f64,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Expected cut after each optimizer iteration of the best start.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Most frequent bitstring among the sampled shots, and its cut value.
    pub best_sampled: (String, f64),
    /// Most probable bitstring of the exact output distribution.
    pub most_probable: String,
    pub probabilities: BTreeMap<String, f64>,
}

fn graph_width(edges: &[WeightedEdge]) -> Result<usize> {
    if edges.is_empty() {
        return Err(Error::Domain("QAOA needs a non-empty graph".into()));
    }
    for &(u, v, w) in edges {
        if u == v || !w.is_finite() {
            return Err(Error::Domain(format!("invalid edge ({u}, {v}, {w})")));
        }
    }
    Ok(edges.iter().map(|&(u, v, _)| u.max(v)).max().unwrap_or(0) + 1)
}

/// Cut weight of the partition given by `bits` (character `i` is vertex `i`).
pub fn cut_value(edges: &[WeightedEdge], bits: &str) -> f64 {
    let b = bits.as_bytes();
    edges
        .iter()
        .filter(|&&(u, v, _)| b[u] != b[v])
        .map(|&(_, _, w)| w)
        .sum()
}

/// QAOA ansatz with parameters `[γ_1..γ_p, β_1..β_p]` and the Hamiltonian
/// `-C = Σ w/2 (Z_u Z_v - I)` whose minimum is the maximum cut.
pub fn qaoa_problem(edges: &[WeightedEdge], p: usize) -> Result<(Ansatz, PauliHamiltonian)> {
    let n = graph_width(edges)?;
    if p == 0 {
        return Err(Error::Domain("QAOA needs at least one layer".into()));
    }
    let mut a = Ansatz::new(n, 2 * p);
    for q in 0..n {
        a = a.gate(h(q))?;
    }
    for layer in 0..p {
        for &(u, v, w) in edges {
            a = a.scaled_rotation("RZZ", &[u, v], layer, -w)?;
        }
        for q in 0..n {
            a = a.scaled_rotation("RX", &[q], p + layer, 2.0)?;
        }
    }
    let mut terms = Vec::with_capacity(2 * edges.len());
    for &(u, v, w) in edges {
        terms.push((w / 2.0, PauliString::sparse(n, &[(u, Pauli::Z), (v, Pauli::Z)])?));
        terms.push((-w / 2.0, PauliString::sparse(n, &[])?));
    }
    Ok((a, PauliHamiltonian::new(terms)?))
}

/// MaxCut QAOA with `p` layers. Angles are optimized on the exact expected
/// cut; sampling is used only for the reported bitstring.
pub fn qaoa(edges: &[WeightedEdge], p: usize, cfg: &OptimizerConfig) -> Result<QaoaResult> {
    let (ansatz, hamiltonian) = qaoa_problem(edges, p)?;
    let n = ansatz.num_qubits();
    let opt = vqe(&hamiltonian, &ansatz, cfg)?;
    let circuit = ansatz.circuit(&opt.params)?;
    let state = final_state(&circuit)?;
    let probabilities = sv_to_probability(&state);
    let most_probable = probabilities
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k.clone())
        .unwrap_or_else(|| index_to_bitstring(0, n));
    let sampled = simulate(&SimJob::new(circuit, QAOA_SAMPLE_SHOTS).seed(cfg.seed))?;
    let top = sampled
        .counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(k, _)| k.clone())
        .unwrap_or_default();
    let top_value = cut_value(edges, &top);
    Ok(QaoaResult {
        expected_cut: -opt.energy,
        gammas: opt.params[..p].to_vec(),
        betas: opt.params[p..].to_vec(),
        trace: opt.trace.iter().map(|e| -e).collect(),
        converged: opt.converged,
        best_sampled: (top, top_value),
        most_probable,
        probabilities,
    })
}
