//! JSON reports for the `algo` subcommand.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use qwire::algorithms::{
    bernstein_vazirani, bob_state, cut_value, dj_with_oracle, factor, grover, grover_success_probability, qaoa,
    qft, qpe, teleportation, vqe, Ansatz, DjOracle, OptimizerConfig, ShorOutcome, WeightedEdge,
};
use qwire::engine::{branches, final_state, outcome_probabilities, run_seeded};
use qwire::gates::p;
use qwire::qstate::{basis_state, bitstring_to_index, create_state, index_to_bitstring};
use qwire::{Circuit, PauliHamiltonian};
use serde_json::{json, Value};

use crate::CliError;

fn input(e: qwire::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn sim(e: qwire::Error) -> CliError {
    CliError::Simulation(e.to_string())
}

/// Exact outcome distribution plus one seeded sampled outcome.
fn sample(c: &Circuit, seed: u64) -> Result<(BTreeMap<String, f64>, String), CliError> {
    let probs = outcome_probabilities(c).map_err(sim)?;
    let outcome = run_seeded(c, seed).map_err(sim)?;
    let bits = match outcome.measured_bitstring {
        Some(b) => b,
        None => index_to_bitstring(
            outcome
                .statevector
                .probabilities()
                .iter()
                .position(|&p| p > 0.5)
                .unwrap_or(0),
            c.num_qubits(),
        ),
    };
    Ok((probs, bits))
}

pub fn dj(qubits: usize, constant: bool, mask: Option<&str>, seed: u64) -> Result<Value, CliError> {
    let oracle = match (constant, mask) {
        (true, _) => DjOracle::ConstantZero,
        (false, Some(m)) => DjOracle::Balanced(m.to_string()),
        (false, None) => DjOracle::default_balanced(qubits),
    };
    let c = dj_with_oracle(qubits, &oracle).map_err(input)?;
    let (probabilities, outcome) = sample(&c, seed)?;
    let verdict = if outcome.chars().all(|b| b == '0') { "constant" } else { "balanced" };
    Ok(json!({
        "algorithm": "dj",
        "qubits": qubits,
        "oracle": match &oracle {
            DjOracle::Balanced(m) => format!("balanced:{m}"),
            _ => "constant".to_string(),
        },
        "outcome": outcome,
        "verdict": verdict,
        "probabilities": probabilities,
    }))
}

pub fn bv(secret: &str, seed: u64) -> Result<Value, CliError> {
    let c = bernstein_vazirani(secret).map_err(input)?;
    let (probabilities, outcome) = sample(&c, seed)?;
    Ok(json!({
        "algorithm": "bv",
        "secret": secret,
        "outcome": outcome,
        "probabilities": probabilities,
    }))
}

pub fn grover_report(qubits: usize, marked: usize, iters: Option<usize>, seed: u64) -> Result<Value, CliError> {
    let k = iters.unwrap_or_else(|| (PI / 4.0 * ((1usize << qubits.min(20)) as f64).sqrt()).floor() as usize);
    let c = grover(qubits, marked, k).map_err(input)?;
    let (probabilities, outcome) = sample(&c, seed)?;
    let target = index_to_bitstring(marked, qubits);
    Ok(json!({
        "algorithm": "grover",
        "qubits": qubits,
        "marked": target,
        "iterations": k,
        "outcome": outcome,
        "success_prob": probabilities.get(&target).copied().unwrap_or(0.0),
        "analytic_success_prob": grover_success_probability(qubits, k),
        "probabilities": probabilities,
    }))
}

pub fn qft_report(qubits: usize, input_bits: Option<&str>) -> Result<Value, CliError> {
    let bits = input_bits.map(str::to_string).unwrap_or_else(|| "0".repeat(qubits));
    let index = bitstring_to_index(&bits)
        .filter(|_| bits.len() == qubits)
        .ok_or_else(|| CliError::Input(format!("input '{bits}' is not a {qubits}-bit string")))?;
    let mut c = qft(qubits).map_err(input)?;
    c.set_initial_state(basis_state(qubits, index).map_err(input)?).map_err(input)?;
    let out = final_state(&c).map_err(sim)?;
    let amplitudes: Vec<[f64; 2]> = out.amplitudes().iter().map(|a| [a.re, a.im]).collect();
    Ok(json!({
        "algorithm": "qft",
        "qubits": qubits,
        "input": bits,
        "amplitudes": amplitudes,
        "probabilities": qwire::qstate::sv_to_probability(&out),
    }))
}

/// Phase estimation of `P(2π·phase)` on its `|1⟩` eigenstate.
pub fn qpe_report(phase: f64, counting: usize, seed: u64) -> Result<Value, CliError> {
    let eigen = basis_state(1, 1).map_err(input)?;
    let c = qpe(&p(2.0 * PI * phase, 0), &eigen, counting).map_err(input)?;
    let (probabilities, outcome) = sample(&c, seed)?;
    let most_likely = probabilities
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k.clone())
        .unwrap_or_default();
    let estimate = bitstring_to_index(&most_likely).unwrap_or(0) as f64 / (1u64 << counting) as f64;
    Ok(json!({
        "algorithm": "qpe",
        "phase": phase,
        "counting_qubits": counting,
        "outcome": outcome,
        "most_likely": most_likely,
        "estimate": estimate,
        "probabilities": probabilities,
    }))
}

pub fn shor(a: u64, n: u64, attempts: usize, seed: u64) -> Result<Value, CliError> {
    let log = factor(a, n, attempts, seed).map_err(input)?;
    let trace: Vec<Value> = log
        .iter()
        .map(|o| match o {
            ShorOutcome::Factors { order, factors, phase } => json!({
                "result": "factors", "order": order, "factors": [factors.0, factors.1], "phase": [phase.0, phase.1],
            }),
            ShorOutcome::TrivialFactor { factors } => json!({
                "result": "trivial", "factors": [factors.0, factors.1],
            }),
            ShorOutcome::Retry { reason, order } => json!({
                "result": "retry", "reason": reason, "order": order,
            }),
        })
        .collect();
    let (order, factors) = match log.last() {
        Some(ShorOutcome::Factors { order, factors, .. }) => (Some(*order), Some([factors.0, factors.1])),
        Some(ShorOutcome::TrivialFactor { factors }) => (None, Some([factors.0, factors.1])),
        _ => (None, None),
    };
    Ok(json!({
        "algorithm": "shor",
        "a": a,
        "n": n,
        "outcome": factors,
        "order": order,
        "attempts": log.len(),
        "trace": trace,
    }))
}

/// Parses `1.0*ZZ,-0.5*XI` (a bare Pauli string has weight 1).
pub fn parse_hamiltonian(spec: &str) -> Result<PauliHamiltonian, CliError> {
    let mut terms = Vec::new();
    for term in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (w, ops) = match term.split_once('*') {
            Some((w, ops)) => (
                w.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Input(format!("bad weight in term '{term}'")))?,
                ops.trim(),
            ),
            None => (1.0, term),
        };
        terms.push((w, ops));
    }
    PauliHamiltonian::parse(&terms).map_err(input)
}

pub fn vqe_report(hamiltonian: &str, cfg: &OptimizerConfig) -> Result<Value, CliError> {
    let h = parse_hamiltonian(hamiltonian)?;
    let ansatz = Ansatz::ry_cx(h.num_qubits()).map_err(input)?;
    let r = vqe(&h, &ansatz, cfg).map_err(sim)?;
    Ok(json!({
        "algorithm": "vqe",
        "hamiltonian": hamiltonian,
        "outcome": r.energy,
        "energy": r.energy,
        "params": r.params,
        "converged": r.converged,
        "evaluations": r.evaluations,
        "trace": r.trace,
    }))
}

/// Parses `0-1,1-2:0.5` (weight defaults to 1).
pub fn parse_edges(spec: &str) -> Result<Vec<WeightedEdge>, CliError> {
    let bad = |e: &str| CliError::Input(format!("bad edge '{e}', expected u-v or u-v:weight"));
    spec.split(',')
        .map(str::trim)
        .filter(|e| !e.is_empty())
        .map(|e| {
            let (pair, w) = match e.split_once(':') {
                Some((pair, w)) => (pair, w.trim().parse::<f64>().map_err(|_| bad(e))?),
                None => (e, 1.0),
            };
            let (u, v) = pair.split_once('-').ok_or_else(|| bad(e))?;
            Ok((u.trim().parse().map_err(|_| bad(e))?, v.trim().parse().map_err(|_| bad(e))?, w))
        })
        .collect()
}

pub fn qaoa_report(edges: &str, layers: usize, cfg: &OptimizerConfig) -> Result<Value, CliError> {
    let graph = parse_edges(edges)?;
    let r = qaoa(&graph, layers, cfg).map_err(input)?;
    let n = r.most_probable.len();
    let optimum = (0..1usize << n)
        .map(|m| cut_value(&graph, &index_to_bitstring(m, n)))
        .fold(f64::MIN, f64::max);
    Ok(json!({
        "algorithm": "qaoa",
        "edges": edges,
        "layers": layers,
        "outcome": r.most_probable,
        "most_probable_cut": cut_value(&graph, &r.most_probable),
        "optimum_cut": optimum,
        "expected_cut": r.expected_cut,
        "gammas": r.gammas,
        "betas": r.betas,
        "best_sampled": {"bitstring": r.best_sampled.0, "cut": r.best_sampled.1},
        "converged": r.converged,
        "trace": r.trace,
        "probabilities": r.probabilities,
    }))
}

pub fn teleport(alpha: f64, seed: u64) -> Result<Value, CliError> {
    let c = teleportation(alpha).map_err(input)?;
    let want = create_state(0, alpha).map_err(input)?.state;
    let mut report = Vec::new();
    for b in branches(&c).map_err(sim)? {
        let bob = bob_state(&b.statevector).map_err(sim)?;
        report.push(json!({
            "a": b.classical.get("a"),
            "b": b.classical.get("b"),
            "probability": b.probability,
            "bob_fidelity": bob.fidelity(&want),
        }));
    }
    let run = run_seeded(&c, seed).map_err(sim)?;
    let bob = bob_state(&run.statevector).map_err(sim)?;
    Ok(json!({
        "algorithm": "teleport",
        "alpha": alpha,
        "outcome": run.measured_bitstring,
        "bob_state": bob.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        "branches": report,
    }))
}
