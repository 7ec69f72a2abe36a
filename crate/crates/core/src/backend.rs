//! Shot-based execution: many runs of one circuit, optionally spread over a
//! worker pool, aggregated into counts and probabilities.
//!
//! Every shot draws from its own random stream keyed by `(seed, shot index)`,
//! so results depend only on the circuit, the shot count and the seed. Chunk
//! size and worker count change scheduling, never outcomes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::circuit::{Circuit, CircuitElement};
use crate::engine::execute;
use crate::error::{Error, Result};
use crate::kernel::Execution;
use crate::matrix::{Matrix, ZERO};
use crate::noise::{apply_channel_density, sandwich};
use crate::qstate::{bit_position, index_to_bitstring, ClassicalRegister, DensityMatrix, StateVector};

/// Exact density evolution is limited to this many qubits (`4^n` memory).
pub const MAX_DENSITY_QUBITS: usize = 10;

/// Branches lighter than this are dropped during exact evolution.
const BRANCH_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimMode {
    /// One pure-state run per shot, noise sampled as Kraus branches.
    #[default]
    Trajectory,
    /// Exact density-matrix evolution; counts drawn from the exact distribution.
    Density,
}

impl FromStr for SimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trajectory" => Ok(SimMode::Trajectory),
            "density" => Ok(SimMode::Density),
            _ => Err(Error::InvalidJob(format!("unknown simulation mode '{s}'"))),
        }
    }
}

/// A request to run `circuit` for `shots` shots.
#[derive(Debug, Clone)]
pub struct SimJob {
    pub circuit: Circuit,
    pub shots: usize,
    /// Shots per parallel batch.
    pub chunk_size: usize,
    pub seed: u64,
    pub mode: SimMode,
    pub execution: Execution,
}

impl SimJob {
    /// A trajectory job with one chunk covering every shot and seed 0.
    pub fn new(circuit: Circuit, shots: usize) -> Self {
        Self {
            circuit,
            shots,
            chunk_size: shots.max(1),
            seed: 0,
            mode: SimMode::Trajectory,
            execution: Execution::default(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    /// Splits the shots into `count` batches of near-equal size.
    pub fn chunks(mut self, count: usize) -> Self {
        self.chunk_size = if count == 0 { 0 } else { self.shots.div_ceil(count).max(1) };
        self
    }

    pub fn mode(mut self, mode: SimMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidJob("shots must be positive".into()));
        }
        if self.chunk_size == 0 || self.chunk_size > self.shots {
            return Err(Error::InvalidJob(format!(
                "chunk size {} must be between 1 and the shot count {}",
                self.chunk_size, self.shots
            )));
        }
        if self.mode == SimMode::Density && self.circuit.num_qubits() > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                qubits: self.circuit.num_qubits(),
                limit: MAX_DENSITY_QUBITS,
                what: "density-matrix simulation",
            });
        }
        Ok(())
    }
}

/// Aggregated outcome of a [`SimJob`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShotResult {
    pub shots: usize,
    pub seed: u64,
    /// Measured classical-bit labels, in the order used for outcome keys.
    pub labels: Vec<String>,
    /// Outcome of each shot, ordered by shot index.
    pub per_shot: Vec<String>,
    pub counts: BTreeMap<String, u64>,
    pub probability: BTreeMap<String, f64>,
    /// Exact outcome distribution (density mode only).
    pub exact_probability: Option<BTreeMap<String, f64>>,
    /// Final state averaged over measurement branches (density mode only).
    pub final_density: Option<DensityMatrix>,
}

impl ShotResult {
    /// Builds counts and probabilities from per-shot outcomes.
    pub fn from_records(labels: Vec<String>, per_shot: Vec<String>, seed: u64) -> Self {
        let mut counts = BTreeMap::new();
        for s in &per_shot {
            *counts.entry(s.clone()).or_insert(0u64) += 1;
        }
        let shots = per_shot.len();
        let probability = counts
            .iter()
            .map(|(k, &v)| (k.clone(), v as f64 / shots as f64))
            .collect();
        Self {
            shots,
            seed,
            labels,
            per_shot,
            counts,
            probability,
            exact_probability: None,
            final_density: None,
        }
    }

    pub fn count(&self) -> (BTreeMap<String, u64>, BTreeMap<String, f64>) {
        (self.counts.clone(), self.probability.clone())
    }
}

/// The random stream of shot `shot` under master seed `seed`.
pub fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot as u64);
    rng
}

/// The circuit actually executed: a measure-everything step is appended when
/// the circuit never measures.
fn measured_circuit(circuit: &Circuit) -> Result<Circuit> {
    if circuit.has_measurement() {
        return Ok(circuit.clone());
    }
    let mut c = circuit.clone();
    c.append(CircuitElement::measure_all(c.num_qubits()))?;
    Ok(c)
}

fn record(labels: &[String], reg: &ClassicalRegister) -> String {
    labels
        .iter()
        .map(|l| if reg.get(l) == Some(1) { '1' } else { '0' })
        .collect()
}

/// Splits `0..shots` into consecutive ranges of `chunk` shots and maps each
/// range, in parallel when enabled, concatenating results in shot order.
fn map_chunks<T, F>(shots: usize, chunk: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> Result<Vec<T>> + Sync,
{
    let ranges: Vec<_> = (0..shots)
        .step_by(chunk)
        .map(|start| start..(start + chunk).min(shots))
        .collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Vec<T>>> = if exec.is_parallel() {
        ranges.into_par_iter().map(&f).collect()
    } else {
        ranges.into_iter().map(&f).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Vec<T>>> = {
        let _ = exec;
        ranges.into_iter().map(&f).collect()
    };
    let mut out = Vec::with_capacity(shots);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Leading run of plain gates, identical for every shot.
fn deterministic_prefix(circuit: &Circuit, exec: Execution) -> Result<(StateVector, usize)> {
    let mut sv = circuit.initial_state().clone();
    let mut reg = ClassicalRegister::new();
    let split = circuit
        .elements()
        .iter()
        .position(|e| !matches!(e, CircuitElement::Gate(_)))
        .unwrap_or(circuit.elements().len());
    let mut unused = ChaCha8Rng::seed_from_u64(0);
    execute(&mut sv, &mut reg, &circuit.elements()[..split], &mut unused, exec)?;
    Ok((sv, split))
}

/// Runs every shot, returning the post-run state for each one to `f`.
fn run_trajectories<T, F>(circuit: &Circuit, job: &SimJob, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&StateVector, &ClassicalRegister) -> T + Sync,
{
    let (prefix, split) = deterministic_prefix(circuit, job.execution)?;
    let suffix = &circuit.elements()[split..];
    let empty = ClassicalRegister::with_labels(circuit.clbits());
    // Shots already run concurrently; the kernel stays sequential inside each.
    let inner = if job.execution.is_parallel() && job.shots > 1 {
        Execution::Serial
    } else {
        job.execution
    };
    map_chunks(job.shots, job.chunk_size, job.execution, |range| {
        let mut out = Vec::with_capacity(range.len());
        for shot in range {
            let mut rng = shot_rng(job.seed, shot);
            let mut sv = prefix.clone();
            let mut reg = empty.clone();
            execute(&mut sv, &mut reg, suffix, &mut rng, inner)?;
            out.push(f(&sv, &reg));
        }
        Ok(out)
    })
}

/// Runs `job` and aggregates its outcomes.
pub fn simulate(job: &SimJob) -> Result<ShotResult> {
    job.validate()?;
    match job.mode {
        SimMode::Trajectory => simulate_trajectory(job),
        SimMode::Density => simulate_density(job),
    }
}

fn simulate_trajectory(job: &SimJob) -> Result<ShotResult> {
    let circuit = measured_circuit(&job.circuit)?;
    let labels: Vec<String> = circuit.measured_clbits().iter().map(|s| s.to_string()).collect();
    let per_shot = run_trajectories(&circuit, job, |_, reg| record(&labels, reg))?;
    Ok(ShotResult::from_records(labels, per_shot, job.seed))
}

/// Average of `|ψ⟩⟨ψ|` over the final states of `shots` trajectories: the
/// sampled estimate of the circuit's output density matrix.
pub fn trajectory_density(job: &SimJob) -> Result<DensityMatrix> {
    job.validate()?;
    let n = job.circuit.num_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: n,
            limit: MAX_DENSITY_QUBITS,
            what: "density-matrix estimation",
        });
    }
    let states = run_trajectories(&job.circuit, job, |sv, _| sv.clone())?;
    let dim = 1usize << n;
    let mut acc = Matrix::zeros(dim);
    let w = 1.0 / states.len() as f64;
    for sv in &states {
        let a = sv.amplitudes();
        let data = acc.as_mut_slice();
        for r in 0..dim {
            if a[r] == ZERO {
                continue;
            }
            for c in 0..dim {
                data[r * dim + c] += a[r] * a[c].conj() * w;
            }
        }
    }
    Ok(DensityMatrix::from_raw(n, acc))
}

/// One classical history with its unnormalized conditional state.
struct DensityBranch {
    reg: ClassicalRegister,
    rho: DensityMatrix,
}

/// Keeps only the rows and columns consistent with `outcome` on `qubits`.
fn project(rho: &DensityMatrix, qubits: &[usize], outcome: usize) -> DensityMatrix {
    let n = rho.num_qubits();
    let dim = 1usize << n;
    let m = qubits.len();
    let keep = |i: usize| {
        qubits.iter().enumerate().all(|(j, &q)| {
            let want = (outcome >> (m - 1 - j)) & 1;
            (i >> bit_position(q, n)) & 1 == want
        })
    };
    let mask: Vec<bool> = (0..dim).map(keep).collect();
    let mut out = rho.clone();
    let data = out.matrix_mut().as_mut_slice();
    for r in 0..dim {
        for c in 0..dim {
            if !(mask[r] && mask[c]) {
                data[r * dim + c] = ZERO;
            }
        }
    }
    out
}

fn evolve_gate(rho: &mut DensityMatrix, g: &crate::gates::GateDef, exec: Execution) {
    let n = rho.num_qubits();
    let (controls, targets) = g.targets().split_at(g.num_controls());
    sandwich(rho.matrix_mut(), n, g.active_matrix(), targets, controls, exec);
}

/// Exact evolution of every classical branch of `circuit`.
fn evolve_branches(circuit: &Circuit, exec: Execution) -> Result<Vec<DensityBranch>> {
    let mut branches = vec![DensityBranch {
        reg: ClassicalRegister::with_labels(circuit.clbits()),
        rho: circuit.density_matrix(),
    }];
    for e in circuit.elements() {
        match e {
            CircuitElement::Gate(g) => {
                for b in &mut branches {
                    evolve_gate(&mut b.rho, g, exec);
                }
            }
            CircuitElement::Noise(ch) => {
                for b in &mut branches {
                    b.rho = apply_channel_density(&b.rho, ch)?;
                }
            }
            CircuitElement::Measure { qubits, clbits } => {
                let m = qubits.len();
                let mut next = Vec::with_capacity(branches.len() << m);
                for b in branches {
                    for outcome in 0..(1usize << m) {
                        let rho = project(&b.rho, qubits, outcome);
                        if rho.trace().re < BRANCH_CUTOFF {
                            continue;
                        }
                        let mut reg = b.reg.clone();
                        for (j, label) in clbits.iter().enumerate() {
                            reg.set(label, ((outcome >> (m - 1 - j)) & 1) as u8)?;
                        }
                        next.push(DensityBranch { reg, rho });
                    }
                }
                branches = next;
            }
            CircuitElement::ClassicalControl { clbit, value, gate } => {
                for b in &mut branches {
                    match b.reg.get(clbit) {
                        None => return Err(Error::UnsetClbit(clbit.clone())),
                        Some(v) if v == *value => evolve_gate(&mut b.rho, gate, exec),
                        Some(_) => {}
                    }
                }
            }
        }
    }
    Ok(branches)
}

/// Exact output density matrix of `circuit`, summed over measurement branches.
pub fn exact_density(circuit: &Circuit) -> Result<DensityMatrix> {
    let n = circuit.num_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: n,
            limit: MAX_DENSITY_QUBITS,
            what: "density-matrix simulation",
        });
    }
    let branches = evolve_branches(circuit, Execution::default())?;
    Ok(sum_branches(n, &branches))
}

fn sum_branches(n: usize, branches: &[DensityBranch]) -> DensityMatrix {
    let mut acc = Matrix::zeros(1 << n);
    for b in branches {
        acc = &acc + b.rho.matrix();
    }
    DensityMatrix::from_raw(n, acc)
}

fn simulate_density(job: &SimJob) -> Result<ShotResult> {
    let circuit = &job.circuit;
    let n = circuit.num_qubits();
    let branches = evolve_branches(circuit, job.execution)?;
    let final_density = sum_branches(n, &branches);
    let (labels, exact): (Vec<String>, BTreeMap<String, f64>) = if circuit.has_measurement() {
        let labels: Vec<String> = circuit.measured_clbits().iter().map(|s| s.to_string()).collect();
        let mut dist = BTreeMap::new();
        for b in &branches {
            *dist.entry(record(&labels, &b.reg)).or_insert(0.0) += b.rho.trace().re;
        }
        (labels, dist)
    } else {
        let labels = (0..n).map(|q| format!("m{q}")).collect();
        let dist = final_density
            .diagonal_probabilities()
            .into_iter()
            .enumerate()
            .filter(|&(_, p)| p > 0.0)
            .map(|(i, p)| (index_to_bitstring(i, n), p))
            .collect();
        (labels, dist)
    };
    let total: f64 = exact.values().sum();
    let exact: BTreeMap<String, f64> = exact.into_iter().map(|(k, p)| (k, p / total)).collect();
    let keys: Vec<(&String, f64)> = exact.iter().map(|(k, &p)| (k, p)).collect();
    let per_shot = map_chunks(job.shots, job.chunk_size, job.execution, |range| {
        Ok(range
            .map(|shot| {
                let u = shot_rng(job.seed, shot).random::<f64>();
                let mut acc = 0.0;
                let mut pick = keys.len() - 1;
                for (i, (_, p)) in keys.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                keys[pick].0.clone()
            })
            .collect())
    })?;
    let mut result = ShotResult::from_records(labels, per_shot, job.seed);
    result.exact_probability = Some(exact);
    result.final_density = Some(final_density);
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for HistogramFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(HistogramFormat::Text),
            "csv" => Ok(HistogramFormat::Csv),
            "json" => Ok(HistogramFormat::Json),
            _ => Err(Error::InvalidJob(format!("unknown histogram format '{s}'"))),
        }
    }
}

const BAR_WIDTH: usize = 40;

/// Renders the histogram in `format`.
pub fn format_histogram(r: &ShotResult, format: HistogramFormat) -> String {
    match format {
        HistogramFormat::Text => {
            let width = r.counts.keys().map(String::len).max().unwrap_or(0);
            let top = r.probability.values().cloned().fold(0.0, f64::max);
            let mut out = String::new();
            for (k, &count) in &r.counts {
                let p = r.probability[k];
                let bar = if top > 0.0 {
                    ((p / top) * BAR_WIDTH as f64).round() as usize
                } else {
                    0
                };
                let _ = writeln!(out, "{k:>width$} | {:<BAR_WIDTH$} {count} ({p:.4})", "#".repeat(bar));
            }
            out
        }
        HistogramFormat::Csv => {
            let mut out = String::from("bitstring,count,probability\n");
            for (k, count) in &r.counts {
                let _ = writeln!(out, "{k},{count},{}", r.probability[k]);
            }
            out
        }
        HistogramFormat::Json => {
            let doc = serde_json::json!({
                "shots": r.shots,
                "seed": r.seed,
                "counts": r.counts,
                "probability": r.probability,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable histogram");
            s.push('\n');
            s
        }
    }
}

/// Writes the histogram of `r` to `path`.
pub fn export_histogram(r: &ShotResult, format: HistogramFormat, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_histogram(r, format))?;
    Ok(())
}

/// Reads counts back from the CSV histogram format.
pub fn parse_histogram_csv(text: &str) -> Result<BTreeMap<String, u64>> {
    let mut lines = text.lines();
    if lines.next() != Some("bitstring,count,probability") {
        return Err(Error::Io("missing histogram CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut f = l.split(',');
            match (f.next(), f.next().and_then(|c| c.parse().ok())) {
                (Some(k), Some(c)) => Ok((k.to_string(), c)),
                _ => Err(Error::Io(format!("malformed histogram row '{l}'"))),
            }
        })
        .collect()
}
