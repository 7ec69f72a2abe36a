//! Runtime sweep of single gate types over growing registers.
//!
//! For each gate and register size the harness builds a circuit that applies
//! the gate across every wire (`CNOT` on neighbouring pairs), then times only
//! the engine applying it to a state vector. Each sample repeats the circuit
//! enough times to last at least `min_sample_seconds`; the reported time is
//! the median sample. Calibrating the repetition count doubles as warmup.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use crate::engine::apply_gate_in_place;
use crate::error::{Error, Result};
use crate::gates::{cx, h, rx, GateDef};
use crate::kernel::Execution;
use crate::qstate::{basis_state, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchGate {
    Rx,
    H,
    Cnot,
}

impl BenchGate {
    pub fn name(self) -> &'static str {
        match self {
            BenchGate::Rx => "rx",
            BenchGate::H => "h",
            BenchGate::Cnot => "cnot",
        }
    }

    /// The gates applied for one circuit pass on `n` wires.
    pub fn layer(self, n: usize) -> Vec<GateDef> {
        match self {
            BenchGate::Rx => (0..n).map(|q| rx(std::f64::consts::FRAC_PI_3, q)).collect(),
            BenchGate::H => (0..n).map(h).collect(),
            BenchGate::Cnot => (1..n).map(|q| cx(q - 1, q)).collect(),
        }
    }
}

impl FromStr for BenchGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rx" => Ok(BenchGate::Rx),
            "h" | "hadamard" => Ok(BenchGate::H),
            "cnot" | "cx" => Ok(BenchGate::Cnot),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub gates: Vec<BenchGate>,
    pub min_qubits: usize,
    pub max_qubits: usize,
    /// Timed samples per point.
    pub reps: usize,
    pub min_sample_seconds: f64,
    pub execution: Execution,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            gates: vec![BenchGate::Rx, BenchGate::H, BenchGate::Cnot],
            min_qubits: 1,
            max_qubits: 12,
            reps: 11,
            min_sample_seconds: 5e-3,
            execution: Execution::Serial,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub gate: String,
    pub num_qubits: usize,
    pub repetitions: usize,
    /// Median time of one pass over the circuit.
    pub wall_seconds: f64,
    /// `wall_seconds` divided by the number of gates in the circuit.
    pub per_op_seconds: f64,
}

fn time_pass(gates: &[GateDef], n: usize, iters: usize, exec: Execution) -> Result<f64> {
    let mut sv = basis_state(n, 0)?;
    let start = Instant::now();
    for _ in 0..iters {
        for g in gates {
            apply_gate_in_place(&mut sv, g, exec)?;
        }
    }
    std::hint::black_box(&sv);
    Ok(start.elapsed().as_secs_f64())
}

struct Point {
    gate: BenchGate,
    n: usize,
    gates: Vec<GateDef>,
    iters: usize,
    samples: Vec<f64>,
}

impl Point {
    /// `None` when the gate does not fit (`CNOT` on one wire).
    fn calibrate(gate: BenchGate, n: usize, cfg: &BenchConfig) -> Result<Option<Self>> {
        let gates = gate.layer(n);
        if gates.is_empty() {
            return Ok(None);
        }
        let mut iters = 1usize;
        loop {
            let t = time_pass(&gates, n, iters, cfg.execution)?;
            if t >= cfg.min_sample_seconds || iters >= 1 << 30 {
                break;
            }
            let scale = if t > 0.0 { (cfg.min_sample_seconds / t * 1.2).ceil() as usize } else { 16 };
            iters = iters.saturating_mul(scale.clamp(2, 1024));
        }
        Ok(Some(Self { gate, n, gates, iters, samples: Vec::with_capacity(cfg.reps) }))
    }

    fn sample(&mut self, exec: Execution) -> Result<()> {
        let t = time_pass(&self.gates, self.n, self.iters, exec)?;
        self.samples.push(t / self.iters as f64);
        Ok(())
    }

    fn record(mut self) -> BenchRecord {
        self.samples.sort_by(f64::total_cmp);
        let wall = self.samples[self.samples.len() / 2];
        BenchRecord {
            gate: self.gate.name().to_string(),
            num_qubits: self.n,
            repetitions: self.samples.len(),
            wall_seconds: wall,
            per_op_seconds: wall / self.gates.len() as f64,
        }
    }
}

fn measure(points: &mut [Point], cfg: &BenchConfig) -> Result<()> {
    for _ in 0..cfg.reps {
        for p in points.iter_mut() {
            p.sample(cfg.execution)?;
        }
    }
    Ok(())
}

/// Times one gate type on `n` qubits. `None` when the gate does not fit
/// (`CNOT` on one wire).
pub fn bench_point(gate: BenchGate, n: usize, cfg: &BenchConfig) -> Result<Option<BenchRecord>> {
    let Some(point) = Point::calibrate(gate, n, cfg)? else {
        return Ok(None);
    };
    let mut points = [point];
    measure(&mut points, cfg)?;
    let [point] = points;
    Ok(Some(point.record()))
}

/// Runs every (gate, size) point of the sweep. Samples are taken in rounds
/// that visit every point once, so a transient slowdown of the host spreads
/// over all points instead of skewing one.
pub fn run_sweep(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.reps == 0 || cfg.min_qubits == 0 || cfg.min_qubits > cfg.max_qubits {
        return Err(Error::InvalidJob(format!(
            "invalid sweep: qubits {}..={}, {} rep(s)",
            cfg.min_qubits, cfg.max_qubits, cfg.reps
        )));
    }
    if cfg.max_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: cfg.max_qubits,
            limit: MAX_QUBITS,
            what: "benchmark sweep",
        });
    }
    let mut points = Vec::new();
    for &g in &cfg.gates {
        for n in cfg.min_qubits..=cfg.max_qubits {
            points.extend(Point::calibrate(g, n, cfg)?);
        }
    }
    measure(&mut points, cfg)?;
    Ok(points.into_iter().map(Point::record).collect())
}

/// CSV with header `gate,num_qubits,repetitions,wall_seconds,per_op_seconds`.
pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from("gate,num_qubits,repetitions,wall_seconds,per_op_seconds\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{:e}",
            r.gate, r.num_qubits, r.repetitions, r.wall_seconds, r.per_op_seconds
        );
    }
    s
}
