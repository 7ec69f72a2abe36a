use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwire::algorithms::{Method, OptimizerConfig};
use qwire::backend::{format_histogram, simulate, HistogramFormat, SimJob, SimMode};
use qwire::bench::{records_to_csv, run_sweep, BenchConfig, BenchGate};
use qwire::viz::render_text;
use qwire::{Circuit, Execution};
use qwire_cli::file::CircuitFile;
use qwire_cli::{algo, CliError};

#[derive(Parser)]
#[command(name = "qwire", version, about = "Quantum circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit file and write its measurement histogram.
    Run(RunArgs),
    /// Run a library algorithm and print a JSON report.
    Algo {
        #[command(subcommand)]
        algorithm: Algorithm,
    },
    /// Time RX, H and CNOT layers over a range of register sizes.
    Bench(BenchArgs),
    /// Draw a circuit file.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Trajectory,
    Density,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exec {
    Serial,
    Parallel,
}

impl From<Exec> for Execution {
    fn from(e: Exec) -> Self {
        match e {
            Exec::Serial => Execution::Serial,
            Exec::Parallel => Execution::Parallel,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Master seed for all random draws.
    #[arg(long, env = "QWIRE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    /// Circuit file (JSON).
    file: PathBuf,
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Shots per parallel batch.
    #[arg(long, conflicts_with = "chunks")]
    chunk: Option<usize>,
    /// Number of parallel batches (converted to a batch size).
    #[arg(long)]
    chunks: Option<usize>,
    #[arg(long, value_enum, default_value = "trajectory")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "parallel")]
    exec: Exec,
    /// Histogram output file; the format defaults to its extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct OptimizerArgs {
    #[arg(long, value_enum, default_value = "gd")]
    method: OptMethod,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Gradient-descent learning rate.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Disable the Nelder-Mead fallback after non-converged gradient descent.
    #[arg(long)]
    no_fallback: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptMethod {
    Gd,
    Nm,
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            method: match self.method {
                OptMethod::Gd => Method::GradientDescent,
                OptMethod::Nm => Method::NelderMead,
            },
            max_iters: self.max_iters,
            step: self.step,
            tol: self.tol,
            seed,
            restarts: self.restarts,
            fallback: !self.no_fallback,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Algorithm {
    /// Deutsch-Jozsa on a constant or balanced oracle.
    Dj {
        #[arg(long)]
        qubits: usize,
        #[arg(long, conflicts_with = "mask")]
        constant: bool,
        /// Balanced oracle mask `s` for `f(x) = x·s mod 2`.
        #[arg(long)]
        mask: Option<String>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Bernstein-Vazirani recovery of a hidden bit string.
    Bv {
        #[arg(long)]
        secret: String,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Grover search for one marked item.
    Grover {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        marked: usize,
        /// Iterations; defaults to floor(π/4·√N).
        #[arg(long)]
        iters: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Quantum Fourier transform of a basis state.
    Qft {
        #[arg(long)]
        qubits: usize,
        /// Input bit string; defaults to all zeros.
        #[arg(long)]
        input: Option<String>,
    },
    /// Phase estimation of P(2π·phase) on |1⟩.
    Qpe {
        /// Eigenphase as a fraction of a full turn.
        #[arg(long, allow_negative_numbers = true)]
        phase: f64,
        #[arg(long, default_value_t = 3)]
        counting: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Order finding and factoring for N ≤ 15.
    Shor {
        #[arg(long, default_value_t = 7)]
        a: u64,
        #[arg(long, default_value_t = 15)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        attempts: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Variational eigensolver with an RY + CX-chain ansatz.
    Vqe {
        /// Weighted Pauli terms, e.g. `1.0*ZZ,-0.5*XI`.
        #[arg(long, default_value = "1.0*ZZ", allow_hyphen_values = true)]
        hamiltonian: String,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// MaxCut QAOA.
    Qaoa {
        /// Edges `u-v` or `u-v:weight`, comma separated.
        #[arg(long, default_value = "0-1,1-2,0-2")]
        edges: String,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Teleportation of alpha|0⟩ + sqrt(1-alpha²)|1⟩.
    Teleport {
        #[arg(long, default_value_t = 0.7)]
        alpha: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated gates from rx, h, cnot.
    #[arg(long, default_value = "rx,h,cnot", value_delimiter = ',')]
    gates: Vec<String>,
    #[arg(long, default_value_t = 1)]
    min_qubits: usize,
    #[arg(long, default_value_t = 12)]
    max_qubits: usize,
    /// Timed samples per point; the median is reported.
    #[arg(long, default_value_t = 11)]
    reps: usize,
    /// Minimum duration of one timed sample, in milliseconds.
    #[arg(long, default_value_t = 5.0)]
    min_sample_ms: f64,
    #[arg(long, value_enum, default_value = "serial")]
    exec: Exec,
    /// CSV output file; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    file: PathBuf,
    /// Plain ASCII even on a terminal.
    #[arg(long)]
    no_color: bool,
    /// Also print width, size, depth and gate counts.
    #[arg(long)]
    stats: bool,
}

fn load(path: &Path) -> Result<Circuit, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    CircuitFile::load(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn histogram_format(format: Option<Format>, out: Option<&Path>) -> HistogramFormat {
    let by_ext = out.and_then(|p| p.extension()).and_then(|e| e.to_str());
    match (format, by_ext) {
        (Some(Format::Text), _) => HistogramFormat::Text,
        (Some(Format::Csv), _) | (None, Some("csv")) => HistogramFormat::Csv,
        (Some(Format::Json), _) | (None, Some("json")) => HistogramFormat::Json,
        _ => HistogramFormat::Text,
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let circuit = load(&args.file)?;
    let mut job = SimJob::new(circuit, args.shots)
        .seed(args.seed.seed)
        .execution(args.exec.into())
        .mode(match args.mode {
            Mode::Trajectory => SimMode::Trajectory,
            Mode::Density => SimMode::Density,
        });
    if let Some(c) = args.chunk {
        job = job.chunk_size(c);
    }
    if let Some(c) = args.chunks {
        job = job.chunks(c);
    }
    let result = simulate(&job).map_err(|e| CliError::Simulation(e.to_string()))?;
    let format = histogram_format(args.format, args.out.as_deref());
    match &args.out {
        Some(path) => {
            write_out(path, &format_histogram(&result, format))?;
            emit(&format!(
                "{} shots, seed {}, {} outcome(s) -> {}\n{}",
                result.shots,
                result.seed,
                result.counts.len(),
                path.display(),
                format_histogram(&result, HistogramFormat::Text)
            ))
        }
        None => emit(&format_histogram(&result, format)),
    }
}

fn cmd_algo(algorithm: Algorithm) -> Result<(), CliError> {
    let report = match algorithm {
        Algorithm::Dj { qubits, constant, mask, seed } => algo::dj(qubits, constant, mask.as_deref(), seed.seed),
        Algorithm::Bv { secret, seed } => algo::bv(&secret, seed.seed),
        Algorithm::Grover { qubits, marked, iters, seed } => algo::grover_report(qubits, marked, iters, seed.seed),
        Algorithm::Qft { qubits, input } => algo::qft_report(qubits, input.as_deref()),
        Algorithm::Qpe { phase, counting, seed } => algo::qpe_report(phase, counting, seed.seed),
        Algorithm::Shor { a, n, attempts, seed } => algo::shor(a, n, attempts, seed.seed),
        Algorithm::Vqe { hamiltonian, opt, seed } => algo::vqe_report(&hamiltonian, &opt.config(seed.seed)),
        Algorithm::Qaoa { edges, layers, opt, seed } => algo::qaoa_report(&edges, layers, &opt.config(seed.seed)),
        Algorithm::Teleport { alpha, seed } => algo::teleport(alpha, seed.seed),
    }?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("finite report")))
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let gates = args
        .gates
        .iter()
        .map(|g| g.parse::<BenchGate>().map_err(|e| CliError::Input(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        gates,
        min_qubits: args.min_qubits,
        max_qubits: args.max_qubits,
        reps: args.reps,
        min_sample_seconds: args.min_sample_ms / 1e3,
        execution: args.exec.into(),
    };
    let records = run_sweep(&cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let csv = records_to_csv(&records);
    match &args.out {
        Some(path) => write_out(path, &csv),
        None => emit(&csv),
    }
}

fn cmd_render(args: RenderArgs) -> Result<(), CliError> {
    let circuit = load(&args.file)?;
    let color = !args.no_color && std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal();
    let mut text = render_text(&circuit, color).to_string();
    if args.stats {
        let gates = circuit
            .gatesinfo()
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(", ");
        text += &format!(
            "width {}, size {}, depth {}, gates {{{gates}}}\n",
            circuit.width(),
            circuit.size(),
            circuit.depth()
        );
    }
    emit(&text)
}

/// Writes to stdout; a closed pipe (`qwire ... | head`) is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Output(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Algo { algorithm } => cmd_algo(algorithm),
        Command::Bench(args) => cmd_bench(args),
        Command::Render(args) => cmd_render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
