//! Acceptance gate: every primary criterion at its stated tolerance and time
//! limit. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use common::*;
use qwire::algorithms::{
    self, bob_state, cut_value, deutsch_jozsa, dj_with_oracle, energy, factor, grover, parameter_shift_gradient,
    qaoa, qft, qpe, teleportation, vqe, Ansatz, DjOracle, OptimizerConfig, ShorOutcome,
};
use qwire::backend::{exact_density, simulate, trajectory_density, SimJob};
use qwire::bench::{run_sweep, BenchConfig, BenchGate};
use qwire::engine::{branches, final_state, outcome_probabilities};
use qwire::gates::{ccx, cx, h, ry, rz, t, x, GateFamily, LIBRARY};
use qwire::noise::{bit_flip, depolarizing, phase_flip};
use qwire::qstate::{basis_state, bloch_state, create_state, index_to_bitstring};
use qwire::{Circuit, CircuitElement, Execution, GateDef, NoiseChannel, PauliHamiltonian};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q<T, E: std::fmt::Display>(r: Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn unitarity() -> Check {
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    let mut gates = 0;
    for spec in LIBRARY {
        let control_counts: &[usize] = if spec.family == GateFamily::Control { &[1, 2] } else { &[0] };
        for &k in control_counts {
            let wires: Vec<usize> = (0..spec.wires + k).collect();
            for _ in 0..100 {
                let params = random_params(&mut rng, spec.param_count());
                let g = q(GateDef::library(spec.name, &params, &wires))?;
                let u = to_na(g.matrix());
                let dev = max_abs(&(&u * u.adjoint() - identity(u.nrows())));
                worst = worst.max(dev);
                gates += 1;
                ensure!(dev < 1e-12, "{} {:?}: max|UU†-I| = {dev:e}", spec.name, params);
            }
        }
    }
    Ok(format!("{gates} matrices, worst {worst:.1e}"))
}

fn oracle_equivalence() -> Check {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = rng.random_range(1..=5);
        let len = rng.random_range(0..=30);
        let c = random_circuit(&mut rng, n, len);
        let got = sv_to_na(&q(final_state(&c))?);
        let want = reference_state(&c);
        let err = (got - want).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(err);
        ensure!(err < 1e-10, "circuit {i} (n={n}, {len} gates): amplitude error {err:e}");
    }
    Ok(format!("200 circuits, worst amplitude error {worst:.1e}"))
}

fn bell_circuit() -> std::result::Result<Circuit, String> {
    let mut c = q(Circuit::new(2, 0))?;
    q(c.append(h(0)))?;
    q(c.append(cx(0, 1)))?;
    q(c.append(CircuitElement::measure_all(2)))?;
    Ok(c)
}

fn bell_sampling() -> Check {
    let c = bell_circuit()?;
    let seed = 7;
    let mut records = Vec::new();
    for chunk in [1, 10, 1000] {
        let r = q(simulate(&SimJob::new(c.clone(), 1000).seed(seed).chunk_size(chunk)))?;
        records.push(r);
    }
    let base = &records[0];
    let support: Vec<&str> = base.counts.keys().map(String::as_str).collect();
    ensure!(support == ["00", "11"], "support {support:?}");
    for (k, v) in &base.counts {
        ensure!((450..=550).contains(v), "count {k} = {v}");
    }
    for r in &records[1..] {
        ensure!(r.per_shot == base.per_shot, "per-shot records differ between chunk sizes");
    }
    let serial = q(simulate(
        &SimJob::new(c, 1000).seed(seed).chunk_size(10).execution(Execution::Serial),
    ))?;
    ensure!(serial.per_shot == base.per_shot, "serial and parallel records differ");
    Ok(format!("counts {:?}", base.counts))
}

fn listing3_metadata() -> Check {
    let mut c = q(Circuit::new(4, 0))?;
    for g in [x(0), x(1), cx(0, 2), cx(1, 2), ccx(0, 1, 3)] {
        q(c.append(g))?;
    }
    let want: BTreeMap<String, usize> = [("X", 2), ("CX", 2), ("CCX", 1)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    ensure!(c.width() == 4, "width {}", c.width());
    ensure!(c.size() == 5, "size {}", c.size());
    ensure!(c.depth() == 4, "depth {}", c.depth());
    ensure!(c.gatesinfo() == want, "gatesinfo {:?}", c.gatesinfo());
    Ok("width 4, size 5, depth 4, {X:2, CX:2, CCX:1}".into())
}

fn teleport() -> Check {
    let mut rng = rng(3);
    let mut alphas = vec![0.7];
    alphas.extend((0..20).map(|_| rng.random_range(0.0..=1.0)));
    let mut worst = 0.0f64;
    let mut count = 0;
    for &alpha in &alphas {
        let want = q(create_state(0, alpha))?.state;
        let bs = q(branches(&q(teleportation(alpha))?))?;
        ensure!(!bs.is_empty(), "no branches for alpha {alpha}");
        for b in &bs {
            let f = q(bob_state(&b.statevector))?.fidelity(&want);
            worst = worst.max((f - 1.0).abs());
            count += 1;
            ensure!((f - 1.0).abs() < 1e-10, "alpha {alpha}: fidelity {f}");
        }
    }
    Ok(format!("{} alphas, {count} branches, worst |F-1| {worst:.1e}", alphas.len()))
}

fn bv() -> Check {
    let mut total = 0;
    let mut secrets = vec!["10".to_string()];
    for n in 1..=8 {
        secrets.extend((0..1usize << n).map(|s| index_to_bitstring(s, n)));
    }
    for s in &secrets {
        let probs = q(outcome_probabilities(&q(algorithms::bernstein_vazirani(s))?))?;
        let p = probs.get(s).copied().unwrap_or(0.0);
        ensure!((p - 1.0).abs() < 1e-12, "secret {s}: probability {p}");
        total += 1;
    }
    Ok(format!("{total} secrets recovered"))
}

fn dj() -> Check {
    let mut cases = 0;
    for n in 1..=6 {
        let zeros = "0".repeat(n);
        let mut oracles = vec![(DjOracle::ConstantZero, true), (DjOracle::ConstantOne, true)];
        for m in 1..1usize << n {
            oracles.push((DjOracle::Balanced(index_to_bitstring(m, n)), false));
        }
        for (oracle, constant) in &oracles {
            let probs = q(outcome_probabilities(&q(dj_with_oracle(n, oracle))?))?;
            let p0 = probs.get(&zeros).copied().unwrap_or(0.0);
            if *constant {
                ensure!((p0 - 1.0).abs() < 1e-12, "n={n} {oracle:?}: P(all zero) = {p0}");
            } else {
                ensure!(p0 < 1e-12, "n={n} {oracle:?}: P(all zero) = {p0}");
            }
            cases += 1;
        }
        for constant in [true, false] {
            let probs = q(outcome_probabilities(&q(deutsch_jozsa(n, constant))?))?;
            let p0 = probs.get(&zeros).copied().unwrap_or(0.0);
            ensure!(constant == (p0 > 0.5), "default n={n} constant={constant}: P0 {p0}");
        }
    }
    Ok(format!("{cases} oracles classified without error"))
}

fn grover_check() -> Check {
    let analytic = |n: usize, k: usize| {
        let theta = (1.0 / ((1usize << n) as f64).sqrt()).asin();
        ((2 * k + 1) as f64 * theta).sin().powi(2)
    };
    let mut report = Vec::new();
    for (n, k, tol) in [(3, 2, 1e-4), (2, 1, 1e-10)] {
        for marked in 0..1usize << n {
            let probs = q(outcome_probabilities(&q(grover(n, marked, k))?))?;
            let p = probs.get(&index_to_bitstring(marked, n)).copied().unwrap_or(0.0);
            let want = analytic(n, k);
            ensure!((p - want).abs() < tol, "n={n} k={k} marked={marked}: {p} vs analytic {want}");
        }
        report.push(format!("n={n},k={k}: {:.7}", analytic(n, k)));
    }
    Ok(report.join("; "))
}

fn qft_qpe() -> Check {
    let u = q(q(qft(3))?.unitary())?;
    let err = max_abs(&(to_na(&u) - dft(3)));
    ensure!(err < 1e-10, "qft(3) vs DFT: {err:e}");
    let c = q(qpe(&t(0), &q(basis_state(1, 1))?, 3))?;
    let probs = q(outcome_probabilities(&c))?;
    let p = probs.get("001").copied().unwrap_or(0.0);
    ensure!((p - 1.0).abs() < 1e-10, "QPE P(001) = {p}");
    Ok(format!("DFT error {err:.1e}, P(001) = {p:.12}"))
}

fn shor() -> Check {
    let outcomes = q(factor(7, 15, 10, 2024))?;
    let hit = outcomes.iter().position(|o| {
        matches!(o, ShorOutcome::Factors { order: 4, factors, .. } if [factors.0, factors.1] == [3, 5] || [factors.0, factors.1] == [5, 3])
    });
    match hit {
        Some(i) => Ok(format!("order 4, factors {{3,5}} on attempt {}", i + 1)),
        None => Err(format!("no success in 10 attempts: {outcomes:?}")),
    }
}

fn noise_circuit(ch: NoiseChannel, two_qubit: bool) -> std::result::Result<Circuit, String> {
    let mut c = if two_qubit {
        let mut c = q(Circuit::new(2, 0))?;
        q(c.append(ry(1.1, 0)))?;
        q(c.append(cx(0, 1)))?;
        q(c.append(rz(0.4, 1)))?;
        c
    } else {
        q(Circuit::with_qubits(1, 0, &[bloch_state(0, 1.2, 0.8)]))?
    };
    q(c.append(ch))?;
    Ok(c)
}

fn noise() -> Check {
    let mut worst_traj = 0.0f64;
    let mut worst_exact = 0.0f64;
    for kind in ["bitflip", "phaseflip", "depolarizing"] {
        for p in [0.05, 0.25, 0.5] {
            for two_qubit in [false, true] {
                let ch = match kind {
                    "bitflip" => q(bit_flip(p, 0))?,
                    "phaseflip" => q(phase_flip(p, 0))?,
                    _ => q(depolarizing(p, 0))?,
                };
                let c = noise_circuit(ch, two_qubit)?;
                let n = c.num_qubits();
                let exact = to_na(q(exact_density(&c))?.matrix());

                let mut pure = q(Circuit::new(n, 0))?;
                q(pure.set_initial_state(c.initial_state().clone()))?;
                for e in c.elements() {
                    if let CircuitElement::Gate(gate) = e {
                        q(pure.append(gate.clone()))?;
                    }
                }
                let psi = reference_state(&pure);
                let rho = &psi * psi.adjoint();
                let kraus: Vec<CM> = kraus_set(kind, p).iter().map(|k| embed(k, &[0], n)).collect();
                let oracle = apply_kraus(&rho, &kraus);
                let e = max_abs(&(&exact - &oracle));
                worst_exact = worst_exact.max(e);
                ensure!(e < 1e-12, "{kind}({p}) n={n}: exact density vs Kraus oracle {e:e}");

                let est = to_na(q(trajectory_density(&SimJob::new(c, 50_000).seed(11)))?.matrix());
                let d = max_abs(&(&est - &exact));
                worst_traj = worst_traj.max(d);
                ensure!(d < 0.01, "{kind}({p}) n={n}: trajectory vs exact {d}");
            }
        }
    }
    let mut worst_mixed = 0.0f64;
    for (theta, phi) in [(0.0, 0.0), (PI, 0.0), (PI / 2.0, 0.0), (1.3, 2.1), (2.7, -0.6)] {
        let mut c = q(Circuit::with_qubits(1, 0, &[bloch_state(0, theta, phi)]))?;
        q(c.append(q(depolarizing(1.0, 0))?))?;
        let rho = to_na(q(exact_density(&c))?.matrix());
        let d = max_abs(&(rho - identity(2) * c64(0.5, 0.0)));
        worst_mixed = worst_mixed.max(d);
        ensure!(d < 1e-10, "depolarizing(1) on ({theta},{phi}): {d:e}");
    }
    Ok(format!(
        "trajectory worst {worst_traj:.4}, exact-vs-Kraus {worst_exact:.1e}, depolarizing(1) {worst_mixed:.1e}"
    ))
}

fn gradient_ansatz() -> std::result::Result<(Ansatz, PauliHamiltonian), String> {
    let a = q(Ansatz::new(3, 5)
        .rotation("RY", &[0], 0)
        .and_then(|a| a.rotation("RX", &[1], 1))
        .and_then(|a| a.gate(h(2)))
        .and_then(|a| a.gate(cx(0, 1)))
        .and_then(|a| a.rotation("RZZ", &[1, 2], 2))
        .and_then(|a| a.scaled_rotation("RXX", &[0, 2], 3, -0.7))
        .and_then(|a| a.rotation("RYY", &[0, 1], 4))
        .and_then(|a| a.rotation("RZ", &[2], 0))
        .and_then(|a| a.scaled_rotation("RY", &[1], 2, 2.0)))?;
    let hm = q(PauliHamiltonian::parse(&[(0.8, "ZZI"), (-0.5, "XIX"), (0.3, "IYZ"), (1.1, "ZII"), (0.2, "XYZ")]))?;
    Ok((a, hm))
}

fn gradients() -> Check {
    let (ansatz, hm) = gradient_ansatz()?;
    let mut rng = rng(5);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for draw in 0..50 {
        let x = random_params(&mut rng, ansatz.num_params());
        for i in 0..x.len() {
            let g = q(parameter_shift_gradient(&ansatz, &x, &hm, i))?;
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            let fd = (q(energy(&ansatz, &xp, &hm))? - q(energy(&ansatz, &xm, &hm))?) / (2.0 * h);
            let d = (fd - g).abs();
            worst = worst.max(d);
            ensure!(d < 1e-6, "draw {draw} param {i}: shift {g} vs fd {fd}");
        }
    }
    Ok(format!("50 draws, worst |Δ| {worst:.1e}"))
}

fn vqe_zz() -> Check {
    let hm = q(PauliHamiltonian::parse(&[(1.0, "ZZ")]))?;
    let r = q(vqe(&hm, &q(Ansatz::ry_cx(2))?, &OptimizerConfig::default()))?;
    ensure!((r.energy + 1.0).abs() < 1e-2, "energy {}", r.energy);
    let low = r.trace.iter().copied().fold(f64::INFINITY, f64::min);
    ensure!(low >= -1.0 - 1e-9, "trace dips to {low}");
    Ok(format!("energy {:.6} after {} evaluations", r.energy, r.evaluations))
}

fn qaoa_check() -> Check {
    let triangle = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)];
    let best = brute_force_maxcut(&triangle);
    ensure!(best == 2.0, "triangle brute-force optimum {best}");
    let cfg = OptimizerConfig::default();
    let r = q(qaoa(&triangle, 1, &cfg))?;
    ensure!(r.expected_cut >= 1.8, "triangle p=1 expected cut {}", r.expected_cut);

    let square = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)];
    let best4 = brute_force_maxcut(&square);
    let r4 = q(qaoa(&square, 2, &cfg))?;
    let got = cut_value(&square, &r4.most_probable);
    ensure!(got == best4, "4-cycle most probable {} cuts {got}, optimum {best4}", r4.most_probable);
    Ok(format!(
        "triangle <C> = {:.4} (optimum {best}); 4-cycle p=2 most probable {} cuts {got}",
        r.expected_cut, r4.most_probable
    ))
}

fn benchmark_shape() -> Check {
    let cfg = BenchConfig::default();
    let recs = q(run_sweep(&cfg))?;
    let mut report = Vec::new();
    for g in [BenchGate::Rx, BenchGate::H, BenchGate::Cnot] {
        let rows: Vec<_> = recs.iter().filter(|r| r.gate == g.name()).collect();
        let expected = if g == BenchGate::Cnot { 11 } else { 12 };
        ensure!(rows.len() == expected, "{} has {} rows", g.name(), rows.len());
        let wall: BTreeMap<usize, f64> = rows.iter().map(|r| (r.num_qubits, r.wall_seconds)).collect();
        for n in 6..12 {
            ensure!(wall[&(n + 1)] >= wall[&n], "{} wall time drops from n={n} to n={}", g.name(), n + 1);
        }
        let per_op: BTreeMap<usize, f64> = rows.iter().map(|r| (r.num_qubits, r.per_op_seconds)).collect();
        let mut ratios = Vec::new();
        for n in 8..=11 {
            let ratio = per_op[&(n + 1)] / per_op[&n];
            ratios.push(format!("{ratio:.2}"));
            ensure!((1.5..=3.0).contains(&ratio), "{} wall({})/wall({n}) = {ratio:.3}", g.name(), n + 1);
        }
        report.push(format!("{} [{}]", g.name(), ratios.join(", ")));
    }
    Ok(report.join("; "))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, u64, fn() -> Check)> = vec![
        ("unitarity", 5, unitarity),
        ("oracle-equivalence", 30, oracle_equivalence),
        ("bell-sampling", 2, bell_sampling),
        ("listing3-metadata", 2, listing3_metadata),
        ("teleportation", 2, teleport),
        ("bernstein-vazirani", 5, bv),
        ("deutsch-jozsa", 2, dj),
        ("grover", 2, grover_check),
        ("qft-qpe", 2, qft_qpe),
        ("shor", 60, shor),
        ("noise", 60, noise),
        ("gradients", 10, gradients),
        ("vqe", 30, vqe_zz),
        ("qaoa", 60, qaoa_check),
        ("benchmark-shape", 600, benchmark_shape),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(limit);
        match result {
            Ok(detail) if !over => println!("PASS {name} ({:.2}s / {limit}s): {detail}", elapsed.as_secs_f64()),
            Ok(detail) => {
                failed += 1;
                println!("FAIL {name} ({:.2}s exceeds {limit}s): {detail}", elapsed.as_secs_f64());
            }
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({:.2}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
