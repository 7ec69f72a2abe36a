mod common;

use common::*;
use proptest::prelude::*;
use qwire::backend::{
    exact_density, export_histogram, format_histogram, parse_histogram_csv, simulate, trajectory_density,
    HistogramFormat, SimJob, SimMode,
};
use qwire::gates::{cx, h, ry};
use qwire::noise::{bit_flip, depolarizing, phase_flip};
use qwire::{Circuit, CircuitElement, Execution, NoiseChannel, NoiseKind};

fn listing5() -> Circuit {
    let mut c = Circuit::new(3, 0).unwrap();
    c.append(h(0)).unwrap().append(cx(0, 1)).unwrap().append(h(2)).unwrap();
    c.append(bit_flip(0.1, 0).unwrap()).unwrap();
    c.append(CircuitElement::measure(&[0, 1], None).unwrap()).unwrap();
    c
}

#[test]
fn listing5_counts_follow_bit_flip() {
    let r = simulate(&SimJob::new(listing5(), 20_000).seed(1)).unwrap();
    assert_eq!(r.labels, ["m0", "m1"]);
    assert_eq!(r.counts.values().sum::<u64>(), 20_000);
    let flipped = (r.counts.get("10").unwrap_or(&0) + r.counts.get("01").unwrap_or(&0)) as f64 / 20_000.0;
    assert!((flipped - 0.1).abs() < 0.01, "flip fraction {flipped}");
}

#[test]
fn density_mode_matches_trajectory_mode() {
    let c = listing5();
    let exact = simulate(&SimJob::new(c.clone(), 4000).mode(SimMode::Density).seed(2)).unwrap();
    let probs = exact.exact_probability.clone().unwrap();
    for (k, want) in [("00", 0.45), ("11", 0.45), ("10", 0.05), ("01", 0.05)] {
        assert!((probs[k] - want).abs() < 1e-12, "{k}: {}", probs[k]);
    }
    let traj = simulate(&SimJob::new(c, 40_000).seed(2)).unwrap();
    for (k, p) in &probs {
        assert!((traj.probability.get(k).unwrap_or(&0.0) - p).abs() < 0.01);
    }
    assert_eq!(exact.counts.values().sum::<u64>(), 4000);
}

#[test]
fn density_mode_rejects_wide_registers() {
    let c = Circuit::new(11, 0).unwrap();
    assert!(simulate(&SimJob::new(c, 10).mode(SimMode::Density)).is_err());
}

#[test]
fn invalid_jobs_rejected() {
    let c = listing5();
    assert!(simulate(&SimJob::new(c.clone(), 0)).is_err());
    assert!(simulate(&SimJob::new(c.clone(), 10).chunk_size(0)).is_err());
    assert!(simulate(&SimJob::new(c, 10).chunk_size(11)).is_err());
}

#[test]
fn unmeasured_circuit_measures_everything() {
    let mut c = Circuit::new(2, 0).unwrap();
    c.append(h(0)).unwrap();
    let r = simulate(&SimJob::new(c, 100).seed(3)).unwrap();
    assert_eq!(r.labels, ["m0", "m1"]);
    assert!(r.counts.keys().all(|k| k == "00" || k == "10"));
}

#[test]
fn exact_density_matches_kraus_oracle_on_entangled_state() {
    let mut c = Circuit::new(2, 0).unwrap();
    c.append(ry(0.8, 0)).unwrap().append(cx(0, 1)).unwrap();
    let psi = reference_state(&c);
    let mut rho = &psi * psi.adjoint();
    for (kind, p, wire) in [("depolarizing", 0.3, 1), ("phaseflip", 0.2, 0), ("bitflip", 0.4, 1)] {
        let ch = match kind {
            "bitflip" => bit_flip(p, wire),
            "phaseflip" => phase_flip(p, wire),
            _ => depolarizing(p, wire),
        }
        .unwrap();
        c.append(ch).unwrap();
        let ks: Vec<CM> = kraus_set(kind, p).iter().map(|k| embed(k, &[wire], 2)).collect();
        rho = apply_kraus(&rho, &ks);
    }
    let got = to_na(exact_density(&c).unwrap().matrix());
    assert!(max_abs(&(got - rho)) < 1e-12);
}

#[test]
fn multi_wire_channel_acts_independently() {
    let mut c = Circuit::new(2, 0).unwrap();
    c.append(h(0)).unwrap().append(h(1)).unwrap();
    c.append(NoiseChannel::on_wires(NoiseKind::PhaseFlip, 0.5, &[0, 1]).unwrap()).unwrap();
    let rho = exact_density(&c).unwrap();
    assert!((rho.purity() - 0.25).abs() < 1e-12);
}

#[test]
fn histogram_formats() {
    let r = simulate(&SimJob::new(listing5(), 500).seed(4)).unwrap();
    let csv = format_histogram(&r, HistogramFormat::Csv);
    assert_eq!(parse_histogram_csv(&csv).unwrap(), r.counts);
    let json: serde_json::Value = serde_json::from_str(&format_histogram(&r, HistogramFormat::Json)).unwrap();
    assert_eq!(json["shots"], 500);
    assert_eq!(json["counts"]["00"], r.counts["00"]);
    let text = format_histogram(&r, HistogramFormat::Text);
    assert_eq!(text.lines().count(), r.counts.len());
    assert!(text.contains('#'));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hist.csv");
    export_histogram(&r, HistogramFormat::Csv, &path).unwrap();
    assert_eq!(parse_histogram_csv(&std::fs::read_to_string(path).unwrap()).unwrap(), r.counts);
    assert!(parse_histogram_csv("nope\n").is_err());
}

#[test]
fn trajectory_density_converges() {
    let mut c = Circuit::new(1, 0).unwrap();
    c.append(h(0)).unwrap().append(depolarizing(0.5, 0).unwrap()).unwrap();
    let est = to_na(trajectory_density(&SimJob::new(c.clone(), 20_000).seed(5)).unwrap().matrix());
    let exact = to_na(exact_density(&c).unwrap().matrix());
    assert!(max_abs(&(est - exact)) < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chunking_does_not_change_records(shots in 1usize..300, chunk in 1usize..300, seed in any::<u64>()) {
        let chunk = chunk.min(shots);
        let c = listing5();
        let a = simulate(&SimJob::new(c.clone(), shots).seed(seed)).unwrap();
        let b = simulate(&SimJob::new(c.clone(), shots).seed(seed).chunk_size(chunk)).unwrap();
        let s = simulate(&SimJob::new(c, shots).seed(seed).chunk_size(chunk).execution(Execution::Serial)).unwrap();
        prop_assert_eq!(&a.per_shot, &b.per_shot);
        prop_assert_eq!(&a.per_shot, &s.per_shot);
    }

    #[test]
    fn shots_are_conserved(shots in 1usize..500, seed in any::<u64>(), density in any::<bool>()) {
        let mode = if density { SimMode::Density } else { SimMode::Trajectory };
        let r = simulate(&SimJob::new(listing5(), shots).seed(seed).mode(mode)).unwrap();
        prop_assert_eq!(r.per_shot.len(), shots);
        prop_assert_eq!(r.counts.values().sum::<u64>(), shots as u64);
        prop_assert!((r.probability.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn channels_are_trace_preserving(p in 0.0f64..=1.0, seed in any::<u64>()) {
        for kind in [NoiseKind::BitFlip, NoiseKind::PhaseFlip, NoiseKind::Depolarizing] {
            let mut c = random_circuit(&mut rng(seed), 2, 6);
            c.append(NoiseChannel::new(kind, p, 1).unwrap()).unwrap();
            let rho = exact_density(&c).unwrap();
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(rho.purity() <= 1.0 + 1e-12);
            let ch = NoiseChannel::new(kind, p, 0).unwrap();
            let comp = to_na(&ch.completeness());
            prop_assert!(max_abs(&(comp - identity(2))) < 1e-12);
        }
    }
}
