mod common;

use common::*;
use proptest::prelude::*;
use qwire::algorithms::{
    bernstein_vazirani, continued_fraction_order, cut_value, grover, grover_success_probability, iqft, mod_pow,
    multiplier_gate, nelder_mead, qaoa_problem, qft, qpe, shor_order_finding, energy, Method, OptimizerConfig,
    ShorOutcome,
};
use qwire::backend::shot_rng;
use qwire::engine::outcome_probabilities;
use qwire::gates::{p, rz};
use qwire::qstate::{basis_state, index_to_bitstring};

#[test]
fn bv_secret_from_worked_example() {
    let probs = outcome_probabilities(&bernstein_vazirani("10").unwrap()).unwrap();
    assert!((probs["10"] - 1.0).abs() < 1e-12);
}

#[test]
fn qft_inverse_is_adjoint_dft() {
    for n in 1..=5 {
        let u = to_na(&qft(n).unwrap().unitary().unwrap());
        assert!(max_abs(&(&u - dft(n))) < 1e-10);
        let v = to_na(&iqft(n).unwrap().unitary().unwrap());
        assert!(max_abs(&(v - dft(n).adjoint())) < 1e-10);
    }
}

#[test]
fn qpe_reads_exact_phases() {
    for (t, k) in [(3usize, 1usize), (4, 5), (5, 13)] {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / (1usize << t) as f64;
        let c = qpe(&p(phi, 0), &basis_state(1, 1).unwrap(), t).unwrap();
        let probs = outcome_probabilities(&c).unwrap();
        assert!((probs[&index_to_bitstring(k, t)] - 1.0).abs() < 1e-10, "t={t} k={k}");
    }
    let c = qpe(&rz(0.5, 0), &basis_state(1, 0).unwrap(), 3).unwrap();
    let total: f64 = outcome_probabilities(&c).unwrap().values().sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn grover_tracks_analytic_curve() {
    for n in 2..=5 {
        for k in 0..=4 {
            let probs = outcome_probabilities(&grover(n, 1, k).unwrap()).unwrap();
            let got = probs.get(&index_to_bitstring(1, n)).copied().unwrap_or(0.0);
            let theta = (1.0 / ((1usize << n) as f64).sqrt()).asin();
            let want = ((2 * k + 1) as f64 * theta).sin().powi(2);
            assert!((got - want).abs() < 1e-10, "n={n} k={k}: {got} vs {want}");
            assert!((grover_success_probability(n, k) - want).abs() < 1e-12);
        }
    }
    assert!(grover(11, 0, 1).is_err());
    assert!(grover(3, 8, 1).is_err());
}

#[test]
fn multiplier_is_modular_permutation() {
    for a in [2u64, 4, 7, 8, 11, 13] {
        let g = multiplier_gate(a, 15, &[0, 1, 2, 3]).unwrap();
        let m = to_na(g.matrix());
        for y in 0..15u64 {
            let out = (a * y) % 15;
            assert!((m[(out as usize, y as usize)] - c64(1.0, 0.0)).norm() < 1e-15, "a={a} y={y}");
        }
        assert!((m[(15, 15)] - c64(1.0, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn continued_fractions_recover_orders() {
    assert_eq!(mod_pow(7, 4, 15), 1);
    assert_eq!(continued_fraction_order(64, 256, 7, 15), Some(4));
    assert_eq!(continued_fraction_order(192, 256, 7, 15), Some(4));
    assert_eq!(continued_fraction_order(128, 256, 7, 15), Some(4));
    assert_eq!(continued_fraction_order(0, 256, 7, 15), None);
}

#[test]
fn shor_attempts_for_every_coprime_base() {
    for a in [2u64, 7, 8, 11, 13] {
        let mut found = false;
        for attempt in 0..12 {
            if let ShorOutcome::Factors { factors, .. } = shor_order_finding(a, 15, &mut shot_rng(3, attempt)).unwrap() {
                let mut f = [factors.0, factors.1];
                f.sort();
                assert_eq!(f, [3, 5]);
                found = true;
                break;
            }
        }
        assert!(found, "a={a}");
    }
    assert!(matches!(
        shor_order_finding(6, 15, &mut shot_rng(0, 0)).unwrap(),
        ShorOutcome::TrivialFactor { .. }
    ));
}

#[test]
fn qaoa_energy_is_negative_expected_cut() {
    let edges = [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 0.5), (2, 3, 1.5)];
    let (ansatz, h) = qaoa_problem(&edges, 1).unwrap();
    let x = [0.7, 0.4];
    let c = ansatz.circuit(&x).unwrap();
    let probs = outcome_probabilities(&c).unwrap();
    let expected: f64 = probs.iter().map(|(b, p)| p * cut_value(&edges, b)).sum();
    assert!((energy(&ansatz, &x, &h).unwrap() + expected).abs() < 1e-10);
    assert_eq!(brute_force_maxcut(&edges), 4.5);
}

#[test]
fn nelder_mead_finds_quadratic_minimum() {
    let cfg = OptimizerConfig { method: Method::NelderMead, max_iters: 500, tol: 1e-10, ..Default::default() };
    let f = |x: &[f64]| Ok((x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2));
    let m = nelder_mead(f, &[0.0, 0.0], &cfg).unwrap();
    assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] + 0.5).abs() < 1e-4);
    assert!(m.trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bv_recovers_any_secret(bits in proptest::collection::vec(any::<bool>(), 1..=8)) {
        let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let probs = outcome_probabilities(&bernstein_vazirani(&s).unwrap()).unwrap();
        prop_assert!((probs[&s] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cut_value_symmetric_under_complement(mask in 0usize..16) {
        let edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 0.5)];
        let s = index_to_bitstring(mask, 4);
        let flipped: String = s.chars().map(|c| if c == '0' { '1' } else { '0' }).collect();
        prop_assert_eq!(cut_value(&edges, &s), cut_value(&edges, &flipped));
        prop_assert!(cut_value(&edges, &s) <= brute_force_maxcut(&edges));
    }
}
