//! Oracle algorithms: Deutsch-Jozsa, Bernstein-Vazirani and Grover search.

use crate::circuit::{Circuit, CircuitElement};
use crate::error::{Error, Result};
use crate::gates::{cx, h, x, z, GateDef};

/// Oracle functions `f: {0,1}^n -> {0,1}` for Deutsch-Jozsa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DjOracle {
    ConstantZero,
    ConstantOne,
    /// `f(x) = x·s mod 2` for a nonzero mask `s`; character `i` is input `i`.
    Balanced(String),
}

impl DjOracle {
    /// The balanced representative `s = 10…0`.
    pub fn default_balanced(n: usize) -> Self {
        DjOracle::Balanced(format!("1{}", "0".repeat(n.saturating_sub(1))))
    }
}

fn check_mask(mask: &str, n: usize) -> Result<()> {
    if mask.len() != n || !mask.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Domain(format!("mask '{mask}' is not a {n}-bit string")));
    }
    if !mask.contains('1') {
        return Err(Error::Domain("a balanced mask needs at least one 1".into()));
    }
    Ok(())
}

/// Deutsch-Jozsa on `n` inputs. Wire 0 is the ancilla and wires `1..=n` the
/// inputs, so the measured input register reads as `n` bits.
pub fn dj_with_oracle(n: usize, oracle: &DjOracle) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("Deutsch-Jozsa needs at least one input".into()));
    }
    let mut c = Circuit::new(n + 1, 0)?;
    c.append(x(0))?.append(h(0))?;
    for q in 1..=n {
        c.append(h(q))?;
    }
    match oracle {
        DjOracle::ConstantZero => {}
        DjOracle::ConstantOne => {
            c.append(x(0))?;
        }
        DjOracle::Balanced(mask) => {
            check_mask(mask, n)?;
            for (i, b) in mask.chars().enumerate() {
                if b == '1' {
                    c.append(cx(i + 1, 0))?;
                }
            }
        }
    }
    for q in 1..=n {
        c.append(h(q))?;
    }
    let inputs: Vec<usize> = (1..=n).collect();
    c.append(CircuitElement::measure(&inputs, None)?)?;
    Ok(c)
}

/// Deutsch-Jozsa with the constant-zero oracle or the `10…0` balanced one.
pub fn deutsch_jozsa(n: usize, is_constant: bool) -> Result<Circuit> {
    let oracle = if is_constant {
        DjOracle::ConstantZero
    } else {
        DjOracle::default_balanced(n)
    };
    dj_with_oracle(n, &oracle)
}

/// Bernstein-Vazirani for `secret`: inputs on wires `0..n`, the ancilla on
/// wire `n` prepared in `|−⟩` by `H` then `Z`.
pub fn bernstein_vazirani(secret: &str) -> Result<Circuit> {
    let n = secret.len();
    if n == 0 || !secret.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Domain(format!("secret '{secret}' is not a non-empty bitstring")));
    }
    let mut c = Circuit::new(n + 1, 0)?;
    for q in 0..=n {
        c.append(h(q))?;
    }
    c.append(z(n))?;
    for (i, b) in secret.chars().enumerate() {
        if b == '1' {
            c.append(cx(i, n))?;
        }
    }
    for q in 0..n {
        c.append(h(q))?;
    }
    let inputs: Vec<usize> = (0..n).collect();
    c.append(CircuitElement::measure(&inputs, None)?)?;
    Ok(c)
}

/// Largest register Grover's multi-controlled reflections are built for.
const GROVER_MAX_QUBITS: usize = 10;

/// Phase flip on `|target⟩` over all `n` wires: X-conjugated multi-controlled Z.
fn reflect_about(c: &mut Circuit, n: usize, target: usize) -> Result<()> {
    let zeros: Vec<usize> = (0..n).filter(|&q| (target >> (n - 1 - q)) & 1 == 0).collect();
    for &q in &zeros {
        c.append(x(q))?;
    }
    let controls: Vec<usize> = (0..n - 1).collect();
    c.append(GateDef::controlled(&z(n - 1), &controls)?)?;
    for &q in &zeros {
        c.append(x(q))?;
    }
    Ok(())
}

/// Grover search for `marked` among `2^n` items with `iterations` rounds of
/// oracle plus diffusion, then a measurement of every qubit.
pub fn grover(n: usize, marked: usize, iterations: usize) -> Result<Circuit> {
    if n == 0 || n > GROVER_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: n,
            limit: GROVER_MAX_QUBITS,
            what: "Grover search",
        });
    }
    if marked >= 1 << n {
        return Err(Error::Domain(format!("marked index {marked} outside 0..{}", 1usize << n)));
    }
    let mut c = Circuit::new(n, 0)?;
    for q in 0..n {
        c.append(h(q))?;
    }
    for _ in 0..iterations {
        reflect_about(&mut c, n, marked)?;
        for q in 0..n {
            c.append(h(q))?;
        }
        reflect_about(&mut c, n, 0)?;
        for q in 0..n {
            c.append(h(q))?;
        }
    }
    c.append(CircuitElement::measure_all(n))?;
    Ok(c)
}

/// `sin²((2k+1)θ)` with `sin θ = 2^{-n/2}`.
pub fn grover_success_probability(n: usize, iterations: usize) -> f64 {
    let theta = (0.5f64.powf(n as f64 / 2.0)).asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::outcome_probabilities;

    #[test]
    fn dj_single_input_balanced() {
        let d = outcome_probabilities(&deutsch_jozsa(1, false).unwrap()).unwrap();
        assert!((d["1"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dj_constant_one() {
        let c = dj_with_oracle(3, &DjOracle::ConstantOne).unwrap();
        let d = outcome_probabilities(&c).unwrap();
        assert!((d["000"] - 1.0).abs() < 1e-12);
        assert!(dj_with_oracle(3, &DjOracle::Balanced("000".into())).is_err());
    }

    #[test]
    fn bv_paper_secret() {
        let d = outcome_probabilities(&bernstein_vazirani("10").unwrap()).unwrap();
        assert!((d["10"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grover_four_items_exact() {
        let d = outcome_probabilities(&grover(2, 2, 1).unwrap()).unwrap();
        assert!((d["10"] - 1.0).abs() < 1e-10);
        assert!((grover_success_probability(2, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grover_domain() {
        assert!(grover(3, 8, 1).is_err());
        assert!(grover(11, 0, 1).is_err());
    }
}
