//! Order finding and factoring at desk scale (`N ≤ 15`), with modular
//! multiplication as explicit permutation matrices.

use rand::Rng;

use crate::circuit::{Circuit, CircuitElement};
use crate::engine::run;
use crate::error::{Error, Result};
use crate::gates::{h, x, GateDef};
use crate::matrix::{Matrix, ONE};

use super::fourier::iqft;
use crate::backend::shot_rng;

/// Largest modulus handled by [`shor_order_finding`].
const MAX_MODULUS: u64 = 15;

/// Result of one order-finding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShorOutcome {
    /// Order `r` found and `N = p·q` recovered from `gcd(a^{r/2} ± 1, N)`.
    Factors { order: u64, factors: (u64, u64), phase: (u64, u64) },
    /// `gcd(a, N) > 1`, so `a` already shares a factor with `N`.
    TrivialFactor { factors: (u64, u64) },
    /// The draw was unusable; another attempt is needed.
    Retry { reason: String, order: Option<u64> },
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut result = 1 % modulus;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    result
}

fn register_bits(n: u64) -> usize {
    (64 - (n - 1).leading_zeros()) as usize
}

/// `|y⟩ -> |a·y mod N⟩` for `y < N`, identity on `y ≥ N`, on `wires`.
pub fn multiplier_gate(a: u64, n: u64, wires: &[usize]) -> Result<GateDef> {
    let dim = 1usize << wires.len();
    if (n as usize) > dim || gcd(a, n) != 1 {
        return Err(Error::Domain(format!("multiplication by {a} mod {n} is not a permutation on {} qubit(s)", wires.len())));
    }
    let mut m = Matrix::zeros(dim);
    for y in 0..dim {
        let image = if (y as u64) < n { (a * y as u64 % n) as usize } else { y };
        m.set(image, y, ONE);
    }
    GateDef::arbitrary(format!("x{a}mod{n}"), m, wires)
}

/// Smallest convergent denominator `q < N` of `numer/denom` with `a^q ≡ 1`,
/// trying small multiples of each denominator.
pub fn continued_fraction_order(numer: u64, denom: u64, a: u64, n: u64) -> Option<u64> {
    let (mut p, mut q) = (numer, denom);
    let (mut k_prev, mut k) = (0u64, 1u64);
    while q != 0 {
        let coeff = p / q;
        (p, q) = (q, p % q);
        (k_prev, k) = (k, coeff * k + k_prev);
        if k >= n {
            break;
        }
        if k == 0 {
            continue;
        }
        let mut r = k;
        while r < n {
            if mod_pow(a, r, n) == 1 {
                return Some(r);
            }
            r += k;
        }
    }
    None
}

/// Order-finding circuit: `2L` counting qubits on wires `0..2L`, an `L`-qubit
/// work register initialised to `|1⟩`, and a measured counting register.
pub fn order_finding_circuit(a: u64, n: u64) -> Result<Circuit> {
    let l = register_bits(n);
    let t = 2 * l;
    let work: Vec<usize> = (t..t + l).collect();
    let mut c = Circuit::new(t + l, 0)?;
    c.append(x(t + l - 1))?;
    for q in 0..t {
        c.append(h(q))?;
    }
    for j in 0..t {
        let power = mod_pow(a, 1u64 << (t - 1 - j), n);
        let step = multiplier_gate(power, n, &work)?;
        c.append(GateDef::controlled(&step, &[j])?)?;
    }
    c.extend(&iqft(t)?)?;
    let counting: Vec<usize> = (0..t).collect();
    c.append(CircuitElement::measure(&counting, None)?)?;
    Ok(c)
}

/// One attempt at finding the order of `a` modulo `n` and splitting `n`.
pub fn shor_order_finding<R: Rng + ?Sized>(a: u64, n: u64, rng: &mut R) -> Result<ShorOutcome> {
    if !(3..=MAX_MODULUS).contains(&n) {
        return Err(Error::Domain(format!("modulus {n} outside 3..={MAX_MODULUS}")));
    }
    if !(2..n).contains(&a) {
        return Err(Error::Domain(format!("base {a} outside 2..{n}")));
    }
    let g = gcd(a, n);
    if g != 1 {
        return Ok(ShorOutcome::TrivialFactor { factors: sorted(g, n / g) });
    }
    let circuit = order_finding_circuit(a, n)?;
    let t = 2 * register_bits(n);
    let outcome = run(&circuit, rng)?;
    let m = outcome.measured_index.unwrap_or(0) as u64;
    if m == 0 {
        return Ok(ShorOutcome::Retry {
            reason: "measured phase 0".into(),
            order: None,
        });
    }
    let Some(r) = continued_fraction_order(m, 1 << t, a, n) else {
        return Ok(ShorOutcome::Retry {
            reason: format!("no order recovered from phase {m}/{}", 1u64 << t),
            order: None,
        });
    };
    if r % 2 == 1 {
        return Ok(ShorOutcome::Retry {
            reason: format!("order {r} is odd"),
            order: Some(r),
        });
    }
    let half = mod_pow(a, r / 2, n);
    if half == n - 1 {
        return Ok(ShorOutcome::Retry {
            reason: format!("{a}^{} ≡ -1 mod {n}", r / 2),
            order: Some(r),
        });
    }
    let p = gcd(half + 1, n);
    let q = gcd(half + n - 1, n);
    let f = if p != 1 && p != n { p } else { q };
    if f == 1 || f == n {
        return Ok(ShorOutcome::Retry {
            reason: format!("order {r} gave only trivial factors"),
            order: Some(r),
        });
    }
    Ok(ShorOutcome::Factors {
        order: r,
        factors: sorted(f, n / f),
        phase: (m, 1 << t),
    })
}

fn sorted(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

/// Repeats [`shor_order_finding`] with attempt `i` drawing from stream `i` of
/// `seed`, until factors are found or `attempts` run out. Returns every
/// attempt's outcome.
pub fn factor(a: u64, n: u64, attempts: usize, seed: u64) -> Result<Vec<ShorOutcome>> {
    let mut log = Vec::new();
    for i in 0..attempts {
        let out = shor_order_finding(a, n, &mut shot_rng(seed, i))?;
        let done = !matches!(out, ShorOutcome::Retry { .. });
        log.push(out);
        if done {
            break;
        }
    }
    Ok(log)
}
