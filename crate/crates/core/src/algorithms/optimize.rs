//! Classical optimizers for the variational loop.

use std::f64::consts::PI;

use rand::Rng;

use crate::backend::shot_rng;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Gradient descent with parameter-shift gradients on every coordinate.
    #[default]
    GradientDescent,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Gradient-descent learning rate.
    pub step: f64,
    /// Initial Nelder-Mead simplex edge length.
    pub simplex_scale: f64,
    /// Stop once the objective changes by less than this between iterations.
    pub tol: f64,
    /// Seed for the random starting points.
    pub seed: u64,
    /// Independent starts; the best result is kept.
    pub restarts: usize,
    /// Continue with Nelder-Mead when gradient descent does not converge.
    pub fallback: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::GradientDescent,
            max_iters: 200,
            step: 0.1,
            simplex_scale: 0.5,
            tol: 1e-6,
            seed: 0,
            restarts: 1,
            fallback: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.restarts > 0
            && self.step > 0.0
            && self.simplex_scale > 0.0
            && self.tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("optimizer iterations, restarts, step sizes and tolerance must be positive".into()))
        }
    }

    /// Starting point of restart `k`: uniform in `[-π, π)` per coordinate.
    pub(crate) fn start(&self, k: usize, dim: usize) -> Vec<f64> {
        let mut rng = shot_rng(self.seed, k);
        (0..dim).map(|_| rng.random_range(-PI..PI)).collect()
    }
}

/// Outcome of a minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective value after each iteration, starting with the initial point.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

/// Fixed-step gradient descent.
pub fn gradient_descent<F, G>(mut f: F, mut grad: G, x0: &[f64], cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut value = f(&x)?;
    let mut evaluations = 1;
    let mut trace = vec![value];
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let g = grad(&x)?;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= cfg.step * gi;
        }
        let next = f(&x)?;
        evaluations += 1;
        trace.push(next);
        let delta = (next - value).abs();
        value = next;
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(Minimum {
        x,
        value,
        trace,
        converged,
        evaluations,
    })
}

/// Nelder-Mead simplex search with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evaluations)?));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += cfg.simplex_scale;
        let fv = eval(&v, &mut evaluations)?;
        simplex.push((v, fv));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);
    let mut trace = vec![simplex[0].1];
    let mut converged = false;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };
    for _ in 0..cfg.max_iters {
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < cfg.tol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = eval(&reflected, &mut evaluations)?;
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = eval(&expanded, &mut evaluations)?;
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let (toward, ft) = if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
            let contracted = lerp(&centroid, toward, 0.5);
            let fc = eval(&contracted, &mut evaluations)?;
            if fc < ft {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v = lerp(&best, &entry.0, 0.5);
                    let fv = eval(&v, &mut evaluations)?;
                    *entry = (v, fv);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].1);
    }
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        value,
        trace,
        converged,
        evaluations,
    })
}

/// Runs `cfg.method` from `x0`, falling back to Nelder-Mead from the best
/// point when gradient descent does not converge.
pub(crate) fn minimize<F, G>(mut f: F, grad: G, x0: &[f64], cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    match cfg.method {
        Method::NelderMead => nelder_mead(f, x0, cfg),
        Method::GradientDescent => {
            let gd = gradient_descent(&mut f, grad, x0, cfg)?;
            if gd.converged || !cfg.fallback {
                return Ok(gd);
            }
            let nm = nelder_mead(&mut f, &gd.x, cfg)?;
            let mut trace = gd.trace;
            trace.extend(nm.trace.into_iter().skip(1));
            Ok(Minimum {
                x: nm.x,
                value: nm.value,
                trace,
                converged: nm.converged,
                evaluations: gd.evaluations + nm.evaluations,
            })
        }
    }
}
