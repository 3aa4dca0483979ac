//! Brute-force oracle for the one-dimensional stochastic problem.
//!
//! Increments are `±σ` with equal probability, so the information structure
//! is a binary tree of depth `T`. Backward induction at every node minimizes
//! the current cost plus the expected continuation numerically; nothing here
//! relies on the coefficient recursion.

use crate::error::{Error, Result};

pub const MAX_TREE_HORIZON: usize = 8;
const GOLDEN_TOL: f64 = 1e-10;

/// `q(x) = c₂x² + c₁x + c₀`.
#[derive(Clone, Copy, Debug, Default)]
struct Quadratic {
    c2: f64,
    c1: f64,
    c0: f64,
}

impl Quadratic {
    fn eval(&self, x: f64) -> f64 {
        (self.c2 * x + self.c1) * x + self.c0
    }

    /// Interpolates the quadratic through three equally spaced samples.
    fn through(x0: f64, h: f64, y: [f64; 3]) -> Self {
        let c2_local = (y[0] - 2.0 * y[1] + y[2]) / (2.0 * h * h);
        let c1_local = (y[2] - y[0]) / (2.0 * h);
        // Local coordinate s = x - x0.
        Self {
            c2: c2_local,
            c1: c1_local - 2.0 * c2_local * x0,
            c0: y[1] - c1_local * x0 + c2_local * x0 * x0,
        }
    }

    fn average(a: &Self, b: &Self) -> Self {
        Self {
            c2: 0.5 * (a.c2 + b.c2),
            c1: 0.5 * (a.c1 + b.c1),
            c0: 0.5 * (a.c0 + b.c0),
        }
    }
}

/// Minimizes a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Expected cost of the online-optimal policy for `A = λ`, `±σ` increments
/// and horizon `T ≤ 8`, starting from `x₀ = v₀`.
pub fn scenario_tree_optimum(lambda: f64, sigma: f64, horizon: usize, x0: f64) -> Result<f64> {
    if horizon > MAX_TREE_HORIZON {
        return Err(Error::HorizonTooLarge(horizon));
    }
    if horizon == 0 || !(lambda > 0.0) || !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(
            "scenario tree needs T ≥ 1, λ > 0 and σ ≥ 0".into(),
        ));
    }
    let width = 10.0 * sigma * horizon as f64;
    // Value functions of the nodes one level below the current one, indexed
    // by path bits; a node's value is a function of the previous action.
    let mut below: Vec<Quadratic> = Vec::new();
    for depth in (1..=horizon).rev() {
        let mut level = Vec::with_capacity(1 << depth);
        for path in 0..(1usize << depth) {
            let v = x0 + sigma * path_sum(path, depth);
            let continuation = if depth == horizon {
                None
            } else {
                Some(Quadratic::average(&below[2 * path], &below[2 * path + 1]))
            };
            let objective = |x_prev: f64, x: f64| {
                0.5 * lambda * (x - v) * (x - v)
                    + 0.5 * (x - x_prev) * (x - x_prev)
                    + continuation.map_or(0.0, |q| q.eval(x))
            };
            let value = |x_prev: f64| {
                let lo = v.min(x_prev) - width - 1.0;
                let hi = v.max(x_prev) + width + 1.0;
                golden_section(|x| objective(x_prev, x), lo, hi, GOLDEN_TOL).1
            };
            let h = 1.0;
            level.push(Quadratic::through(v, h, [value(v - h), value(v), value(v + h)]));
        }
        below = level;
    }
    let root = Quadratic::average(&below[0], &below[1]);
    Ok(root.eval(x0))
}

/// `Σ ±1` along the path: bit `k` of `path` (from the top) set means `+`.
fn path_sum(path: usize, depth: usize) -> f64 {
    (0..depth)
        .map(|k| if path >> (depth - 1 - k) & 1 == 1 { 1.0 } else { -1.0 })
        .sum()
}

/// Exact expected cost of an interpolation policy with per-round
/// coefficients `rho[t-1]` on the same tree, by enumerating all `2ᵀ` paths.
pub fn tree_policy_cost(lambda: f64, sigma: f64, rho: &[f64], x0: f64) -> Result<f64> {
    let horizon = rho.len();
    if horizon > MAX_TREE_HORIZON {
        return Err(Error::HorizonTooLarge(horizon));
    }
    let mut total = 0.0;
    for path in 0..(1usize << horizon) {
        let (mut x, mut v, mut cost) = (x0, x0, 0.0);
        for (k, &c) in rho.iter().enumerate() {
            v += if path >> (horizon - 1 - k) & 1 == 1 { sigma } else { -sigma };
            let next = c * x + (1.0 - c) * v;
            cost += 0.5 * lambda * (next - v) * (next - v) + 0.5 * (next - x) * (next - x);
            x = next;
        }
        total += cost;
    }
    Ok(total / (1usize << horizon) as f64)
}
