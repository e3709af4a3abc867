//! The simple random walk: distributions after `t` steps, the stationary
//! measure, total variation and mixing curves.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::g9;
use crate::graphgen::{strongly_connected, Digraph};
use crate::par;

/// Largest `n` for the dense stationary solver.
pub const DIRECT_MAX_N: usize = 2000;

/// Below this size a step runs sequentially; results are identical.
const PAR_MIN_N: usize = 4096;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("vertex {0} has no out-edges but carries mass")]
    Sink(usize),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is not strongly connected ({0} components)")]
    NotStronglyConnected(usize),
    #[error("power iteration did not converge in {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("dense solver is limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("linear system is singular (pivot {0:e})")]
    Singular(f64),
    #[error("not a probability vector: {0}")]
    NotProbability(String),
}

/// A distribution over `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self, WalkError> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(WalkError::NotProbability(format!("entry {i} = {v}")));
        }
        let s: f64 = values.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(WalkError::NotProbability(format!("sum = {s}")));
        }
        Ok(ProbVector(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        ProbVector(values)
    }

    pub fn delta(n: usize, x: usize) -> Self {
        let mut v = vec![0.0; n];
        v[x] = 1.0;
        ProbVector(v)
    }

    pub fn uniform(n: usize) -> Self {
        ProbVector(vec![1.0 / n as f64; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sum_squares(&self) -> f64 {
        self.0.iter().map(|p| p * p).sum()
    }

    /// Total mass of the `k` heaviest entries.
    pub fn top_mass(&self, k: usize) -> f64 {
        let mut v = self.0.clone();
        let k = k.min(v.len());
        if k == 0 {
            return 0.0;
        }
        v.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        let mut top = v[..k].to_vec();
        top.sort_by(|a, b| b.total_cmp(a));
        top.iter().sum()
    }
}

/// The transition operator of a fixed graph, with cached `1/D⁺`.
pub struct Kernel<'g> {
    g: &'g Digraph,
    inv_deg: Vec<f64>,
}

impl<'g> Kernel<'g> {
    pub fn new(g: &'g Digraph) -> Self {
        let inv_deg = (0..g.n())
            .map(|x| match g.out_degree(x) {
                0 => 0.0,
                d => 1.0 / d as f64,
            })
            .collect();
        Kernel { g, inv_deg }
    }

    pub fn graph(&self) -> &'g Digraph {
        self.g
    }

    /// `μP`, computed by pulling along in-edges so each entry is a fixed-order
    /// sum regardless of the thread count.
    pub fn step(&self, mu: &[f64]) -> Result<Vec<f64>, WalkError> {
        let n = self.g.n();
        if mu.len() != n {
            return Err(WalkError::LengthMismatch(mu.len(), n));
        }
        if let Some(x) = (0..n).find(|&x| mu[x] > 0.0 && self.inv_deg[x] == 0.0) {
            return Err(WalkError::Sink(x));
        }
        let pull = |y: usize| self.g.inn(y).iter().map(|&x| mu[x as usize] * self.inv_deg[x as usize]).sum::<f64>();
        Ok(if n >= PAR_MIN_N { par::map_range(n, pull) } else { (0..n).map(pull).collect() })
    }

    pub fn steps(&self, mu: &[f64], t: usize) -> Result<Vec<f64>, WalkError> {
        let mut cur = mu.to_vec();
        for _ in 0..t {
            cur = self.step(&cur)?;
        }
        Ok(cur)
    }
}

pub fn step_distribution(g: &Digraph, mu: &ProbVector) -> Result<ProbVector, WalkError> {
    Kernel::new(g).step(mu.values()).map(ProbVector)
}

/// `P^t(x, ·)`.
pub fn t_step_distribution(g: &Digraph, x: usize, t: usize) -> Result<ProbVector, WalkError> {
    if x >= g.n() {
        return Err(WalkError::VertexOutOfRange { vertex: x, n: g.n() });
    }
    Kernel::new(g).steps(ProbVector::delta(g.n(), x).values(), t).map(ProbVector)
}

fn require_irreducible(g: &Digraph) -> Result<(), WalkError> {
    match strongly_connected(g) {
        (true, _) => Ok(()),
        (false, c) => Err(WalkError::NotStronglyConnected(c)),
    }
}

/// Power iteration from `init`, returning the average of two consecutive
/// iterates once its own one-step TV residual is at most `tol`. Averaging
/// neutralizes period-2 oscillation; longer periods fail to converge.
pub fn stationary_power(g: &Digraph, init: &ProbVector, tol: f64, max_iter: usize) -> Result<ProbVector, WalkError> {
    require_irreducible(g)?;
    let k = Kernel::new(g);
    let mut a = init.values().to_vec();
    let mut b = k.step(&a)?;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let c = k.step(&b)?;
        // With m = (a+b)/2, mP = (b+c)/2, so TV(mP, m) = ¼‖c − a‖₁.
        residual = 0.25 * a.iter().zip(&c).map(|(x, y)| (x - y).abs()).sum::<f64>();
        if residual <= tol {
            let mut m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let s: f64 = m.iter().sum();
            m.iter_mut().for_each(|v| *v /= s);
            return Ok(ProbVector(m));
        }
        a = b;
        b = c;
    }
    Err(WalkError::NoConvergence { iterations: max_iter, residual })
}

/// Solves `π(P − I) = 0`, `Σπ = 1` by dense Gaussian elimination with
/// partial pivoting.
pub fn stationary_direct(g: &Digraph) -> Result<ProbVector, WalkError> {
    let n = g.n();
    if n > DIRECT_MAX_N {
        return Err(WalkError::TooLarge { n, max: DIRECT_MAX_N });
    }
    require_irreducible(g)?;
    // Row y of A is the balance equation of y: Σ_x π_x P(x,y) − π_y = 0.
    let mut a = vec![0.0f64; n * n];
    for x in 0..n {
        let d = g.out_degree(x);
        if d == 0 {
            return Err(WalkError::Sink(x));
        }
        for &y in g.out(x) {
            a[y as usize * n + x] += 1.0 / d as f64;
        }
        a[x * n + x] -= 1.0;
    }
    // One balance equation is redundant; replace the last with normalization.
    a[(n - 1) * n..].iter_mut().for_each(|v| *v = 1.0);
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;

    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
        let pv = a[piv * n + col];
        if pv.abs() < 1e-13 {
            return Err(WalkError::Singular(pv));
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        let (upper, lower) = a.split_at_mut((col + 1) * n);
        let pivot_row = &upper[col * n..];
        for (r, row) in lower.chunks_exact_mut(n).enumerate() {
            let f = row[col] / pv;
            if f != 0.0 {
                for k in col..n {
                    row[k] -= f * pivot_row[k];
                }
                rhs[col + 1 + r] -= f * rhs[col];
            }
        }
    }
    let mut pi = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| a[i * n + k] * pi[k]).sum();
        pi[i] = (rhs[i] - s) / a[i * n + i];
    }
    // Round-off can leave entries a hair below zero.
    pi.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= s);
    Ok(ProbVector(pi))
}

pub fn tv(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn tv_distance(mu: &ProbVector, nu: &ProbVector) -> Result<f64, WalkError> {
    if mu.len() != nu.len() {
        return Err(WalkError::LengthMismatch(mu.len(), nu.len()));
    }
    Ok(tv(mu.values(), nu.values()).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixingTime {
    At(usize),
    Exceeded,
}

/// Least `1 ≤ t ≤ t_max` with `TV(P^t(x,·), π) ≤ eps`.
pub fn mixing_time(g: &Digraph, pi: &ProbVector, x: usize, eps: f64, t_max: usize) -> Result<MixingTime, WalkError> {
    if x >= g.n() {
        return Err(WalkError::VertexOutOfRange { vertex: x, n: g.n() });
    }
    let k = Kernel::new(g);
    let mut cur = ProbVector::delta(g.n(), x).into_vec();
    for t in 1..=t_max {
        cur = k.step(&cur)?;
        if tv(&cur, pi.values()) <= eps {
            return Ok(MixingTime::At(t));
        }
    }
    Ok(MixingTime::Exceeded)
}

/// TV to stationarity for `t = 0..=t_max` from each start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCurve {
    pub start_vertices: Vec<usize>,
    pub t_max: usize,
    /// One row per start, `t_max + 1` columns.
    pub tv: Vec<Vec<f64>>,
    pub t_ent_ref: f64,
}

impl MixingCurve {
    /// Rows are non-increasing up to `slack` of floating-point noise.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.tv.iter().all(|row| row.windows(2).all(|w| w[1] <= w[0] + slack))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("start,t,tv\n");
        for (x, row) in self.start_vertices.iter().zip(&self.tv) {
            for (t, v) in row.iter().enumerate() {
                let _ = writeln!(s, "{x},{t},{}", g9(*v));
            }
        }
        s
    }

    /// Mean over starts at time `t`.
    pub fn mean_at(&self, t: usize) -> f64 {
        self.tv.iter().map(|r| r[t]).sum::<f64>() / self.tv.len() as f64
    }
}

pub fn tv_curve(g: &Digraph, pi: &ProbVector, starts: &[usize], t_max: usize, t_ent_ref: f64) -> Result<MixingCurve, WalkError> {
    if let Some(&x) = starts.iter().find(|&&x| x >= g.n()) {
        return Err(WalkError::VertexOutOfRange { vertex: x, n: g.n() });
    }
    let k = Kernel::new(g);
    let rows = par::map_slice(starts, |&x| -> Result<Vec<f64>, WalkError> {
        let mut cur = ProbVector::delta(g.n(), x).into_vec();
        let mut row = vec![tv(&cur, pi.values())];
        for _ in 0..t_max {
            cur = k.step(&cur)?;
            row.push(tv(&cur, pi.values()));
        }
        Ok(row)
    });
    Ok(MixingCurve {
        start_vertices: starts.to_vec(),
        t_max,
        tv: rows.into_iter().collect::<Result<_, _>>()?,
        t_ent_ref,
    })
}

/// `μ_in P^h`.
pub fn pi_tilde(g: &Digraph, mu_in: &ProbVector, h: usize) -> Result<ProbVector, WalkError> {
    Kernel::new(g).steps(mu_in.values(), h).map(ProbVector)
}
