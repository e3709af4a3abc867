//! Path-mass statistics on a fixed realization.
//!
//! The mass of a path `x_0 … x_t` is `Π 1/D⁺_{x_i}` over its non-terminal
//! vertices. `Q_{x,t}(θ)` is the probability that the walk's own length-`t`
//! path has mass strictly above `θ`. Masses are accumulated as products in
//! the same order everywhere, so Monte Carlo and exact evaluation agree on
//! ties.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::g9;
use crate::graphgen::Digraph;
use crate::par;
use crate::rng::{self, Domain};
use crate::stats::Estimate;
use crate::structures::{MassTree, NicePathParams};

/// Default node-visit budget of [`exact_q`].
pub const EXACT_BUDGET: u64 = 100_000_000;
/// Largest graph / path length accepted by the nice-path enumeration oracle.
pub const ENUM_MAX_N: usize = 16;
pub const ENUM_MAX_T: usize = 8;

const BATCH: u64 = 1 << 12;

#[derive(Debug, Error)]
pub enum QuenchedError {
    #[error("walk reached vertex {0}, which has no out-edges")]
    Sink(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("theta must be positive, got {0}")]
    BadTheta(f64),
    #[error("exact evaluation visited more than {0} nodes; use the Monte Carlo estimator")]
    Budget(u64),
    #[error("trace has {got} steps, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("mass tree is rooted at {tree_root} (s = {tree_s}) but the trace starts at {start} (s = {s})")]
    TreeMismatch { tree_root: usize, tree_s: usize, start: usize, s: usize },
    #[error("path enumeration limited to n ≤ {ENUM_MAX_N}, t ≤ {ENUM_MAX_T}")]
    TooLarge,
}

/// One quenched trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub vertices: Vec<u32>,
    /// `−Σ ln D⁺` over the non-terminal vertices.
    pub log_mass: f64,
    pub seed: u64,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }

    /// Consecutive vertices are joined by edges and `log_mass` matches the
    /// degrees along the path.
    pub fn is_consistent(&self, g: &Digraph) -> bool {
        let edges = self.vertices.windows(2).all(|w| g.has_edge(w[0] as usize, w[1] as usize));
        let lm: f64 = self.vertices[..self.len()].iter().map(|&v| -(g.out_degree(v as usize) as f64).ln()).sum();
        edges && (lm - self.log_mass).abs() <= 1e-12 * (1.0 + lm.abs())
    }
}

fn check_vertex(g: &Digraph, x: usize) -> Result<(), QuenchedError> {
    if x >= g.n() {
        return Err(QuenchedError::VertexOutOfRange { vertex: x, n: g.n() });
    }
    Ok(())
}

#[inline]
fn step<R: Rng + ?Sized>(g: &Digraph, v: usize, rng: &mut R) -> Result<usize, QuenchedError> {
    let row = g.out(v);
    if row.is_empty() {
        return Err(QuenchedError::Sink(v));
    }
    Ok(row[rng.random_range(0..row.len())] as usize)
}

/// Walks `t` steps from `x` and returns the final vertex with the path mass.
fn walk_mass<R: Rng + ?Sized>(g: &Digraph, x: usize, t: usize, rng: &mut R) -> Result<(usize, f64), QuenchedError> {
    let mut v = x;
    let mut mass = 1.0;
    for _ in 0..t {
        mass /= g.out_degree(v) as f64;
        v = step(g, v, rng)?;
    }
    Ok((v, mass))
}

/// One trajectory drawn with the supplied generator.
pub fn simulate_trace_with<R: Rng + ?Sized>(g: &Digraph, x: usize, t: usize, rng: &mut R) -> Result<WalkTrace, QuenchedError> {
    check_vertex(g, x)?;
    let mut vertices = Vec::with_capacity(t + 1);
    vertices.push(x as u32);
    let mut log_mass = 0.0;
    let mut v = x;
    for _ in 0..t {
        log_mass -= (g.out_degree(v) as f64).ln();
        v = step(g, v, rng)?;
        vertices.push(v as u32);
    }
    Ok(WalkTrace { vertices, log_mass, seed: 0 })
}

/// One trajectory on the stream identified by `seed`.
pub fn simulate_trace(g: &Digraph, x: usize, t: usize, seed: u64) -> Result<WalkTrace, QuenchedError> {
    let mut r = rng::stream(seed, Domain::Trace, 0);
    let mut tr = simulate_trace_with(g, x, t, &mut r)?;
    tr.seed = seed;
    Ok(tr)
}

fn check_theta(theta: f64) -> Result<(), QuenchedError> {
    if !(theta > 0.0) {
        return Err(QuenchedError::BadTheta(theta));
    }
    Ok(())
}

/// Runs `samples` walks of `ell + t` steps from `x` and counts those whose
/// last `t` steps carry mass `> θ`. Batches use streams keyed by `(x, b)`,
/// so the same seed replays the same walks for any `θ`.
fn count_heavy(g: &Digraph, x: usize, t: usize, theta: f64, ell: usize, samples: u64, seed: u64) -> Result<Estimate, QuenchedError> {
    check_vertex(g, x)?;
    check_theta(theta)?;
    let base = rng::derive_seed(seed, Domain::Trace, x as u64);
    let parts = par::map_slice(&par::batches(samples, BATCH), |&(b, len)| -> Result<u64, QuenchedError> {
        let mut r = rng::stream(base, Domain::Trace, b);
        let mut hits = 0;
        for _ in 0..len {
            let (y, _) = walk_mass(g, x, ell, &mut r)?;
            let (_, m) = walk_mass(g, y, t, &mut r)?;
            hits += u64::from(m > theta);
        }
        Ok(hits)
    });
    let hits = parts.into_iter().sum::<Result<u64, _>>()?;
    Ok(Estimate::wilson(hits, samples))
}

/// Monte Carlo `Q_{x,t}(θ)` with a Wilson interval.
pub fn estimate_q(g: &Digraph, x: usize, t: usize, theta: f64, samples: u64, seed: u64) -> Result<Estimate, QuenchedError> {
    count_heavy(g, x, t, theta, 0, samples, seed)
}

/// `Σ_y P^ℓ(x,y) Q_{y,t}(θ)`: `ℓ` unrecorded steps, then `t` recorded ones.
pub fn estimate_q_bar(g: &Digraph, x: usize, t: usize, theta: f64, ell: usize, samples: u64, seed: u64) -> Result<Estimate, QuenchedError> {
    count_heavy(g, x, t, theta, ell, samples, seed)
}

/// Exact `Q_{x,t}(θ)` by depth-first enumeration. Prefix masses only
/// shrink, so a prefix of mass `≤ θ` can be dropped with its subtree.
pub fn exact_q(g: &Digraph, x: usize, t: usize, theta: f64) -> Result<f64, QuenchedError> {
    exact_q_with_budget(g, x, t, theta, EXACT_BUDGET).map(|(q, _)| q)
}

/// As [`exact_q`], also returning the number of nodes visited.
pub fn exact_q_with_budget(g: &Digraph, x: usize, t: usize, theta: f64, budget: u64) -> Result<(f64, u64), QuenchedError> {
    check_vertex(g, x)?;
    check_theta(theta)?;
    if theta >= 1.0 {
        return Ok((0.0, 0));
    }
    let mut total = 0.0;
    let mut visited = 0u64;
    let mut stack = vec![(x, 0usize, 1.0f64)];
    while let Some((v, depth, mass)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(QuenchedError::Budget(budget));
        }
        if depth == t {
            total += mass;
            continue;
        }
        let row = g.out(v);
        if row.is_empty() {
            return Err(QuenchedError::Sink(v));
        }
        let m = mass / row.len() as f64;
        if m > theta {
            // Reverse so that the pop order follows the adjacency order.
            stack.extend(row.iter().rev().map(|&w| (w as usize, depth + 1, m)));
        }
    }
    // Rounding can push a full sum a hair above 1.
    Ok((total.min(1.0), visited))
}

/// Every length-`t` path from `x` with its mass, in lexicographic order.
pub fn enumerate_paths(g: &Digraph, x: usize, t: usize, limit: usize) -> Result<Vec<(Vec<u32>, f64)>, QuenchedError> {
    check_vertex(g, x)?;
    let mut out = Vec::new();
    let mut stack = vec![(vec![x as u32], 1.0f64)];
    while let Some((path, mass)) = stack.pop() {
        if path.len() == t + 1 {
            out.push((path, mass));
            if out.len() > limit {
                return Err(QuenchedError::Budget(limit as u64));
            }
            continue;
        }
        let v = *path.last().unwrap() as usize;
        let row = g.out(v);
        if row.is_empty() {
            return Err(QuenchedError::Sink(v));
        }
        let m = mass / row.len() as f64;
        for &w in row.iter().rev() {
            let mut p = path.clone();
            p.push(w);
            stack.push((p, m));
        }
    }
    Ok(out)
}

/// The four conditions of a nice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NicePathVerdict {
    /// Mass at most `1/(n ln³ n)`.
    pub i: bool,
    /// The first `s` steps are edges of the mass tree.
    pub ii: bool,
    /// The last `h_ε` steps form the only path of length `≤ h_ε` from
    /// `x_{t−h_ε}` to the endpoint.
    pub iii: bool,
    /// `D⁺_{x_s} ≤ C ln n`.
    pub iv: bool,
    pub nice: bool,
}

impl NicePathVerdict {
    pub fn new(i: bool, ii: bool, iii: bool, iv: bool) -> Self {
        NicePathVerdict { i, ii, iii, iv, nice: i && ii && iii && iv }
    }
}

/// Number of walks of length `0..=h` from `u` to `y`, saturated at 2.
/// Works backwards from `y` along in-edges.
pub fn short_path_count(g: &Digraph, u: usize, y: usize, h: usize) -> u8 {
    let mut level: Vec<(u32, u8)> = vec![(y as u32, 1)];
    let mut found = u8::from(u == y);
    let mut acc: std::collections::HashMap<u32, u8> = std::collections::HashMap::new();
    for _ in 0..h {
        if found >= 2 {
            break;
        }
        acc.clear();
        for &(w, c) in &level {
            for &v in g.inn(w as usize) {
                let e = acc.entry(v).or_insert(0);
                *e = (*e + c).min(2);
            }
        }
        level = acc.iter().map(|(&v, &c)| (v, c)).collect();
        if let Some(&c) = acc.get(&(u as u32)) {
            found = (found + c).min(2);
        }
    }
    found
}

/// Checks a trace of length `params.t` against the nice-path conditions.
pub fn classify_trace(g: &Digraph, trace: &WalkTrace, params: &NicePathParams, tree: &MassTree) -> Result<NicePathVerdict, QuenchedError> {
    if trace.len() != params.t {
        return Err(QuenchedError::LengthMismatch { expected: params.t, got: trace.len() });
    }
    let v = &trace.vertices;
    if tree.root != v[0] as usize || tree.s != params.s {
        return Err(QuenchedError::TreeMismatch { tree_root: tree.root, tree_s: tree.s, start: v[0] as usize, s: params.s });
    }
    let i = trace.log_mass <= params.mass_cap.ln();
    let ii = (0..params.s).all(|k| tree.is_tree_edge(v[k] as usize, v[k + 1] as usize));
    let u = v[params.t - params.h_eps] as usize;
    let iii = short_path_count(g, u, v[params.t] as usize, params.h_eps) == 1;
    let iv = g.out_degree(v[params.s] as usize) as f64 <= params.c_degree * (g.n() as f64).ln();
    Ok(NicePathVerdict::new(i, ii, iii, iv))
}

/// Monte Carlo `q̃(x)`: the probability that the length-`t` trace from `x`
/// is not nice.
pub fn nice_mass_deficit(g: &Digraph, x: usize, params: &NicePathParams, tree: &MassTree, samples: u64, seed: u64) -> Result<Estimate, QuenchedError> {
    check_vertex(g, x)?;
    let base = rng::derive_seed(seed, Domain::Trace, x as u64);
    let parts = par::map_slice(&par::batches(samples, BATCH), |&(b, len)| -> Result<u64, QuenchedError> {
        let mut r = rng::stream(base, Domain::Trace, b);
        let mut bad = 0;
        for _ in 0..len {
            let tr = simulate_trace_with(g, x, params.t, &mut r)?;
            bad += u64::from(!classify_trace(g, &tr, params, tree)?.nice);
        }
        Ok(bad)
    });
    let bad = parts.into_iter().sum::<Result<u64, _>>()?;
    Ok(Estimate::wilson(bad, samples))
}

/// Exact `q̃(x)` by enumerating every length-`t` path (tiny graphs only).
pub fn nice_mass_deficit_exact(g: &Digraph, x: usize, params: &NicePathParams, tree: &MassTree) -> Result<f64, QuenchedError> {
    if g.n() > ENUM_MAX_N || params.t > ENUM_MAX_T {
        return Err(QuenchedError::TooLarge);
    }
    let mut nice = 0.0;
    for (vertices, mass) in enumerate_paths(g, x, params.t, usize::MAX)? {
        let log_mass = vertices[..params.t].iter().map(|&v| -(g.out_degree(v as usize) as f64).ln()).sum();
        let tr = WalkTrace { vertices, log_mass, seed: 0 };
        if classify_trace(g, &tr, params, tree)?.nice {
            nice += mass;
        }
    }
    Ok(1.0 - nice)
}

pub const Q_CSV_HEADER: &str = "x,t,theta,estimate,ci_lo,ci_hi,method,samples";

/// One row of a Q-experiment table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QRow {
    pub x: usize,
    pub t: usize,
    pub theta: f64,
    pub estimate: Estimate,
    pub exact: bool,
}

impl QRow {
    pub fn csv_line(&self) -> String {
        let mut s = String::new();
        let method = if self.exact { "exact" } else { "monte_carlo" };
        let e = &self.estimate;
        let _ = write!(s, "{},{},{},{},{},{},{},{}", self.x, self.t, g9(self.theta), g9(e.value), g9(e.ci_lo), g9(e.ci_hi), method, e.samples);
        s
    }
}

pub fn q_csv(rows: &[QRow]) -> String {
    let mut s = format!("{Q_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}
