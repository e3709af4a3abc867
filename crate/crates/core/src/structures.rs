//! Local exploration structures: directed balls, tree excess, tree-like
//! roots, the greedy mass tree and the parameters of nice paths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::EntropicStats;
use crate::format::g9;
use crate::graphgen::Digraph;
use crate::par;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("h_eps = eps·ln n/(20 H) = {raw:.4} floors to 0; increase n or eps, or clamp")]
    ZeroHorizon { raw: f64 },
    #[error("eps must lie in (0,1), got {0}")]
    BadEps(f64),
    #[error("window time {t_lambda} is shorter than h_eps = {h_eps}")]
    WindowTooShort { t_lambda: usize, h_eps: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Out,
    In,
}

/// A directed ball with BFS distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub center: usize,
    pub depth: usize,
    pub direction: Direction,
    /// `(vertex, distance)` in BFS order; the center comes first.
    pub vertices: Vec<(u32, u32)>,
    /// Edges leaving a vertex at distance `< depth` and landing in the ball
    /// (in-edges entering such a vertex, for in-balls).
    pub internal_edge_count: usize,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.iter().any(|&(u, _)| u as usize == v)
    }
}

pub fn ball(g: &Digraph, x: usize, h: usize, direction: Direction) -> Neighborhood {
    let next = |v: usize| match direction {
        Direction::Out => g.out(v),
        Direction::In => g.inn(v),
    };
    let mut dist: HashMap<u32, u32> = HashMap::from([(x as u32, 0)]);
    let mut order = vec![(x as u32, 0u32)];
    let mut head = 0;
    let mut edges = 0usize;
    while head < order.len() {
        let (v, d) = order[head];
        head += 1;
        if d as usize >= h {
            continue;
        }
        for &w in next(v as usize) {
            edges += 1;
            dist.entry(w).or_insert_with(|| {
                order.push((w, d + 1));
                d + 1
            });
        }
    }
    Neighborhood { center: x, depth: h, direction, vertices: order, internal_edge_count: edges }
}

/// `1 + |E| − |V|`, floored at 0.
pub fn tree_excess(nb: &Neighborhood) -> usize {
    (1 + nb.internal_edge_count).saturating_sub(nb.len())
}

/// `x` is an `h`-root when its out-ball of radius `h` is a directed tree.
pub fn is_root(g: &Digraph, x: usize, h: usize) -> bool {
    tree_excess(&ball(g, x, h, Direction::Out)) == 0
}

/// All `h`-roots, in increasing order.
pub fn roots(g: &Digraph, h: usize) -> Vec<usize> {
    let flags = par::map_range(g.n(), |x| is_root(g, x, h));
    (0..g.n()).filter(|&x| flags[x]).collect()
}

/// Whether every in-ball of radius `h` has at most `n^(1/2+eps)` vertices,
/// and the largest size seen.
pub fn in_ball_size_check(g: &Digraph, h: usize, eps: f64) -> (bool, usize) {
    let sizes = par::map_range(g.n(), |y| ball(g, y, h, Direction::In).len());
    let max = sizes.into_iter().max().unwrap_or(0);
    (max as f64 <= (g.n() as f64).powf(0.5 + eps), max)
}

/// Per-graph tree-excess statistics of the out-balls of radius `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcessReport {
    pub depth: usize,
    pub max_excess: usize,
    /// Vertices whose ball has excess at least 2.
    pub vertices_with_excess_2: usize,
    /// Some ball has excess at least 2.
    pub bad: bool,
}

pub fn excess_report(g: &Digraph, h: usize) -> ExcessReport {
    let ex = par::map_range(g.n(), |x| tree_excess(&ball(g, x, h, Direction::Out)));
    let count = ex.iter().filter(|&&e| e >= 2).count();
    ExcessReport { depth: h, max_excess: ex.into_iter().max().unwrap_or(0), vertices_with_excess_2: count, bad: count > 0 }
}

/// What to do when `h_eps` floors to 0 at the given `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonPolicy {
    Strict,
    ClampToOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NicePathParams {
    pub n: usize,
    pub eps: f64,
    pub gamma: f64,
    /// `eps·ln n/(20 H)` before rounding.
    pub h_eps_raw: f64,
    pub h_eps: usize,
    pub s: usize,
    pub t: usize,
    pub h_bar: f64,
    pub c_degree: f64,
    /// `1/(n ln³ n)`.
    pub mass_cap: f64,
    pub clamped: bool,
}

impl NicePathParams {
    /// `exp(−H̄ s)`, the mass-tree threshold.
    pub fn threshold(&self) -> f64 {
        (-self.h_bar * self.s as f64).exp()
    }
}

fn horizon(n: usize, eps: f64, stats: &EntropicStats, policy: HorizonPolicy) -> Result<(f64, usize, bool), StructureError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(StructureError::BadEps(eps));
    }
    let raw = eps * (n as f64).ln() / (20.0 * stats.h);
    let h = raw.floor() as usize;
    match (h, policy) {
        (0, HorizonPolicy::Strict) => Err(StructureError::ZeroHorizon { raw }),
        (0, HorizonPolicy::ClampToOne) => Ok((raw, 1, true)),
        _ => Ok((raw, h, false)),
    }
}

fn assemble(n: usize, eps: f64, stats: &EntropicStats, raw: f64, h: usize, s: usize, clamped: bool, c_degree: f64) -> NicePathParams {
    let gamma = eps / 80.0;
    let ln_n = (n as f64).ln();
    NicePathParams {
        n,
        eps,
        gamma,
        h_eps_raw: raw,
        h_eps: h,
        s,
        t: s + h + 1,
        h_bar: (1.0 + gamma) * stats.h,
        c_degree,
        mass_cap: 1.0 / (n as f64 * ln_n.powi(3)),
        clamped,
    }
}

/// `γ = eps/80`, `h_eps = ⌊eps·ln n/(20H)⌋`, `s = ⌊(1−γ) t_ent⌋`,
/// `t = s + h_eps + 1`, `H̄ = (1+γ)H`.
pub fn nice_params(n: usize, eps: f64, stats: &EntropicStats, c_degree: f64, policy: HorizonPolicy) -> Result<NicePathParams, StructureError> {
    let (raw, h, clamped) = horizon(n, eps, stats, policy)?;
    let s = ((1.0 - eps / 80.0) * stats.t_ent).floor() as usize;
    Ok(assemble(n, eps, stats, raw, h, s, clamped, c_degree))
}

/// Window variant: `s = t_lambda − h_eps`.
pub fn nice_params_window(
    n: usize,
    eps: f64,
    stats: &EntropicStats,
    t_lambda: usize,
    c_degree: f64,
    policy: HorizonPolicy,
) -> Result<NicePathParams, StructureError> {
    let (raw, h, clamped) = horizon(n, eps, stats, policy)?;
    let s = t_lambda.checked_sub(h).ok_or(StructureError::WindowTooShort { t_lambda, h_eps: h })?;
    Ok(assemble(n, eps, stats, raw, h, s, clamped, c_degree))
}

/// One iteration of the mass-tree construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedEdge {
    pub step: usize,
    pub tail: u32,
    pub head: u32,
    pub m_hat: f64,
    pub is_tree_edge: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassTree {
    pub root: usize,
    pub s: usize,
    pub h_bar: f64,
    pub threshold: f64,
    pub kappa: usize,
    /// Sum of `m̂` over selected edges that closed a cycle.
    pub discarded_mass: f64,
    /// Sum of `m̂` over eligible edges left below the threshold. An `s`-step
    /// walk leaves the tree through exactly one selected non-tree edge or
    /// one such edge, so `coverage + discarded + leftover = 1`.
    pub leftover_mass: f64,
    pub log: Vec<SelectedEdge>,
    /// Tree-path mass and depth of every vertex of the tree.
    pub nodes: HashMap<u32, (f64, usize)>,
    tree_edge_set: HashSet<(u32, u32)>,
}

#[derive(PartialEq)]
struct Candidate {
    m_hat: f64,
    tail: u32,
    head: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // Max-heap: larger mass first, then the smaller (tail, head).
    fn cmp(&self, other: &Self) -> Ordering {
        self.m_hat
            .total_cmp(&other.m_hat)
            .then_with(|| other.tail.cmp(&self.tail))
            .then_with(|| other.head.cmp(&self.head))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy exploration from `x`: repeatedly take the unvisited edge of
/// largest cumulative mass whose tail sits at tree depth `≤ s − 1`, while
/// that mass is at least `exp(−H̄ s)`. Edges reaching a new vertex extend
/// the tree; the others only join the explored graph.
pub fn build_mass_tree(g: &Digraph, x: usize, s: usize, h_bar: f64) -> MassTree {
    let threshold = (-h_bar * s as f64).exp();
    let mut nodes: HashMap<u32, (f64, usize)> = HashMap::from([(x as u32, (1.0, 0))]);
    let mut heap = BinaryHeap::new();
    let push_row = |heap: &mut BinaryHeap<Candidate>, v: u32, mass: f64| {
        let d = g.out_degree(v as usize);
        for &w in g.out(v as usize) {
            heap.push(Candidate { m_hat: mass / d as f64, tail: v, head: w });
        }
    };
    if s >= 1 {
        push_row(&mut heap, x as u32, 1.0);
    }
    let mut log = Vec::new();
    let mut tree_edge_set = HashSet::new();
    let mut discarded = 0.0;
    let mut leftover = 0.0;
    while let Some(c) = heap.pop() {
        if c.m_hat < threshold {
            leftover = c.m_hat + heap.iter().map(|e| e.m_hat).sum::<f64>();
            break;
        }
        let depth = nodes[&c.tail].1 + 1;
        let is_tree = !nodes.contains_key(&c.head);
        if is_tree {
            nodes.insert(c.head, (c.m_hat, depth));
            tree_edge_set.insert((c.tail, c.head));
            if depth < s {
                push_row(&mut heap, c.head, c.m_hat);
            }
        } else {
            discarded += c.m_hat;
        }
        log.push(SelectedEdge { step: log.len() + 1, tail: c.tail, head: c.head, m_hat: c.m_hat, is_tree_edge: is_tree });
    }
    MassTree { root: x, s, h_bar, threshold, kappa: log.len(), discarded_mass: discarded, leftover_mass: leftover, log, nodes, tree_edge_set }
}

/// Audit checks on a mass tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassTreeChecks {
    pub nonincreasing: bool,
    /// `m̂(e_ℓ) ≤ 2/(2+ℓ)` for every step.
    pub harmonic_bound: bool,
    /// `κ ≤ 2 exp(H̄ s)`.
    pub kappa_bound: bool,
    pub above_threshold: bool,
    pub is_tree: bool,
}

impl MassTreeChecks {
    pub fn all(&self) -> bool {
        self.nonincreasing && self.harmonic_bound && self.kappa_bound && self.above_threshold && self.is_tree
    }
}

impl MassTree {
    pub fn is_tree_edge(&self, tail: usize, head: usize) -> bool {
        self.tree_edge_set.contains(&(tail as u32, head as u32))
    }

    pub fn tree_edges(&self) -> Vec<(u32, u32)> {
        self.log.iter().filter(|e| e.is_tree_edge).map(|e| (e.tail, e.head)).collect()
    }

    pub fn graph_edges(&self) -> Vec<(u32, u32)> {
        self.log.iter().map(|e| (e.tail, e.head)).collect()
    }

    pub fn checks(&self) -> MassTreeChecks {
        let tree = self.tree_edges();
        let mut heads = HashSet::new();
        let is_tree = tree.len() + 1 == self.nodes.len()
            && tree.iter().all(|&(_, h)| heads.insert(h))
            && !heads.contains(&(self.root as u32));
        MassTreeChecks {
            nonincreasing: self.log.windows(2).all(|w| w[1].m_hat <= w[0].m_hat),
            harmonic_bound: self.log.iter().all(|e| e.m_hat <= 2.0 / (2.0 + e.step as f64) + 1e-15),
            kappa_bound: self.kappa as f64 <= 2.0 * (self.h_bar * self.s as f64).exp(),
            above_threshold: self.log.iter().all(|e| e.m_hat >= self.threshold),
            is_tree,
        }
    }

    /// Audit dump: one line `step tail head m_hat is_tree_edge` per selection.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for e in &self.log {
            let _ = writeln!(s, "{} {} {} {} {}", e.step, e.tail, e.head, g9(e.m_hat), u8::from(e.is_tree_edge));
        }
        s
    }
}

/// Probability that an `s`-step walk from the root uses only tree edges.
pub fn tree_mass_coverage(g: &Digraph, mt: &MassTree, s: usize) -> f64 {
    let mut cur: HashMap<u32, f64> = HashMap::from([(mt.root as u32, 1.0)]);
    for _ in 0..s {
        let mut next: HashMap<u32, f64> = HashMap::new();
        let mut keys: Vec<u32> = cur.keys().copied().collect();
        keys.sort_unstable();
        for v in keys {
            let m = cur[&v];
            let d = g.out_degree(v as usize) as f64;
            for &w in g.out(v as usize) {
                if mt.is_tree_edge(v as usize, w as usize) {
                    *next.entry(w).or_default() += m / d;
                }
            }
        }
        cur = next;
    }
    let mut masses: Vec<f64> = cur.into_values().collect();
    masses.sort_by(f64::total_cmp);
    masses.iter().sum()
}

/// Newline-separated vertex ids.
pub fn roots_text(roots: &[usize]) -> String {
    roots.iter().map(|r| format!("{r}\n")).collect()
}
