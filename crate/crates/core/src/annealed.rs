//! Walks that build their own environment.
//!
//! A row is drawn the first time any walk stands on its vertex and reused
//! afterwards. Rows come from [`RowSampler::row`] with the run's master
//! seed, so the environment a run sees is exactly the graph
//! [`crate::graphgen::sample_digraph`] would produce for that seed; the
//! walk's own choices use a separate stream.

use std::collections::HashMap;

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphgen::RowSampler;
use crate::model::WeightProfile;
use crate::par;
use crate::rng::{self, Domain};
use crate::stats::Estimate;
use crate::walk::{tv, ProbVector};

const BATCH: u64 = 1 << 12;

#[derive(Debug, Error)]
pub enum AnnealedError {
    #[error("walk {walk} is stuck at vertex {vertex} (time {time}): its row is empty")]
    Stuck { walk: usize, time: usize, vertex: usize },
    #[error("initial distribution has {got} entries, profile has {n}")]
    LengthMismatch { n: usize, got: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Rows generated so far and the order in which vertices were visited.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnealedState {
    pub seed: u64,
    pub rows: HashMap<u32, Vec<u32>>,
    /// `(walk, time, vertex)` for every position of every walk.
    pub visit_log: Vec<(u32, u32, u32)>,
}

impl AnnealedState {
    pub fn new(seed: u64) -> Self {
        AnnealedState { seed, ..Default::default() }
    }

    /// The row of `x`, generated on first request.
    pub fn row(&mut self, sampler: &RowSampler, x: usize) -> &[u32] {
        let seed = self.seed;
        self.rows.entry(x as u32).or_insert_with(|| sampler.row(seed, x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealedTrace {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub paths: Vec<Vec<u32>>,
    /// First self-intersection time of the first walk, if within `T`.
    pub tau: Option<usize>,
    /// `fresh[k][t]`: position `t` of walk `k` had not been visited by any
    /// earlier walk nor earlier by the same walk.
    pub fresh: Vec<Vec<bool>>,
}

/// `min{s > 0 : X_s = X_u for some u < s}`.
pub fn first_self_intersection(path: &[u32]) -> Option<usize> {
    let mut seen = std::collections::HashSet::with_capacity(path.len());
    path.iter().position(|&v| !seen.insert(v))
}

fn run_core<R: Rng + ?Sized>(
    sampler: &RowSampler,
    state: &mut AnnealedState,
    mut start: impl FnMut(&mut R) -> usize,
    k: usize,
    t: usize,
    rng: &mut R,
    log: bool,
) -> Result<AnnealedTrace, AnnealedError> {
    let mut visited = std::collections::HashSet::new();
    let mut paths = Vec::with_capacity(k);
    let mut fresh = Vec::with_capacity(k);
    for walk in 0..k {
        let mut v = start(rng);
        let mut path = Vec::with_capacity(t + 1);
        let mut flags = Vec::with_capacity(t + 1);
        for time in 0..=t {
            if time > 0 {
                let row = state.row(sampler, v);
                if row.is_empty() {
                    return Err(AnnealedError::Stuck { walk, time: time - 1, vertex: v });
                }
                v = row[rng.random_range(0..row.len())] as usize;
            }
            path.push(v as u32);
            flags.push(visited.insert(v as u32));
            if log {
                state.visit_log.push((walk as u32, time as u32, v as u32));
            }
        }
        paths.push(path);
        fresh.push(flags);
    }
    let tau = first_self_intersection(&paths[0]);
    Ok(AnnealedTrace { k, t, paths, tau, fresh })
}

fn alias(mu: &[f64]) -> Result<WeightedAliasIndex<f64>, AnnealedError> {
    WeightedAliasIndex::new(mu.to_vec()).map_err(|e| AnnealedError::BadParameter(format!("initial distribution: {e}")))
}

/// `K` walks of length `T` started from `μ0`, run one after the other on a
/// shared lazily generated environment.
pub fn run_annealed(profile: &WeightProfile, mu0: &ProbVector, k: usize, t: usize, seed: u64) -> Result<(AnnealedTrace, AnnealedState), AnnealedError> {
    run_annealed_split(profile, mu0, k, t, seed, seed)
}

/// As [`run_annealed`], with separate seeds for the environment and for the
/// walks' own choices.
pub fn run_annealed_split(
    profile: &WeightProfile,
    mu0: &ProbVector,
    k: usize,
    t: usize,
    env_seed: u64,
    walk_seed: u64,
) -> Result<(AnnealedTrace, AnnealedState), AnnealedError> {
    if mu0.len() != profile.n() {
        return Err(AnnealedError::LengthMismatch { n: profile.n(), got: mu0.len() });
    }
    if k == 0 || t == 0 {
        return Err(AnnealedError::BadParameter("K and T must be at least 1".into()));
    }
    let sampler = RowSampler::new(profile);
    let start = alias(mu0.values())?;
    let mut state = AnnealedState::new(env_seed);
    let mut r = rng::stream(walk_seed, Domain::Annealed, 0);
    let trace = run_core(&sampler, &mut state, |r| start.sample(r), k, t, &mut r, true)?;
    Ok((trace, state))
}

/// JSON-lines record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub tau: Option<usize>,
    pub fresh_flags: Vec<Vec<bool>>,
}

impl RunRecord {
    pub fn new(seed: u64, trace: &AnnealedTrace) -> Self {
        RunRecord { seed, k: trace.k, t: trace.t, tau: trace.tau, fresh_flags: trace.fresh.clone() }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Outcome of many independent single-walk runs, each on its own
/// environment. Runs that get stuck on an empty row are counted and left
/// out of every other statistic.
fn many_runs<T: Send>(
    profile: &WeightProfile,
    start: &WeightedAliasIndex<f64>,
    k: usize,
    t: usize,
    runs: u64,
    seed: u64,
    f: impl Fn(&AnnealedTrace) -> T + Sync + Send,
) -> (Vec<T>, u64) {
    let sampler = RowSampler::new(profile);
    let parts = par::map_slice(&par::batches(runs, BATCH), |&(b, len)| {
        let mut r = rng::stream(seed, Domain::Annealed, b);
        let mut out = Vec::with_capacity(len as usize);
        let mut stuck = 0;
        for i in 0..len {
            let env = rng::derive_seed(seed, Domain::Annealed, b * BATCH + i);
            let mut state = AnnealedState::new(env);
            match run_core(&sampler, &mut state, |r| start.sample(r), k, t, &mut r, false) {
                Ok(tr) => out.push(f(&tr)),
                Err(_) => stuck += 1,
            }
        }
        (out, stuck)
    });
    let mut all = Vec::with_capacity(runs as usize);
    let mut stuck = 0;
    for (o, s) in parts {
        all.extend(o);
        stuck += s;
    }
    (all, stuck)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreshLaw {
    pub s: usize,
    pub runs: u64,
    pub stuck_runs: u64,
    /// Law of `X_s` on the runs where `X_s` is a new vertex.
    pub law: Vec<f64>,
    pub fresh_rate: Estimate,
    pub tv_to_mu_in: f64,
}

/// Single walks from the uniform distribution to time `s`; tabulates `X_s`
/// over the runs where it differs from every earlier position.
pub fn fresh_vertex_law(profile: &WeightProfile, s: usize, runs: u64, seed: u64) -> Result<FreshLaw, AnnealedError> {
    let n = profile.n();
    if s == 0 || s as f64 > (n as f64).sqrt() {
        return Err(AnnealedError::BadParameter(format!("need 1 ≤ s ≤ √n, got s = {s}")));
    }
    let start = alias(&vec![1.0; n])?;
    let (ends, stuck) = many_runs(profile, &start, 1, s, runs, seed, |tr| {
        let p = &tr.paths[0];
        (!p[..s].contains(&p[s])).then_some(p[s])
    });
    let mut counts = vec![0u64; n];
    let mut fresh = 0u64;
    for z in ends.iter().flatten() {
        counts[*z as usize] += 1;
        fresh += 1;
    }
    let law: Vec<f64> = counts.iter().map(|&c| if fresh == 0 { 0.0 } else { c as f64 / fresh as f64 }).collect();
    let mu = profile.in_degree_distribution();
    Ok(FreshLaw {
        s,
        runs,
        stuck_runs: stuck,
        tv_to_mu_in: tv(&law, mu.values()),
        law,
        fresh_rate: Estimate::wilson(fresh, runs - stuck),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersection {
    #[serde(rename = "T")]
    pub t: usize,
    pub runs: u64,
    pub stuck_runs: u64,
    /// `P(τ < T)`: the positions `X_0 … X_{T−1}` are not all distinct.
    pub estimate: Estimate,
    /// `tau_hist[s]` = number of runs with `τ = s`, for `s < T`.
    pub tau_hist: Vec<u64>,
}

/// Single walks from the uniform distribution.
pub fn self_intersection_stats(profile: &WeightProfile, t: usize, runs: u64, seed: u64) -> Result<SelfIntersection, AnnealedError> {
    if t == 0 {
        return Err(AnnealedError::BadParameter("T must be at least 1".into()));
    }
    let start = alias(&vec![1.0; profile.n()])?;
    // X_0 … X_{T−1} need T − 1 steps.
    let steps = t - 1;
    let (taus, stuck) = if steps == 0 {
        (vec![None; runs as usize], 0)
    } else {
        many_runs(profile, &start, 1, steps, runs, seed, |tr| tr.tau)
    };
    let mut hist = vec![0u64; t];
    for tau in taus.iter().flatten() {
        hist[*tau] += 1;
    }
    let hits = hist.iter().sum();
    Ok(SelfIntersection { t, runs, stuck_runs: stuck, estimate: Estimate::wilson(hits, runs - stuck), tau_hist: hist })
}

/// `P(τ < T)` for the walk on the complete digraph on `n` vertices.
pub fn complete_graph_self_intersection(n: usize, t: usize) -> f64 {
    1.0 - (1..t.saturating_sub(1)).map(|j| 1.0 - j as f64 / (n - 1) as f64).product::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Meeting {
    pub h: usize,
    pub runs: u64,
    pub stuck_runs: u64,
    pub estimate: Estimate,
}

/// Two walks from `μ_in` on one environment; frequency of `X_h⁽¹⁾ = X_h⁽²⁾`.
pub fn meeting_probability(profile: &WeightProfile, h: usize, runs: u64, seed: u64) -> Result<Meeting, AnnealedError> {
    let start = alias(profile.in_degree_distribution().values())?;
    let (met, stuck) = if h == 0 {
        let parts = par::map_slice(&par::batches(runs, BATCH), |&(b, len)| {
            let mut r = rng::stream(seed, Domain::Annealed, b);
            (0..len).filter(|_| start.sample(&mut r) == start.sample(&mut r)).count() as u64
        });
        (parts.into_iter().sum::<u64>(), 0)
    } else {
        let (m, s) = many_runs(profile, &start, 2, h, runs, seed, |tr| tr.paths[0][h] == tr.paths[1][h]);
        (m.into_iter().filter(|&b| b).count() as u64, s)
    };
    Ok(Meeting { h, runs, stuck_runs: stuck, estimate: Estimate::wilson(met, runs - stuck) })
}
