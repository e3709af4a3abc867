//! End-to-end finite-n experiments. Each one is a pure function of its
//! config: replicas, starts and Monte Carlo batches all draw from streams
//! derived from the config seed.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::annealed::{self, FreshLaw, SelfIntersection};
use crate::entropy::{self, EntropicStats, Nondegeneracy};
use crate::error::{Error, Result};
use crate::graphgen::{degree_summary, sample_digraph, sample_digraph_naive, strongly_connected, Digraph, RowSampler};
use crate::model::{ProfileSpec, WeightProfile};
use crate::par;
use crate::quenched::{self, QRow};
use crate::rng::{self, Domain};
use crate::stats::{self, Estimate};
use crate::structures::{self, ExcessReport, HorizonPolicy, NicePathParams};
use crate::walk::{self, tv, ProbVector};

pub const STATIONARY_TOL: f64 = 1e-13;
pub const STATIONARY_MAX_ITER: usize = 1_000_000;

/// The graph of replica `r` and the seed it was sampled with.
pub fn replica_graph(profile: &WeightProfile, seed: u64, r: usize) -> (Digraph, u64) {
    let gs = rng::derive_seed(seed, Domain::Replica, r as u64);
    (sample_digraph(profile, gs), gs)
}

/// Power iteration from `μ_in`.
pub fn stationary(g: &Digraph, profile: &WeightProfile) -> Result<ProbVector> {
    Ok(walk::stationary_power(g, &profile.in_degree_distribution(), STATIONARY_TOL, STATIONARY_MAX_ITER)?)
}

/// `k` distinct uniformly chosen vertices (all of them if `k ≥ n`), sorted.
pub fn sample_starts(n: usize, k: usize, seed: u64, r: usize) -> Vec<usize> {
    let mut rng = rng::stream(seed, Domain::Starts, r as u64);
    let mut v = sample_indices(&mut rng, n, k.min(n)).into_vec();
    v.sort_unstable();
    v
}

fn check_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Experiment(format!("{name} must be at least 1")));
    }
    Ok(())
}

// ---------------------------------------------------------------- cutoff

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffConfig {
    pub profile: ProfileSpec,
    pub n: usize,
    pub replicas: usize,
    pub starts: usize,
    pub beta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReplica {
    pub replica: usize,
    pub graph_seed: u64,
    pub strongly_connected: bool,
    pub components: usize,
    pub starts: Vec<usize>,
    pub tv_lower: Vec<f64>,
    pub tv_upper: Vec<f64>,
    /// Full curves `t = 0..=t_upper`, one row per start.
    pub curve: Option<walk::MixingCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub n: usize,
    pub beta: f64,
    pub stats: EntropicStats,
    pub t_lower: usize,
    pub t_upper: usize,
    pub replicas: Vec<CutoffReplica>,
    pub used: usize,
    pub skipped: usize,
    pub mean_lower: f64,
    pub mean_upper: f64,
    /// Smallest lower-side TV over all graphs and starts.
    pub min_lower: f64,
    /// Largest upper-side TV over all graphs and starts.
    pub max_upper: f64,
}

/// TV from sampled starts at `⌊(1−β)t_ent⌋` and `⌈(1+β)t_ent⌉`, with
/// `t_ent` from the exact annealed entropy. Replicas that are not strongly
/// connected are skipped and counted.
pub fn cutoff(cfg: &CutoffConfig) -> Result<CutoffReport> {
    check_positive("replicas", cfg.replicas)?;
    check_positive("starts", cfg.starts)?;
    if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
        return Err(Error::Experiment(format!("beta must lie in (0,1), got {}", cfg.beta)));
    }
    let profile = cfg.profile.build(cfg.n, cfg.seed)?;
    let stats = entropy::entropy_stats_exact(&profile)?;
    let t_lower = ((1.0 - cfg.beta) * stats.t_ent).floor() as usize;
    let t_upper = ((1.0 + cfg.beta) * stats.t_ent).ceil() as usize;
    let mut replicas = Vec::with_capacity(cfg.replicas);
    for r in 0..cfg.replicas {
        let (g, graph_seed) = replica_graph(&profile, cfg.seed, r);
        let (sc, components) = strongly_connected(&g);
        let starts = sample_starts(g.n(), cfg.starts, cfg.seed, r);
        let mut rep = CutoffReplica {
            replica: r,
            graph_seed,
            strongly_connected: sc,
            components,
            starts: starts.clone(),
            tv_lower: vec![],
            tv_upper: vec![],
            curve: None,
        };
        if sc {
            let pi = stationary(&g, &profile)?;
            let curve = walk::tv_curve(&g, &pi, &starts, t_upper, stats.t_ent)?;
            rep.tv_lower = curve.tv.iter().map(|row| row[t_lower]).collect();
            rep.tv_upper = curve.tv.iter().map(|row| row[t_upper]).collect();
            rep.curve = Some(curve);
        }
        replicas.push(rep);
    }
    let used: Vec<&CutoffReplica> = replicas.iter().filter(|r| r.strongly_connected).collect();
    if used.is_empty() {
        return Err(Error::Experiment("every replica was skipped (not strongly connected)".into()));
    }
    let lower: Vec<f64> = used.iter().flat_map(|r| r.tv_lower.iter().copied()).collect();
    let upper: Vec<f64> = used.iter().flat_map(|r| r.tv_upper.iter().copied()).collect();
    Ok(CutoffReport {
        n: cfg.n,
        beta: cfg.beta,
        stats,
        t_lower,
        t_upper,
        used: used.len(),
        skipped: replicas.len() - used.len(),
        mean_lower: stats::mean(&lower),
        mean_upper: stats::mean(&upper),
        min_lower: lower.iter().copied().fold(f64::INFINITY, f64::min),
        max_upper: upper.iter().copied().fold(0.0, f64::max),
        replicas,
    })
}

// --------------------------------------------------------------- profile

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub profile: ProfileSpec,
    pub n: usize,
    pub replicas: usize,
    pub starts: usize,
    pub lambdas: Vec<f64>,
    /// `δ` of the nondegeneracy check (`None` for `∞`).
    pub delta: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub lambda: f64,
    pub t_lambda: usize,
    pub mean_tv: f64,
    pub gauss: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub n: usize,
    pub stats: EntropicStats,
    pub nondegeneracy: Nondegeneracy,
    pub rows: Vec<ProfileRow>,
    pub used: usize,
    pub skipped: usize,
    pub max_diff: f64,
}

/// `t_λ = round(t_ent + λ w_n)`, at least 1.
pub fn window_time(stats: &EntropicStats, lambda: f64) -> usize {
    (stats.t_ent + lambda * stats.w_n).round().max(1.0) as usize
}

fn delta_arg(delta: Option<f64>) -> f64 {
    delta.unwrap_or(f64::INFINITY)
}

/// Mean TV at `t_λ` against the Gaussian tail, for each `λ`.
pub fn profile(cfg: &ProfileConfig) -> Result<ProfileReport> {
    check_positive("replicas", cfg.replicas)?;
    check_positive("starts", cfg.starts)?;
    let profile = cfg.profile.build(cfg.n, cfg.seed)?;
    let stats = entropy::entropy_stats_exact(&profile)?;
    let nd = entropy::nondegeneracy_check(&stats, cfg.n, delta_arg(cfg.delta))?;
    let times: Vec<usize> = cfg.lambdas.iter().map(|&l| window_time(&stats, l)).collect();
    let t_max = times.iter().copied().max().unwrap_or(1);
    let mut sums = vec![0.0; times.len()];
    let mut count = 0usize;
    let mut skipped = 0;
    for r in 0..cfg.replicas {
        let (g, _) = replica_graph(&profile, cfg.seed, r);
        if !strongly_connected(&g).0 {
            skipped += 1;
            continue;
        }
        let pi = stationary(&g, &profile)?;
        let starts = sample_starts(g.n(), cfg.starts, cfg.seed, r);
        let curve = walk::tv_curve(&g, &pi, &starts, t_max, stats.t_ent)?;
        for row in &curve.tv {
            for (s, &t) in sums.iter_mut().zip(&times) {
                *s += row[t];
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Experiment("every replica was skipped (not strongly connected)".into()));
    }
    let rows: Vec<ProfileRow> = cfg
        .lambdas
        .iter()
        .zip(&times)
        .zip(&sums)
        .map(|((&lambda, &t_lambda), &s)| {
            let mean_tv = s / count as f64;
            let gauss = entropy::gaussian_tail(lambda);
            ProfileRow { lambda, t_lambda, mean_tv, gauss, diff: (mean_tv - gauss).abs() }
        })
        .collect();
    Ok(ProfileReport {
        n: cfg.n,
        stats,
        nondegeneracy: nd,
        max_diff: rows.iter().map(|r| r.diff).fold(0.0, f64::max),
        rows,
        used: cfg.replicas - skipped,
        skipped,
    })
}

// ------------------------------------------------------ path-mass (i.i.d.)

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianQRow {
    pub lambda: f64,
    pub t: usize,
    pub theta: f64,
    pub q: Estimate,
    pub gauss: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianQReport {
    pub n: usize,
    pub stats: EntropicStats,
    pub nondegeneracy: Nondegeneracy,
    pub rows: Vec<GaussianQRow>,
    pub max_diff: f64,
}

/// `q_t(θ_λ)` at `t = t_λ` with `θ_λ` solving the standardization identity
/// for that `t`, against `P(Z > λ)`.
pub fn gaussian_q(spec: &ProfileSpec, n: usize, lambdas: &[f64], delta: Option<f64>, samples: u64, seed: u64) -> Result<GaussianQReport> {
    let profile = spec.build(n, seed)?;
    let law = entropy::mixture_law(&profile, entropy::TAIL_TOL)?;
    let stats = EntropicStats::from_law(&law)?;
    let nd = entropy::nondegeneracy_check(&stats, n, delta_arg(delta))?;
    let mut rows = Vec::with_capacity(lambdas.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        let t = window_time(&stats, lambda);
        let theta = entropy::theta_for_lambda(&stats, t, lambda);
        let q = entropy::q_t(&law, t, theta, samples, rng::derive_seed(seed, Domain::PathMass, i as u64))?;
        let gauss = entropy::gaussian_tail(lambda);
        rows.push(GaussianQRow { lambda, t, theta, q, gauss, diff: (q.value - gauss).abs() });
    }
    Ok(GaussianQReport { n, stats, nondegeneracy: nd, max_diff: rows.iter().map(|r| r.diff).fold(0.0, f64::max), rows })
}

// ------------------------------------------------------ path-mass (quenched)

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDichotomyConfig {
    pub profile: ProfileSpec,
    pub n: usize,
    pub graphs: usize,
    pub starts: usize,
    /// `θ = n^{−a}` for each `a`.
    pub exponents: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDichotomyReport {
    pub n: usize,
    pub t: usize,
    pub stats: EntropicStats,
    pub rows: Vec<QRow>,
    /// Mean estimate per exponent, in config order.
    pub means: Vec<f64>,
    pub skipped_sinks: usize,
}

/// `Q_{x,t}(n^{−a})` at `t = ⌊t_ent⌋` over graphs × starts.
pub fn q_dichotomy(cfg: &QDichotomyConfig) -> Result<QDichotomyReport> {
    check_positive("graphs", cfg.graphs)?;
    check_positive("starts", cfg.starts)?;
    let profile = cfg.profile.build(cfg.n, cfg.seed)?;
    let stats = entropy::entropy_stats_exact(&profile)?;
    let t = (stats.t_ent.floor() as usize).max(1);
    let thetas: Vec<f64> = cfg.exponents.iter().map(|a| (cfg.n as f64).powf(-a)).collect();
    let mut rows = Vec::new();
    let mut sums = vec![0.0; thetas.len()];
    let mut count = 0;
    let mut skipped = 0;
    for r in 0..cfg.graphs {
        let (g, gs) = replica_graph(&profile, cfg.seed, r);
        for x in sample_starts(g.n(), cfg.starts, cfg.seed, r) {
            let ests: std::result::Result<Vec<Estimate>, _> =
                thetas.iter().map(|&th| quenched::estimate_q(&g, x, t, th, cfg.samples, gs)).collect();
            match ests {
                Ok(ests) => {
                    for ((s, e), &theta) in sums.iter_mut().zip(&ests).zip(&thetas) {
                        *s += e.value;
                        rows.push(QRow { x, t, theta, estimate: *e, exact: false });
                    }
                    count += 1;
                }
                Err(quenched::QuenchedError::Sink(_)) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    if count == 0 {
        return Err(Error::Experiment("every start reached a sink".into()));
    }
    Ok(QDichotomyReport { n: cfg.n, t, stats, rows, means: sums.iter().map(|s| s / count as f64).collect(), skipped_sinks: skipped })
}

// --------------------------------------------------------- entropy trend

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrendRow {
    pub n: usize,
    pub h: f64,
    pub sigma2: f64,
    pub ln_ln_n: f64,
    pub ratio: f64,
    pub sigma2_ratio: f64,
}

pub fn entropy_trend(spec: &ProfileSpec, ns: &[usize], seed: u64) -> Result<Vec<EntropyTrendRow>> {
    ns.iter()
        .map(|&n| {
            let stats = entropy::entropy_stats_exact(&spec.build(n, seed)?)?;
            let ll = (n as f64).ln().ln();
            Ok(EntropyTrendRow { n, h: stats.h, sigma2: stats.sigma2, ln_ln_n: ll, ratio: stats.h / ll, sigma2_ratio: stats.sigma2 / ll })
        })
        .collect()
}

// ------------------------------------------------------------ structures

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralConfig {
    pub profile: ProfileSpec,
    pub n: usize,
    pub graphs: usize,
    pub eps: f64,
    /// `C` of the degree event.
    pub c_degree: f64,
    /// Roots per graph on which mass trees are built.
    pub roots: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralGraph {
    pub graph_seed: u64,
    pub e_plus: bool,
    pub c_empirical: f64,
    pub s_minus: bool,
    pub in_ball_max: usize,
    pub excess: ExcessReport,
    pub root_fraction: f64,
    /// Mass-tree audit over the sampled roots; `None` off `E⁺`.
    pub mass_tree_ok: Option<bool>,
    pub max_kappa: usize,
    pub coverage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub params: NicePathParams,
    pub stats: EntropicStats,
    pub graphs: Vec<StructuralGraph>,
    pub p_e_plus: f64,
    pub p_s_minus: f64,
    pub p_bad_excess: f64,
    /// Mass-tree checks passed on every `E⁺` graph.
    pub mass_tree_all_ok: bool,
    /// Fraction of sampled roots with coverage at least 0.9.
    pub coverage_ok_fraction: f64,
    pub mean_coverage: f64,
}

/// Degree event, in-ball sizes, tree excess at depth `2h_ε`, roots and
/// mass trees over an ensemble.
pub fn structural(cfg: &StructuralConfig) -> Result<StructuralReport> {
    check_positive("graphs", cfg.graphs)?;
    let profile = cfg.profile.build(cfg.n, cfg.seed)?;
    let stats = entropy::entropy_stats_exact(&profile)?;
    let params = structures::nice_params(cfg.n, cfg.eps, &stats, cfg.c_degree, HorizonPolicy::ClampToOne)?;
    let mut graphs = Vec::with_capacity(cfg.graphs);
    for r in 0..cfg.graphs {
        let (g, graph_seed) = replica_graph(&profile, cfg.seed, r);
        let ds = degree_summary(&g, cfg.c_degree);
        let (s_minus, in_ball_max) = structures::in_ball_size_check(&g, params.h_eps, cfg.eps);
        let excess = structures::excess_report(&g, 2 * params.h_eps);
        let roots = structures::roots(&g, params.h_eps);
        let mut mass_tree_ok = None;
        let mut coverage = Vec::new();
        let mut max_kappa = 0;
        if ds.e_plus_holds && !roots.is_empty() {
            let mut rng = rng::stream(cfg.seed, Domain::Starts, r as u64);
            let picks: Vec<usize> = sample_indices(&mut rng, roots.len(), cfg.roots.min(roots.len())).into_iter().map(|i| roots[i]).collect();
            let trees = par::map_slice(&picks, |&x| {
                let mt = structures::build_mass_tree(&g, x, params.s, params.h_bar);
                (mt.checks().all(), mt.kappa, structures::tree_mass_coverage(&g, &mt, params.s))
            });
            mass_tree_ok = Some(trees.iter().all(|t| t.0));
            max_kappa = trees.iter().map(|t| t.1).max().unwrap_or(0);
            coverage = trees.iter().map(|t| t.2).collect();
        }
        graphs.push(StructuralGraph {
            graph_seed,
            e_plus: ds.e_plus_holds,
            c_empirical: ds.c_empirical,
            s_minus,
            in_ball_max,
            excess,
            root_fraction: roots.len() as f64 / g.n() as f64,
            mass_tree_ok,
            max_kappa,
            coverage,
        });
    }
    let frac = |f: &dyn Fn(&StructuralGraph) -> bool| graphs.iter().filter(|g| f(g)).count() as f64 / graphs.len() as f64;
    let cov: Vec<f64> = graphs.iter().flat_map(|g| g.coverage.iter().copied()).collect();
    Ok(StructuralReport {
        params,
        stats,
        p_e_plus: frac(&|g| g.e_plus),
        p_s_minus: frac(&|g| g.s_minus),
        p_bad_excess: frac(&|g| g.excess.bad),
        mass_tree_all_ok: graphs.iter().all(|g| g.mass_tree_ok != Some(false)),
        coverage_ok_fraction: if cov.is_empty() { 0.0 } else { cov.iter().filter(|&&c| c >= 0.9).count() as f64 / cov.len() as f64 },
        mean_coverage: stats::mean(&cov),
        graphs,
    })
}

// -------------------------------------------------------------- annealed

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersectionTrend {
    pub t: usize,
    pub rows: Vec<(usize, SelfIntersection)>,
    /// OLS slope of `ln P(τ < T)` against `ln n`.
    pub slope: f64,
}

pub fn self_intersection_trend(spec: &ProfileSpec, ns: &[usize], t: usize, runs: u64, seed: u64) -> Result<SelfIntersectionTrend> {
    let mut rows = Vec::new();
    for &n in ns {
        let p = spec.build(n, seed)?;
        rows.push((n, annealed::self_intersection_stats(&p, t, runs, rng::derive_seed(seed, Domain::Annealed, n as u64))?));
    }
    let xs: Vec<f64> = rows.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, s)| s.estimate.value.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(SelfIntersectionTrend { t, slope: stats::ols_slope(&xs, &ys), rows })
}

pub fn fresh_law(spec: &ProfileSpec, n: usize, s: usize, runs: u64, seed: u64) -> Result<FreshLaw> {
    Ok(annealed::fresh_vertex_law(&spec.build(n, seed)?, s, runs, seed)?)
}

// ------------------------------------------------------ stationary mass

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryMassRow {
    pub n: usize,
    pub graph_seed: u64,
    pub top_k: usize,
    pub top_mass: f64,
    pub top_bound: f64,
    pub top_ok: bool,
    pub sum_sq: f64,
    /// `n Σπ² / ln⁶ n`.
    pub normalized_sum_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryMassReport {
    pub delta: f64,
    pub rows: Vec<StationaryMassRow>,
    pub skipped: usize,
    /// `C` fitted at the first `n`: the largest normalized `Σπ²` seen there.
    pub c_fit: f64,
    /// Per `n`: fraction of graphs meeting the top-mass bound, and whether
    /// every graph satisfies `Σπ² ≤ C ln⁶ n / n`.
    pub per_n: Vec<(usize, f64, bool)>,
}

/// Top-`⌈n^{1−6δ}⌉` stationary mass against `n^{−δ/2}`, and `Σπ²` against
/// `C ln⁶ n / n` with `C` fitted at the smallest `n`.
pub fn stationary_mass(spec: &ProfileSpec, ns: &[usize], graphs: &[usize], delta: f64, seed: u64) -> Result<StationaryMassReport> {
    if ns.is_empty() || ns.len() != graphs.len() {
        return Err(Error::Experiment("need one graph count per n".into()));
    }
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (&n, &reps) in ns.iter().zip(graphs) {
        let profile = spec.build(n, seed)?;
        let nf = n as f64;
        let top_k = nf.powf(1.0 - 6.0 * delta).ceil() as usize;
        let top_bound = nf.powf(-delta / 2.0);
        for r in 0..reps {
            let (g, graph_seed) = replica_graph(&profile, rng::derive_seed(seed, Domain::Replica, n as u64), r);
            if !strongly_connected(&g).0 {
                skipped += 1;
                continue;
            }
            let pi = stationary(&g, &profile)?;
            let top_mass = pi.top_mass(top_k);
            let sum_sq = pi.sum_squares();
            rows.push(StationaryMassRow {
                n,
                graph_seed,
                top_k,
                top_mass,
                top_bound,
                top_ok: top_mass <= top_bound,
                sum_sq,
                normalized_sum_sq: nf * sum_sq / nf.ln().powi(6),
            });
        }
    }
    let c_fit = rows.iter().filter(|r| r.n == ns[0]).map(|r| r.normalized_sum_sq).fold(0.0, f64::max);
    let per_n = ns
        .iter()
        .map(|&n| {
            let at: Vec<&StationaryMassRow> = rows.iter().filter(|r| r.n == n).collect();
            let ok = at.iter().filter(|r| r.top_ok).count() as f64 / at.len().max(1) as f64;
            (n, ok, at.iter().all(|r| r.normalized_sum_sq <= c_fit))
        })
        .collect();
    Ok(StationaryMassReport { delta, rows, skipped, c_fit, per_n })
}

// ---------------------------------------------------------------- oracles

/// Deliberate bugs for checking that the oracle suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Compare the power-iteration vector against the direct solution
    /// shifted by one index.
    TvOffByOne,
    /// Count `mass ≥ θ` instead of `mass > θ` in the exact evaluation.
    NonStrictThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub seed: u64,
    pub stationary_graphs: usize,
    pub q_reps: usize,
    pub q_samples: u64,
    pub sampler_reps: usize,
    pub degree_reps: u64,
    pub trace_runs: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { seed: 1, stationary_graphs: 100, q_reps: 200, q_samples: 4000, sampler_reps: 1000, degree_reps: 100_000, trace_runs: 100_000 }
    }
}

/// A directed Hamiltonian cycle through a random permutation plus
/// Bernoulli(`p`) extra edges: strongly connected by construction.
pub fn random_strong_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (perm[i], perm[(i + 1) % n])).collect();
    for x in 0..n {
        for y in 0..n {
            if x != y && rng.random::<f64>() < p {
                edges.push((x, y));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Digraph::from_edges(n, &edges).expect("valid by construction")
}

fn oracle_stationary(cfg: &OracleConfig, fault: Option<Fault>) -> Result<OracleResult> {
    let results = par::map_range(cfg.stationary_graphs, |i| -> Result<f64> {
        let mut r = rng::stream(cfg.seed, Domain::Oracle, i as u64);
        let n = r.random_range(5..=500);
        let p = r.random_range(1.0..8.0) / n as f64;
        let g = random_strong_graph(n, p, &mut r);
        let a = walk::stationary_power(&g, &ProbVector::uniform(n), STATIONARY_TOL, STATIONARY_MAX_ITER)?;
        let mut b = walk::stationary_direct(&g)?.into_vec();
        if fault == Some(Fault::TvOffByOne) {
            b.rotate_left(1);
        }
        Ok(tv(a.values(), &b))
    });
    let worst = results.into_iter().collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
    Ok(OracleResult {
        name: "stationary power vs direct".into(),
        passed: worst <= 1e-10,
        detail: format!("max TV {worst:.3e} over {} graphs (bound 1e-10)", cfg.stationary_graphs),
    })
}

fn exact_q_faulty(g: &Digraph, x: usize, t: usize, theta: f64, fault: Option<Fault>) -> Result<f64> {
    if fault != Some(Fault::NonStrictThreshold) {
        return Ok(quenched::exact_q(g, x, t, theta)?);
    }
    Ok(quenched::enumerate_paths(g, x, t, 1 << 22)?.iter().filter(|(_, m)| *m >= theta).map(|(_, m)| m).sum())
}

fn oracle_q(cfg: &OracleConfig, fault: Option<Fault>) -> Result<OracleResult> {
    let covered = par::map_range(cfg.q_reps, |i| -> Result<bool> {
        let mut r = rng::stream(cfg.seed, Domain::Oracle, 1_000_000 + i as u64);
        let n = r.random_range(3..=12);
        let g = random_strong_graph(n, r.random_range(0.1..0.6), &mut r);
        let x = r.random_range(0..n);
        let t = r.random_range(1..=6);
        // Pick θ at the mass of a random path so that ties are exercised.
        let tr = quenched::simulate_trace_with(&g, x, t, &mut r)?;
        let theta = if r.random::<bool>() { tr.mass() } else { tr.mass() * r.random_range(0.3..3.0) }.min(0.999);
        let exact = exact_q_faulty(&g, x, t, theta, fault)?;
        let est = quenched::estimate_q(&g, x, t, theta, cfg.q_samples, r.random())?;
        Ok(est.covers(exact))
    });
    let covered = covered.into_iter().collect::<Result<Vec<bool>>>()?;
    let rate = covered.iter().filter(|&&c| c).count() as f64 / covered.len() as f64;
    Ok(OracleResult {
        name: "Q estimate vs exact".into(),
        passed: rate >= 0.9,
        detail: format!("CI coverage {rate:.3} over {} reps (need 0.9)", covered.len()),
    })
}

fn oracle_sampler(cfg: &OracleConfig) -> Result<OracleResult> {
    let n = 200;
    let profile = WeightProfile::two_class(n, 1.0, 3.0, 0.7)?;
    let graphs = par::map_range(cfg.sampler_reps, |i| -> Result<(Digraph, Digraph)> {
        let s = rng::derive_seed(cfg.seed, Domain::Oracle, 2_000_000 + i as u64);
        Ok((sample_digraph(&profile, s), sample_digraph_naive(&profile, s ^ 0x5555)?))
    });
    let graphs = graphs.into_iter().collect::<Result<Vec<_>>>()?;
    let edges = |k: usize| graphs.iter().map(|p| if k == 0 { p.0.edge_count() } else { p.1.edge_count() } as f64).collect::<Vec<f64>>();
    let outs = |k: usize| {
        graphs.iter().flat_map(|p| {
            let g = if k == 0 { &p.0 } else { &p.1 };
            (0..n).map(move |x| g.out_degree(x) as f64)
        }).collect::<Vec<f64>>()
    };
    let ins = |k: usize| {
        graphs.iter().flat_map(|p| {
            let g = if k == 0 { &p.0 } else { &p.1 };
            (0..n).map(move |x| g.in_degree(x) as f64)
        }).collect::<Vec<f64>>()
    };
    let (_, p_e) = stats::ks_two_sample(&edges(0), &edges(1));
    let (_, p_o) = stats::ks_two_sample(&outs(0), &outs(1));
    let (_, p_i) = stats::ks_two_sample(&ins(0), &ins(1));
    Ok(OracleResult {
        name: "fast vs naive sampler".into(),
        passed: p_e > 0.01 && p_o > 0.01 && p_i > 0.01,
        detail: format!("KS p: edges {p_e:.3}, out-degrees {p_o:.3}, in-degrees {p_i:.3} over {} pairs", cfg.sampler_reps),
    })
}

fn oracle_degree_law(cfg: &OracleConfig) -> Result<OracleResult> {
    let n = 1000;
    let profile = WeightProfile::two_class(n, 1.2, 4.0, 0.8)?;
    let sampler = RowSampler::new(&profile);
    let mut worst = 1.0f64;
    let mut detail = Vec::new();
    for (k, &x) in [0usize, n - 1].iter().enumerate() {
        let law = entropy::degree_law_exact(&profile, x, entropy::TAIL_TOL);
        let degs: Vec<u64> = par::map_slice(&par::batches(cfg.degree_reps, 1 << 12), |&(b, len)| {
            let mut r = rng::stream(cfg.seed, Domain::Oracle, 3_000_000 + 1000 * k as u64 + b);
            (0..len).map(|_| sampler.sample_row(x, &mut r).len() as u64).collect::<Vec<u64>>()
        })
        .concat();
        let (_, p) = stats::ks_discrete(&degs, &law.pmf);
        worst = worst.min(p);
        detail.push(format!("vertex {x}: KS p {p:.3}"));
    }
    Ok(OracleResult {
        name: "degree law vs histogram".into(),
        passed: worst > 0.01,
        detail: format!("{} over {} rows each", detail.join(", "), cfg.degree_reps),
    })
}

fn oracle_trace_law(cfg: &OracleConfig) -> Result<OracleResult> {
    let g = Digraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 0), (2, 3), (3, 4), (4, 0), (4, 1), (4, 2)])?;
    let t = 4;
    let paths = quenched::enumerate_paths(&g, 0, t, 10_000)?;
    let index: std::collections::HashMap<Vec<u32>, usize> = paths.iter().enumerate().map(|(i, (p, _))| (p.clone(), i)).collect();
    let counts = par::map_slice(&par::batches(cfg.trace_runs, 1 << 12), |&(b, len)| {
        let mut r = rng::stream(cfg.seed, Domain::Oracle, 4_000_000 + b);
        let mut c = vec![0u64; paths.len()];
        for _ in 0..len {
            let tr = quenched::simulate_trace_with(&g, 0, t, &mut r).expect("no sinks");
            c[index[&tr.vertices]] += 1;
        }
        c
    });
    let mut total = vec![0u64; paths.len()];
    for c in counts {
        total.iter_mut().zip(c).for_each(|(a, b)| *a += b);
    }
    let probs: Vec<f64> = paths.iter().map(|(_, m)| *m).collect();
    let (stat, dof, p) = stats::chi_square_gof(&total, &probs, 5.0);
    Ok(OracleResult {
        name: "trace law vs path enumeration".into(),
        passed: p > 0.01,
        detail: format!("chi2 {stat:.2} on {dof} dof, p {p:.3} over {} traces", cfg.trace_runs),
    })
}

/// Every small-instance oracle in one sweep.
pub fn oracle_suite(cfg: &OracleConfig, fault: Option<Fault>) -> Result<Vec<OracleResult>> {
    Ok(vec![
        oracle_stationary(cfg, fault)?,
        oracle_q(cfg, fault)?,
        oracle_sampler(cfg)?,
        oracle_degree_law(cfg)?,
        oracle_trace_law(cfg)?,
    ])
}

/// A profile on which every pair is connected.
pub fn complete_profile(n: usize) -> Result<WeightProfile> {
    Ok(WeightProfile::constant(n, 1.01 * (n as f64 / (n as f64).ln()).sqrt())?)
}
