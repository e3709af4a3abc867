//! One function per subcommand. Each writes its outputs through an
//! [`OutputDir`] and finishes with a manifest.

use std::fmt::Write as _;

use chunglu_core::{
    annealed::{self, RunRecord},
    entropy::{self, StatsRecord},
    experiments::{self as ex, OracleConfig},
    format::g9,
    graphgen::{self, degree_summary, sample_digraph, strongly_connected},
    rng::{self, Domain},
    structures,
    walk::{self, MixingTime},
    ProbVector, WeightProfile,
};
use serde::Serialize;
use thiserror::Error;

use crate::{
    config::{ConfigError, Experiment, ExperimentConfig},
    manifest::{OutputDir, RunManifest},
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("experiment failed: {0}")]
    Experiment(#[from] chunglu_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Experiment(_) | CliError::Io(_) => 1,
        }
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Experiment(e.into())
            }
        }
    )*};
}
via_core!(entropy::EntropyError, walk::WalkError, annealed::AnnealedError, graphgen::GraphError);

pub type CliResult<T> = Result<T, CliError>;

/// What a finished run reports back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub manifest: RunManifest,
    /// A short human-readable summary for stdout.
    pub summary: String,
    /// Set when the run completed but its own checks did not pass (oracle).
    pub failed: bool,
}

/// TV level used for the per-start mixing times of `mix`.
pub const MIX_EPS: f64 = 0.25;

/// Small sample sizes for a quick oracle sweep.
pub fn quick_oracle(seed: u64) -> OracleConfig {
    OracleConfig { seed, stationary_graphs: 10, q_reps: 40, q_samples: 2000, sampler_reps: 100, degree_reps: 10_000, trace_runs: 20_000 }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let mut out = OutputDir::create(&cfg.out)?;
    let (summary, seeds, failed) = match cfg.experiment {
        Experiment::Generate => generate(cfg, &mut out)?,
        Experiment::Stats => stats(cfg, &mut out)?,
        Experiment::Mix => mix(cfg, &mut out)?,
        Experiment::Cutoff => cutoff(cfg, &mut out)?,
        Experiment::Profile => profile(cfg, &mut out)?,
        Experiment::Entropy => entropy_cmd(cfg, &mut out)?,
        Experiment::Quenched => quenched(cfg, &mut out)?,
        Experiment::Structures => structures_cmd(cfg, &mut out)?,
        Experiment::Annealed => annealed_cmd(cfg, &mut out)?,
        Experiment::Stationary => stationary(cfg, &mut out)?,
        Experiment::Oracle => oracle(cfg, &mut out)?,
    };
    let manifest = out.finish(cfg.experiment.name(), &cfg.to_text(), cfg.seed, seeds, chunglu_core::par::current_workers())?;
    Ok(Outcome { manifest, summary, failed })
}

type Done = (String, Vec<u64>, bool);

/// Builds the profile at `n`; a bad profile is a config problem.
fn build_profile(cfg: &ExperimentConfig, n: usize) -> CliResult<WeightProfile> {
    cfg.weights.build(n, cfg.seed).map_err(|e| ConfigError::Invalid { key: "weights", msg: e.to_string() }.into())
}

fn replica_seeds(cfg: &ExperimentConfig, count: usize) -> Vec<u64> {
    (0..count).map(|r| rng::derive_seed(cfg.seed, Domain::Replica, r as u64)).collect()
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------------- generate

#[derive(Serialize)]
struct GraphInfo {
    n: usize,
    edges: usize,
    seed: u64,
    profile_digest: String,
    content_digest: String,
    strongly_connected: bool,
    components: usize,
}

fn generate(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let profile = build_profile(cfg, cfg.n0())?;
    let gs = rng::derive_seed(cfg.seed, Domain::Replica, 0);
    let g = sample_digraph(&profile, gs);
    let (sc, components) = strongly_connected(&g);
    let info = GraphInfo {
        n: g.n(),
        edges: g.edge_count(),
        seed: gs,
        profile_digest: hex::encode(g.profile_digest()),
        content_digest: hex::encode(g.content_digest()),
        strongly_connected: sc,
        components,
    };
    out.write("graph.cldg", &g.to_bytes())?;
    out.write("profile.txt", profile.to_text().as_bytes())?;
    out.write_json("graph.json", &info)?;
    out.write_json("degrees.json", &degree_summary(&g, cfg.c_degree))?;
    let summary = format!("n={} edges={} strongly_connected={} digest={}", info.n, info.edges, sc, info.content_digest);
    Ok((summary, vec![gs], false))
}

// ------------------------------------------------------------------- stats

fn stats(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let n = cfg.n0();
    let profile = build_profile(cfg, n)?;
    let exact = entropy::entropy_stats_exact(&profile)?;
    let nd = entropy::nondegeneracy_check(&exact, n, cfg.delta.unwrap_or(f64::INFINITY))?;
    let mu = profile.in_degree_distribution();
    let seeds = replica_seeds(cfg, cfg.replicas);
    let rows = chunglu_core::par::map_slice(&seeds, |&gs| -> CliResult<String> {
        let g = sample_digraph(&profile, gs);
        let d = degree_summary(&g, cfg.c_degree);
        let (sc, comps) = strongly_connected(&g);
        let emp = entropy::entropy_stats_empirical(&g, &mu)?;
        Ok(format!(
            "{gs},{},{},{},{},{},{},{},{},{sc},{comps}",
            g.edge_count(),
            d.delta_plus,
            d.big_delta_plus,
            d.delta_minus,
            d.big_delta_minus,
            u8::from(d.e_plus_holds),
            g9(d.c_empirical),
            g9(emp.h)
        ))
    });
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    out.write_json("validation.json", &profile.validate(1.0))?;
    out.write_json("stats.json", &StatsRecord::new(&exact, nd))?;
    out.write(
        "graphs.csv",
        csv("graph_seed,edges,min_out,max_out,min_in,max_in,e_plus,c_empirical,h_empirical,strongly_connected,components", rows).as_bytes(),
    )?;
    let summary = format!("n={n} H={} sigma2={} t_ent={} w_n={}", g9(exact.h), g9(exact.sigma2), g9(exact.t_ent), g9(exact.w_n));
    Ok((summary, seeds, false))
}

// --------------------------------------------------------------------- mix

#[derive(Serialize)]
struct MixSummary {
    n: usize,
    graph_seed: u64,
    t_ent: f64,
    eps: f64,
    starts: Vec<usize>,
    mixing_times: Vec<Option<usize>>,
}

fn mix(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let n = cfg.n0();
    let profile = build_profile(cfg, n)?;
    let stats = entropy::entropy_stats_exact(&profile)?;
    let (g, gs) = ex::replica_graph(&profile, cfg.seed, 0);
    let (sc, comps) = strongly_connected(&g);
    if !sc {
        return Err(chunglu_core::Error::Experiment(format!("graph {gs:#x} is not strongly connected ({comps} components)")).into());
    }
    let pi = ex::stationary(&g, &profile)?;
    let starts = ex::sample_starts(n, cfg.starts, cfg.seed, 0);
    let curve = walk::tv_curve(&g, &pi, &starts, cfg.t_max, stats.t_ent)?;
    let times: Vec<Option<usize>> = chunglu_core::par::map_slice(&starts, |&x| {
        walk::mixing_time(&g, &pi, x, MIX_EPS, cfg.t_max).map(|m| match m {
            MixingTime::At(t) => Some(t),
            MixingTime::Exceeded => None,
        })
    })
    .into_iter()
    .collect::<Result<_, _>>()
    ?;
    out.write("curve.csv", curve.to_csv().as_bytes())?;
    out.write("stationary.csv", csv("vertex,pi", pi.values().iter().enumerate().map(|(v, p)| format!("{v},{}", g9(*p)))).as_bytes())?;
    let s = MixSummary { n, graph_seed: gs, t_ent: stats.t_ent, eps: MIX_EPS, starts, mixing_times: times };
    out.write_json("mix.json", &s)?;
    let mixed: Vec<usize> = s.mixing_times.iter().flatten().copied().collect();
    let summary = format!(
        "n={n} t_ent={} mixing times (eps={MIX_EPS}) min={:?} max={:?} unmixed={}",
        g9(stats.t_ent),
        mixed.iter().min(),
        mixed.iter().max(),
        s.mixing_times.len() - mixed.len()
    );
    Ok((summary, vec![gs], false))
}

// ------------------------------------------------------------------ cutoff

fn cutoff(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let mut rep = ex::cutoff(&ex::CutoffConfig {
        profile: cfg.weights.clone(),
        n: cfg.n0(),
        replicas: cfg.replicas,
        starts: cfg.starts,
        beta: cfg.beta,
        seed: cfg.seed,
    })?;
    let mut rows = Vec::new();
    let mut curves = String::from("replica,start,t,tv\n");
    for r in &rep.replicas {
        if r.strongly_connected {
            for (i, x) in r.starts.iter().enumerate() {
                rows.push(format!("{},{},true,{x},{},{}", r.replica, r.graph_seed, g9(r.tv_lower[i]), g9(r.tv_upper[i])));
            }
        } else {
            rows.push(format!("{},{},false,,,", r.replica, r.graph_seed));
        }
        if let Some(c) = &r.curve {
            for (x, row) in c.start_vertices.iter().zip(&c.tv) {
                for (t, v) in row.iter().enumerate() {
                    let _ = writeln!(curves, "{},{x},{t},{}", r.replica, g9(*v));
                }
            }
        }
    }
    out.write("cutoff.csv", csv("replica,graph_seed,strongly_connected,start,tv_lower,tv_upper", rows).as_bytes())?;
    out.write("curves.csv", curves.as_bytes())?;
    let seeds = rep.replicas.iter().map(|r| r.graph_seed).collect();
    for r in &mut rep.replicas {
        r.curve = None;
    }
    out.write_json("summary.json", &rep)?;
    let summary = format!(
        "n={} t_lower={} t_upper={} mean_tv_lower={} mean_tv_upper={} min_lower={} max_upper={} used={} skipped={}",
        rep.n,
        rep.t_lower,
        rep.t_upper,
        g9(rep.mean_lower),
        g9(rep.mean_upper),
        g9(rep.min_lower),
        g9(rep.max_upper),
        rep.used,
        rep.skipped
    );
    Ok((summary, seeds, false))
}

// ----------------------------------------------------------------- profile

fn profile(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let rep = ex::profile(&ex::ProfileConfig {
        profile: cfg.weights.clone(),
        n: cfg.n0(),
        replicas: cfg.replicas,
        starts: cfg.starts,
        lambdas: cfg.lambdas.clone(),
        delta: cfg.delta,
        seed: cfg.seed,
    })?;
    if !rep.nondegeneracy.ok {
        eprintln!(
            "warning: nondegeneracy check failed (ratio {}); the Gaussian comparison may not apply",
            g9(rep.nondegeneracy.ratio)
        );
    }
    let rows = rep.rows.iter().map(|r| format!("{},{},{},{},{}", g9(r.lambda), r.t_lambda, g9(r.mean_tv), g9(r.gauss), g9(r.diff)));
    out.write("profile.csv", csv("lambda,t_lambda,mean_tv,gauss,diff", rows).as_bytes())?;
    out.write_json("summary.json", &rep)?;
    let summary = format!(
        "n={} max_diff={} nondegenerate={} used={} skipped={}",
        rep.n,
        g9(rep.max_diff),
        rep.nondegeneracy.ok,
        rep.used,
        rep.skipped
    );
    Ok((summary, replica_seeds(cfg, cfg.replicas), false))
}

// ----------------------------------------------------------------- entropy

fn entropy_cmd(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let n = cfg.n0();
    let profile = build_profile(cfg, n)?;
    let exact = entropy::entropy_stats_exact(&profile)?;
    let nd = entropy::nondegeneracy_check(&exact, n, cfg.delta.unwrap_or(f64::INFINITY))?;
    out.write_json("stats.json", &StatsRecord::new(&exact, nd))?;
    let trend = ex::entropy_trend(&cfg.weights, &cfg.n, cfg.seed)?;
    let rows = trend.iter().map(|r| format!("{},{},{},{},{},{}", r.n, g9(r.h), g9(r.sigma2), g9(r.ln_ln_n), g9(r.ratio), g9(r.sigma2_ratio)));
    out.write("entropy.csv", csv("n,H,sigma2,ln_ln_n,ratio,sigma2_ratio", rows).as_bytes())?;
    let gq = ex::gaussian_q(&cfg.weights, n, &cfg.lambdas, cfg.delta, cfg.samples, cfg.seed)?;
    let rows = gq.rows.iter().map(|r| {
        format!("{},{},{},{},{},{},{},{}", g9(r.lambda), r.t, g9(r.theta), g9(r.q.value), g9(r.q.ci_lo), g9(r.q.ci_hi), g9(r.gauss), g9(r.diff))
    });
    out.write("gaussian_q.csv", csv("lambda,t,theta,q,ci_lo,ci_hi,gauss,diff", rows).as_bytes())?;
    let summary = format!(
        "n={n} H={} sigma2={} t_ent={} gaussian max_diff={}",
        g9(exact.h),
        g9(exact.sigma2),
        g9(exact.t_ent),
        g9(gq.max_diff)
    );
    Ok((summary, vec![], false))
}

// ---------------------------------------------------------------- quenched

#[derive(Serialize)]
struct QSummary {
    n: usize,
    t: usize,
    exponents: Vec<f64>,
    means: Vec<f64>,
    skipped_sinks: usize,
    stats: entropy::EntropicStats,
}

fn quenched(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let rep = ex::q_dichotomy(&ex::QDichotomyConfig {
        profile: cfg.weights.clone(),
        n: cfg.n0(),
        graphs: cfg.graphs,
        starts: cfg.starts,
        exponents: cfg.exponents.clone(),
        samples: cfg.samples,
        seed: cfg.seed,
    })?;
    out.write("q.csv", chunglu_core::quenched::q_csv(&rep.rows).as_bytes())?;
    let s = QSummary { n: rep.n, t: rep.t, exponents: cfg.exponents.clone(), means: rep.means.clone(), skipped_sinks: rep.skipped_sinks, stats: rep.stats };
    out.write_json("summary.json", &s)?;
    let means: Vec<String> = cfg.exponents.iter().zip(&rep.means).map(|(a, m)| format!("Q(n^-{a})={}", g9(*m))).collect();
    Ok((format!("n={} t={} {}", rep.n, rep.t, means.join(" ")), replica_seeds(cfg, cfg.graphs), false))
}

// -------------------------------------------------------------- structures

fn structures_cmd(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let rep = ex::structural(&ex::StructuralConfig {
        profile: cfg.weights.clone(),
        n: cfg.n0(),
        graphs: cfg.graphs,
        eps: cfg.eps,
        c_degree: cfg.c_degree,
        roots: cfg.roots,
        seed: cfg.seed,
    })?;
    out.write_json("structural.json", &rep)?;
    // Roots and one full mass-tree log for the first graph.
    let profile = build_profile(cfg, cfg.n0())?;
    let (g, _) = ex::replica_graph(&profile, cfg.seed, 0);
    let roots = structures::roots(&g, rep.params.h_eps);
    out.write("roots.txt", structures::roots_text(&roots).as_bytes())?;
    if let Some(&x) = roots.first() {
        let mt = structures::build_mass_tree(&g, x, rep.params.s, rep.params.h_bar);
        out.write("masstree.txt", mt.dump().as_bytes())?;
    }
    let summary = format!(
        "n={} h_eps={}{} s={} P(E+)={} P(S-)={} P(excess>=2)={} mass_tree_ok={} coverage_ok={} mean_coverage={}",
        cfg.n0(),
        rep.params.h_eps,
        if rep.params.clamped { " (clamped)" } else { "" },
        rep.params.s,
        g9(rep.p_e_plus),
        g9(rep.p_s_minus),
        g9(rep.p_bad_excess),
        rep.mass_tree_all_ok,
        g9(rep.coverage_ok_fraction),
        g9(rep.mean_coverage)
    );
    Ok((summary, rep.graphs.iter().map(|g| g.graph_seed).collect(), false))
}

// ---------------------------------------------------------------- annealed

#[derive(Serialize)]
struct AnnealedSummary {
    n: usize,
    k: usize,
    t: usize,
    runs: u64,
    stuck_runs: u64,
    fresh_law: annealed::FreshLaw,
    self_intersection: annealed::SelfIntersection,
    self_intersection_k_n_scale: f64,
    meeting: annealed::Meeting,
}

fn annealed_cmd(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let n = cfg.n0();
    let profile = build_profile(cfg, n)?;
    let uniform = ProbVector::uniform(n);
    let seeds: Vec<u64> = (0..cfg.runs).map(|i| rng::derive_seed(cfg.seed, Domain::Annealed, i)).collect();
    let lines = chunglu_core::par::map_slice(&seeds, |&s| match annealed::run_annealed(&profile, &uniform, cfg.k, cfg.t, s) {
        Ok((trace, _)) => Ok(Some(RunRecord::new(s, &trace).to_json_line())),
        Err(annealed::AnnealedError::Stuck { .. }) => Ok(None),
        Err(e) => Err(e),
    });
    let mut jsonl = String::new();
    let mut stuck = 0;
    for l in lines {
        match l? {
            Some(line) => {
                jsonl.push_str(&line);
                jsonl.push('\n');
            }
            None => stuck += 1,
        }
    }
    out.write("runs.jsonl", jsonl.as_bytes())?;
    let sub = |i: u64| rng::derive_seed(cfg.seed, Domain::Annealed, u64::MAX - i);
    let fresh = annealed::fresh_vertex_law(&profile, cfg.t, cfg.runs, sub(0))?;
    let si = annealed::self_intersection_stats(&profile, cfg.t, cfg.runs, sub(1))?;
    let meeting = annealed::meeting_probability(&profile, cfg.h, cfg.runs, sub(2))?;
    let s = AnnealedSummary {
        n,
        k: cfg.k,
        t: cfg.t,
        runs: cfg.runs,
        stuck_runs: stuck,
        self_intersection_k_n_scale: (cfg.t * cfg.t) as f64 / n as f64,
        fresh_law: fresh,
        self_intersection: si,
        meeting,
    };
    out.write_json("annealed.json", &s)?;
    let summary = format!(
        "n={n} T={} fresh_rate={} fresh TV to mu_in={} P(tau<T)={} meeting(h={})={}",
        cfg.t,
        g9(s.fresh_law.fresh_rate.value),
        g9(s.fresh_law.tv_to_mu_in),
        g9(s.self_intersection.estimate.value),
        cfg.h,
        g9(s.meeting.estimate.value)
    );
    Ok((summary, seeds, false))
}

// -------------------------------------------------------------- stationary

fn stationary(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let graphs = vec![cfg.graphs; cfg.n.len()];
    let rep = ex::stationary_mass(&cfg.weights, &cfg.n, &graphs, cfg.mass_delta, cfg.seed)?;
    let rows = rep.rows.iter().map(|r| {
        format!(
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.graph_seed,
            r.top_k,
            g9(r.top_mass),
            g9(r.top_bound),
            r.top_ok,
            g9(r.sum_sq),
            g9(r.normalized_sum_sq)
        )
    });
    out.write("stationary.csv", csv("n,graph_seed,top_k,top_mass,top_bound,top_ok,sum_sq,normalized_sum_sq", rows).as_bytes())?;
    out.write_json("summary.json", &rep)?;
    let per_n: Vec<String> = rep.per_n.iter().map(|(n, f, ok)| format!("n={n}: top_ok={} sum_sq_ok={ok}", g9(*f))).collect();
    let summary = format!("C={} skipped={} {}", g9(rep.c_fit), rep.skipped, per_n.join("; "));
    Ok((summary, rep.rows.iter().map(|r| r.graph_seed).collect(), false))
}

// ------------------------------------------------------------------ oracle

fn oracle(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Done> {
    let oc = if cfg.oracle_quick { quick_oracle(cfg.seed) } else { OracleConfig { seed: cfg.seed, ..OracleConfig::default() } };
    let results = ex::oracle_suite(&oc, cfg.fault)?;
    let mut text = String::new();
    for r in &results {
        let _ = writeln!(text, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    out.write("oracle.txt", text.as_bytes())?;
    out.write_json("oracle.json", &results)?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let summary = if failed.is_empty() {
        format!("{text}all {} oracles passed", results.len())
    } else {
        format!("{text}{} of {} oracles failed: {}", failed.len(), results.len(), failed.join(", "))
    };
    Ok((summary, vec![cfg.seed], !failed.is_empty()))
}

/// Loads a graph written by `generate` and checks it against `graph.json`.
pub fn check_generated(dir: &std::path::Path) -> CliResult<bool> {
    let g = graphgen::Digraph::load(&dir.join("graph.cldg"))?;
    let info: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("graph.json"))?).map_err(std::io::Error::other)?;
    Ok(info["content_digest"].as_str() == Some(hex::encode(g.content_digest()).as_str()))
}
