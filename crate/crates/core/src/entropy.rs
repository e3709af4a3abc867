//! Entropic statistics of the out-degree seen from `μ_in`.
//!
//! `D_x⁺` is Poisson-binomial with parameters `p_xy`, `y ≠ x`. Since `p_xy`
//! depends on `x` only through `w⁺_x`, one convolution per distinct
//! out-weight gives a class law over all `n` targets; removing the vertex's
//! own Bernoulli(`p_xx`) term afterwards is a single deconvolution step.

use std::collections::HashMap;

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::graphgen::{Digraph, RowSampler};
use crate::model::WeightProfile;
use crate::par;
use crate::rng::{self, Domain};
use crate::stats::{Estimate, Moments, Z95};
use crate::walk::ProbVector;

/// Default certified truncation error of a degree law.
pub const TAIL_TOL: f64 = 1e-12;
/// Most out-weight classes handled by the exact engine.
pub const MAX_CLASSES: usize = 64;
/// Monte Carlo batch size; batches own their random streams.
const BATCH: u64 = 1 << 14;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("{classes} distinct out-weights exceed the exact limit of {max}; use the Monte Carlo estimator")]
    TooManyClasses { classes: usize, max: usize },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("entropy is zero: every relevant out-degree is at most 1")]
    ZeroEntropy,
}

/// Law of one out-degree, truncated where its upper tail is below the
/// requested tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeLaw {
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub source_class: f64,
}

impl DegreeLaw {
    fn from_pmf(pmf: Vec<f64>, source_class: f64) -> Self {
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        DegreeLaw { pmf, mean, source_class }
    }

    /// `E[f(D)]`.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| p * f(k)).sum()
    }

    /// `r` in `E[1/(D ∨ 1)] = (1 + r) / E[D]`.
    pub fn reciprocal_excess(&self) -> f64 {
        self.expect(|k| 1.0 / k.max(1) as f64) * self.mean - 1.0
    }
}

/// `ln(k ∨ 1)`.
#[inline]
pub fn log_deg(k: usize) -> f64 {
    (k.max(1) as f64).ln()
}

/// Smallest `k` such that the Chernoff bound `exp(−t²/(2(μ + t/3)))` on
/// `P(D ≥ μ + t)` is below `tol`, for `k = μ + t`; capped at `cap`.
pub fn chernoff_kmax(mean: f64, tol: f64, cap: usize) -> usize {
    let l = (1.0 / tol).ln();
    let t = l / 3.0 + (l * l / 9.0 + 2.0 * l * mean).sqrt();
    ((mean + t).ceil() as usize).min(cap)
}

/// Poisson-binomial pmf on `0..=k_max`; the mass above `k_max` is dropped
/// and the rest renormalized.
pub fn poisson_binomial(params: &[f64], k_max: usize) -> Vec<f64> {
    let k_max = k_max.min(params.len());
    let mut pmf = vec![0.0; k_max + 1];
    pmf[0] = 1.0;
    let mut top = 0usize;
    for &p in params {
        if p == 0.0 {
            continue;
        }
        let q = 1.0 - p;
        let new_top = (top + 1).min(k_max);
        // At the cap, the mass moving past k_max is dropped.
        if new_top > top {
            pmf[new_top] = pmf[top] * p;
        }
        for k in (1..=top).rev() {
            pmf[k] = pmf[k] * q + pmf[k - 1] * p;
        }
        pmf[0] *= q;
        top = new_top;
    }
    normalize(&mut pmf);
    pmf
}

fn normalize(pmf: &mut [f64]) {
    pmf.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = pmf.iter().sum();
    if s > 0.0 {
        pmf.iter_mut().for_each(|v| *v /= s);
    }
}

/// Adds one Bernoulli(`p`) summand.
pub fn add_bernoulli(f: &[f64], p: f64) -> Vec<f64> {
    let mut g = vec![0.0; f.len() + 1];
    for (k, &v) in f.iter().enumerate() {
        g[k] += v * (1.0 - p);
        g[k + 1] += v * p;
    }
    g
}

/// Removes one Bernoulli(`p`) summand from `f`: returns `g` with
/// `f = g * Bernoulli(p)`. The recursion runs upward for `p ≤ 1/2` and
/// downward otherwise, so errors are never amplified.
pub fn remove_bernoulli(f: &[f64], p: f64) -> Vec<f64> {
    let len = f.len().saturating_sub(1).max(1);
    let mut g = vec![0.0; len];
    if p == 0.0 {
        g = f.to_vec();
    } else if p >= 1.0 {
        g.copy_from_slice(&f[1..=len]);
    } else if p <= 0.5 {
        let q = 1.0 - p;
        g[0] = f[0] / q;
        for k in 1..len {
            g[k] = (f[k] - p * g[k - 1]) / q;
        }
    } else {
        let q = 1.0 - p;
        g[len - 1] = f[len] / p;
        for k in (1..len).rev() {
            g[k - 1] = (f[k] - q * g[k]) / p;
        }
    }
    normalize(&mut g);
    g
}

/// Vertices grouped by their exact out-weight, in increasing weight order.
pub fn out_classes(profile: &WeightProfile) -> Vec<(f64, Vec<usize>)> {
    let mut map: HashMap<u64, Vec<usize>> = HashMap::new();
    for (x, w) in profile.w_plus().iter().enumerate() {
        map.entry(w.to_bits()).or_default().push(x);
    }
    let mut classes: Vec<(f64, Vec<usize>)> = map.into_iter().map(|(b, v)| (f64::from_bits(b), v)).collect();
    classes.sort_by(|a, b| a.0.total_cmp(&b.0));
    classes
}

/// Law of `Σ_y Bernoulli(min(w_plus · w⁻_y · ln n / n, 1))` over *all* `y`.
pub fn class_law(profile: &WeightProfile, w_plus: f64, tail_tol: f64) -> DegreeLaw {
    let a = w_plus * profile.scale();
    let params: Vec<f64> = profile.w_minus().iter().map(|w| (a * w).min(1.0)).collect();
    let mean: f64 = params.iter().sum();
    let k_max = chernoff_kmax(mean, tail_tol, params.len());
    DegreeLaw::from_pmf(poisson_binomial(&params, k_max), w_plus)
}

/// Exact law of `D⁺_x`.
pub fn degree_law_exact(profile: &WeightProfile, x: usize, tail_tol: f64) -> DegreeLaw {
    let class = class_law(profile, profile.w_plus()[x], tail_tol);
    DegreeLaw::from_pmf(remove_bernoulli(&class.pmf, profile.p(x, x)), class.source_class)
}

/// Law of `D⁺_V` with `V ~ μ_in`: the mixture of all vertex laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureLaw {
    pub pmf: Vec<f64>,
    pub n: usize,
}

impl MixtureLaw {
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| p * f(k)).sum()
    }

    /// `H = E[ln(D ∨ 1)]`.
    pub fn h(&self) -> f64 {
        self.expect(log_deg)
    }

    pub fn sigma2(&self) -> f64 {
        let h = self.h();
        self.expect(|k| (log_deg(k) - h).powi(2))
    }

    /// `E|ln(D ∨ 1) − H|^p`.
    pub fn central_abs_moment(&self, p: f64) -> f64 {
        let h = self.h();
        self.expect(|k| (log_deg(k) - h).abs().powf(p))
    }

    /// Degenerate law `D ≡ d`, for tests and toy checks.
    pub fn degenerate(d: usize, n: usize) -> Self {
        let mut pmf = vec![0.0; d + 1];
        pmf[d] = 1.0;
        MixtureLaw { pmf, n }
    }

    /// Sampler of `ln(D ∨ 1)`.
    pub fn sampler(&self) -> LogDegreeSampler {
        let support: Vec<usize> = (0..self.pmf.len()).filter(|&k| self.pmf[k] > 0.0).collect();
        let weights: Vec<f64> = support.iter().map(|&k| self.pmf[k]).collect();
        LogDegreeSampler {
            alias: WeightedAliasIndex::new(weights).expect("mixture law has positive mass"),
            logs: support.iter().map(|&k| log_deg(k)).collect(),
        }
    }
}

pub struct LogDegreeSampler {
    alias: WeightedAliasIndex<f64>,
    logs: Vec<f64>,
}

impl LogDegreeSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.logs[self.alias.sample(rng)]
    }
}

fn check_classes(profile: &WeightProfile) -> Result<Vec<(f64, Vec<usize>)>, EntropyError> {
    let classes = out_classes(profile);
    if classes.len() > MAX_CLASSES {
        return Err(EntropyError::TooManyClasses { classes: classes.len(), max: MAX_CLASSES });
    }
    Ok(classes)
}

/// Exact mixture law: one convolution per out-weight class, one
/// deconvolution per distinct `(w⁺, w⁻)` pair.
pub fn mixture_law(profile: &WeightProfile, tail_tol: f64) -> Result<MixtureLaw, EntropyError> {
    let classes = check_classes(profile)?;
    let parts = par::map_slice(&classes, |(w, members)| {
        let class = class_law(profile, *w, tail_tol);
        let mut acc = vec![0.0; class.pmf.len()];
        let mut by_in: HashMap<u64, f64> = HashMap::new();
        for &x in members {
            *by_in.entry(profile.w_minus()[x].to_bits()).or_default() += profile.mu_in(x);
        }
        let mut groups: Vec<(u64, f64)> = by_in.into_iter().collect();
        groups.sort_by_key(|g| g.0);
        for (bits, weight) in groups {
            let p_self = (w * f64::from_bits(bits) * profile.scale()).min(1.0);
            for (k, v) in remove_bernoulli(&class.pmf, p_self).into_iter().enumerate() {
                acc[k] += weight * v;
            }
        }
        acc
    });
    let len = parts.iter().map(Vec::len).max().unwrap_or(1);
    let mut pmf = vec![0.0; len];
    for part in parts {
        for (k, v) in part.into_iter().enumerate() {
            pmf[k] += v;
        }
    }
    normalize(&mut pmf);
    Ok(MixtureLaw { pmf, n: profile.n() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropicStats {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: f64,
    pub sigma2: f64,
    pub t_ent: f64,
    pub w_n: f64,
    pub method: Method,
    pub samples: u64,
    pub ci_halfwidth: f64,
}

impl EntropicStats {
    /// Fills in `t_ent = ln n / H` and `w_n = (σ/H)·√t_ent`.
    pub fn new(n: usize, h: f64, sigma2: f64, method: Method, samples: u64, ci_halfwidth: f64) -> Result<Self, EntropyError> {
        if !(h > 0.0) {
            return Err(EntropyError::ZeroEntropy);
        }
        let t_ent = (n as f64).ln() / h;
        let w_n = sigma2.max(0.0).sqrt() / h * t_ent.sqrt();
        Ok(EntropicStats { n, h, sigma2, t_ent, w_n, method, samples, ci_halfwidth })
    }

    /// `H`, `σ²` of a known mixture law.
    pub fn from_law(law: &MixtureLaw) -> Result<Self, EntropyError> {
        Self::new(law.n, law.h(), law.sigma2(), Method::Exact, 0, 0.0)
    }
}

pub fn entropy_stats_exact(profile: &WeightProfile) -> Result<EntropicStats, EntropyError> {
    EntropicStats::from_law(&mixture_law(profile, TAIL_TOL)?)
}

/// How the Monte Carlo estimator draws a degree for the sampled vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum McSource {
    /// Inverse-CDF draw from the vertex's exact law.
    ClassLaw,
    /// Simulate the vertex's Bernoulli row with the graph sampler.
    RowSimulation,
}

/// `V ~ μ_in`, `D ~ law(D⁺_V)`; `H` and `σ²` are the sample mean and
/// variance of `ln(D ∨ 1)`, with a 95% normal half-width for `H`.
pub fn entropy_stats_mc(profile: &WeightProfile, samples: u64, seed: u64, source: McSource) -> Result<EntropicStats, EntropyError> {
    if samples < 1000 {
        return Err(EntropyError::TooFewSamples { min: 1000, got: samples });
    }
    let mu = WeightedAliasIndex::new(profile.w_minus().to_vec()).expect("positive in-weights");
    let source = match source {
        McSource::ClassLaw if out_classes(profile).len() <= MAX_CLASSES => source,
        _ => McSource::RowSimulation,
    };
    let class_cdfs: HashMap<u64, Vec<f64>> = match source {
        McSource::ClassLaw => out_classes(profile)
            .into_iter()
            .map(|(w, _)| (w.to_bits(), class_law(profile, w, TAIL_TOL).pmf))
            .collect(),
        McSource::RowSimulation => HashMap::new(),
    };
    let rows = RowSampler::new(profile);
    let vertex_cdf = |x: usize| -> Vec<f64> {
        let class = &class_cdfs[&profile.w_plus()[x].to_bits()];
        let mut g = remove_bernoulli(class, profile.p(x, x));
        let mut acc = 0.0;
        g.iter_mut().for_each(|v| {
            acc += *v;
            *v = acc;
        });
        g
    };
    let parts = par::map_slice(&par::batches(samples, BATCH), |&(b, len)| {
        let mut r = rng::stream(seed, Domain::EntropyMc, b);
        let mut m = Moments::default();
        let mut cache: HashMap<usize, Vec<f64>> = HashMap::new();
        for _ in 0..len {
            let x = mu.sample(&mut r);
            let d = match source {
                McSource::ClassLaw => {
                    let cdf = cache.entry(x).or_insert_with(|| vertex_cdf(x));
                    let u: f64 = r.random();
                    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
                }
                McSource::RowSimulation => rows.sample_row(x, &mut r).len(),
            };
            m.push(log_deg(d));
        }
        m
    });
    let mut all = Moments::default();
    parts.iter().for_each(|m| all.merge(m));
    let half = Z95 * (all.sample_variance() / samples as f64).sqrt();
    EntropicStats::new(profile.n(), all.mean(), all.variance(), Method::MonteCarlo, samples, half)
}

/// Plug-in estimate on one realization: `Σ_x μ(x) ln(D⁺_x ∨ 1)`.
pub fn entropy_stats_empirical(g: &Digraph, mu_in: &ProbVector) -> Result<EntropicStats, EntropyError> {
    let mu = mu_in.values();
    let h: f64 = (0..g.n()).map(|x| mu[x] * log_deg(g.out_degree(x))).sum();
    let s2: f64 = (0..g.n()).map(|x| mu[x] * (log_deg(g.out_degree(x)) - h).powi(2)).sum();
    EntropicStats::new(g.n(), h, s2, Method::Empirical, 1, 0.0)
}

/// `q_t(θ) = P(S_t < −ln θ)` for `S_t` a sum of `t` i.i.d. copies of
/// `ln(D ∨ 1)` under the mixture law, estimated from `samples` draws.
pub fn q_t(law: &MixtureLaw, t: usize, theta: f64, samples: u64, seed: u64) -> Result<Estimate, EntropyError> {
    if t == 0 {
        return Err(EntropyError::BadParameter("t must be at least 1".into()));
    }
    if !(theta > 0.0) {
        return Err(EntropyError::BadParameter(format!("theta = {theta}")));
    }
    let bound = -theta.ln();
    let sampler = law.sampler();
    let hits: u64 = par::map_slice(&par::batches(samples, BATCH), |&(b, len)| {
        let mut r = rng::stream(seed, Domain::PathMass, b);
        (0..len).filter(|_| (0..t).map(|_| sampler.sample(&mut r)).sum::<f64>() < bound).count() as u64
    })
    .iter()
    .sum();
    Ok(Estimate::wilson(hits, samples))
}

/// Solves `(ln θ + H t) / (σ √t) = λ` for `θ`.
pub fn theta_for_lambda(stats: &EntropicStats, t: usize, lambda: f64) -> f64 {
    let t = t as f64;
    (lambda * stats.sigma2.sqrt() * t.sqrt() - stats.h * t).exp()
}

/// Standard normal upper tail `P(Z > λ)`.
pub fn gaussian_tail(lambda: f64) -> f64 {
    0.5 * erfc(lambda / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nondegeneracy {
    /// `None` encodes the `δ → ∞` form.
    pub delta: Option<f64>,
    pub ratio: f64,
    pub ok: bool,
}

/// `σ² / [(ln ln n)^(2 + δ/(δ+2)) / (ln n)^(δ/(δ+2))]`; the check passes
/// when the ratio exceeds 1. An infinite `δ` gives `σ² ln n / (ln ln n)³`.
pub fn nondegeneracy_check(stats: &EntropicStats, n: usize, delta: f64) -> Result<Nondegeneracy, EntropyError> {
    if !(delta > 0.0) {
        return Err(EntropyError::BadParameter(format!("delta = {delta}")));
    }
    let ln_n = (n as f64).ln();
    let lnln = ln_n.ln();
    let a = if delta.is_infinite() { 1.0 } else { delta / (delta + 2.0) };
    let scale = lnln.powf(2.0 + a) / ln_n.powf(a);
    let ratio = stats.sigma2 / scale;
    Ok(Nondegeneracy { delta: delta.is_finite().then_some(delta), ratio, ok: ratio > 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lyapunov {
    pub t: usize,
    pub delta: f64,
    /// Monte Carlo estimate of `Σ_{k≤t} E|L_k − H|^(2+δ) / Var(S_t)^(1+δ/2)`.
    pub ratio: f64,
    /// The same ratio from exact mixture moments.
    pub exact_ratio: f64,
    pub samples: u64,
}

pub fn lyapunov_diagnostic(law: &MixtureLaw, t: usize, delta: f64, samples: u64, seed: u64) -> Result<Lyapunov, EntropyError> {
    if !(delta > 0.0) || t == 0 || samples < 2 {
        return Err(EntropyError::BadParameter(format!("t = {t}, delta = {delta}, samples = {samples}")));
    }
    let sampler = law.sampler();
    let draws: Vec<f64> = par::map_slice(&par::batches(samples, BATCH), |&(b, len)| {
        let mut r = rng::stream(seed, Domain::Lyapunov, b);
        (0..len).map(|_| sampler.sample(&mut r)).collect::<Vec<f64>>()
    })
    .concat();
    let mut m = Moments::default();
    draws.iter().for_each(|&x| m.push(x));
    let abs = draws.iter().map(|x| (x - m.mean()).abs().powf(2.0 + delta)).sum::<f64>() / draws.len() as f64;
    let ratio_of = |abs_moment: f64, var: f64| {
        if abs_moment == 0.0 {
            0.0
        } else {
            t as f64 * abs_moment / (t as f64 * var).powf(1.0 + delta / 2.0)
        }
    };
    Ok(Lyapunov {
        t,
        delta,
        ratio: ratio_of(abs, m.variance()),
        exact_ratio: ratio_of(law.central_abs_moment(2.0 + delta), law.sigma2()),
        samples,
    })
}

/// The JSON record written by the stats and entropy commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsRecord {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: f64,
    pub sigma2: f64,
    pub t_ent: f64,
    pub w_n: f64,
    pub method: Method,
    pub samples: u64,
    pub ci_halfwidth: f64,
    pub nondegeneracy: Nondegeneracy,
}

impl StatsRecord {
    pub fn new(stats: &EntropicStats, nondegeneracy: Nondegeneracy) -> Self {
        StatsRecord {
            n: stats.n,
            h: stats.h,
            sigma2: stats.sigma2,
            t_ent: stats.t_ent,
            w_n: stats.w_n,
            method: stats.method,
            samples: stats.samples,
            ci_halfwidth: stats.ci_halfwidth,
            nondegeneracy,
        }
    }
}
