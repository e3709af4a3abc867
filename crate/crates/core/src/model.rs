//! Weight profiles and the closed-form quantities of the model.
//!
//! A profile holds out-weights `w⁺` and in-weights `w⁻` with equal sums
//! `W`; the ordered pair `(x, y)`, `x ≠ y`, is an edge with probability
//! `min(w⁺_x · w⁻_y · ln n / n, 1)`.

use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng::{self, Domain};
use crate::walk::ProbVector;

/// Relative tolerance for the equal-sum requirement.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("no self-loops: x = y = {0}")]
    SelfPair(usize),
    #[error("profile needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("w_plus has {plus} entries but w_minus has {minus}")]
    LengthMismatch { plus: usize, minus: usize },
    #[error("weight {which}[{vertex}] = {value} is not a positive finite number")]
    BadWeight { which: &'static str, vertex: usize, value: f64 },
    #[error("weight sums differ: sum(w_plus) = {plus}, sum(w_minus) = {minus}")]
    UnequalSums { plus: f64, minus: f64 },
    #[error("profile file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad weight spec {spec:?}: {msg}")]
    Spec { spec: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The constants of the standing assumptions: `m0 ≤ w⁺ ≤ m1` and
/// `Σ (w⁻)^(2+η) ≤ m2 · n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    pub eta: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

pub const DEFAULT_ETA: f64 = 0.5;

impl AssumptionConstants {
    /// The tightest constants satisfied by the given weights.
    pub fn fitted(w_plus: &[f64], w_minus: &[f64], eta: f64) -> Self {
        let m0 = w_plus.iter().copied().fold(f64::INFINITY, f64::min);
        let m1 = w_plus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m2 = w_minus.iter().map(|w| w.powf(2.0 + eta)).sum::<f64>() / w_minus.len() as f64;
        AssumptionConstants { eta, m0, m1, m2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    w_plus: Vec<f64>,
    w_minus: Vec<f64>,
    consts: AssumptionConstants,
    total: f64,
    scale: f64,
}

impl WeightProfile {
    /// Builds a profile. Weights must be positive and finite with equal sums
    /// (relative tolerance [`SUM_TOL`]); the assumption constants are only
    /// checked by [`WeightProfile::validate`].
    pub fn new(w_plus: Vec<f64>, w_minus: Vec<f64>, consts: AssumptionConstants) -> Result<Self, ModelError> {
        if w_plus.len() != w_minus.len() {
            return Err(ModelError::LengthMismatch { plus: w_plus.len(), minus: w_minus.len() });
        }
        let n = w_plus.len();
        if n < 2 {
            return Err(ModelError::TooSmall(n));
        }
        for (which, ws) in [("w_plus", &w_plus), ("w_minus", &w_minus)] {
            if let Some((vertex, &value)) = ws.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
                return Err(ModelError::BadWeight { which, vertex, value });
            }
        }
        let plus: f64 = w_plus.iter().sum();
        let minus: f64 = w_minus.iter().sum();
        if (plus - minus).abs() > SUM_TOL * plus.max(minus) {
            return Err(ModelError::UnequalSums { plus, minus });
        }
        let nf = n as f64;
        Ok(WeightProfile { w_plus, w_minus, consts, total: plus, scale: nf.ln() / nf })
    }

    /// Like [`WeightProfile::new`] with constants fitted to the weights.
    pub fn with_fitted_constants(w_plus: Vec<f64>, w_minus: Vec<f64>, eta: f64) -> Result<Self, ModelError> {
        let consts = AssumptionConstants::fitted(&w_plus, &w_minus, eta);
        Self::new(w_plus, w_minus, consts)
    }

    /// Multiplies `w_minus` by `sum(w_plus) / sum(w_minus)` before building,
    /// for inputs whose sums agree only approximately.
    pub fn rescaled(w_plus: Vec<f64>, mut w_minus: Vec<f64>, consts: AssumptionConstants) -> Result<Self, ModelError> {
        let plus: f64 = w_plus.iter().sum();
        let minus: f64 = w_minus.iter().sum();
        if minus > 0.0 && plus.is_finite() && minus.is_finite() {
            let r = plus / minus;
            w_minus.iter_mut().for_each(|w| *w *= r);
        }
        Self::new(w_plus, w_minus, consts)
    }

    pub fn constant(n: usize, w: f64) -> Result<Self, ModelError> {
        Self::with_fitted_constants(vec![w; n], vec![w; n], DEFAULT_ETA)
    }

    /// `w⁺ = w⁻ = v1` on the first `round(frac · n)` vertices, `v2` after.
    pub fn two_class(n: usize, v1: f64, v2: f64, frac: f64) -> Result<Self, ModelError> {
        let k = ((frac * n as f64).round() as usize).min(n);
        let w: Vec<f64> = (0..n).map(|i| if i < k { v1 } else { v2 }).collect();
        Self::with_fitted_constants(w.clone(), w, DEFAULT_ETA)
    }

    /// In-weights i.i.d. with density `∝ w^(-exponent)` on `[lo, hi]`;
    /// out-weights constant, equal to the mean in-weight.
    pub fn power_law(n: usize, exponent: f64, lo: f64, hi: f64, seed: u64) -> Result<Self, ModelError> {
        let mut r = rng::stream(seed, Domain::Profile, 0);
        let w_minus: Vec<f64> = (0..n).map(|_| truncated_power_law(r.random(), exponent, lo, hi)).collect();
        let mean = w_minus.iter().sum::<f64>() / n.max(1) as f64;
        Self::with_fitted_constants(vec![mean; n], w_minus, DEFAULT_ETA)
    }

    pub fn n(&self) -> usize {
        self.w_plus.len()
    }

    pub fn w_plus(&self) -> &[f64] {
        &self.w_plus
    }

    pub fn w_minus(&self) -> &[f64] {
        &self.w_minus
    }

    pub fn constants(&self) -> AssumptionConstants {
        self.consts
    }

    pub fn set_constants(&mut self, consts: AssumptionConstants) {
        self.consts = consts;
    }

    /// `W = Σ w⁺ = Σ w⁻`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn ln_n(&self) -> f64 {
        (self.n() as f64).ln()
    }

    /// `ln n / n`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `p_xy` without index checks; `x == y` is the caller's problem.
    #[inline]
    pub fn p(&self, x: usize, y: usize) -> f64 {
        (self.w_plus[x] * self.w_minus[y] * self.scale).min(1.0)
    }

    fn check(&self, v: usize) -> Result<(), ModelError> {
        if v >= self.n() {
            Err(ModelError::VertexOutOfRange { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    pub fn connection_probability(&self, x: usize, y: usize) -> Result<f64, ModelError> {
        self.check(x)?;
        self.check(y)?;
        if x == y {
            return Err(ModelError::SelfPair(x));
        }
        Ok(self.p(x, y))
    }

    #[inline]
    pub fn mu_in(&self, x: usize) -> f64 {
        self.w_minus[x] / self.total
    }

    pub fn in_degree_distribution(&self) -> ProbVector {
        ProbVector::from_vec_unchecked(self.w_minus.iter().map(|w| w / self.total).collect())
    }

    pub fn expected_out_degree(&self, x: usize) -> Result<f64, ModelError> {
        self.check(x)?;
        let sums = CappedSums::new(&self.w_minus, self.scale);
        Ok(sums.total(self.w_plus[x]) - self.p(x, x))
    }

    /// `E[D⁺_x]` for every `x`, self term excluded, caps respected.
    pub fn expected_out_degrees(&self) -> Vec<f64> {
        let sums = CappedSums::new(&self.w_minus, self.scale);
        (0..self.n()).map(|x| sums.total(self.w_plus[x]) - self.p(x, x)).collect()
    }

    /// `E[D⁻_y]` for every `y`.
    pub fn expected_in_degrees(&self) -> Vec<f64> {
        let sums = CappedSums::new(&self.w_plus, self.scale);
        (0..self.n()).map(|y| sums.total(self.w_minus[y]) - self.p(y, y)).collect()
    }

    pub fn expected_edge_count(&self) -> f64 {
        self.expected_out_degrees().iter().sum()
    }

    /// Number of ordered pairs `x ≠ y` whose probability is capped at 1.
    pub fn capped_pairs(&self) -> u64 {
        let mut sorted = self.w_minus.clone();
        sorted.sort_by(f64::total_cmp);
        let mut count = 0u64;
        for x in 0..self.n() {
            let threshold = 1.0 / (self.w_plus[x] * self.scale);
            let below = sorted.partition_point(|&w| w < threshold);
            count += (sorted.len() - below) as u64;
            if self.w_minus[x] >= threshold {
                count -= 1;
            }
        }
        count
    }

    /// `max_{x≠y} p_xy`, from the two largest weights on each side.
    pub fn p_max(&self) -> f64 {
        let top_p = top_two(&self.w_plus);
        let top_m = top_two(&self.w_minus);
        let mut best = 0.0f64;
        for &(x, wx) in &top_p {
            for &(y, wy) in &top_m {
                if x != y {
                    best = best.max((wx * wy * self.scale).min(1.0));
                }
            }
        }
        best
    }

    /// Total variation between `μ_in` and the exact normalized expected
    /// in-degrees. The two agree only up to the excluded self terms and caps.
    pub fn mu_in_gap(&self) -> f64 {
        let ein = self.expected_in_degrees();
        let s: f64 = ein.iter().sum();
        0.5 * ein.iter().enumerate().map(|(y, e)| (e / s - self.mu_in(y)).abs()).sum::<f64>()
    }

    /// Checks the standing assumptions and reports every failure.
    pub fn validate(&self, lambda_min: f64) -> ValidationReport {
        let n = self.n();
        let c = self.consts;
        let mut violations = Vec::new();

        let plus: f64 = self.w_plus.iter().sum();
        let minus: f64 = self.w_minus.iter().sum();
        if (plus - minus).abs() > SUM_TOL * plus.max(minus) {
            violations.push(Violation::UnequalSums { plus, minus });
        }
        if !(c.eta > 0.0 && c.eta < 1.0) {
            violations.push(Violation::EtaRange { eta: c.eta });
        }
        if !(c.m0 > 1.0) {
            violations.push(Violation::M0NotAboveOne { m0: c.m0 });
        }
        if let Some((vertex, &value)) = self.w_plus.iter().enumerate().find(|(_, &w)| w < c.m0) {
            violations.push(Violation::OutWeightLow { vertex, value, m0: c.m0 });
        }
        if let Some((vertex, &value)) = self.w_plus.iter().enumerate().find(|(_, &w)| w > c.m1) {
            violations.push(Violation::OutWeightHigh { vertex, value, m1: c.m1 });
        }
        let moment: f64 = self.w_minus.iter().map(|w| w.powf(2.0 + c.eta)).sum();
        let bound = c.m2 * n as f64;
        if moment > bound * (1.0 + 1e-12) {
            violations.push(Violation::InWeightMoment { moment, bound });
        }
        let min_plus = self.w_plus.iter().copied().fold(f64::INFINITY, f64::min);
        let min_minus = self.w_minus.iter().copied().fold(f64::INFINITY, f64::min);
        let min_product = min_plus * min_minus;
        if min_product < lambda_min {
            violations.push(Violation::MinProduct { min_product, lambda_min });
        }
        let reparam_max_err = self.reparameterization_error(100);
        if reparam_max_err > 1e-12 {
            violations.push(Violation::Reparameterization { max_err: reparam_max_err });
        }

        let mu_in_max = self.w_minus.iter().copied().fold(0.0, f64::max) / self.total;
        ValidationReport {
            ok: violations.is_empty(),
            n,
            w_total: self.total,
            p_max: self.p_max(),
            mu_in_max,
            mu_in_max_scale: (n as f64).powf(-0.5 - c.eta / 6.0),
            min_product,
            capped_pairs: self.capped_pairs(),
            in_weight_moment: moment,
            reparam_max_err,
            mu_in_gap_tv: self.mu_in_gap(),
            violations,
        }
    }

    /// Largest absolute difference, over `pairs` fixed pseudo-random pairs,
    /// between the uncapped probability and its ratio form
    /// `w̃⁺_x w̃⁻_y / ℓ` with `w̃ = w · W · ln n / n` and `ℓ = Σ w̃⁺`.
    pub fn reparameterization_error(&self, pairs: usize) -> f64 {
        let n = self.n();
        let f = self.total * self.scale;
        let ell: f64 = self.w_plus.iter().map(|w| w * f).sum();
        let mut r = rng::stream(0, Domain::Oracle, n as u64);
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let x = r.random_range(0..n);
            let mut y = r.random_range(0..n - 1);
            if y >= x {
                y += 1;
            }
            let direct = self.w_plus[x] * self.w_minus[y] * self.scale;
            let ratio = (self.w_plus[x] * f) * (self.w_minus[y] * f) / ell;
            worst = worst.max((direct - ratio).abs());
        }
        worst
    }

    /// SHA-256 over `n`, the constants and both weight sequences.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        for v in [self.consts.eta, self.consts.m0, self.consts.m1, self.consts.m2] {
            h.update(v.to_bits().to_le_bytes());
        }
        for w in self.w_plus.iter().chain(&self.w_minus) {
            h.update(w.to_bits().to_le_bytes());
        }
        h.finalize().into()
    }

    /// Text format: header `n eta m0 m1 m2`, then `n` lines `w_plus w_minus`.
    pub fn to_text(&self) -> String {
        let c = self.consts;
        let mut s = format!("{} {:?} {:?} {:?} {:?}\n", self.n(), c.eta, c.m0, c.m1, c.m2);
        for (p, m) in self.w_plus.iter().zip(&self.w_minus) {
            s.push_str(&format!("{p:?} {m:?}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(ModelError::Parse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(ModelError::Parse { line: hl + 1, msg: format!("header needs 5 fields, got {}", fields.len()) });
        }
        let n: usize = fields[0].parse().map_err(|e| ModelError::Parse { line: hl + 1, msg: format!("n: {e}") })?;
        let num = |s: &str, line: usize, what: &str| -> Result<f64, ModelError> {
            s.parse::<f64>().map_err(|e| ModelError::Parse { line, msg: format!("{what}: {e}") })
        };
        let consts = AssumptionConstants {
            eta: num(fields[1], hl + 1, "eta")?,
            m0: num(fields[2], hl + 1, "m0")?,
            m1: num(fields[3], hl + 1, "m1")?,
            m2: num(fields[4], hl + 1, "m2")?,
        };
        let mut w_plus = Vec::with_capacity(n);
        let mut w_minus = Vec::with_capacity(n);
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(ModelError::Parse { line: i + 1, msg: format!("expected 2 weights, got {}", f.len()) });
            }
            w_plus.push(num(f[0], i + 1, "w_plus")?);
            w_minus.push(num(f[1], i + 1, "w_minus")?);
        }
        if w_plus.len() != n {
            return Err(ModelError::Parse { line: 1, msg: format!("header says n = {n}, found {} rows", w_plus.len()) });
        }
        Self::new(w_plus, w_minus, consts)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn top_two(ws: &[f64]) -> Vec<(usize, f64)> {
    let mut best: Vec<(usize, f64)> = Vec::with_capacity(2);
    for (i, &w) in ws.iter().enumerate() {
        if best.len() < 2 {
            best.push((i, w));
            best.sort_by(|a, b| b.1.total_cmp(&a.1));
        } else if w > best[1].1 {
            best[1] = (i, w);
            best.sort_by(|a, b| b.1.total_cmp(&a.1));
        }
    }
    best
}

/// Inverse-CDF draw from the density `∝ w^(-a)` on `[lo, hi]`.
pub fn truncated_power_law(u: f64, a: f64, lo: f64, hi: f64) -> f64 {
    if (a - 1.0).abs() < 1e-12 {
        lo * (hi / lo).powf(u)
    } else {
        let b = 1.0 - a;
        (lo.powf(b) + u * (hi.powf(b) - lo.powf(b))).powf(1.0 / b)
    }
}

/// `Σ_i min(a · v_i · scale, 1)` in `O(log n)` per query.
pub struct CappedSums {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
    scale: f64,
}

impl CappedSums {
    pub fn new(values: &[f64], scale: f64) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in &sorted {
            acc += v;
            prefix.push(acc);
        }
        CappedSums { sorted, prefix, scale }
    }

    pub fn total(&self, a: f64) -> f64 {
        let threshold = 1.0 / (a * self.scale);
        let k = self.sorted.partition_point(|&v| v < threshold);
        a * self.scale * self.prefix[k] + (self.sorted.len() - k) as f64
    }
}

/// A failed assumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    UnequalSums { plus: f64, minus: f64 },
    EtaRange { eta: f64 },
    M0NotAboveOne { m0: f64 },
    OutWeightLow { vertex: usize, value: f64, m0: f64 },
    OutWeightHigh { vertex: usize, value: f64, m1: f64 },
    InWeightMoment { moment: f64, bound: f64 },
    MinProduct { min_product: f64, lambda_min: f64 },
    Reparameterization { max_err: f64 },
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::UnequalSums { .. } => "equal weight sums",
            Violation::EtaRange { .. } => "eta in (0,1)",
            Violation::M0NotAboveOne { .. } => "m0 > 1",
            Violation::OutWeightLow { .. } => "out-weight lower bound",
            Violation::OutWeightHigh { .. } => "out-weight upper bound",
            Violation::InWeightMoment { .. } => "in-weight moment bound",
            Violation::MinProduct { .. } => "minimum weight product",
            Violation::Reparameterization { .. } => "ratio-form equivalence",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnequalSums { plus, minus } => write!(f, "{}: {plus} vs {minus}", self.name()),
            Violation::EtaRange { eta } => write!(f, "{}: eta = {eta}", self.name()),
            Violation::M0NotAboveOne { m0 } => write!(f, "{}: m0 = {m0}", self.name()),
            Violation::OutWeightLow { vertex, value, m0 } => {
                write!(f, "{}: w_plus[{vertex}] = {value} < m0 = {m0}", self.name())
            }
            Violation::OutWeightHigh { vertex, value, m1 } => {
                write!(f, "{}: w_plus[{vertex}] = {value} > m1 = {m1}", self.name())
            }
            Violation::InWeightMoment { moment, bound } => write!(f, "{}: {moment} > {bound}", self.name()),
            Violation::MinProduct { min_product, lambda_min } => {
                write!(f, "{}: {min_product} < {lambda_min}", self.name())
            }
            Violation::Reparameterization { max_err } => write!(f, "{}: error {max_err}", self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub n: usize,
    pub w_total: f64,
    pub p_max: f64,
    pub mu_in_max: f64,
    /// `n^(-1/2 - η/6)`, the order `mu_in_max` should stay below.
    pub mu_in_max_scale: f64,
    pub min_product: f64,
    pub capped_pairs: u64,
    pub in_weight_moment: f64,
    pub reparam_max_err: f64,
    pub mu_in_gap_tv: f64,
    pub violations: Vec<Violation>,
}

/// Where a profile comes from, as written on the command line:
/// `const:<v>`, `two-class:<v1>,<v2>,<frac>`, `powerlaw:<exp>,<min>,<max>`
/// or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileSpec {
    Const(f64),
    TwoClass { v1: f64, v2: f64, frac: f64 },
    PowerLaw { exponent: f64, lo: f64, hi: f64 },
    File(String),
}

impl ProfileSpec {
    pub fn parse(spec: &str) -> Result<Self, ModelError> {
        let err = |msg: &str| ModelError::Spec { spec: spec.to_string(), msg: msg.to_string() };
        let (kind, args) = spec.split_once(':').ok_or_else(|| err("expected <kind>:<args>"))?;
        let nums = || -> Result<Vec<f64>, ModelError> {
            args.split(',').map(|a| a.trim().parse::<f64>().map_err(|e| err(&e.to_string()))).collect()
        };
        match kind {
            "const" => match nums()?.as_slice() {
                [v] => Ok(ProfileSpec::Const(*v)),
                _ => Err(err("const takes one value")),
            },
            "two-class" => match nums()?.as_slice() {
                [v1, v2, frac] if (0.0..=1.0).contains(frac) => Ok(ProfileSpec::TwoClass { v1: *v1, v2: *v2, frac: *frac }),
                [_, _, _] => Err(err("frac must lie in [0,1]")),
                _ => Err(err("two-class takes v1,v2,frac")),
            },
            "powerlaw" => match nums()?.as_slice() {
                [exponent, lo, hi] if 0.0 < *lo && lo < hi => {
                    Ok(ProfileSpec::PowerLaw { exponent: *exponent, lo: *lo, hi: *hi })
                }
                [_, _, _] => Err(err("need 0 < min < max")),
                _ => Err(err("powerlaw takes exp,min,max")),
            },
            "file" if !args.is_empty() => Ok(ProfileSpec::File(args.to_string())),
            _ => Err(err("unknown kind")),
        }
    }

    /// Materializes the profile; `n` is ignored for files.
    pub fn build(&self, n: usize, seed: u64) -> Result<WeightProfile, ModelError> {
        match self {
            ProfileSpec::Const(v) => WeightProfile::constant(n, *v),
            ProfileSpec::TwoClass { v1, v2, frac } => WeightProfile::two_class(n, *v1, *v2, *frac),
            ProfileSpec::PowerLaw { exponent, lo, hi } => WeightProfile::power_law(n, *exponent, *lo, *hi, seed),
            ProfileSpec::File(p) => WeightProfile::load(Path::new(p)),
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Const(v) => write!(f, "const:{v}"),
            ProfileSpec::TwoClass { v1, v2, frac } => write!(f, "two-class:{v1},{v2},{frac}"),
            ProfileSpec::PowerLaw { exponent, lo, hi } => write!(f, "powerlaw:{exponent},{lo},{hi}"),
            ProfileSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}
