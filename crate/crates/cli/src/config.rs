//! Versioned `key = value` experiment configs.
//!
//! Every key has a default, so an empty file (just `version = 1`) is a
//! valid config. Writing a config and parsing it back gives the same value.

use std::{fmt, fs, path::{Path, PathBuf}, str::FromStr};

use chunglu_core::{experiments::Fault, model::ProfileSpec};
use clap::Args;
use thiserror::Error;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsupported config version {0} (expected {CONFIG_VERSION})")]
    Version(u32),
    #[error("missing `version` line")]
    NoVersion,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("{key}: {msg}")]
    Invalid { key: &'static str, msg: String },
    #[error("config is for `{found}` but the command is `{command}`")]
    WrongExperiment { found: Experiment, command: Experiment },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn invalid(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Generate,
    Stats,
    Mix,
    Cutoff,
    Profile,
    Entropy,
    Quenched,
    Structures,
    Annealed,
    Stationary,
    Oracle,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Generate,
        Experiment::Stats,
        Experiment::Mix,
        Experiment::Cutoff,
        Experiment::Profile,
        Experiment::Entropy,
        Experiment::Quenched,
        Experiment::Structures,
        Experiment::Annealed,
        Experiment::Stationary,
        Experiment::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Generate => "generate",
            Experiment::Stats => "stats",
            Experiment::Mix => "mix",
            Experiment::Cutoff => "cutoff",
            Experiment::Profile => "profile",
            Experiment::Entropy => "entropy",
            Experiment::Quenched => "quenched",
            Experiment::Structures => "structures",
            Experiment::Annealed => "annealed",
            Experiment::Stationary => "stationary",
            Experiment::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

pub fn fault_name(f: Fault) -> &'static str {
    match f {
        Fault::TvOffByOne => "tv-off-by-one",
        Fault::NonStrictThreshold => "non-strict-threshold",
    }
}

pub fn parse_fault(s: &str) -> Result<Option<Fault>, String> {
    match s {
        "none" => Ok(None),
        "tv-off-by-one" => Ok(Some(Fault::TvOffByOne)),
        "non-strict-threshold" => Ok(Some(Fault::NonStrictThreshold)),
        _ => Err(format!("unknown fault `{s}` (none, tv-off-by-one, non-strict-threshold)")),
    }
}

/// Everything an experiment run depends on apart from the worker count.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub weights: ProfileSpec,
    /// The first entry is the `n` of single-size experiments.
    pub n: Vec<usize>,
    pub seed: u64,
    pub replicas: usize,
    pub starts: usize,
    pub beta: f64,
    pub eps: f64,
    pub lambdas: Vec<f64>,
    /// Lyapunov exponent of the nondegeneracy check; `None` is `δ = ∞`.
    pub delta: Option<f64>,
    pub t_max: usize,
    pub samples: u64,
    pub runs: u64,
    pub graphs: usize,
    /// θ = n^(−a) for each `a`.
    pub exponents: Vec<f64>,
    pub c_degree: f64,
    pub roots: usize,
    /// Annealed walks per run and their length `T`.
    pub k: usize,
    pub t: usize,
    /// Meeting horizon.
    pub h: usize,
    /// δ of the top-mass bound `n^{1−6δ}` / `n^{−δ/2}`.
    pub mass_delta: f64,
    pub fault: Option<Fault>,
    pub oracle_quick: bool,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            weights: ProfileSpec::Const(2.0),
            n: vec![1000],
            seed: 1,
            replicas: 4,
            starts: 8,
            beta: 0.5,
            eps: 0.5,
            lambdas: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            delta: None,
            t_max: 12,
            samples: 10_000,
            runs: 100_000,
            graphs: 4,
            exponents: vec![0.5, 1.5],
            c_degree: 10.0,
            roots: 20,
            k: 1,
            t: 5,
            h: 1,
            mass_delta: 0.05,
            fault: None,
            oracle_quick: false,
            out: PathBuf::from("out"),
        }
    }

    pub fn n0(&self) -> usize {
        self.n[0]
    }

    pub fn to_text(&self) -> String {
        fn list<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        let delta = self.delta.map_or("inf".to_string(), |d| d.to_string());
        let fault = self.fault.map_or("none", fault_name);
        [
            "# chunglu experiment config".to_string(),
            format!("version = {CONFIG_VERSION}"),
            format!("experiment = {}", self.experiment),
            format!("weights = {}", self.weights),
            format!("n = {}", list(&self.n)),
            format!("seed = {}", self.seed),
            format!("replicas = {}", self.replicas),
            format!("starts = {}", self.starts),
            format!("beta = {}", self.beta),
            format!("eps = {}", self.eps),
            format!("lambdas = {}", list(&self.lambdas)),
            format!("delta = {delta}"),
            format!("t_max = {}", self.t_max),
            format!("samples = {}", self.samples),
            format!("runs = {}", self.runs),
            format!("graphs = {}", self.graphs),
            format!("exponents = {}", list(&self.exponents)),
            format!("c_degree = {}", self.c_degree),
            format!("roots = {}", self.roots),
            format!("k = {}", self.k),
            format!("t = {}", self.t),
            format!("h = {}", self.h),
            format!("mass_delta = {}", self.mass_delta),
            format!("fault = {fault}"),
            format!("oracle_quick = {}", self.oracle_quick),
            format!("out = {}", self.out.display()),
        ]
        .join("\n")
            + "\n"
    }

    /// Parses a config file. `experiment` is taken from the file when present,
    /// otherwise from `default_experiment`; missing keys get its defaults.
    pub fn from_text(text: &str, default_experiment: Experiment) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1, msg: "expected key = value".into() })?;
            let k = k.trim();
            if pairs.iter().any(|p| p.1 == k) {
                return Err(ConfigError::Duplicate(k.to_string()));
            }
            pairs.push((i + 1, k, v.trim()));
        }
        let get = |key: &str| pairs.iter().find(|p| p.1 == key).map(|p| p.2);
        let version: u32 = get("version").ok_or(ConfigError::NoVersion)?.parse().map_err(|_| invalid("version", "not an integer"))?;
        if version != CONFIG_VERSION {
            return Err(ConfigError::Version(version));
        }
        let experiment = match get("experiment") {
            Some(e) => e.parse().map_err(|m| invalid("experiment", m))?,
            None => default_experiment,
        };
        let mut cfg = ExperimentConfig::defaults(experiment);
        for &(_, key, value) in &pairs {
            if key != "version" && key != "experiment" {
                cfg.set(key, value)?;
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path, default_experiment: Experiment) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_text(&text, default_experiment)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &'static str, v: &str) -> Result<T, ConfigError>
        where
            T::Err: fmt::Display,
        {
            v.parse().map_err(|e: T::Err| invalid(key, format!("`{v}`: {e}")))
        }
        fn list<T: FromStr>(key: &'static str, v: &str) -> Result<Vec<T>, ConfigError>
        where
            T::Err: fmt::Display,
        {
            v.split(',').map(|x| num(key, x.trim())).collect()
        }
        match key {
            "weights" => self.weights = ProfileSpec::parse(value).map_err(|e| invalid("weights", e.to_string()))?,
            "n" => self.n = list("n", value)?,
            "seed" => self.seed = num("seed", value)?,
            "replicas" => self.replicas = num("replicas", value)?,
            "starts" => self.starts = num("starts", value)?,
            "beta" => self.beta = num("beta", value)?,
            "eps" => self.eps = num("eps", value)?,
            "lambdas" => self.lambdas = list("lambdas", value)?,
            "delta" => self.delta = if value == "inf" { None } else { Some(num("delta", value)?) },
            "t_max" => self.t_max = num("t_max", value)?,
            "samples" => self.samples = num("samples", value)?,
            "runs" => self.runs = num("runs", value)?,
            "graphs" => self.graphs = num("graphs", value)?,
            "exponents" => self.exponents = list("exponents", value)?,
            "c_degree" => self.c_degree = num("c_degree", value)?,
            "roots" => self.roots = num("roots", value)?,
            "k" => self.k = num("k", value)?,
            "t" => self.t = num("t", value)?,
            "h" => self.h = num("h", value)?,
            "mass_delta" => self.mass_delta = num("mass_delta", value)?,
            "fault" => self.fault = parse_fault(value).map_err(|m| invalid("fault", m))?,
            "oracle_quick" => self.oracle_quick = num("oracle_quick", value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &'static str, v: u64| if v == 0 { Err(invalid(key, "must be at least 1")) } else { Ok(()) };
        let open_unit = |key: &'static str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(invalid(key, format!("{v} is not in (0, 1)")))
            }
        };
        if self.n.is_empty() || self.n.iter().any(|&n| n < 2) {
            return Err(invalid("n", "every size must be at least 2"));
        }
        if self.n.iter().any(|&n| n > u32::MAX as usize) {
            return Err(invalid("n", "sizes must fit in 32 bits"));
        }
        positive("replicas", self.replicas as u64)?;
        positive("starts", self.starts as u64)?;
        positive("samples", self.samples)?;
        positive("runs", self.runs)?;
        positive("graphs", self.graphs as u64)?;
        positive("roots", self.roots as u64)?;
        positive("k", self.k as u64)?;
        positive("t", self.t as u64)?;
        positive("h", self.h as u64)?;
        open_unit("beta", self.beta)?;
        open_unit("eps", self.eps)?;
        if !(self.mass_delta > 0.0 && self.mass_delta < 1.0 / 6.0) {
            return Err(invalid("mass_delta", "must lie in (0, 1/6)"));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid("delta", "must be positive (or `inf`)"));
            }
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !l.is_finite()) {
            return Err(invalid("lambdas", "need at least one finite value"));
        }
        if self.exponents.is_empty() || self.exponents.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(invalid("exponents", "need positive finite values"));
        }
        if !(self.c_degree > 0.0 && self.c_degree.is_finite()) {
            return Err(invalid("c_degree", "must be positive"));
        }
        if let ProfileSpec::File(p) = &self.weights {
            if !Path::new(p).is_file() {
                return Err(invalid("weights", format!("no such profile file `{p}`")));
            }
        }
        if self.experiment == Experiment::Annealed && (self.t * self.t) > self.n0() {
            return Err(invalid("t", "the annealed fresh-vertex law needs T ≤ √n"));
        }
        Ok(())
    }
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Weight profile: const:<w>, two-class:<v1>,<v2>,<frac>, powerlaw:<exp>,<min>,<max> or file:<path>.
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// Shorthand for `--weights file:<path>`.
    #[arg(long, global = true, conflicts_with = "weights")]
    pub profile: Option<PathBuf>,
    /// Graph size(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub replicas: Option<usize>,
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Positive number or `inf`.
    #[arg(long, global = true)]
    pub delta: Option<String>,
    #[arg(long, global = true)]
    pub t_max: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub runs: Option<u64>,
    #[arg(long, global = true)]
    pub graphs: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub exponents: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub c_degree: Option<f64>,
    #[arg(long, global = true)]
    pub roots: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub t: Option<usize>,
    #[arg(long, global = true)]
    pub h: Option<usize>,
    #[arg(long, global = true)]
    pub mass_delta: Option<f64>,
    /// Deliberate bug for the oracle command: tv-off-by-one or non-strict-threshold.
    #[arg(long, global = true)]
    pub inject_fault: Option<String>,
    /// Smaller oracle sample sizes.
    #[arg(long, global = true)]
    pub oracle_quick: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), ConfigError> {
        macro_rules! copy {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { cfg.$f = v.clone(); } )* };
        }
        copy!(seed, out, n, replicas, starts, beta, eps, lambdas, t_max, samples, runs, graphs, exponents, c_degree, roots, k, t, h, mass_delta);
        if let Some(w) = &self.weights {
            cfg.set("weights", w)?;
        }
        if let Some(p) = &self.profile {
            cfg.weights = ProfileSpec::File(p.display().to_string());
        }
        if let Some(d) = &self.delta {
            cfg.set("delta", d)?;
        }
        if let Some(f) = &self.inject_fault {
            cfg.set("fault", f)?;
        }
        if self.oracle_quick {
            cfg.oracle_quick = true;
        }
        Ok(())
    }
}
