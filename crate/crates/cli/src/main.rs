use std::{path::PathBuf, process::ExitCode};

use chunglu_cli::{run, ConfigError, Experiment, ExperimentConfig, Overrides, RunManifest};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chunglu", version, about = "Random walks on Chung–Lu digraphs: sampling, mixing and cutoff experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (`key = value` lines); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph and write it in binary form with its degree summary.
    Generate,
    /// Exact entropic statistics of the profile and per-graph degree statistics.
    Stats,
    /// TV curve and mixing times on one graph.
    Mix,
    /// TV just before and after (1 ± β)·t_ent over replicas and starts.
    Cutoff,
    /// Mean TV across the cutoff window against the Gaussian tail.
    Profile,
    /// Entropy, variance, the trend over n and the i.i.d. path-mass law.
    Entropy,
    /// Quenched path-mass probabilities at θ = n^(−a).
    Quenched,
    /// Degree event, balls, tree excess, roots and mass trees.
    Structures,
    /// Annealed walks: fresh-vertex law, self-intersections, meetings.
    Annealed,
    /// Top stationary mass and Σπ² over sizes.
    Stationary,
    /// Small-instance oracle sweep; exits 1 if any oracle fails.
    Oracle,
    /// Print the effective config (defaults, file and flags merged).
    Config {
        /// Experiment the config is for.
        experiment: Experiment,
    },
    /// Re-hash the outputs of a run directory against its manifest.
    Verify { dir: PathBuf },
}

fn experiment_of(c: &Command) -> Option<Experiment> {
    Some(match c {
        Command::Generate => Experiment::Generate,
        Command::Stats => Experiment::Stats,
        Command::Mix => Experiment::Mix,
        Command::Cutoff => Experiment::Cutoff,
        Command::Profile => Experiment::Profile,
        Command::Entropy => Experiment::Entropy,
        Command::Quenched => Experiment::Quenched,
        Command::Structures => Experiment::Structures,
        Command::Annealed => Experiment::Annealed,
        Command::Stationary => Experiment::Stationary,
        Command::Oracle => Experiment::Oracle,
        Command::Config { experiment } => *experiment,
        Command::Verify { .. } => return None,
    })
}

fn effective_config(cli: &Cli, experiment: Experiment) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path, experiment)?;
            if cfg.experiment != experiment {
                return Err(ConfigError::WrongExperiment { found: cfg.experiment, command: experiment });
            }
            cfg
        }
        None => ExperimentConfig::defaults(experiment),
    };
    cli.overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

fn verify(dir: &std::path::Path) -> ExitCode {
    let manifest = match RunManifest::load(dir) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: cannot read manifest in {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    };
    let problems = manifest.verify(dir);
    if problems.is_empty() {
        println!("{} outputs verified", manifest.outputs.len());
        ExitCode::SUCCESS
    } else {
        for p in &problems {
            eprintln!("mismatch: {p}");
        }
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(experiment) = experiment_of(&cli.command) else {
        let Command::Verify { dir } = &cli.command else { unreachable!() };
        return verify(dir);
    };
    let cfg = match effective_config(&cli, experiment) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Command::Config { .. } = cli.command {
        print!("{}", cfg.to_text());
        return ExitCode::SUCCESS;
    }
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match run(&cfg) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            println!("outputs in {}", cfg.out.display());
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
