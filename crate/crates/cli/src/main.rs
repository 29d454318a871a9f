use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use simplex_md::linkfn::catalog;
use simplex_md_cli::config::ExperimentConfig;
use simplex_md_cli::{runner, CliError, OUT_DIR_ENV};

/// Mirror-descent experiments on the probability simplex.
#[derive(Parser)]
#[command(name = "simplex-md", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides config and the SIMPLEX_MD_OUT env var)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run, writing trace.csv and summary.toml
    Run(CommonArgs),
    /// Execute the configured parameter sweep and rank the results
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Max concurrent runs
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a config without running anything
    Validate {
        /// Experiment config (TOML)
        #[arg(long)]
        config: PathBuf,
    },
    /// List the link-function catalog with parameter constraints
    Families,
}

fn resolve_out_dir(cfg: &ExperimentConfig, cli_out: &Option<PathBuf>) -> PathBuf {
    if let Some(out) = cli_out {
        return out.clone();
    }
    if let Ok(env_out) = std::env::var(OUT_DIR_ENV) {
        if !env_out.is_empty() {
            return PathBuf::from(env_out);
        }
    }
    PathBuf::from(&cfg.output.dir)
}

fn load(common: &CommonArgs) -> Result<(ExperimentConfig, PathBuf, PathBuf), CliError> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.optimizer.seed = seed;
    }
    let base = common
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let out = resolve_out_dir(&cfg, &common.out);
    Ok((cfg, base, out))
}

fn cmd_run(common: &CommonArgs) -> Result<(), CliError> {
    let (cfg, base, out) = load(common)?;
    cfg.validate(&base)?;
    let outcome = runner::execute_run(&cfg, &base, &out)?;
    println!(
        "final_loss = {}  iterations = {}  converged = {}",
        outcome.final_loss, outcome.iterations, outcome.converged
    );
    if let Some(lw) = outcome.log_wealth {
        println!("log_wealth = {lw}");
    }
    println!("artifacts in {}", out.display());
    match outcome.error {
        // the partial trace is already on disk; surface the failure
        Some(err) => Err(CliError::Runtime(err)),
        None => Ok(()),
    }
}

fn cmd_sweep(common: &CommonArgs, jobs: usize) -> Result<(), CliError> {
    if jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let (cfg, base, out) = load(common)?;
    if cfg.sweep.is_none() {
        return Err(CliError::Config("config has no [sweep] section".into()));
    }
    cfg.validate(&base)?;
    let rows = runner::execute_sweep(&cfg, &base, &out, jobs)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "{} runs ({failed} failed), ranked summary in {}",
        rows.len(),
        out.join("sweep_summary.csv").display()
    );
    for row in rows.iter().take(5) {
        let params: Vec<String> = row
            .assignment
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!(
            "  {}  [{}]  final_loss = {}  iters = {}",
            row.id,
            params.join(", "),
            row.final_loss,
            row.iterations
        );
    }
    Ok(())
}

fn cmd_validate(config: &Path) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_path(config)?;
    let base = config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    cfg.validate(base)?;
    let descent = cfg.descent_config()?;
    let problem = cfg.problem(base)?;
    println!(
        "config ok: {} on {} ({}-dimensional), {} eta = {}, max_iters = {}",
        descent.family.describe(),
        problem.name(),
        problem.dim(),
        cfg.optimizer.variant,
        cfg.optimizer.eta,
        cfg.optimizer.max_iters,
    );
    Ok(())
}

fn cmd_families() {
    // tolerate an early-closed pipe (families | head)
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(out, "{:<16} {:<58} {:<12} exemplar", "tag", "parameters", "closed exp");
    for meta in catalog::metadata() {
        let _ = writeln!(
            out,
            "{:<16} {:<58} {:<12} {}",
            meta.tag, meta.params, meta.closed_exp, meta.exemplar
        );
    }
    let _ = writeln!(out, "\n(identity is also accepted as a Euclidean pseudo-link for mmd runs)");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(common) => cmd_run(common),
        Command::Sweep { common, jobs } => cmd_sweep(common, *jobs),
        Command::Validate { config } => cmd_validate(config),
        Command::Families => {
            cmd_families();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
