use clap::{Args, Parser, Subcommand};
use latsel_cli::config::ExperimentConfig;
use latsel_cli::experiments::run_experiment;
use latsel_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "latsel",
    about = "Exact solvers and baselines for regularized model selection with combinatorial penalties",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config, with flag overrides.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// sparse_regression | denoising | discretization_sweep | knapsack_path | robust
    #[arg(long)]
    experiment: Option<String>,

    /// Problem size (number of domains for the robust experiment).
    #[arg(long)]
    n: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Support penalty strength.
    #[arg(long)]
    lambda: Option<f64>,

    /// Smoothness weight of the denoising objective.
    #[arg(long)]
    mu_smooth: Option<f64>,

    /// Single discretization level (shorthand for a one-element k list).
    #[arg(long)]
    k: Option<usize>,

    /// Comma-separated discretization levels for the sweep.
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,

    #[arg(long)]
    tol: Option<f64>,

    #[arg(long)]
    max_iter: Option<usize>,

    /// Timing repeats; wall_seconds reports their mean.
    #[arg(long)]
    repeats: Option<usize>,

    /// Comma-separated subset of: minnorm, pgd, discretized.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,

    /// Output directory for results.csv and friends.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = &args.experiment {
        cfg.experiment = e.parse()?;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(lambda) = args.lambda {
        cfg.lambda = lambda;
    }
    if let Some(mu) = args.mu_smooth {
        cfg.mu_smooth = mu;
    }
    if let Some(k) = args.k {
        cfg.k_list = vec![k];
    }
    if let Some(ks) = &args.k_list {
        cfg.k_list = ks.clone();
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    if let Some(mi) = args.max_iter {
        cfg.max_iter = mi;
    }
    if let Some(r) = args.repeats {
        cfg.repeats = r;
    }
    if let Some(solvers) = &args.solvers {
        cfg.solvers = solvers
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let cfg = match build_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("latsel: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_experiment(&cfg) {
        Ok(outcome) => {
            println!(
                "{}: {} rows -> {}",
                cfg.experiment,
                outcome.rows.len(),
                outcome.results_path.display()
            );
            if outcome.all_converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("latsel: a solver finished without certifying its tolerance");
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("latsel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
