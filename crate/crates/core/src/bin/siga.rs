use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use siga::agents::AgentKind;
use siga::experiment::{run_experiment, run_stats, ExperimentError, ExperimentSpec};
use siga::scenario::{PayoffTables, SimulationConfig, Society};

#[derive(Parser)]
#[command(name = "siga", version, about = "Norm emergence experiments in the phone-ringer world")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded simulations and write metrics.csv, norms.csv and summary.csv.
    Run {
        #[arg(long)]
        society: Society,
        /// fixed, nsiga or xsiga
        #[arg(long = "agents")]
        kind: AgentKind,
        /// Defaults to the world file's `steps`.
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, default_value_t = 8)]
        runs: usize,
        /// Run i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// World, hyperparameter and evaluation settings (TOML).
        #[arg(long)]
        world: Option<PathBuf>,
        /// Payoff tables (TOML).
        #[arg(long)]
        payoffs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Parallel runs; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Also write per-run interaction logs and final populations.
        #[arg(long)]
        log_interactions: bool,
    },
    /// Paired t-tests and Cohen's d of XSIGA against each baseline.
    Stats {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Run { society, kind, steps, runs, seed, world, payoffs, out, jobs, log_interactions } => {
            let config = match world {
                Some(p) => SimulationConfig::load(&p)?,
                None => SimulationConfig::default(),
            };
            let payoffs = match payoffs {
                Some(p) => PayoffTables::load(&p)?,
                None => PayoffTables::default(),
            };
            let spec = ExperimentSpec {
                society,
                kind,
                runs,
                steps: steps.unwrap_or(config.world.steps),
                base_seed: seed,
                config,
                payoffs,
                jobs,
                log_interactions,
            };
            for s in run_experiment(&spec, &out)? {
                let show = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
                println!(
                    "run {} seed {}: social_experience {} cohesion {} adoption {}",
                    s.run,
                    s.seed,
                    show(s.social_experience),
                    show(s.cohesion),
                    show(s.adoption)
                );
            }
        }
        Command::Stats { inputs, out } => {
            for r in run_stats(&inputs, &out)? {
                println!(
                    "{} {} xsiga vs {}: {:.4} vs {:.4}, t = {:.3}, p = {:.3e}, d = {}",
                    r.metric,
                    r.society,
                    r.baseline,
                    r.mean_a,
                    r.mean_b,
                    r.t,
                    r.p,
                    r.cohens_d.map(|d| format!("{d:.3}")).unwrap_or_else(|| "-".into())
                );
            }
        }
    }
    Ok(())
}
