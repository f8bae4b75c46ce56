use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use vinesim::cli::{cmd_run, cmd_scan, cmd_treat, cmd_yield_survey, TreatSource};
use vinesim::config::{self, Overrides};
use vinesim::field::FieldPreset;
use vinesim::routing::PlannerKind;

#[derive(Parser)]
#[command(
    name = "vinesim",
    version,
    about = "Deterministic simulator for vineyard scanning, targeted treatment, and yield surveys"
)]
struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed override (master seed for `run`, scan seed otherwise).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV and SVG artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Field preset: 52x227 or 75x200.
    #[arg(long, global = true)]
    preset: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded first-round scan for one agent.
    Scan {
        /// Agent profile name.
        #[arg(long, default_value = "human")]
        agent: String,
        /// Number of infected spots to generate.
        #[arg(long, default_value_t = 30)]
        spots: usize,
        /// Probability that a spot is difficult.
        #[arg(long)]
        p_difficult: Option<f64>,
    },
    /// Run the second-round treatment phase for one agent.
    Treat {
        #[arg(long, default_value = "immersive")]
        agent: String,
        /// Number of spots for a fresh seeded scan (ignored with --spots-file).
        #[arg(long, default_value_t = 20)]
        spots: usize,
        /// Recorded-spots CSV from an earlier scan.
        #[arg(long)]
        spots_file: Option<PathBuf>,
        /// Route planner: nn, nn2opt, or exact.
        #[arg(long)]
        planner: Option<String>,
        #[arg(long)]
        p_difficult: Option<f64>,
    },
    /// Run the full Monte Carlo experiment and write stats plus tables.
    Run {
        /// Trial count override.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Survey low-yield zones from a yield map, comparing coverage modes.
    YieldSurvey {
        /// Yield grid CSV (falls back to yield.file in the config).
        #[arg(long)]
        yield_file: Option<PathBuf>,
        /// Low-yield threshold: cells with value <= threshold form zones.
        #[arg(long)]
        threshold: Option<f64>,
        /// Grid cell size in meters.
        #[arg(long)]
        cell_size: Option<f64>,
        /// Agent for the exhaustive pass.
        #[arg(long, default_value = "human")]
        human_agent: String,
        /// Agent for the targeted tour.
        #[arg(long, default_value = "immersive")]
        robot_agent: String,
    },
}

fn run(cli: Cli) -> vinesim::Result<Vec<PathBuf>> {
    let preset = match &cli.preset {
        Some(s) => Some(s.parse::<FieldPreset>()?),
        None => None,
    };
    let planner = match &cli.command {
        Command::Treat {
            planner: Some(s), ..
        } => Some(s.parse::<PlannerKind>()?),
        _ => None,
    };
    let trials = match &cli.command {
        Command::Run { trials } => *trials,
        _ => None,
    };
    let overrides = Overrides {
        preset,
        seed: cli.seed,
        out: cli.out.clone(),
        trials,
        planner: None,
    };
    let cfg = config::load(cli.config.as_deref(), &overrides)?;

    match cli.command {
        Command::Scan {
            agent,
            spots,
            p_difficult,
        } => cmd_scan(&cfg, &agent, spots, p_difficult, cli.seed),
        Command::Treat {
            agent,
            spots,
            spots_file,
            p_difficult,
            ..
        } => {
            let source = match &spots_file {
                Some(path) => TreatSource::File(path),
                None => TreatSource::Fresh { spots },
            };
            cmd_treat(&cfg, &agent, source, planner, p_difficult, cli.seed)
        }
        Command::Run { .. } => cmd_run(&cfg, false),
        Command::YieldSurvey {
            yield_file,
            threshold,
            cell_size,
            human_agent,
            robot_agent,
        } => cmd_yield_survey(
            &cfg,
            yield_file.as_deref(),
            threshold,
            cell_size,
            &human_agent,
            &robot_agent,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
