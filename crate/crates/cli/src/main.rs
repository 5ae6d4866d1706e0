use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use discord_optics::pipeline::commands::{default_sweep_values, DEFAULT_ORACLE_GRID};
use discord_optics::pipeline::{
    cmd_modes, cmd_oracle, cmd_recover, cmd_run, cmd_sweep, ExperimentConfig,
};
use discord_optics::{Error, Result};

#[derive(Parser)]
#[command(
    name = "discord-optics",
    version,
    about = "Classical-optics emulation of Bell-diagonal quantum discord"
)]
struct Cli {
    /// JSON experiment configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the noise seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory from the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Bell-mode intensity images and the LG Gram report.
    Modes,
    /// Run the experiment once and write its images and record.
    Run {
        /// Set the arm weight directly instead of using the configuration.
        #[arg(long, conflicts_with = "discord")]
        lambda0: Option<f64>,
        /// Target discord; the arm weight is obtained by inversion.
        #[arg(long)]
        discord: Option<f64>,
    },
    /// Run the experiment for several required discord values and seeds.
    Sweep {
        /// Comma-separated discord values (default 0, 0.01, ..., 0.1).
        #[arg(long)]
        values: Option<String>,
        /// Number of consecutive seeds per value, starting at the configured seed.
        #[arg(long, default_value_t = 1)]
        num_seeds: u64,
    },
    /// Recover the arm weight from three PGM images.
    Recover {
        measured: PathBuf,
        basis_psi: PathBuf,
        basis_phi: PathBuf,
    },
    /// Compare the analytic discord with the brute-force optimum.
    Oracle {
        #[arg(num_args = 4, required = true, allow_negative_numbers = true)]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_GRID)]
        grid: usize,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.noise.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("not a number: {s:?}")))
        })
        .collect()
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Modes => {
            for path in cmd_modes(&load_config(cli)?)? {
                println!("{}", path.display());
            }
        }
        Command::Run { lambda0, discord } => {
            let mut config = load_config(cli)?;
            if let Some(l) = lambda0 {
                config = config.with_lambda0(*l);
            }
            if let Some(d) = discord {
                config = config.with_target_discord(*d);
            }
            let (record, _) = cmd_run(&config)?;
            println!("{}", serde_json::to_string(&record)?);
        }
        Command::Sweep { values, num_seeds } => {
            let config = load_config(cli)?;
            let values = match values {
                Some(text) => parse_values(text)?,
                None => default_sweep_values(),
            };
            let base = config.noise.seed;
            let seeds: Vec<u64> = (0..*num_seeds).map(|k| base.wrapping_add(k)).collect();
            let (summary, _) = cmd_sweep(&config, &values, &seeds)?;
            print_json(&summary)?;
        }
        Command::Recover {
            measured,
            basis_psi,
            basis_phi,
        } => print_json(&cmd_recover(measured, basis_psi, basis_phi)?)?,
        Command::Oracle { lambdas, grid } => {
            let l = [lambdas[0], lambdas[1], lambdas[2], lambdas[3]];
            print_json(&cmd_oracle(l, *grid)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
