use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use molspin_cli::run::{preset, run, RunOptions};
use molspin_cli::schema::SCHEMA;
use molspin_cli::CliError;

/// Field-dependent structure and lattice-spin protocols of polar molecules.
#[derive(Parser, Debug)]
#[command(name = "molspin", version, about)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the configuration reference and exit.
    #[arg(long)]
    print_schema: bool,
    #[command(subcommand)]
    figure: Option<Figure>,
}

/// Built-in figure-data runs.
#[derive(Subcommand, Debug, Clone, Copy)]
enum Figure {
    /// Rotor dipoles and Ising coupling versus the Stark parameter.
    Fig2b,
    /// KRb differential Stark shift and couplings versus E at 400 G.
    Fig3bc,
    /// YO avoided crossing near 8.6 kG at 5 kV/cm.
    Fig4bcd,
    /// KRb microwave-dressed crossing at zero electric field.
    Fig5bcd,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Fig2b => "fig2b",
            Figure::Fig3bc => "fig3bc",
            Figure::Fig4bcd => "fig4bcd",
            Figure::Fig5bcd => "fig5bcd",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).target(env_logger::Target::Stderr).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if cli.print_schema {
        print!("{SCHEMA}");
        return Ok(());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::field("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::field("--threads", e))?;
    }
    let text = match (&cli.config, cli.figure) {
        (Some(_), Some(_)) => return Err(CliError::field("--config", "give either a config file or a figure subcommand")),
        (Some(path), None) => fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?,
        (None, Some(f)) => preset(f.name()).expect("every figure has a preset").to_string(),
        (None, None) => return Err(CliError::field("--config", "required unless a figure subcommand or --print-schema is given")),
    };
    let opts = RunOptions { out: cli.out.clone(), seed: cli.seed };
    let result = run(&text, &opts)?;
    let report = serde_json::to_string_pretty(&serde_json::Value::Object(result.outputs.report)).map_err(|e| CliError::io("stdout", e))?;
    println!("{report}");
    Ok(())
}
