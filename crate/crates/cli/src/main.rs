use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fluctlim_cli::{run_config_file, RunOptions};

#[derive(Parser)]
#[command(name = "fluctlim", version, about = "Finite-ensemble fluctuation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Allow writing into a non-empty output directory.
        #[arg(long)]
        force: bool,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Seed for randomized oracle states (decompose runs).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, output, force, threads, seed } => {
            run_config_file(&config, &RunOptions { output, force, threads, seed })
        }
    };
    std::process::exit(code);
}
