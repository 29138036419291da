//! Experiment runner behind the `fluctlim` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output: Option<PathBuf>,
    pub force: bool,
    /// 0 lets rayon pick.
    pub threads: usize,
    pub seed: u64,
}

/// Runs the config at `path`, writes outputs and returns the process exit code.
pub fn run_config_file(path: &Path, opts: &RunOptions) -> i32 {
    match execute(path, opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

fn execute(path: &Path, opts: &RunOptions) -> Result<i32, CliError> {
    let cfg = ExperimentConfig::from_path(path)?;
    let echo = serde_json::to_value(&cfg).expect("config serializes");
    let validated = cfg.validate()?;
    let out_dir = opts
        .output
        .clone()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| CliError::Config("no output directory (set `output` or pass --output)".into()))?;
    output::prepare_output_dir(&out_dir, opts.force)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    let ctx = runner::RunContext { seed: opts.seed, d_max: cfg.d_max };
    let start = Instant::now();
    let outcome = pool.install(|| runner::run(&validated, &cfg.tolerances, &ctx))?;
    let wall = start.elapsed().as_secs_f64();

    for r in &outcome.reports {
        println!("{}", r.line());
    }
    if outcome.rows.is_empty() {
        eprintln!("no rows produced; nothing written to {}", out_dir.display());
        return Ok(if outcome.reports.is_empty() { 1 } else { outcome.exit_code().max(2) });
    }
    output::write_csv(&out_dir.join("results.csv"), &outcome.rows)?;
    let manifest = output::build_manifest(&echo, &outcome, wall, threads, opts.seed);
    output::write_manifest(&out_dir.join("manifest.json"), &manifest)?;
    Ok(outcome.exit_code())
}
