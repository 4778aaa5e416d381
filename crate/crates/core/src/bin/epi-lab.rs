use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use epi_cosmo::cli::{run, Command, RunConfig};

/// Information-theoretic densities, their linearization and cosmological
/// analogues, driven by JSON scenarios.
#[derive(Debug, Parser)]
#[command(name = "epi-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario JSON (or a density CSV for `info`).
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep grid, e.g. `q=-5:5:0.25,!0.5;gamma0=-1`.
    #[arg(long)]
    grid: Option<String>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", serde_json::json!({ "error": "input", "exit_code": 1, "message": first }));
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let config = RunConfig {
        command: args.command,
        scenario_path: args.scenario,
        output_dir: args.out,
        tol: args.tol,
        seed: args.seed,
        grid: args.grid,
    };
    match run(&config) {
        Ok(summary) => {
            println!("{}", summary.output_dir.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
