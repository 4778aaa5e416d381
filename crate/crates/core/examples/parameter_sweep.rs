//! Runs a grid of density scenarios through the library runner and reads
//! back the aggregate table.
//!
//! `cargo run --release --example parameter_sweep -- 'q=-5:5:0.5,!0.5;gamma0=-1'`

use epi_cosmo::cli::{run, Command, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = std::env::args().nth(1).unwrap_or_else(|| "q=-5:5:0.5,!0.5;c=-1,1".to_owned());
    let out = std::env::temp_dir().join("epi-lab-sweep-example");
    let mut config = RunConfig::new(Command::Sweep, &out);
    config.grid = Some(grid);
    let summary = run(&config)?;
    println!("{} points written under {}", summary.results["points"], out.display());
    println!("special q values: {}", summary.results["special_q_values"]);

    let mut rdr = csv::Reader::from_path(out.join("aggregate.csv"))?;
    for row in rdr.records().take(12) {
        let row = row?;
        println!("q={:<24} c={:<24} {:<28} {}", &row[0], &row[1], &row[5], &row[8]);
    }
    Ok(())
}
