//! Entropies and Fisher information of sampled densities.
//!
//! `cargo run --example info_functionals`

use epi_cosmo::info::{fisher_information, fisher_information_q_report, shannon_entropy, tsallis_entropy, GridDensity};

fn main() -> epi_cosmo::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "sigma", "shannon", "fisher", "1/sigma^2");
    for sigma in [0.5, 1.0, 2.0, 4.0] {
        let d = GridDensity::gaussian(0.0, sigma, -10.0 * sigma, 10.0 * sigma, 4001)?;
        println!(
            "{sigma:>6} {:>12.8} {:>12.8} {:>12.8}",
            shannon_entropy(&d)?,
            fisher_information(&d)?,
            1.0 / (sigma * sigma)
        );
    }

    // Tsallis entropy approaches Shannon as q -> 1
    let d = GridDensity::gaussian(0.0, 1.0, -10.0, 10.0, 4001)?;
    let s = shannon_entropy(&d)?;
    for q in [0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
        let sq = tsallis_entropy(&d, q)?;
        let iq = fisher_information_q_report(&d, q)?;
        println!("q={q:<5} S_q={sq:.8}  S_q-S={:+.2e}  I_q={:.8} ({} cells clipped)", sq - s, iq.value, iq.clipped_cells);
    }
    Ok(())
}
