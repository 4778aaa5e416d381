//! Monte Carlo check of the Cramér-Rao bound for location estimators.
//!
//! `cargo run --release --example cramer_rao`

use epi_cosmo::info::{cramer_rao_experiment, estimators, EstimationExperiment, GaussianFamily};

fn main() -> epi_cosmo::Result<()> {
    let named: [(&str, fn(&mut [f64]) -> f64); 3] =
        [("mean", estimators::mean), ("median", estimators::median), ("first", estimators::first)];
    println!("{:>6} {:>4} {:>7} {:>10} {:>10} {:>8}", "sigma", "n", "est", "mse", "1/(nI)", "I*mse");
    for sigma in [0.5, 2.0] {
        for n in [1, 9, 25] {
            for (name, estimator) in named {
                let exp = EstimationExperiment {
                    true_location: 0.0,
                    sample_count: n,
                    estimator,
                    replications: 20_000,
                    rng_seed: 7,
                };
                let r = cramer_rao_experiment(&GaussianFamily { sigma }, &exp)?;
                println!(
                    "{sigma:>6} {n:>4} {name:>7} {:>10.3e} {:>10.3e} {:>8.4}{}",
                    r.mse,
                    1.0 / r.fisher_total,
                    r.product,
                    if r.violates_bound { "  below bound!" } else { "" }
                );
            }
        }
    }
    Ok(())
}
