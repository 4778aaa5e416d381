//! Log-derivative of a density, its map to a constant-coefficient linear
//! equation, the fitted modes, and the reconstruction of the density.
//!
//! `cargo run --example linearize_painleve_ince`

use epi_cosmo::epi::{euler_lagrange_rhs, solve_epi_numeric_with, EpiParams};
use epi_cosmo::linearizer::{
    alpha_beta_of_q, check_special_q, linearize, log_derivative_with, reconstruct_f,
};
use epi_cosmo::numerics::{max_relative_deviation, IvpOptions};

fn main() -> epi_cosmo::Result<()> {
    for q in [-2.0, -1.0, 1.5, 2.0, 3.0] {
        let ab = alpha_beta_of_q(q)?;
        println!(
            "q={q:+}: alpha={} beta={} beta/alpha^2={:.6} special={}",
            ab.alpha,
            ab.beta,
            ab.beta / (ab.alpha * ab.alpha),
            check_special_q(q)?
        );
    }

    let opts = IvpOptions::with_tolerances(1e-12, 1e-14).uniform(1001);
    for (q, f0, fdot0) in [(2.0, 1.0, 2.0), (-1.0, 1.0, 0.5)] {
        let p = EpiParams::new(q, -1.0, 0.0);
        let span = (0.0, 1.0);
        let sol = solve_epi_numeric_with(&p, f0, fdot0, span, &opts)?;
        let params = sol.params;
        let u = log_derivative_with(&sol.trajectory, |f, d| euler_lagrange_rhs(f, d, &params))?;
        let (report, segments) = linearize(q, &u)?;
        println!(
            "\nq={q}: lambda+={:.4} lambda-={:.4} A1={:.6e} A2={:.6e} residual={:.1e}",
            report.lambda_plus, report.lambda_minus, report.a1, report.a2, report.max_residual
        );
        let ab = alpha_beta_of_q(q)?;
        let modal = epi_cosmo::linearizer::fit_amplitudes(
            &segments[0].z,
            &epi_cosmo::linearizer::linear_modes(&ab)?,
        )?
        .modal;
        let back = reconstruct_f(&modal, &ab, f0, segments[0].u_sign, span, &opts)?;
        println!(
            "round trip f -> u -> z -> f: max relative deviation {:.1e}",
            max_relative_deviation(&sol.trajectory.state, &back.state)
        );
    }
    Ok(())
}
