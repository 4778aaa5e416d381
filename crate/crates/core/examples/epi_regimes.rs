//! Density profiles from the variational equation in each sign regime of
//! `(c, gamma0)`, with their first integral audited along the way.
//!
//! `cargo run --example epi_regimes`

use epi_cosmo::epi::{classify_regime, closed_form_c0, maximum_diagnostics, solve_epi_numeric, Branch, EpiParams};

fn main() -> epi_cosmo::Result<()> {
    let q = 2.0;
    for (c, gamma0, f0) in [(1.0, 1.0, 0.5), (1.0, -1.0, 1.0), (-1.0, -1.0, 2.0), (-1.0, 1.0, 1.0)] {
        let p = EpiParams::new(q, gamma0, c);
        let regime = classify_regime(c, gamma0);
        // choose the slope that reproduces c from f0
        let slope2 = (c - gamma0 * f0) / f0.powf(q - 2.0);
        if slope2 < 0.0 {
            println!("c={c:+} gamma0={gamma0:+}: {regime:?}, no real slope at f0={f0}");
            continue;
        }
        let sol = solve_epi_numeric(&p, f0, slope2.sqrt(), (0.0, 0.8), 1e-9)?;
        let (x, f) = (sol.trajectory.end(), sol.trajectory.state.last().copied().unwrap_or(f64::NAN));
        println!(
            "c={c:+} gamma0={gamma0:+}: {regime:?}, physical={}, f({x:.2})={f:.6}, drift={:.1e}",
            regime.is_physical(),
            sol.max_drift
        );
        if regime.is_physical() {
            let m = maximum_diagnostics(&p)?;
            println!("    maximum f_m={} with f''={:.4}", m.f_m, m.fddot_at_max);
        }
    }

    println!("c = 0 closed form, q=3, gamma0=-1:");
    let p = EpiParams::new(3.0, -1.0, 0.0).with_branch(Branch::Plus);
    for x in [0.5, 1.0, 2.0, 4.0] {
        println!("    f({x}) = {:.6}", closed_form_c0(&p, x)?);
    }
    Ok(())
}
