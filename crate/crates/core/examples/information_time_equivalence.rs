//! The log-derivative of a density and the Hubble rate of a viscous
//! universe are one function, with time proportional to the information
//! parameter.
//!
//! `cargo run --example information_time_equivalence`

use epi_cosmo::cosmo::{run_equivalence, EquivalenceSetup};

fn main() -> epi_cosmo::Result<()> {
    for (q, s) in [(2.0, 1.0), (2.0, 2.0), (-1.0, 1.0), (3.0, 0.5)] {
        let run = run_equivalence(&EquivalenceSetup::new(q, 1.0, 0.5, s, (0.0, 2.0), 1e-6))?;
        let r = &run.report;
        println!(
            "q={q:+} s={s}: alpha={} beta={} u-dev={:.1e} f-dev={:.1e} passed={}",
            r.alpha, r.beta, r.u_deviation, r.f_deviation, r.passed
        );
    }
    let run = run_equivalence(&EquivalenceSetup::new(2.0, 1.0, 0.5, 2.0, (0.0, 2.0), 1e-6))?;
    println!("\n{:>6} {:>12} {:>6} {:>12} {:>12}", "x", "u(x)", "t", "H(t)", "s*H(s x)");
    for i in (0..run.u.len()).step_by(run.u.len() / 8) {
        let (x, t) = (run.f.independent[i], run.h.independent[i]);
        println!("{x:>6.3} {:>12.8} {t:>6.3} {:>12.8} {:>12.8}", run.u[i], run.h.state[i], 2.0 * run.h.state[i]);
    }
    Ok(())
}
