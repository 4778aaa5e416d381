//! Generalized Fisher information densities, their nonlocal linearization,
//! and the cosmological models that share the same equations.
//!
//! * [`info`]: Shannon, Tsallis and Fisher functionals on gridded densities,
//!   plus a Monte Carlo Cramér-Rao experiment.
//! * [`epi`]: the Euler-Lagrange equation for the density, its first
//!   integral, implicit and closed-form solutions and regime tables.
//! * [`linearizer`]: `u = f'/f`, the map to a linear second-order equation,
//!   modal fits and reconstruction.
//! * [`cosmo`]: viscous, causal, perfect-fluid and Bianchi I reductions and
//!   the density/cosmology equivalence check.
//! * [`cli`]: the scenario runner behind `epi-lab`.
//! * [`numerics`]: ODE integration, quadrature, roots, finite differences.

pub mod cli;
pub mod cosmo;
pub mod epi;
pub mod error;
pub mod info;
pub mod linearizer;
pub mod numerics;

pub use error::{Error, Result};
