//! Shared numerical primitives: IVP integration, quadrature, root finding
//! and finite differences.

mod diff;
pub mod ivp;
mod quadrature;
mod roots;
mod trajectory;

pub use diff::{finite_diff, second_diff};
pub use ivp::{
    integrate_ivp, integrate_ivp_with, integrate_system, IvpOptions, OutputGrid, SystemSolution,
};
pub use quadrature::{quadrature, quadrature_with, QuadratureResult, MAX_INTERVALS};
pub use roots::find_root;
pub use trajectory::{cumulative_hermite, max_relative_deviation, Trajectory};
