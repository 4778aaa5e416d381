//! The nonextensive extreme-information variational problem.
//!
//! Extremizing `I_q - J_q` with `I_q = ∫ f^(q-2) f'² dx` and the
//! normalization-only bound information `J_q = ∫ γ₀ f dx` gives
//!
//! ```text
//! -2 f'' + (2 - q) f'² / f - γ₀ f^(2-q) = 0
//! ```
//!
//! with first integral `f^(q-2) f'² + γ₀ f = c` and implicit solution
//!
//! ```text
//! x - x₀ = ± ∫ f^(q/2 - 1) / sqrt(c - γ₀ f) df.
//! ```
//!
//! For `c = 0, γ₀ < 0` the solution is the power law
//! `f = [± (q-1)/2 sqrt(-γ₀) (x - x₀)]^(2/(q-1))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    find_root, integrate_ivp_with, quadrature, IvpOptions, Trajectory,
};

/// The `±` of the implicit and closed-form solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Branch {
    #[default]
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpiParams {
    /// Tsallis index.
    pub q: f64,
    /// Lagrange multiplier of the normalization constraint.
    pub gamma0: f64,
    /// First-integral constant.
    #[serde(default)]
    pub c: f64,
    /// Translation constant.
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub branch: Branch,
}

impl EpiParams {
    pub fn new(q: f64, gamma0: f64, c: f64) -> Self {
        Self {
            q,
            gamma0,
            c,
            x0: 0.0,
            branch: Branch::Plus,
        }
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    /// Turning point `c / γ₀` where `c - γ₀ f` vanishes, if it is positive.
    pub fn turning_point(&self) -> Option<f64> {
        if self.gamma0 == 0.0 {
            return None;
        }
        let f = self.c / self.gamma0;
        (f > 0.0).then_some(f)
    }
}

/// Sign pattern of `(c, γ₀)` and what it implies for `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeClass {
    /// `c > 0, γ₀ > 0`: `f < c/γ₀`, bounded with a maximum.
    BoundedWithMaximum,
    /// `c > 0, γ₀ < 0`: `f > c/γ₀` with `c/γ₀ < 0`; unbounded.
    UnboundedNegativeLowerLimit,
    /// `c < 0, γ₀ > 0`: `f < c/γ₀ < 0`; no admissible density.
    RejectedNegativeDensity,
    /// `c < 0, γ₀ < 0`: `f > c/γ₀ > 0`; unbounded with a positive floor.
    UnboundedPositiveLowerLimit,
    /// `c = 0`.
    SpecialC0,
}

impl RegimeClass {
    pub fn is_physical(self) -> bool {
        matches!(self, RegimeClass::BoundedWithMaximum)
    }
}

/// Classifies `(c, γ₀)`. With `γ₀ = 0` the constraint `f^(q-2) f'² = c`
/// decides alone: `c > 0` behaves like the `γ₀ → 0⁻` limit and `c < 0`
/// admits no real solution.
pub fn classify_regime(c: f64, gamma0: f64) -> RegimeClass {
    if c == 0.0 {
        RegimeClass::SpecialC0
    } else if c > 0.0 {
        if gamma0 > 0.0 {
            RegimeClass::BoundedWithMaximum
        } else {
            RegimeClass::UnboundedNegativeLowerLimit
        }
    } else if gamma0 > 0.0 || gamma0 == 0.0 {
        RegimeClass::RejectedNegativeDensity
    } else if gamma0 < 0.0 {
        RegimeClass::UnboundedPositiveLowerLimit
    } else {
        // NaN gamma0
        RegimeClass::RejectedNegativeDensity
    }
}

fn require_positive(f: f64) -> Result<()> {
    if f > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity(f))
    }
}

/// `f''` from the Euler-Lagrange equation.
pub fn euler_lagrange_rhs(f: f64, fdot: f64, p: &EpiParams) -> Result<f64> {
    require_positive(f)?;
    Ok(0.5 * (2.0 - p.q) * fdot * fdot / f - 0.5 * p.gamma0 * f.powf(2.0 - p.q))
}

/// Left-hand side of the Euler-Lagrange equation for a given jet
/// `(f, f', f'')`. Zero along exact solutions.
pub fn euler_lagrange_residual(f: f64, fdot: f64, fddot: f64, p: &EpiParams) -> f64 {
    -2.0 * fddot + (2.0 - p.q) * fdot * fdot / f - p.gamma0 * f.powf(2.0 - p.q)
}

/// `f^(q-2) f'² + γ₀ f`, equal to `c` along solutions.
pub fn first_integral(f: f64, fdot: f64, p: &EpiParams) -> Result<f64> {
    require_positive(f)?;
    Ok(f.powf(p.q - 2.0) * fdot * fdot + p.gamma0 * f)
}

/// Default lower reference of the implicit-solution integral.
///
/// `1e-6 c/γ₀` below a maximum, the turning point itself above a positive
/// floor, `1e-6` otherwise.
pub fn default_f_ref(p: &EpiParams) -> f64 {
    match p.turning_point() {
        Some(fm) if p.gamma0 > 0.0 => 1e-6 * fm,
        Some(floor) => floor,
        None => 1e-6,
    }
}

const X_OF_F_TOL: f64 = 1e-13;

/// `∫_{lo}^{hi} f^(q/2-1) / sqrt(c - γ₀ f) df`, resolving the square-root
/// singularity at the turning point with `f = f* ∓ s²`.
fn implicit_integral(p: &EpiParams, lo: f64, hi: f64) -> Result<f64> {
    if hi < lo {
        return implicit_integral(p, hi, lo).map(|v| -v);
    }
    require_positive(lo)?;
    let g = |f: f64| f.powf(0.5 * p.q - 1.0);
    for f in [lo, hi] {
        let disc = p.c - p.gamma0 * f;
        let at_turning = p.turning_point().is_some_and(|t| (f - t).abs() <= 1e-14 * t);
        if disc < 0.0 && !at_turning || (disc == 0.0 && p.turning_point().is_none()) {
            return Err(Error::ComplexRegion(disc));
        }
    }
    if lo == hi {
        return Ok(0.0);
    }
    let Some(fstar) = p.turning_point() else {
        return quadrature(|f| g(f) / (p.c - p.gamma0 * f).sqrt(), lo, hi, X_OF_F_TOL);
    };
    // Substitute within fstar/2 of the turning point, integrate directly outside.
    let rate = p.gamma0.abs().sqrt();
    let half = 0.5 * fstar;
    let (near_lo, near_hi) = (fstar - half, fstar + half);
    let mut total = 0.0;
    let direct = |a: f64, b: f64| quadrature(|f| g(f) / (p.c - p.gamma0 * f).sqrt(), a, b, X_OF_F_TOL);
    if p.gamma0 > 0.0 {
        // f below fstar: f = fstar - s^2
        let split = near_lo.clamp(lo, hi);
        if split > lo {
            total += direct(lo, split)?;
        }
        if hi > split {
            let s_hi = (fstar - split).max(0.0).sqrt();
            let s_lo = (fstar - hi).max(0.0).sqrt();
            total += 2.0 / rate * quadrature(|s| g(fstar - s * s), s_lo, s_hi, X_OF_F_TOL)?;
        }
    } else {
        // f above fstar: f = fstar + s^2
        let split = near_hi.clamp(lo, hi);
        if split > lo {
            let s_lo = (lo - fstar).max(0.0).sqrt();
            let s_hi = (split - fstar).max(0.0).sqrt();
            total += 2.0 / rate * quadrature(|s| g(fstar + s * s), s_lo, s_hi, X_OF_F_TOL)?;
        }
        if hi > split {
            total += direct(split, hi)?;
        }
    }
    Ok(total)
}

/// `x(f)` from the implicit solution with the default reference point.
pub fn implicit_solution_x_of_f(p: &EpiParams, f: f64) -> Result<f64> {
    implicit_solution_x_of_f_from(p, f, default_f_ref(p))
}

/// `x(f) = x₀ ± ∫_{f_ref}^{f} f^(q/2-1) / sqrt(c - γ₀ f) df`.
pub fn implicit_solution_x_of_f_from(p: &EpiParams, f: f64, f_ref: f64) -> Result<f64> {
    require_positive(f)?;
    Ok(p.x0 + p.branch.sign() * implicit_integral(p, f_ref, f)?)
}

/// Inverts the implicit solution at `x`, returning `(f, f')`.
///
/// In the bounded regime the profile is continued past its maximum by
/// switching branch where `f' = 0`, so the result is the full symmetric
/// bump.
pub fn f_of_x(p: &EpiParams, x: f64, f_ref: f64) -> Result<(f64, f64)> {
    let mut distance = p.branch.sign() * (x - p.x0);
    let mut slope_sign = p.branch.sign();
    if distance < 0.0 {
        return Err(Error::InvalidParameters(format!(
            "x = {x} lies before the reference point of this branch"
        )));
    }
    let upper = if p.gamma0 > 0.0 {
        let fm = p.turning_point().ok_or(Error::ComplexRegion(p.c))?;
        let to_max = implicit_integral(p, f_ref, fm)?;
        if distance > to_max {
            distance = 2.0 * to_max - distance;
            slope_sign = -slope_sign;
            if distance < 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "x = {x} lies beyond the far end of the bounded profile"
                )));
            }
        }
        fm
    } else {
        let mut hi = 2.0 * f_ref.max(1.0);
        let mut tries = 0;
        while implicit_integral(p, f_ref, hi)? < distance {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::NonConvergent {
                    error: f64::INFINITY,
                    intervals: 0,
                });
            }
        }
        hi
    };
    let f = find_root(
        |f| implicit_integral(p, f_ref, f).unwrap_or(f64::NAN) - distance,
        f_ref,
        upper,
        1e-15 * upper,
    )?;
    let disc = (p.c - p.gamma0 * f).max(0.0);
    let fdot = slope_sign * f.powf(1.0 - 0.5 * p.q) * disc.sqrt();
    Ok((f, fdot))
}

/// Samples the inverted implicit solution on `xs`.
pub fn invert_implicit(p: &EpiParams, xs: &[f64], f_ref: f64) -> Result<Trajectory> {
    let mut fs = Vec::with_capacity(xs.len());
    let mut ds = Vec::with_capacity(xs.len());
    for &x in xs {
        let (f, d) = f_of_x(p, x, f_ref)?;
        fs.push(f);
        ds.push(d);
    }
    Trajectory::new(xs.to_vec(), fs, ds, "f(x) implicit")
}

/// Total mass `∫ f dx` of the bounded profile, from `f = 0` through the
/// maximum and back. Only meaningful in the bounded regime.
pub fn bounded_profile_mass(p: &EpiParams) -> Result<f64> {
    if classify_regime(p.c, p.gamma0) != RegimeClass::BoundedWithMaximum {
        return Err(Error::WrongRegime);
    }
    let fm = p.c / p.gamma0;
    // x-integral of f over one flank = ∫ f^(q/2) / sqrt(γ₀ (fm - f)) df;
    // with f = fm - s² this is (2/sqrt γ₀) ∫ (fm - s²)^(q/2) ds.
    let flank = 2.0 / p.gamma0.sqrt()
        * quadrature(|s| (fm - s * s).max(0.0).powf(0.5 * p.q), 0.0, fm.sqrt(), 1e-12)?;
    Ok(2.0 * flank)
}

/// The `c = 0` power-law solution.
///
/// Returns `0` at `x = x₀` when `q > 1` and `+inf` there when `q < 1`.
pub fn closed_form_c0(p: &EpiParams, x: f64) -> Result<f64> {
    closed_form_c0_jet(p, x).map(|j| j.0)
}

/// `(f, f', f'')` of the `c = 0` solution, differentiated analytically.
pub fn closed_form_c0_jet(p: &EpiParams, x: f64) -> Result<(f64, f64, f64)> {
    if p.q == 1.0 || !p.q.is_finite() {
        return Err(Error::InvalidParameters("closed form needs q != 1".into()));
    }
    if !(p.gamma0 < 0.0) {
        return Err(Error::InvalidParameters("closed form needs gamma0 < 0".into()));
    }
    let k = p.branch.sign() * 0.5 * (p.q - 1.0) * (-p.gamma0).sqrt();
    let base = k * (x - p.x0);
    if base < 0.0 {
        return Err(Error::NegativeBase(base));
    }
    let e = 2.0 / (p.q - 1.0);
    let f = base.powf(e);
    let fdot = e * k * base.powf(e - 1.0);
    let fddot = e * (e - 1.0) * k * k * base.powf(e - 2.0);
    Ok((f, fdot, fddot))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximumReport {
    pub f_m: f64,
    pub fddot_at_max: f64,
}

/// Height and curvature of the maximum in the bounded regime.
pub fn maximum_diagnostics(p: &EpiParams) -> Result<MaximumReport> {
    if !(p.c > 0.0 && p.gamma0 > 0.0) {
        return Err(Error::WrongRegime);
    }
    Ok(MaximumReport {
        f_m: p.c / p.gamma0,
        fddot_at_max: -0.5 * p.gamma0 * (p.gamma0 / p.c).powf(p.q - 2.0),
    })
}

/// A numerical solution with its conservation audit.
#[derive(Debug, Clone, PartialEq)]
pub struct EpiSolution {
    pub params: EpiParams,
    pub trajectory: Trajectory,
    /// First integral evaluated at the initial data.
    pub c: f64,
    /// Largest `|first_integral(x) - c|` along the trajectory.
    pub max_drift: f64,
    pub regime: RegimeClass,
}

impl EpiSolution {
    /// Drift bound `1e-6 * max(1, |c|)`.
    pub fn conserves(&self) -> bool {
        self.max_drift <= 1e-6 * self.c.abs().max(1.0)
    }
}

/// Integrates the Euler-Lagrange equation from `(f0, f0')`.
pub fn solve_epi_numeric(
    p: &EpiParams,
    f0: f64,
    fdot0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<EpiSolution> {
    solve_epi_numeric_with(p, f0, fdot0, span, &IvpOptions::from_tol(tol))
}

pub fn solve_epi_numeric_with(
    p: &EpiParams,
    f0: f64,
    fdot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<EpiSolution> {
    require_positive(f0)?;
    let c = first_integral(f0, fdot0, p)?;
    let params = EpiParams { c, ..*p };
    let trajectory = integrate_ivp_with(
        |f, fd| euler_lagrange_rhs(f, fd, &params).unwrap_or(f64::NAN),
        f0,
        fdot0,
        span,
        opts,
    )?
    .with_label("f(x)");
    let max_drift = trajectory
        .samples()
        .map(|(_, f, d)| first_integral(f, d, &params).map_or(f64::INFINITY, |v| (v - c).abs()))
        .fold(0.0, f64::max);
    Ok(EpiSolution {
        params,
        trajectory,
        c,
        max_drift,
        regime: classify_regime(c, p.gamma0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        assert_eq!(euler_lagrange_rhs(1.0, 1.0, &EpiParams::new(2.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(euler_lagrange_rhs(1.0, 0.0, &EpiParams::new(1.0, -2.0, 0.0)).unwrap(), 1.0);
        let p = EpiParams::new(3.0, -1.0, 0.0);
        for s in [0.5, 1.0, 2.0] {
            let (f, d, dd) = closed_form_c0_jet(&p, s).unwrap();
            assert!((f - s).abs() < 1e-15);
            assert!(euler_lagrange_residual(f, d, dd, &p).abs() < 1e-12);
            assert!((euler_lagrange_rhs(f, d, &p).unwrap() - dd).abs() < 1e-12);
        }
        assert_eq!(
            euler_lagrange_rhs(0.0, 1.0, &p).unwrap_err(),
            Error::NonPositiveDensity(0.0)
        );
    }

    #[test]
    fn first_integral_examples() {
        assert_eq!(first_integral(1.0, 0.0, &EpiParams::new(2.0, 0.0, 0.0)).unwrap(), 0.0);
        let p = EpiParams::new(3.0, -1.0, 0.0);
        for x in [0.3, 1.0, 4.0] {
            let (f, d, _) = closed_form_c0_jet(&p, x).unwrap();
            assert_eq!(first_integral(f, d, &p).unwrap(), 0.0);
        }
        assert!(first_integral(-1.0, 0.0, &p).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let p = EpiParams::new(3.0, -1.0, 0.0);
        assert!((closed_form_c0(&p, 1.7).unwrap() - 1.7).abs() < 1e-15);
        let p = EpiParams::new(2.0, -4.0, 0.0);
        assert!((closed_form_c0(&p, 1.5).unwrap() - 2.25).abs() < 1e-14);
        for q in [1.5, 2.0, 3.0, 5.0] {
            let p = EpiParams::new(q, -2.0, 0.0).with_x0(0.7);
            assert_eq!(closed_form_c0(&p, 0.7).unwrap(), 0.0);
        }
        let p = EpiParams::new(0.5, -1.0, 0.0);
        assert!(closed_form_c0(&p, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn closed_form_errors() {
        assert!(matches!(
            closed_form_c0(&EpiParams::new(1.0, -1.0, 0.0), 1.0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            closed_form_c0(&EpiParams::new(2.0, 1.0, 0.0), 1.0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            closed_form_c0(&EpiParams::new(2.0, -1.0, 0.0), -1.0),
            Err(Error::NegativeBase(_))
        ));
        let minus = EpiParams::new(2.0, -1.0, 0.0).with_branch(Branch::Minus);
        assert!((closed_form_c0(&minus, -2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn regime_table() {
        assert_eq!(classify_regime(1.0, 1.0), RegimeClass::BoundedWithMaximum);
        assert_eq!(classify_regime(1.0, -1.0), RegimeClass::UnboundedNegativeLowerLimit);
        assert_eq!(classify_regime(-1.0, 1.0), RegimeClass::RejectedNegativeDensity);
        assert_eq!(classify_regime(-1.0, -1.0), RegimeClass::UnboundedPositiveLowerLimit);
        assert_eq!(classify_regime(0.0, -1.0), RegimeClass::SpecialC0);
        assert_eq!(classify_regime(0.0, 0.0), RegimeClass::SpecialC0);
        assert_eq!(classify_regime(2.0, 0.0), RegimeClass::UnboundedNegativeLowerLimit);
        assert_eq!(classify_regime(-2.0, 0.0), RegimeClass::RejectedNegativeDensity);
    }

    #[test]
    fn maximum_examples() {
        let m = maximum_diagnostics(&EpiParams::new(2.0, 1.0, 1.0)).unwrap();
        assert_eq!((m.f_m, m.fddot_at_max), (1.0, -0.5));
        let m = maximum_diagnostics(&EpiParams::new(2.0, 1.0, 2.0)).unwrap();
        assert_eq!((m.f_m, m.fddot_at_max), (2.0, -0.5));
        assert_eq!(
            maximum_diagnostics(&EpiParams::new(2.0, -1.0, 1.0)).unwrap_err(),
            Error::WrongRegime
        );
        // closed-form curvature agrees with the equation at the maximum
        let p = EpiParams::new(1.5, 2.0, 3.0);
        let m = maximum_diagnostics(&p).unwrap();
        assert!((euler_lagrange_rhs(m.f_m, 0.0, &p).unwrap() - m.fddot_at_max).abs() < 1e-14);
    }

    #[test]
    fn implicit_linear_case() {
        // q = 2, c = 1, gamma0 = 0: x - x0 = f - f_ref
        let p = EpiParams::new(2.0, 0.0, 1.0);
        for f in [0.1, 1.0, 3.0] {
            let x = implicit_solution_x_of_f_from(&p, f, 1e-12).unwrap();
            assert!((x - f).abs() < 1e-10);
        }
    }

    #[test]
    fn implicit_complex_region() {
        let p = EpiParams::new(2.0, 1.0, 1.0);
        assert!(matches!(
            implicit_solution_x_of_f(&p, 1.5),
            Err(Error::ComplexRegion(_))
        ));
        let p = EpiParams::new(2.0, 0.0, -1.0);
        assert!(matches!(
            implicit_solution_x_of_f(&p, 0.5),
            Err(Error::ComplexRegion(_))
        ));
    }

    #[test]
    fn implicit_c0_routes_to_power_law() {
        // c = 0 goes through the generic integral and agrees with the
        // closed form up to the x0 shift fixed by f_ref.
        let p = EpiParams::new(3.0, -1.0, 0.0);
        let xa = implicit_solution_x_of_f(&p, 0.5).unwrap();
        let xb = implicit_solution_x_of_f(&p, 2.5).unwrap();
        assert!(((xb - xa) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn implicit_through_the_maximum() {
        // q = 2, gamma0 = 1, c = 1: f = 1 - (x - xm)^2/4 ... check x(fm) is finite
        // and that x(f) matches sqrt-substitution closed form 2(sqrt(1-fref) - sqrt(1-f)).
        let p = EpiParams::new(2.0, 1.0, 1.0);
        let fref = default_f_ref(&p);
        for f in [0.2, 0.9, 0.999_999, 1.0] {
            let x = implicit_solution_x_of_f(&p, f).unwrap();
            let exact = 2.0 * ((1.0 - fref).sqrt() - (1.0 - f).sqrt());
            assert!((x - exact).abs() < 1e-11, "f={f}");
        }
    }

    #[test]
    fn lower_floor_regime() {
        // c < 0, gamma0 < 0: f >= c/gamma0, reference at the floor
        let p = EpiParams::new(2.0, -1.0, -1.0);
        assert_eq!(default_f_ref(&p), 1.0);
        // q = 2: x = ∫_1^f df / sqrt(f - 1) = 2 sqrt(f - 1)
        let x = implicit_solution_x_of_f(&p, 5.0).unwrap();
        assert!((x - 4.0).abs() < 1e-11);
        let (f, d) = f_of_x(&p, 4.0, 1.0).unwrap();
        assert!((f - 5.0).abs() < 1e-10);
        assert!((d - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_profile_is_stitched() {
        let p = EpiParams::new(2.0, 1.0, 1.0);
        let fref = default_f_ref(&p);
        let xm = implicit_solution_x_of_f(&p, 1.0).unwrap();
        let (fa, da) = f_of_x(&p, xm - 0.5, fref).unwrap();
        let (fb, db) = f_of_x(&p, xm + 0.5, fref).unwrap();
        assert!((fa - fb).abs() < 1e-10);
        assert!(da > 0.0 && db < 0.0);
        assert!((da + db).abs() < 1e-8);
    }

    #[test]
    fn bounded_mass_matches_beta_function() {
        // q = 2, gamma0 = 1, c = 1: f = 1 - s^2 in s, mass = 2 * 2 * ∫_0^1 (1 - s^2) ds = 8/3
        let m = bounded_profile_mass(&EpiParams::new(2.0, 1.0, 1.0)).unwrap();
        assert!((m - 8.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn numeric_stationary_and_c0() {
        let s = solve_epi_numeric(&EpiParams::new(2.0, 0.0, 0.0), 1.0, 0.0, (0.0, 5.0), 1e-10).unwrap();
        assert!(s.trajectory.state.iter().all(|f| (f - 1.0).abs() < 1e-14));
        let tol = 1e-9;
        let p = EpiParams::new(3.0, -1.0, 0.0);
        let s = solve_epi_numeric(&p, 1.0, 1.0, (0.0, 3.0), tol).unwrap();
        assert_eq!(s.regime, RegimeClass::SpecialC0);
        let cf = p.with_x0(-1.0);
        for (x, f, _) in s.trajectory.samples() {
            assert!((f - closed_form_c0(&cf, x).unwrap()).abs() < 10.0 * tol * f.max(1.0));
        }
    }

    #[test]
    fn numeric_conserves_first_integral() {
        let p = EpiParams::new(1.5, 1.0, 0.0);
        let s = solve_epi_numeric(&p, 0.5, 0.3, (0.0, 1.0), 1e-10).unwrap();
        assert!((s.c - (0.5f64.powf(-0.5) * 0.09 + 0.5)).abs() < 1e-15);
        assert!(s.conserves(), "drift {}", s.max_drift);
    }
}
