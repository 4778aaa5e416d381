//! Cosmological reductions and their link to the information-theoretic ODE.
//!
//! All four models reduce to the master form
//! `ÿ + α g(y) ẏ + β g(y) ∫g dy + γ g(y) = 0`.
//!
//! Coefficient maps used below (each guarded at runtime by a dual
//! integration):
//!
//! * Full causal, `H = yⁿ` with `n = -1/r`:
//!   `H Ḧ - (1+r) Ḣ² + A H² Ḣ - B H⁴ = 0` becomes
//!   `ÿ + A yⁿ ẏ + r B y^(2n+1) = 0`, so `α = A` and `β = r B`.
//!   Initial data: `y₀ = H₀^(1/n)`, `ẏ₀ = Ḣ₀ / (n y₀^(n-1))`.
//! * Bianchi I, `G = y^(1/K)` with `n = 1/K`: the `(K-1)Ġ²` term cancels
//!   against the chain rule, leaving `ÿ - c y^(-n) ẏ + (M²/n) y^(1-2n) = 0`.
//!   With `τ = -c t` this is `y'' + y^(-n) y' + μ y^(1-2n) = 0` and
//!   `μ = M² K / c²`. Initial data: `y₀ = G₀^K`, `dy/dτ = -K G₀^(K-1) Ġ₀ / c`.
//! * Perfect fluid with `Λ`: the constraint gives
//!   `Ḣ = -(3σ/2) H² + σΛ/2 + (1 - 3σ/2) k/a²`; differentiating once more and
//!   eliminating `k/a²` yields the third-order form, so it holds for any `k`.

use serde::{Deserialize, Serialize};

use crate::epi::{euler_lagrange_rhs, solve_epi_numeric_with, EpiParams};
use crate::error::{Error, Result};
use crate::numerics::{
    cumulative_hermite, finite_diff, integrate_ivp_with, integrate_system, max_relative_deviation,
    IvpOptions, Trajectory,
};

/// `ÿ = -α g(y) ẏ - β g(y) G(y) - γ g(y)`, with `G` an antiderivative of `g`.
pub fn master_rhs<G, I>(y: f64, ydot: f64, g: G, g_int: I, alpha: f64, beta: f64, gamma: f64) -> f64
where
    G: Fn(f64) -> f64,
    I: Fn(f64) -> f64,
{
    let gy = g(y);
    -alpha * gy * ydot - beta * gy * g_int(y) - gamma * gy
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedViscous {
    pub alpha: f64,
    pub beta: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullCausal {
    pub r: f64,
    pub A: f64,
    pub B: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfectFluidLambda {
    pub sigma: f64,
    pub Lambda: f64,
    pub rho0: f64,
    #[serde(default)]
    pub k: f64,
}

/// Bianchi I with a scalar field. `k` is the coefficient of `Ġ/G` in the
/// scalar-field equation.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BianchiI {
    pub K: f64,
    pub M: f64,
    pub c_const: f64,
    #[serde(default)]
    pub m: f64,
    #[serde(default)]
    pub a_const: f64,
    #[serde(default)]
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params")]
pub enum CosmoScenario {
    TruncatedViscous(TruncatedViscous),
    FullCausal(FullCausal),
    PerfectFluidLambda(PerfectFluidLambda),
    BianchiI(BianchiI),
}

impl CosmoScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameters(msg.to_owned()));
        match self {
            CosmoScenario::FullCausal(s) if !(s.r > 0.0) => bad("FullCausal.r must be > 0"),
            CosmoScenario::PerfectFluidLambda(s) if !(s.rho0 > 0.0) => {
                bad("PerfectFluidLambda.rho0 must be > 0")
            }
            CosmoScenario::BianchiI(s) if s.K == 0.0 || !s.K.is_finite() => {
                bad("BianchiI.K must be nonzero")
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CosmoScenario::TruncatedViscous(_) => "TruncatedViscous",
            CosmoScenario::FullCausal(_) => "FullCausal",
            CosmoScenario::PerfectFluidLambda(_) => "PerfectFluidLambda",
            CosmoScenario::BianchiI(_) => "BianchiI",
        }
    }
}

/// `Ḧ = -α H Ḣ - β H³`.
pub fn truncated_viscous_rhs(h: f64, hdot: f64, alpha: f64, beta: f64) -> f64 {
    -alpha * h * hdot - beta * h * h * h
}

/// `Ḧ = [(1+r) Ḣ² - A H² Ḣ + B H⁴] / H`.
pub fn full_causal_rhs(h: f64, hdot: f64, s: &FullCausal) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::ZeroExpansionRate);
    }
    Ok(((1.0 + s.r) * hdot * hdot - s.A * h * h * hdot + s.B * h.powi(4)) / h)
}

/// `(n, α, β)` of the `H = yⁿ` image.
pub fn full_causal_coefficients(s: &FullCausal) -> (f64, f64, f64) {
    (-1.0 / s.r, s.A, s.r * s.B)
}

/// `H² = (ρ₀/3) a^(-3σ) - k/a² + Λ/3`.
pub fn friedmann_00(a: f64, s: &PerfectFluidLambda) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameters(format!("scale factor must be positive, got {a}")));
    }
    let h2 = s.rho0 / 3.0 * a.powf(-3.0 * s.sigma) - s.k / (a * a) + s.Lambda / 3.0;
    if h2 < 0.0 {
        Err(Error::ForbiddenRegion(h2))
    } else {
        Ok(h2)
    }
}

/// `Ḧ = -(2+3σ) H Ḣ - 3σ H³ + σ Λ H`.
pub fn perfect_fluid_third_order_rhs(h: f64, hdot: f64, s: &PerfectFluidLambda) -> f64 {
    -(2.0 + 3.0 * s.sigma) * h * hdot - 3.0 * s.sigma * h * h * h + s.sigma * s.Lambda * h
}

/// `G̈ = Ġ [c - (K-1) Ġ - M²/Ġ] / G`.
#[allow(non_snake_case)]
pub fn bianchi_G_rhs(g: f64, gdot: f64, s: &BianchiI) -> Result<f64> {
    if gdot == 0.0 {
        return Err(Error::ZeroGdot);
    }
    Ok(gdot * (s.c_const - (s.K - 1.0) * gdot - s.M * s.M / gdot) / g)
}

// Expanded form, regular at Ġ = 0, for the integrator.
fn bianchi_expanded(g: f64, gdot: f64, s: &BianchiI) -> f64 {
    (s.c_const * gdot - (s.K - 1.0) * gdot * gdot - s.M * s.M) / g
}

/// `μ = M² K / c²`, the free coefficient of the `τ` equation.
pub fn bianchi_mu(s: &BianchiI) -> Result<f64> {
    if s.c_const == 0.0 {
        return Err(Error::ZeroC);
    }
    Ok(s.M * s.M * s.K / (s.c_const * s.c_const))
}

/// Integrates `Ḧ = -α H Ḣ - β H³`.
pub fn solve_truncated_viscous(
    s: &TruncatedViscous,
    h0: f64,
    hdot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory> {
    let s = *s;
    Ok(integrate_ivp_with(|h, hd| truncated_viscous_rhs(h, hd, s.alpha, s.beta), h0, hdot0, span, opts)?
        .with_label("H(t)"))
}

pub fn solve_full_causal(
    s: &FullCausal,
    h0: f64,
    hdot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory> {
    if !(h0 > 0.0) {
        return Err(Error::ZeroExpansionRate);
    }
    let s = *s;
    Ok(integrate_ivp_with(
        |h, hd| full_causal_rhs(h, hd, &s).unwrap_or(f64::NAN),
        h0,
        hdot0,
        span,
        opts,
    )?
    .with_label("H(t)"))
}

pub fn solve_perfect_fluid(
    s: &PerfectFluidLambda,
    h0: f64,
    hdot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory> {
    let s = *s;
    Ok(integrate_ivp_with(|h, hd| perfect_fluid_third_order_rhs(h, hd, &s), h0, hdot0, span, opts)?
        .with_label("H(t)"))
}

#[allow(non_snake_case)]
pub fn solve_bianchi_G(
    s: &BianchiI,
    g0: f64,
    gdot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory> {
    if !(g0 > 0.0) {
        return Err(Error::InvalidParameters(format!("G0 must be positive, got {g0}")));
    }
    let s = *s;
    Ok(integrate_ivp_with(
        |g, gd| if g > 0.0 { bianchi_expanded(g, gd, &s) } else { f64::NAN },
        g0,
        gdot0,
        span,
        opts,
    )?
    .with_label("G(t)"))
}

/// Outcome of integrating a model and its substituted image side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionReport {
    pub max_relative_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
    /// Coefficients of the image equation, `[n, α, β]` or `[n, μ]`.
    pub image_coefficients: Vec<f64>,
    pub blow_up: Option<f64>,
}

const CHECK_POINTS: usize = 201;

fn check_options(tol: f64) -> Result<IvpOptions> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance { rel: tol, abs: tol });
    }
    Ok(IvpOptions::with_tolerances(tol * 1e-3, tol * 1e-5).uniform(CHECK_POINTS))
}

fn compare_prefix(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    max_relative_deviation(&a[..n], &b[..n])
}

/// Integrates the full causal equation for `H` and its `H = yⁿ` image for
/// `y`, and compares `H` with `yⁿ`.
pub fn full_causal_substitution_check(
    s: &FullCausal,
    h0: f64,
    hdot0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<SubstitutionReport> {
    CosmoScenario::FullCausal(*s).validate()?;
    let opts = check_options(tol)?;
    let h = solve_full_causal(s, h0, hdot0, span, &opts)?;
    let (n, alpha, beta) = full_causal_coefficients(s);
    let y0 = h0.powf(1.0 / n);
    let ydot0 = hdot0 / (n * y0.powf(n - 1.0));
    let g = |y: f64| y.powf(n);
    let y = integrate_ivp_with(
        |y, yd| {
            if y > 0.0 {
                -alpha * g(y) * yd - beta * y.powf(2.0 * n + 1.0)
            } else {
                f64::NAN
            }
        },
        y0,
        ydot0,
        span,
        &opts,
    )?;
    let mapped: Vec<f64> = y.state.iter().map(|v| v.powf(n)).collect();
    let dev = compare_prefix(&h.state, &mapped);
    Ok(SubstitutionReport {
        max_relative_deviation: dev,
        tolerance: 10.0 * tol,
        passed: dev < 10.0 * tol && h.len() == y.len(),
        points: h.len().min(y.len()),
        image_coefficients: vec![n, alpha, beta],
        blow_up: h.blow_up.or(y.blow_up),
    })
}

/// Integrates the `G` equation in `t` and the `G = y^(1/K)` image in
/// `τ = -c t`, and compares `G(t)` with `y(τ(t))^(1/K)`.
pub fn bianchi_ansatz_check(
    s: &BianchiI,
    g0: f64,
    gdot0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<SubstitutionReport> {
    CosmoScenario::BianchiI(*s).validate()?;
    let mu = bianchi_mu(s)?;
    let opts = check_options(tol)?;
    let g = solve_bianchi_G(s, g0, gdot0, span, &opts)?;
    let n = 1.0 / s.K;
    let c = s.c_const;
    // Integrate in σ = |c| t so the abscissa increases; dy/dτ = -sign(c) dy/dσ.
    let sc = c.signum();
    let y0 = g0.powf(s.K);
    let ydot_t = s.K * g0.powf(s.K - 1.0) * gdot0;
    let y_tau0 = -ydot_t / c;
    let y = integrate_ivp_with(
        |y, ys| {
            if y > 0.0 {
                let y_tau = -sc * ys;
                -y.powf(-n) * y_tau - mu * y.powf(1.0 - 2.0 * n)
            } else {
                f64::NAN
            }
        },
        y0,
        -sc * y_tau0,
        (c.abs() * span.0, c.abs() * span.1),
        &opts,
    )?;
    let mapped: Vec<f64> = y.state.iter().map(|v| v.powf(n)).collect();
    let dev = compare_prefix(&g.state, &mapped);
    Ok(SubstitutionReport {
        max_relative_deviation: dev,
        tolerance: 10.0 * tol,
        passed: dev < 10.0 * tol && g.len() == y.len(),
        points: g.len().min(y.len()),
        image_coefficients: vec![n, mu],
        blow_up: g.blow_up.or(y.blow_up),
    })
}

/// `φ̇ = m/G - (k/2) Ġ/G`.
pub fn bianchi_phidot(g: f64, gdot: f64, s: &BianchiI) -> f64 {
    s.m / g - 0.5 * s.k * gdot / g
}

/// `ṗ = a/G`.
pub fn bianchi_pdot(g: f64, s: &BianchiI) -> f64 {
    s.a_const / g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BianchiReconstruction {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub phidot: Vec<f64>,
    pub pdot: Vec<f64>,
    pub ef: Vec<f64>,
    pub constraint_residual: Vec<f64>,
    pub max_abs_residual: f64,
}

/// Scalar field, anisotropy rate and metric function along a `G(t)`
/// trajectory, plus the residual of the remaining Einstein constraint.
/// The residual is reported, not enforced.
pub fn bianchi_reconstruct<V>(
    g_traj: &Trajectory,
    s: &BianchiI,
    potential: V,
    phi0: f64,
) -> Result<BianchiReconstruction>
where
    V: Fn(f64) -> f64,
{
    let t = g_traj.independent.clone();
    let mut gdd = Vec::with_capacity(t.len());
    let mut phidot = Vec::with_capacity(t.len());
    let mut phiddot = Vec::with_capacity(t.len());
    let mut pdot = Vec::with_capacity(t.len());
    for (_, g, gd) in g_traj.samples() {
        let a = bianchi_expanded(g, gd, s);
        gdd.push(a);
        phidot.push(bianchi_phidot(g, gd, s));
        phiddot.push(-s.m * gd / (g * g) - 0.5 * s.k * (a / g - gd * gd / (g * g)));
        pdot.push(bianchi_pdot(g, s));
    }
    let phi: Vec<f64> = cumulative_hermite(&t, &phidot, &phiddot)
        .into_iter()
        .map(|v| phi0 + v)
        .collect();
    let mut ef = Vec::with_capacity(t.len());
    for i in 0..t.len() {
        if !(gdd[i] > 0.0) {
            return Err(Error::NonPositiveGddot(gdd[i]));
        }
        let v = potential(phi[i]);
        if !(v > 0.0) {
            return Err(Error::NonPositivePotential(v));
        }
        ef.push(gdd[i] / (2.0 * g_traj.state[i] * v));
    }
    let ln_ef: Vec<f64> = ef.iter().map(|v| v.ln()).collect();
    let fdot = finite_diff(&t, &ln_ef)?;
    let constraint_residual: Vec<f64> = (0..t.len())
        .map(|i| {
            let g = g_traj.state[i];
            let hg = g_traj.derivative[i] / g;
            gdd[i] / g - 0.5 * hg * hg - hg * fdot[i] + 0.5 * pdot[i] * pdot[i] + phidot[i] * phidot[i]
        })
        .collect();
    let max_abs_residual = constraint_residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    Ok(BianchiReconstruction {
        t,
        phi,
        phidot,
        pdot,
        ef,
        constraint_residual,
        max_abs_residual,
    })
}

/// `a(t) = a₀ exp(∫H dt)`, with `ȧ = a H` as derivative.
#[allow(non_snake_case)]
pub fn scale_factor_from_H(h_traj: &Trajectory, a0: f64) -> Result<Trajectory> {
    if !(a0 > 0.0) {
        return Err(Error::InvalidParameters(format!("a0 must be positive, got {a0}")));
    }
    let ln = cumulative_hermite(&h_traj.independent, &h_traj.state, &h_traj.derivative);
    let a: Vec<f64> = ln.iter().map(|l| a0 * l.exp()).collect();
    let adot = a.iter().zip(&h_traj.state).map(|(a, h)| a * h).collect();
    let mut out = Trajectory::new(h_traj.independent.clone(), a, adot, "a(t)")?;
    out.blow_up = h_traj.blow_up;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub max_residual: f64,
    pub points: usize,
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub h: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Builds `a(t)` from `ȧ = a sqrt(H²(a))` (expanding branch), reads `H` off
/// the constraint, differentiates numerically and evaluates the
/// third-order equation along the result.
pub fn constraint_propagation(
    s: &PerfectFluidLambda,
    a0: f64,
    span: (f64, f64),
    points: usize,
) -> Result<ConstraintReport> {
    CosmoScenario::PerfectFluidLambda(*s).validate()?;
    friedmann_00(a0, s)?;
    let opts = IvpOptions::with_tolerances(1e-13, 1e-15).uniform(points);
    let s = *s;
    let sol = integrate_system(
        |y: &[f64; 1]| match friedmann_00(y[0], &s) {
            Ok(h2) => [y[0] * h2.sqrt()],
            Err(_) => [f64::NAN],
        },
        [a0],
        span,
        &opts,
    )?;
    let a = sol.component(0);
    let h = a
        .iter()
        .map(|a| friedmann_00(*a, &s).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    let hd = finite_diff(&sol.t, &h)?;
    let hdd = finite_diff(&sol.t, &hd)?;
    // Nested one-sided stencils at the ends carry O(h) error; keep the
    // samples where both passes are central.
    let n = h.len();
    if n < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: n });
    }
    let inner = 2..n - 2;
    let residual: Vec<f64> = inner
        .clone()
        .map(|i| hdd[i] - perfect_fluid_third_order_rhs(h[i], hd[i], &s))
        .collect();
    Ok(ConstraintReport {
        max_residual: residual.iter().fold(0.0_f64, |m, r| m.max(r.abs())),
        points: residual.len(),
        t: sol.t[inner.clone()].to_vec(),
        a: a[inner.clone()].to_vec(),
        h: h[inner].to_vec(),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularityClass {
    StemsFromSingularity,
    AvoidsInitialSingularity,
    SingularAtX0,
    DivergesAtFiniteTime,
}

/// Classification over the physical range `γ₀ < 0`.
///
/// `c = 0, q = 1` gives a pure exponential, filed as avoiding the
/// singularity.
pub fn singularity_class(q: f64, c: f64, gamma0: f64) -> Result<SingularityClass> {
    if !(gamma0 < 0.0) {
        return Err(Error::UnphysicalGamma0(gamma0));
    }
    Ok(if c > 0.0 {
        SingularityClass::StemsFromSingularity
    } else if c < 0.0 {
        SingularityClass::AvoidsInitialSingularity
    } else if q > 1.0 {
        SingularityClass::SingularAtX0
    } else if q < 1.0 {
        SingularityClass::DivergesAtFiniteTime
    } else {
        SingularityClass::AvoidsInitialSingularity
    })
}

/// Inputs of the information-time/cosmic-time comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSetup {
    pub q: f64,
    #[serde(default)]
    pub gamma0: f64,
    pub f0: f64,
    pub fdot0: f64,
    pub time_scale: f64,
    pub span: (f64, f64),
    pub tol: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    CHECK_POINTS
}

impl EquivalenceSetup {
    pub fn new(q: f64, f0: f64, fdot0: f64, time_scale: f64, span: (f64, f64), tol: f64) -> Self {
        Self {
            q,
            gamma0: 0.0,
            f0,
            fdot0,
            time_scale,
            span,
            tol,
            points: CHECK_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub q: f64,
    pub gamma0: f64,
    pub time_scale: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Max relative deviation of `u(x)` from `s H(s x)`.
    pub u_deviation: f64,
    /// Max relative deviation of `f(x)/f₀` from `a(s x)/a₀`.
    pub f_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
    pub blow_up: Option<f64>,
}

/// Both pipelines on a shared grid: `x` for the density, `t = s x` for the
/// cosmology.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceRun {
    pub report: EquivalenceReport,
    pub f: Trajectory,
    pub u: Vec<f64>,
    pub h: Trajectory,
    pub a: Trajectory,
}

/// Compares the density pipeline with the truncated viscous cosmology at
/// `γ₀ = 0`.
pub fn epi_cosmo_equivalence(
    q: f64,
    f0: f64,
    fdot0: f64,
    time_scale: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<EquivalenceReport> {
    Ok(run_equivalence(&EquivalenceSetup::new(q, f0, fdot0, time_scale, span, tol))?.report)
}

/// Full comparison. `u = f'/f` obeys the same equation for every `γ₀`, so a
/// nonzero `γ₀` is accepted.
pub fn run_equivalence(setup: &EquivalenceSetup) -> Result<EquivalenceRun> {
    let s = setup.time_scale;
    if !(s > 0.0) {
        return Err(Error::InvalidParameters(format!("time_scale must be positive, got {s}")));
    }
    if !(setup.f0 > 0.0) {
        return Err(Error::NonPositiveDensity(setup.f0));
    }
    if !(setup.tol > 0.0) {
        return Err(Error::InvalidTolerance { rel: setup.tol, abs: setup.tol });
    }
    let opts = IvpOptions::with_tolerances(setup.tol * 1e-3, setup.tol * 1e-5).uniform(setup.points);
    let p = EpiParams::new(setup.q, setup.gamma0, 0.0);
    let epi = solve_epi_numeric_with(&p, setup.f0, setup.fdot0, setup.span, &opts)?;
    let f = epi.trajectory;
    let u: Vec<f64> = f.samples().map(|(_, f, d)| d / f).collect();
    let u0 = u[0];
    let udot0 = euler_lagrange_rhs(setup.f0, setup.fdot0, &epi.params)? / setup.f0 - u0 * u0;

    let alpha = 2.0 * setup.q - 1.0;
    let beta = -0.5 * setup.q * (1.0 - setup.q);
    let tv = TruncatedViscous { alpha, beta };
    let h = solve_truncated_viscous(
        &tv,
        u0 / s,
        udot0 / (s * s),
        (s * setup.span.0, s * setup.span.1),
        &opts,
    )?;
    let a = scale_factor_from_H(&h, setup.f0)?;

    let scaled_h: Vec<f64> = h.state.iter().map(|v| s * v).collect();
    let f_rel: Vec<f64> = f.state.iter().map(|v| v / setup.f0).collect();
    let a_rel: Vec<f64> = a.state.iter().map(|v| v / setup.f0).collect();
    let u_deviation = compare_prefix(&u, &scaled_h);
    let f_deviation = compare_prefix(&f_rel, &a_rel);
    let tolerance = 10.0 * setup.tol;
    let complete = f.len() == h.len() && f.blow_up.is_none() && h.blow_up.is_none();
    let report = EquivalenceReport {
        q: setup.q,
        gamma0: setup.gamma0,
        time_scale: s,
        alpha,
        beta,
        u_deviation,
        f_deviation,
        tolerance,
        passed: complete && u_deviation < tolerance && f_deviation < tolerance,
        points: f.len().min(h.len()),
        blow_up: f.blow_up.or(h.blow_up.map(|t| t / s)),
    };
    Ok(EquivalenceRun { report, f, u, h, a })
}
