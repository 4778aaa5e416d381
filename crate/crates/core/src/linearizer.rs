//! Nonlocal linearization of the Euler-Lagrange equation.
//!
//! The chain is
//!
//! ```text
//! f(x) --u = f'/f--> u'' + α u u' + β u³ = 0           (α = 2q-1, β = -q(1-q)/2)
//!      --z = u²/2, dη = α u dx--> z'' + z' + β' z = 0   (β' = 2β/α²)
//! ```
//!
//! and the linear image is solved by `z = A₁ e^(λ⁺η) + A₂ e^(λ⁻η)` with
//! `λ± = -1/2 ± 1/(2|α|)`. Going back, `d(ln f)/dη = 1/α`, so
//! `f = f₀ e^(η/α)` once `η(x)` is recovered from `dη/dx = α u(η)`.
//!
//! Both `η₀` and the scale of `f` are gauge choices: each segment sets
//! `η = 0` at its first abscissa and reconstruction takes `f(x_start)` from
//! the caller.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cumulative_hermite, finite_diff, integrate_ivp_with, integrate_system, quadrature_with,
    IvpOptions, Trajectory, MAX_INTERVALS,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
    pub beta_prime: f64,
}

impl AlphaBeta {
    /// Arbitrary coefficients, not necessarily derived from a common `q`.
    pub fn general(alpha: f64, beta: f64) -> Result<Self> {
        if alpha == 0.0 {
            return Err(Error::AlphaZero);
        }
        Ok(Self {
            alpha,
            beta,
            beta_prime: 2.0 * beta / (alpha * alpha),
        })
    }

    /// Whether `1 - 4β' = 1/α²`, which holds for every `q`-derived pair.
    pub fn is_q_consistent(&self) -> bool {
        let lhs = 1.0 - 4.0 * self.beta_prime;
        let rhs = 1.0 / (self.alpha * self.alpha);
        (lhs - rhs).abs() <= 1e-12 * rhs.max(1.0)
    }
}

/// `α = 2q - 1`, `β = -q(1 - q)/2`, `β' = 2β/α²`.
pub fn alpha_beta_of_q(q: f64) -> Result<AlphaBeta> {
    AlphaBeta::general(2.0 * q - 1.0, -0.5 * q * (1.0 - q))
}

/// True iff `β/α² = 1/9`, the case where the inverse map is known in
/// closed form.
pub fn check_special_q(q: f64) -> Result<bool> {
    let ab = alpha_beta_of_q(q)?;
    Ok((ab.beta / (ab.alpha * ab.alpha) - 1.0 / 9.0).abs() < 1e-12)
}

/// Exact version of [`check_special_q`] in rational arithmetic; `None` at
/// `q = 1/2`.
pub fn check_special_q_exact(q: Rational64) -> Option<bool> {
    let one = Rational64::from_integer(1);
    let two = Rational64::from_integer(2);
    let alpha = two * q - one;
    if alpha == Rational64::from_integer(0) {
        return None;
    }
    let beta = -(q * (one - q)) / two;
    Some(alpha * alpha == Rational64::from_integer(9) * beta)
}

/// `u'' = -α u u' - β u³`.
pub fn riccati_rhs(u: f64, udot: f64, ab: &AlphaBeta) -> f64 {
    -ab.alpha * u * udot - ab.beta * u * u * u
}

/// Integrates the Painlevé-Ince-type equation for `u`.
pub fn solve_riccati(
    ab: &AlphaBeta,
    u0: f64,
    udot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory> {
    let ab = *ab;
    Ok(integrate_ivp_with(|u, ud| riccati_rhs(u, ud, &ab), u0, udot0, span, opts)?.with_label("u(x)"))
}

fn check_positive(f_traj: &Trajectory) -> Result<()> {
    match f_traj.state.iter().find(|f| !(**f > 0.0)) {
        Some(&f) => Err(Error::NonPositiveDensity(f)),
        None => Ok(()),
    }
}

/// `u = f'/f`, with `u'` from finite differences of `u`.
pub fn log_derivative(f_traj: &Trajectory) -> Result<Trajectory> {
    check_positive(f_traj)?;
    let u: Vec<f64> = f_traj
        .state
        .iter()
        .zip(&f_traj.derivative)
        .map(|(f, d)| d / f)
        .collect();
    let udot = finite_diff(&f_traj.independent, &u)?;
    let mut out = Trajectory::new(f_traj.independent.clone(), u, udot, "u(x)")?;
    out.blow_up = f_traj.blow_up;
    Ok(out)
}

/// `u = f'/f` with `u' = f''/f - u²`, taking `f''` from the equation of
/// motion.
pub fn log_derivative_with<F>(f_traj: &Trajectory, fddot: F) -> Result<Trajectory>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_positive(f_traj)?;
    let mut u = Vec::with_capacity(f_traj.len());
    let mut udot = Vec::with_capacity(f_traj.len());
    for (_, f, d) in f_traj.samples() {
        let ui = d / f;
        u.push(ui);
        udot.push(fddot(f, d)? / f - ui * ui);
    }
    let mut out = Trajectory::new(f_traj.independent.clone(), u, udot, "u(x)")?;
    out.blow_up = f_traj.blow_up;
    Ok(out)
}

/// One sign-definite stretch of `u` mapped to the linear variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedSegment {
    /// `z(η)` with `dz/dη` as derivative; `η` increases along the samples.
    pub z: Trajectory,
    /// Abscissa where `η = 0`.
    pub x_start: f64,
    pub x_end: f64,
    /// Index range `[first, last]` into the source trajectory.
    pub first_index: usize,
    pub last_index: usize,
    /// True when `α u < 0`, so the samples were reversed to make `η`
    /// increasing.
    pub eta_reversed: bool,
    /// Sign of `u` on the segment.
    pub u_sign: f64,
}

/// Maps `u(x)` to `z(η)`, splitting at zero crossings of `u`.
///
/// Segments shorter than three samples are dropped.
pub fn nonlocal_map(u_traj: &Trajectory, ab: &AlphaBeta) -> Result<Vec<MappedSegment>> {
    let n = u_traj.len();
    let mut segments = Vec::new();
    let mut start = 0;
    while start < n {
        if u_traj.state[start] == 0.0 {
            start += 1;
            continue;
        }
        let sign = u_traj.state[start].signum();
        let mut end = start;
        while end + 1 < n && u_traj.state[end + 1].signum() == sign && u_traj.state[end + 1] != 0.0 {
            end += 1;
        }
        if end - start + 1 >= 3 {
            segments.push(map_segment(u_traj, ab, start, end, sign)?);
        }
        start = end + 1;
    }
    Ok(segments)
}

/// As [`nonlocal_map`], but rejects trajectories on which `u` changes sign.
pub fn nonlocal_map_single(u_traj: &Trajectory, ab: &AlphaBeta) -> Result<MappedSegment> {
    let sign = u_traj.state[0].signum();
    if let Some(i) = u_traj
        .state
        .iter()
        .position(|u| u.signum() != sign || *u == 0.0)
    {
        return Err(Error::SignChange(i));
    }
    map_segment(u_traj, ab, 0, u_traj.len() - 1, sign)
}

fn map_segment(
    u_traj: &Trajectory,
    ab: &AlphaBeta,
    first: usize,
    last: usize,
    sign: f64,
) -> Result<MappedSegment> {
    let xs = &u_traj.independent[first..=last];
    let us = &u_traj.state[first..=last];
    let uds = &u_traj.derivative[first..=last];
    let rate: Vec<f64> = us.iter().map(|u| ab.alpha * u).collect();
    let rate_dot: Vec<f64> = uds.iter().map(|ud| ab.alpha * ud).collect();
    let eta = cumulative_hermite(xs, &rate, &rate_dot);
    let z: Vec<f64> = us.iter().map(|u| 0.5 * u * u).collect();
    let dz: Vec<f64> = uds.iter().map(|ud| ud / ab.alpha).collect();
    let reversed = ab.alpha * sign < 0.0;
    let mut traj = if reversed {
        let mut t = Trajectory {
            independent: eta,
            state: z,
            derivative: dz,
            label: String::new(),
            blow_up: None,
        };
        t.reverse_samples();
        Trajectory::new(t.independent, t.state, t.derivative, "z(eta)")?
    } else {
        Trajectory::new(eta, z, dz, "z(eta)")?
    };
    traj.blow_up = None;
    Ok(MappedSegment {
        z: traj,
        x_start: xs[0],
        x_end: xs[xs.len() - 1],
        first_index: first,
        last_index: last,
        eta_reversed: reversed,
        u_sign: sign,
    })
}

/// Pointwise residual of `z'' + z' + β' z = 0`, with `z''` from finite
/// differences of the stored `dz/dη`.
pub fn linear_residual(z: &Trajectory, ab: &AlphaBeta) -> Result<Vec<f64>> {
    let zdd = finite_diff(&z.independent, &z.derivative)?;
    Ok(zdd
        .iter()
        .zip(&z.derivative)
        .zip(&z.state)
        .map(|((a, b), c)| a + b + ab.beta_prime * c)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalSolution {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    /// Roots came from `-1/2 ± 1/(2|α|)`; false when the general quadratic
    /// formula had to be used.
    pub closed_form_roots: bool,
}

impl ModalSolution {
    pub fn z(&self, eta: f64) -> f64 {
        self.a1 * (self.lambda_plus * eta).exp() + self.a2 * (self.lambda_minus * eta).exp()
    }

    pub fn dz(&self, eta: f64) -> f64 {
        self.a1 * self.lambda_plus * (self.lambda_plus * eta).exp()
            + self.a2 * self.lambda_minus * (self.lambda_minus * eta).exp()
    }
}

/// Roots of `λ² + λ + β' = 0`, amplitudes zero.
pub fn linear_modes(ab: &AlphaBeta) -> Result<ModalSolution> {
    if ab.alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    let (lambda_plus, lambda_minus, closed) = if ab.is_q_consistent() {
        let r = 0.5 / ab.alpha.abs();
        (-0.5 + r, -0.5 - r, true)
    } else {
        let disc = 1.0 - 4.0 * ab.beta_prime;
        if disc < 0.0 {
            return Err(Error::ComplexRoots(disc));
        }
        let r = 0.5 * disc.sqrt();
        (-0.5 + r, -0.5 - r, false)
    };
    Ok(ModalSolution {
        lambda_plus,
        lambda_minus,
        a1: 0.0,
        a2: 0.0,
        closed_form_roots: closed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFit {
    pub modal: ModalSolution,
    pub max_relative_deviation: f64,
}

/// Least-squares amplitudes of the two exponential modes.
///
/// When `z` is strictly positive the fit minimizes relative error; otherwise
/// plain residuals. Solved by twice-orthogonalized Gram-Schmidt.
pub fn fit_amplitudes(z_traj: &Trajectory, modes: &ModalSolution) -> Result<AmplitudeFit> {
    if z_traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: z_traj.len(),
        });
    }
    if (modes.lambda_plus - modes.lambda_minus).abs() < 1e-14 {
        return Err(Error::DegenerateModes);
    }
    let relative = z_traj.state.iter().all(|z| *z > 0.0);
    let weight = |z: f64| if relative { 1.0 / z } else { 1.0 };
    let mut c1 = Vec::with_capacity(z_traj.len());
    let mut c2 = Vec::with_capacity(z_traj.len());
    let mut y = Vec::with_capacity(z_traj.len());
    for (eta, z, _) in z_traj.samples() {
        let w = weight(z);
        c1.push(w * (modes.lambda_plus * eta).exp());
        c2.push(w * (modes.lambda_minus * eta).exp());
        y.push(w * z);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let r11 = dot(&c1, &c1).sqrt();
    let q1: Vec<f64> = c1.iter().map(|v| v / r11).collect();
    let mut v = c2.clone();
    let mut r12 = 0.0;
    for _ in 0..2 {
        let proj = dot(&q1, &v);
        r12 += proj;
        for (vi, qi) in v.iter_mut().zip(&q1) {
            *vi -= proj * qi;
        }
    }
    let r22 = dot(&v, &v).sqrt();
    if !(r22 > 1e-14 * r11) {
        return Err(Error::DegenerateModes);
    }
    let q2: Vec<f64> = v.iter().map(|x| x / r22).collect();
    let a2 = dot(&q2, &y) / r22;
    let a1 = (dot(&q1, &y) - r12 * a2) / r11;
    let modal = ModalSolution { a1, a2, ..*modes };
    let max_relative_deviation = z_traj
        .samples()
        .map(|(eta, z, _)| {
            let m = modal.z(eta);
            let scale = z.abs().max(m.abs());
            if scale == 0.0 {
                0.0
            } else {
                (m - z).abs() / scale
            }
        })
        .fold(0.0, f64::max);
    Ok(AmplitudeFit {
        modal,
        max_relative_deviation,
    })
}

/// The `η` where `z` vanishes, if any. Two exponentials cross zero at most
/// once.
fn modal_root(modal: &ModalSolution) -> Option<f64> {
    if modal.a1 == 0.0 || modal.a2 == 0.0 {
        return None;
    }
    let ratio = -modal.a2 / modal.a1;
    (ratio > 0.0).then(|| ratio.ln() / (modal.lambda_plus - modal.lambda_minus))
}

/// Rebuilds `f(x)` on `x_span` from a modal solution.
///
/// `η(x_span.0) = 0` and `f(x_span.0) = f0`; `η(x)` follows from
/// `dη/dx = α u_sign sqrt(2 z(η))` and `f = f0 e^(η/α)`.
pub fn reconstruct_f(
    modal: &ModalSolution,
    ab: &AlphaBeta,
    f0: f64,
    u_sign: f64,
    x_span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory> {
    if !(f0 > 0.0) {
        return Err(Error::NonPositiveDensity(f0));
    }
    if modal.z(0.0) <= 0.0 {
        return Err(Error::ZeroCrossing);
    }
    let sign = if u_sign < 0.0 { -1.0 } else { 1.0 };
    let direction = ab.alpha * sign;
    if let Some(root) = modal_root(modal) {
        if root * direction > 0.0 {
            // x at which η reaches the root, with η = root ∓ s² removing the
            // inverse square-root singularity
            let side = root.signum();
            let reach = quadrature_with(
                |s| {
                    let z = modal.z(root - side * s * s).abs();
                    2.0 * s / (ab.alpha.abs() * (2.0 * z).sqrt())
                },
                0.0,
                root.abs().sqrt(),
                1e-10,
                MAX_INTERVALS,
            )
            .map(|r| r.value.abs())
            .unwrap_or(f64::INFINITY);
            if reach <= (x_span.1 - x_span.0).abs() {
                return Err(Error::ZeroCrossing);
            }
        }
    }
    let rhs = |s: &[f64; 1]| {
        let z = modal.z(s[0]);
        if z > 0.0 {
            [ab.alpha * sign * (2.0 * z).sqrt()]
        } else {
            [f64::NAN]
        }
    };
    let sol = integrate_system(rhs, [0.0], x_span, opts)?;
    let mut fs = Vec::with_capacity(sol.t.len());
    let mut ds = Vec::with_capacity(sol.t.len());
    for y in &sol.y {
        let eta = y[0];
        let f = f0 * (eta / ab.alpha).exp();
        let u = sign * (2.0 * modal.z(eta).max(0.0)).sqrt();
        fs.push(f);
        ds.push(f * u);
    }
    let mut traj = Trajectory::new(sol.t, fs, ds, "f(x) reconstructed")?;
    traj.blow_up = sol.blow_up;
    Ok(traj)
}

/// Per-segment summary for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub x_start: f64,
    pub x_end: f64,
    pub eta_reversed: bool,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub fit_deviation: f64,
    pub max_residual: f64,
}

/// Serializable summary of a full linearization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizationReport {
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_prime: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub max_residual: f64,
    pub segments: Vec<SegmentReport>,
}

/// Maps `u(x)` for index `q`, fits every segment and collects residuals.
pub fn linearize(q: f64, u_traj: &Trajectory) -> Result<(LinearizationReport, Vec<MappedSegment>)> {
    let ab = alpha_beta_of_q(q)?;
    let modes = linear_modes(&ab)?;
    let mapped = nonlocal_map(u_traj, &ab)?;
    let mut segments = Vec::with_capacity(mapped.len());
    for seg in &mapped {
        let fit = fit_amplitudes(&seg.z, &modes)?;
        let res = linear_residual(&seg.z, &ab)?;
        segments.push(SegmentReport {
            x_start: seg.x_start,
            x_end: seg.x_end,
            eta_reversed: seg.eta_reversed,
            a1: fit.modal.a1,
            a2: fit.modal.a2,
            fit_deviation: fit.max_relative_deviation,
            max_residual: res.iter().fold(0.0_f64, |m, r| m.max(r.abs())),
        });
    }
    let (a1, a2) = segments.first().map_or((0.0, 0.0), |s| (s.a1, s.a2));
    let max_residual = segments.iter().fold(0.0_f64, |m, s| m.max(s.max_residual));
    Ok((
        LinearizationReport {
            q,
            alpha: ab.alpha,
            beta: ab.beta,
            beta_prime: ab.beta_prime,
            lambda_plus: modes.lambda_plus,
            lambda_minus: modes.lambda_minus,
            a1,
            a2,
            max_residual,
            segments,
        },
        mapped,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn alpha_beta_examples() {
        let ab = alpha_beta_of_q(2.0).unwrap();
        assert_eq!((ab.alpha, ab.beta), (3.0, 1.0));
        assert!((ab.beta_prime - 2.0 / 9.0).abs() < 1e-16);
        let ab = alpha_beta_of_q(-1.0).unwrap();
        assert_eq!((ab.alpha, ab.beta), (-3.0, 1.0));
        assert!((ab.beta_prime - 2.0 / 9.0).abs() < 1e-16);
        let ab = alpha_beta_of_q(1.0).unwrap();
        assert_eq!((ab.alpha, ab.beta, ab.beta_prime), (1.0, 0.0, 0.0));
        assert_eq!(alpha_beta_of_q(0.5).unwrap_err(), Error::AlphaZero);
    }

    #[test]
    fn special_q() {
        assert!(check_special_q(2.0).unwrap());
        assert!(check_special_q(-1.0).unwrap());
        assert!(!check_special_q(1.5).unwrap());
        let ab = alpha_beta_of_q(1.5).unwrap();
        assert!((ab.beta / ab.alpha.powi(2) - 3.0 / 32.0).abs() < 1e-16);
        assert_eq!(check_special_q(0.5).unwrap_err(), Error::AlphaZero);
        assert_eq!(check_special_q_exact(Rational64::new(1, 2)), None);
        assert_eq!(check_special_q_exact(Rational64::new(3, 2)), Some(false));
    }

    #[test]
    fn riccati_examples() {
        let ab = alpha_beta_of_q(2.0).unwrap();
        assert_eq!(riccati_rhs(0.0, 7.0, &ab), 0.0);
        assert_eq!(riccati_rhs(1.0, 0.0, &ab), -1.0);
    }

    #[test]
    fn log_derivative_examples() {
        let xs = grid(0.5, 2.0, 301);
        let exp = Trajectory::new(xs.clone(), xs.iter().map(|x| x.exp()).collect(), xs.iter().map(|x| x.exp()).collect(), "f").unwrap();
        let u = log_derivative(&exp).unwrap();
        assert!(u.state.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!(u.derivative.iter().all(|v| v.abs() < 1e-10));

        let lin = Trajectory::new(xs.clone(), xs.clone(), vec![1.0; xs.len()], "f").unwrap();
        let u = log_derivative(&lin).unwrap();
        for (x, v, _) in u.samples() {
            assert!((v - 1.0 / x).abs() < 1e-15);
        }
        let flat = Trajectory::new(xs.clone(), vec![2.0; xs.len()], vec![0.0; xs.len()], "f").unwrap();
        assert!(log_derivative(&flat).unwrap().state.iter().all(|v| *v == 0.0));

        let bad = Trajectory::new(xs.clone(), vec![0.0; xs.len()], vec![0.0; xs.len()], "f").unwrap();
        assert!(matches!(log_derivative(&bad), Err(Error::NonPositiveDensity(_))));
    }

    #[test]
    fn constant_u_maps_to_constant_z() {
        let ab = alpha_beta_of_q(2.0).unwrap();
        let xs = grid(0.0, 1.0, 11);
        let u = Trajectory::new(xs.clone(), vec![1.0; 11], vec![0.0; 11], "u").unwrap();
        let seg = nonlocal_map_single(&u, &ab).unwrap();
        for ((eta, z, _), x) in seg.z.samples().zip(&xs) {
            assert_eq!(z, 0.5);
            assert!((eta - 3.0 * x).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_x_is_a_pure_minus_mode() {
        let ab = alpha_beta_of_q(2.0).unwrap();
        let xs = grid(1.0, 3.0, 2001);
        let u = Trajectory::new(
            xs.clone(),
            xs.iter().map(|x| 1.0 / x).collect(),
            xs.iter().map(|x| -1.0 / (x * x)).collect(),
            "u",
        )
        .unwrap();
        let seg = nonlocal_map_single(&u, &ab).unwrap();
        for (eta, z, _) in seg.z.samples() {
            assert!((z - 0.5 * (-2.0 * eta / 3.0).exp()).abs() < 1e-12);
        }
        let modes = linear_modes(&ab).unwrap();
        assert!((modes.lambda_minus + 2.0 / 3.0).abs() < 1e-15);
        let fit = fit_amplitudes(&seg.z, &modes).unwrap();
        assert!(fit.modal.a1.abs() < 1e-9);
        assert!((fit.modal.a2 - 0.5).abs() < 1e-9);
        assert!(fit.max_relative_deviation < 1e-6);

        let opts = IvpOptions::with_tolerances(1e-11, 1e-13).uniform(201);
        let f = reconstruct_f(&fit.modal, &ab, 1.0, 1.0, (1.0, 3.0), &opts).unwrap();
        for (x, fv, _) in f.samples() {
            assert!((fv - x).abs() < 1e-5 * x);
        }
    }

    #[test]
    fn modes_examples() {
        for q in [2.0, -1.0] {
            let m = linear_modes(&alpha_beta_of_q(q).unwrap()).unwrap();
            assert!((m.lambda_plus + 1.0 / 3.0).abs() < 1e-15);
            assert!((m.lambda_minus + 2.0 / 3.0).abs() < 1e-15);
            assert!(m.closed_form_roots);
        }
        let m = linear_modes(&alpha_beta_of_q(1.0).unwrap()).unwrap();
        assert_eq!((m.lambda_plus, m.lambda_minus), (0.0, -1.0));
        // not q-consistent: general roots, flagged
        let m = linear_modes(&AlphaBeta::general(2.0, 0.25).unwrap()).unwrap();
        assert!(!m.closed_form_roots);
        for l in [m.lambda_plus, m.lambda_minus] {
            assert!((l * l + l + 0.125).abs() < 1e-14);
        }
        assert!(matches!(
            linear_modes(&AlphaBeta::general(1.0, 1.0).unwrap()),
            Err(Error::ComplexRoots(_))
        ));
    }

    #[test]
    fn zero_z_fits_zero_amplitudes() {
        let modes = linear_modes(&alpha_beta_of_q(2.0).unwrap()).unwrap();
        let z = Trajectory::new(grid(0.0, 1.0, 10), vec![0.0; 10], vec![0.0; 10], "z").unwrap();
        let fit = fit_amplitudes(&z, &modes).unwrap();
        assert_eq!((fit.modal.a1, fit.modal.a2), (0.0, 0.0));
        let degenerate = ModalSolution {
            lambda_minus: modes.lambda_plus,
            ..modes
        };
        assert_eq!(fit_amplitudes(&z, &degenerate).unwrap_err(), Error::DegenerateModes);
    }

    #[test]
    fn sign_change_splits() {
        let ab = alpha_beta_of_q(2.0).unwrap();
        let xs = grid(-1.0, 1.0, 41);
        let u = Trajectory::new(xs.clone(), xs.iter().map(|x| x + 0.025).collect(), vec![1.0; 41], "u").unwrap();
        assert!(matches!(nonlocal_map_single(&u, &ab), Err(Error::SignChange(_))));
        let segs = nonlocal_map(&u, &ab).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs[0].eta_reversed && !segs[1].eta_reversed);
        for s in &segs {
            assert!(s.z.state.iter().all(|z| *z >= 0.0));
        }
    }

    #[test]
    fn exponential_seed_is_a_fixed_point() {
        // f = e^x: u = 1, z = 1/2 constant; with q = 1 beta' = 0 and lambda+ = 0
        let ab = alpha_beta_of_q(1.0).unwrap();
        let modes = linear_modes(&ab).unwrap();
        let xs = grid(0.0, 2.0, 101);
        let u = Trajectory::new(xs, vec![1.0; 101], vec![0.0; 101], "u").unwrap();
        let seg = nonlocal_map_single(&u, &ab).unwrap();
        let fit = fit_amplitudes(&seg.z, &modes).unwrap();
        let opts = IvpOptions::with_tolerances(1e-12, 1e-14).uniform(101);
        let f = reconstruct_f(&fit.modal, &ab, 1.0, 1.0, (0.0, 2.0), &opts).unwrap();
        for (x, fv, _) in f.samples() {
            assert!((fv - x.exp()).abs() < 1e-6 * x.exp());
        }
    }

    #[test]
    fn reconstruct_stops_at_zero_crossing() {
        let ab = alpha_beta_of_q(2.0).unwrap();
        // z = e^{-2 eta/3} - 0.5 e^{-eta/3} vanishes at eta = 3 ln 2
        let modal = ModalSolution {
            a1: -0.5,
            a2: 1.0,
            ..linear_modes(&ab).unwrap()
        };
        let opts = IvpOptions::with_tolerances(1e-10, 1e-12);
        let r = reconstruct_f(&modal, &ab, 1.0, 1.0, (0.0, 50.0), &opts);
        assert_eq!(r.unwrap_err(), Error::ZeroCrossing);
    }
}
