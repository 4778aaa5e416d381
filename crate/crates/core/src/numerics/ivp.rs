//! Explicit Dormand-Prince 5(4) integration with PI step-size control.
//!
//! Every equation in this crate is autonomous, so right-hand sides take the
//! state only. Second-order scalar equations `y'' = F(y, y')` go through
//! [`integrate_ivp`], which lifts them to a two-dimensional first-order
//! system.

use crate::error::{Error, Result};
use crate::numerics::Trajectory;

/// Default magnitude at which a solution is declared to have blown up.
pub const DEFAULT_CEILING: f64 = 1e12;
/// Steps shorter than this fraction of the span width count as underflow.
pub const STEP_FLOOR_FRACTION: f64 = 1e-14;

/// Where solution samples are recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputGrid {
    /// Every accepted step.
    Steps,
    /// `n` equally spaced points including both span ends. Steps are
    /// shortened so they land on the grid exactly.
    Uniform(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub ceiling: f64,
    pub max_steps: usize,
    pub output: OutputGrid,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            ceiling: DEFAULT_CEILING,
            max_steps: 2_000_000,
            output: OutputGrid::Steps,
        }
    }
}

impl IvpOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    /// Relative tolerance `tol`, absolute tolerance `tol / 100`.
    pub fn from_tol(tol: f64) -> Self {
        Self::with_tolerances(tol, tol * 1e-2)
    }

    pub fn uniform(mut self, points: usize) -> Self {
        self.output = OutputGrid::Uniform(points);
        self
    }

    pub fn ceiling(mut self, ceiling: f64) -> Self {
        self.ceiling = ceiling;
        self
    }
}

/// Samples of an `N`-dimensional first-order system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub blow_up: Option<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize> SystemSolution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.y.iter().map(|y| y[i]).collect()
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller (Hairer, Nørsett & Wanner II.4)
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn error_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    opts: &IvpOptions,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol + opts.rel_tol * y0[i].abs().max(y1[i].abs());
        let r = err[i] / sc;
        sum += r * r;
    }
    (sum / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    y0: &[f64; N],
    f0: &[f64; N],
    width: f64,
    opts: &IvpOptions,
) -> f64
where
    F: FnMut(&[f64; N]) -> [f64; N],
{
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y0[i].abs();
    let norm = |v: &[f64; N]| {
        (v.iter()
            .enumerate()
            .map(|(i, x)| (x / scale(i)).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(width);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs(&y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if !d2.is_finite() {
        h0 * 1e-3
    } else if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(width).max(width * 1e-12)
}

/// Integrates `dy/dt = rhs(y)` from `t0` to `t1 > t0`.
pub fn integrate_system<const N: usize, F>(
    mut rhs: F,
    y0: [f64; N],
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<SystemSolution<N>>
where
    F: FnMut(&[f64; N]) -> [f64; N],
{
    let (t0, t1) = span;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::EmptySpan(t0, t1));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidTolerance {
            rel: opts.rel_tol,
            abs: opts.abs_tol,
        });
    }
    if !all_finite(&y0) {
        return Err(Error::NonFiniteInitialCondition);
    }
    let mut k1 = rhs(&y0);
    if !all_finite(&k1) {
        return Err(Error::NonFiniteInitialCondition);
    }

    let width = t1 - t0;
    let floor = STEP_FLOOR_FRACTION * width;
    let grid: Vec<f64> = match opts.output {
        OutputGrid::Steps => vec![t1],
        OutputGrid::Uniform(n) => {
            let n = n.max(2);
            (1..n)
                .map(|j| {
                    if j == n - 1 {
                        t1
                    } else {
                        t0 + width * j as f64 / (n - 1) as f64
                    }
                })
                .collect()
        }
    };
    let record_every_step = matches!(opts.output, OutputGrid::Steps);

    let mut sol = SystemSolution {
        t: vec![t0],
        y: vec![y0],
        blow_up: None,
        accepted: 0,
        rejected: 0,
    };
    let mut t = t0;
    let mut y = y0;
    let mut h = initial_step(&mut rhs, &y0, &k1, width, opts);
    let mut err_old: f64 = 1e-4;
    let mut next = 0usize;

    while next < grid.len() {
        if sol.accepted + sol.rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let target = grid[next];
        let remaining = target - t;
        // Land exactly on the target when we would otherwise stop just short.
        let hits = h >= remaining * (1.0 - 1e-12);
        let h_try = if hits { remaining } else { h };

        let k2 = rhs(&axpy(&y, h_try, &[(A21, &k1)]));
        let k3 = rhs(&axpy(&y, h_try, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(&axpy(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(&axpy(
            &y,
            h_try,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ));
        let k6 = rhs(&axpy(
            &y,
            h_try,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let y_new = axpy(
            &y,
            h_try,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(&y_new);
        let mut e = [0.0; N];
        for i in 0..N {
            e[i] = h_try
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = if all_finite(&y_new) && all_finite(&k7) {
            error_norm(&e, &y, &y_new, opts)
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            sol.accepted += 1;
            t = if hits { target } else { t + h_try };
            y = y_new;
            k1 = k7;
            let blown = y.iter().any(|v| v.abs() > opts.ceiling);
            if hits {
                next += 1;
            }
            if record_every_step || hits || blown {
                sol.t.push(t);
                sol.y.push(y);
            }
            if blown {
                sol.blow_up = Some(t);
                break;
            }
            let err_c = err.max(1e-10);
            let fac = (SAFETY * err_c.powf(-ALPHA) * err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX);
            let h_new = h_try * fac;
            // A step shortened to reach the grid says little about the
            // natural step; keep the longer proposal.
            h = if hits { h_new.max(h) } else { h_new };
            err_old = err_c;
        } else {
            sol.rejected += 1;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
            } else {
                0.1
            };
            h = h_try * fac;
            if h < floor {
                return Err(Error::StepSizeUnderflow { at: t, step: h });
            }
        }
    }
    Ok(sol)
}

/// Integrates the scalar second-order equation `y'' = rhs(y, y')` with
/// default options apart from the tolerances.
pub fn integrate_ivp<F>(
    rhs: F,
    y0: f64,
    ydot0: f64,
    span: (f64, f64),
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_ivp_with(rhs, y0, ydot0, span, &IvpOptions::with_tolerances(rel_tol, abs_tol))
}

pub fn integrate_ivp_with<F>(
    rhs: F,
    y0: f64,
    ydot0: f64,
    span: (f64, f64),
    opts: &IvpOptions,
) -> Result<Trajectory>
where
    F: Fn(f64, f64) -> f64,
{
    let sol = integrate_system(|s: &[f64; 2]| [s[1], rhs(s[0], s[1])], [y0, ydot0], span, opts)?;
    second_order_trajectory(sol)
}

fn second_order_trajectory(sol: SystemSolution<2>) -> Result<Trajectory> {
    let blow_up = sol.blow_up;
    let state = sol.component(0);
    let derivative = sol.component(1);
    let mut traj = Trajectory::new(sol.t, state, derivative, "")?;
    traj.blow_up = blow_up;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_solution() {
        let tr = integrate_ivp(|_, _| 0.0, 1.0, 0.0, (0.0, 1.0), 1e-8, 1e-10).unwrap();
        assert_eq!(tr.end(), 1.0);
        assert!((tr.state.last().unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn cosine() {
        for rel in [1e-6, 1e-7, 1e-8, 1e-9, 1e-10] {
            let tr = integrate_ivp(|y, _| -y, 1.0, 0.0, (0.0, PI), rel, rel * 1e-2).unwrap();
            let end = *tr.state.last().unwrap();
            assert!((end + 1.0).abs() < 10.0 * rel, "rel={rel} end={end}");
        }
    }

    #[test]
    fn quadratic_nonlinearity_matches_closed_form() {
        // y = 6/(x+1)^2 solves y'' = y^2
        for rel in [1e-6, 1e-8, 1e-10] {
            let tr = integrate_ivp(|y, _| y * y, 6.0, -12.0, (0.0, 0.9), rel, rel * 1e-2).unwrap();
            assert!(!tr.blew_up());
            for (x, y, _) in tr.samples() {
                let exact = 6.0 / (x + 1.0).powi(2);
                assert!((y - exact).abs() <= 10.0 * rel * exact.max(1.0), "x={x}");
            }
        }
    }

    #[test]
    fn detects_blow_up() {
        // y = 6/(1-x)^2 blows up at x = 1
        let tr = integrate_ivp(|y, _| y * y, 6.0, 12.0, (0.0, 2.0), 1e-8, 1e-10).unwrap();
        let at = tr.blow_up.expect("flagged");
        assert!(at < 1.0 && at > 0.99);
        let (y, dy) = (*tr.state.last().unwrap(), *tr.derivative.last().unwrap());
        assert!(y.abs() > DEFAULT_CEILING || dy.abs() > DEFAULT_CEILING);
    }

    #[test]
    fn custom_ceiling() {
        let opts = IvpOptions::default().ceiling(100.0);
        let tr = integrate_ivp_with(|y, _| y * y, 6.0, 12.0, (0.0, 2.0), &opts).unwrap();
        assert!(tr.blew_up());
        assert!(tr.end() < 0.8);
    }

    #[test]
    fn error_paths() {
        assert_eq!(
            integrate_ivp(|_, _| 0.0, 1.0, 0.0, (1.0, 1.0), 1e-8, 1e-8).unwrap_err(),
            Error::EmptySpan(1.0, 1.0)
        );
        assert_eq!(
            integrate_ivp(|_, _| 0.0, f64::NAN, 0.0, (0.0, 1.0), 1e-8, 1e-8).unwrap_err(),
            Error::NonFiniteInitialCondition
        );
        assert!(matches!(
            integrate_ivp(|_, _| 0.0, 1.0, 0.0, (0.0, 1.0), 0.0, 1e-8),
            Err(Error::InvalidTolerance { .. })
        ));
        // rhs undefined past y = 0: y' = -1 reaches it at x = 1
        let r = integrate_ivp(|y, _| if y > 0.0 { 0.0 } else { f64::NAN }, 1.0, -1.0, (0.0, 2.0), 1e-8, 1e-10);
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })));
    }

    #[test]
    fn uniform_grid_lands_exactly() {
        let opts = IvpOptions::with_tolerances(1e-9, 1e-11).uniform(11);
        let tr = integrate_ivp_with(|y, _| -y, 0.0, 1.0, (0.0, 1.0), &opts).unwrap();
        assert_eq!(tr.len(), 11);
        for (i, (x, y, _)) in tr.samples().enumerate() {
            assert!((x - i as f64 / 10.0).abs() < 1e-15);
            assert!((y - x.sin()).abs() < 1e-8);
        }
    }
}
