use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::output::OutputDir;
use super::scenario::{require, Scenario};
use super::{CliError, Context, Outcome};
use crate::cosmo::{
    bianchi_ansatz_check, bianchi_reconstruct, constraint_propagation, friedmann_00,
    full_causal_substitution_check, run_equivalence, scale_factor_from_H, singularity_class,
    solve_bianchi_G, solve_full_causal, solve_perfect_fluid, solve_truncated_viscous,
    CosmoScenario, EquivalenceSetup,
};
use crate::epi::{
    classify_regime, closed_form_c0_jet, default_f_ref, euler_lagrange_rhs, invert_implicit,
    maximum_diagnostics, solve_epi_numeric_with, EpiParams, RegimeClass,
};
use crate::info::{
    cramer_rao_experiment, estimators, fisher_information, fisher_information_q_report,
    shannon_entropy, tsallis_entropy, EstimationExperiment, GaussianFamily, GridDensity,
};
use crate::linearizer::{
    alpha_beta_of_q, linear_modes, linearize, log_derivative_with, reconstruct_f, solve_riccati,
    ModalSolution,
};
use crate::numerics::{max_relative_deviation, IvpOptions, Trajectory};

fn solver_options(ctx: &Context, points: usize) -> IvpOptions {
    IvpOptions::with_tolerances(ctx.tol * 1e-2, ctx.tol * 1e-4).uniform(points)
}

fn blow_up_failure(traj: &Trajectory, span_end: f64) -> Option<String> {
    traj.blow_up
        .map(|t| format!("solution blew up at {t} before span end {span_end}"))
}

fn write_trajectory(
    out: &mut OutputDir,
    stem: &str,
    names: [&str; 3],
    traj: &Trajectory,
) -> Result<(), CliError> {
    let cols: [&[f64]; 3] = [&traj.independent, &traj.state, &traj.derivative];
    out.csv(&format!("{stem}.csv"), &names, &cols)?;
    out.dat(&format!("{stem}.dat"), &names, &cols)
}

/// Summary of one density solve, shared with the sweep aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub(crate) struct EpiSummary {
    pub params: EpiParams,
    pub regime: RegimeClass,
    pub c_drift: Option<f64>,
    pub status: String,
}

/// Initial data consistent with `(q, γ₀, c)` at the start of the span.
fn auto_initial(p: &EpiParams, f0_hint: Option<f64>) -> Option<(f64, f64)> {
    let f0 = f0_hint.unwrap_or(match classify_regime(p.c, p.gamma0) {
        RegimeClass::BoundedWithMaximum => (0.5 * p.c / p.gamma0).min(1.0),
        RegimeClass::UnboundedPositiveLowerLimit => (2.0 * p.c / p.gamma0).max(1.0),
        _ => 1.0,
    });
    let num = p.c - p.gamma0 * f0;
    if !(f0 > 0.0) || num < 0.0 {
        return None;
    }
    Some((f0, p.branch.sign() * (num / f0.powf(p.q - 2.0)).sqrt()))
}

fn grid(span: (f64, f64), points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| span.0 + (span.1 - span.0) * i as f64 / (points - 1) as f64)
        .collect()
}

fn reference_solution(p: &EpiParams, xs: &[f64]) -> Option<(&'static str, Trajectory)> {
    if p.c == 0.0 {
        let mut fs = Vec::with_capacity(xs.len());
        let mut ds = Vec::with_capacity(xs.len());
        for &x in xs {
            let (f, d, _) = closed_form_c0_jet(p, x).ok()?;
            if !(f.is_finite() && d.is_finite() && f > 0.0) {
                return None;
            }
            fs.push(f);
            ds.push(d);
        }
        Trajectory::new(xs.to_vec(), fs, ds, "f(x) closed form")
            .ok()
            .map(|t| ("closed_form_c0", t))
    } else if classify_regime(p.c, p.gamma0) != RegimeClass::RejectedNegativeDensity {
        invert_implicit(p, xs, default_f_ref(p))
            .ok()
            .filter(|t| t.state.iter().all(|f| *f > 0.0))
            .map(|t| ("implicit", t))
    } else {
        None
    }
}

pub(crate) fn run_epi(
    scn: &Scenario,
    ctx: &Context,
    out: &mut OutputDir,
    with_reference: bool,
) -> Result<(Outcome, EpiSummary), CliError> {
    let p: EpiParams = scn.params()?;
    if !p.q.is_finite() || !p.gamma0.is_finite() || !p.c.is_finite() {
        return Err(CliError::Input("q, gamma0 and c must be finite".into()));
    }
    let span = scn.span()?;
    let points = scn.points()?;
    let xs = grid(span, points);

    let explicit = matches!((scn.initial.f0, scn.initial.fdot0), (Some(_), Some(_)));
    let reference = if with_reference && !explicit {
        reference_solution(&p, &xs)
    } else {
        None
    };
    let initial = match (scn.initial.f0, scn.initial.fdot0, &reference) {
        (Some(f0), Some(fd0), _) => Some((f0, fd0)),
        (_, _, Some((_, r))) => Some((r.state[0], r.derivative[0])),
        (hint, _, None) => auto_initial(&p, hint),
    };
    let regime_of_params = classify_regime(p.c, p.gamma0);
    let Some((f0, fdot0)) = initial else {
        let summary = EpiSummary {
            params: p,
            regime: regime_of_params,
            c_drift: None,
            status: "rejected".into(),
        };
        let results = json!({
            "q": p.q, "gamma0": p.gamma0, "c": p.c,
            "regime": regime_of_params,
            "physical": regime_of_params.is_physical(),
            "note": "no real positive initial data for this (c, gamma0)",
        });
        return Ok((Outcome { results, failure: None }, summary));
    };

    let sol = solve_epi_numeric_with(&p, f0, fdot0, span, &solver_options(ctx, points))?;
    // Keep the declared c for classification unless the data defined it.
    let regime = if explicit { sol.regime } else { regime_of_params };
    let c = if explicit { sol.c } else { p.c };
    let c_drift = sol.max_drift / sol.c.abs().max(1.0);
    write_trajectory(out, "f", ["x", "f", "fdot"], &sol.trajectory)?;

    let mut reference_dev = None;
    if let Some((kind, r)) = &reference {
        let n = sol.trajectory.len();
        let dev = max_relative_deviation(&sol.trajectory.state, &r.state[..n]);
        reference_dev = Some(json!({ "kind": kind, "max_relative_deviation": dev }));
        out.csv(
            "f_reference.csv",
            &["x", "f_numeric", "f_reference"],
            &[&sol.trajectory.independent, &sol.trajectory.state, &r.state[..n]],
        )?;
    }
    let singularity = singularity_class(p.q, c, p.gamma0).ok();
    let maximum = if regime == RegimeClass::BoundedWithMaximum {
        maximum_diagnostics(&EpiParams { c, ..p }).ok()
    } else {
        None
    };
    let mut failure = blow_up_failure(&sol.trajectory, span.1);
    if failure.is_none() && !sol.conserves() {
        failure = Some(format!("first integral drifted by {c_drift:e}"));
    }
    let results = json!({
        "q": p.q, "gamma0": p.gamma0, "c": c, "x0": p.x0, "branch": p.branch,
        "regime": regime,
        "physical": regime.is_physical(),
        "initial": { "f0": f0, "fdot0": fdot0 },
        "c_drift": c_drift,
        "conserves": sol.conserves(),
        "blow_up": sol.trajectory.blow_up,
        "reference": reference_dev,
        "singularity_class": singularity,
        "maximum": maximum,
    });
    let status = match &failure {
        Some(_) if sol.trajectory.blow_up.is_some() => "blow_up",
        Some(_) => "drift",
        None => "ok",
    };
    let summary = EpiSummary {
        params: EpiParams { c, ..p },
        regime,
        c_drift: Some(c_drift),
        status: status.into(),
    };
    Ok((Outcome { results, failure }, summary))
}

#[derive(Debug, Deserialize)]
struct LinearizeParams {
    q: f64,
    #[serde(default)]
    gamma0: f64,
}

pub(crate) fn run_linearize(scn: &Scenario, ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let lp: LinearizeParams = scn.params()?;
    let span = scn.span()?;
    let points = scn.points()?;
    let opts = solver_options(ctx, points);
    let ab = alpha_beta_of_q(lp.q)?;

    let (u, f) = match (scn.initial.f0, scn.initial.fdot0, scn.initial.u0) {
        (Some(f0), Some(fd0), _) => {
            let sol = solve_epi_numeric_with(&EpiParams::new(lp.q, lp.gamma0, 0.0), f0, fd0, span, &opts)?;
            let params = sol.params;
            let u = log_derivative_with(&sol.trajectory, |f, d| euler_lagrange_rhs(f, d, &params))?;
            (u, Some(sol.trajectory))
        }
        (_, _, Some(u0)) => {
            let udot0 = require(scn.initial.udot0, "udot0")?;
            (solve_riccati(&ab, u0, udot0, span, &opts)?, None)
        }
        _ => {
            return Err(CliError::Input(
                "linearize needs initial {f0, fdot0} or {u0, udot0}".into(),
            ))
        }
    };
    write_trajectory(out, "u", ["x", "u", "udot"], &u)?;
    let (report, segments) = linearize(lp.q, &u)?;
    let modes = linear_modes(&ab)?;

    let mut round_trips = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let cols: [&[f64]; 3] = [&seg.z.independent, &seg.z.state, &seg.z.derivative];
        out.csv(&format!("z_segment_{i}.csv"), &["eta", "z", "dz_deta"], &cols)?;
        let Some(f) = &f else { continue };
        let count = seg.last_index - seg.first_index + 1;
        let f_start = f.state[seg.first_index];
        let modal = ModalSolution {
            a1: report.segments[i].a1,
            a2: report.segments[i].a2,
            ..modes
        };
        let seg_opts = IvpOptions::with_tolerances(ctx.tol * 1e-2, ctx.tol * 1e-4).uniform(count);
        match reconstruct_f(&modal, &ab, f_start, seg.u_sign, (seg.x_start, seg.x_end), &seg_opts) {
            Ok(rec) => {
                let orig = &f.state[seg.first_index..seg.first_index + rec.len()];
                let dev = max_relative_deviation(orig, &rec.state);
                out.csv(
                    &format!("roundtrip_segment_{i}.csv"),
                    &["x", "f", "f_reconstructed"],
                    &[&rec.independent, orig, &rec.state],
                )?;
                round_trips.push(json!({ "segment": i, "max_relative_deviation": dev }));
            }
            Err(e) => round_trips.push(json!({ "segment": i, "error": e.to_string() })),
        }
    }
    let failure = blow_up_failure(&u, span.1).or_else(|| {
        segments
            .is_empty()
            .then(|| "u has no sign-definite stretch to map".to_string())
    });
    let mut results = serde_json::to_value(&report).expect("report serializes");
    results["round_trip"] = Value::Array(round_trips);
    Ok(Outcome { results, failure })
}

pub(crate) fn run_cosmo(scn: &Scenario, ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let model: CosmoScenario = serde_json::from_value(json!({
        "model": scn.model,
        "params": scn.params,
    }))
    .map_err(|e| CliError::Input(format!("bad cosmology scenario: {e}")))?;
    model.validate()?;
    let span = scn.span()?;
    let points = scn.points()?;
    let opts = solver_options(ctx, points);
    let init = &scn.initial;
    let a0 = init.a0.unwrap_or(1.0);

    let (results, failure) = match model {
        CosmoScenario::TruncatedViscous(s) => {
            let h = solve_truncated_viscous(&s, require(init.H0, "H0")?, require(init.Hdot0, "Hdot0")?, span, &opts)?;
            write_trajectory(out, "H", ["t", "H", "Hdot"], &h)?;
            let a = scale_factor_from_H(&h, a0)?;
            write_trajectory(out, "a", ["t", "a", "adot"], &a)?;
            (json!({ "model": model, "blow_up": h.blow_up }), blow_up_failure(&h, span.1))
        }
        CosmoScenario::FullCausal(s) => {
            let h0 = require(init.H0, "H0")?;
            let hd0 = require(init.Hdot0, "Hdot0")?;
            let h = solve_full_causal(&s, h0, hd0, span, &opts)?;
            write_trajectory(out, "H", ["t", "H", "Hdot"], &h)?;
            let a = scale_factor_from_H(&h, a0)?;
            write_trajectory(out, "a", ["t", "a", "adot"], &a)?;
            let check = full_causal_substitution_check(&s, h0, hd0, span, ctx.tol)?;
            let failure = blow_up_failure(&h, span.1).or_else(|| {
                (!check.passed).then(|| {
                    format!("substitution deviation {:e} exceeds {:e}", check.max_relative_deviation, check.tolerance)
                })
            });
            (json!({ "model": model, "substitution_check": check, "blow_up": h.blow_up }), failure)
        }
        CosmoScenario::PerfectFluidLambda(s) => {
            let report = constraint_propagation(&s, a0, span, points)?;
            out.csv(
                "constraint.csv",
                &["t", "a", "H", "residual"],
                &[&report.t, &report.a, &report.h, &report.residual],
            )?;
            let h0 = friedmann_00(a0, &s)?.sqrt();
            let hd0 = -1.5 * s.sigma * h0 * h0 + 0.5 * s.sigma * s.Lambda + (1.0 - 1.5 * s.sigma) * s.k / (a0 * a0);
            let h = solve_perfect_fluid(&s, h0, hd0, span, &opts)?;
            write_trajectory(out, "H", ["t", "H", "Hdot"], &h)?;
            let failure = (report.max_residual >= 1e-5)
                .then(|| format!("third-order residual {:e} on constraint trajectory", report.max_residual))
                .or_else(|| blow_up_failure(&h, span.1));
            (
                json!({
                    "model": model,
                    "constraint_max_residual": report.max_residual,
                    "constraint_points": report.points,
                    "H0": h0, "Hdot0": hd0,
                    "blow_up": h.blow_up,
                }),
                failure,
            )
        }
        CosmoScenario::BianchiI(s) => {
            let g0 = require(init.G0, "G0")?;
            let gd0 = require(init.Gdot0, "Gdot0")?;
            let g = solve_bianchi_G(&s, g0, gd0, span, &opts)?;
            write_trajectory(out, "G", ["t", "G", "Gdot"], &g)?;
            let check = if s.c_const != 0.0 {
                Some(bianchi_ansatz_check(&s, g0, gd0, span, ctx.tol)?)
            } else {
                None
            };
            let potential = scn.potential.unwrap_or(super::scenario::Potential { v0: 1.0, slope: 0.0 });
            let reconstruction = match bianchi_reconstruct(&g, &s, |phi| potential.eval(phi), init.phi0.unwrap_or(0.0)) {
                Ok(rec) => {
                    out.csv(
                        "bianchi_fields.csv",
                        &["t", "phi", "phidot", "pdot", "ef", "constraint_residual"],
                        &[&rec.t, &rec.phi, &rec.phidot, &rec.pdot, &rec.ef, &rec.constraint_residual],
                    )?;
                    json!({ "max_abs_constraint_residual": rec.max_abs_residual })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
            let failure = blow_up_failure(&g, span.1).or_else(|| {
                check.as_ref().filter(|c| !c.passed).map(|c| {
                    format!("ansatz deviation {:e} exceeds {:e}", c.max_relative_deviation, c.tolerance)
                })
            });
            (
                json!({
                    "model": model,
                    "ansatz_check": check,
                    "reconstruction": reconstruction,
                    "potential": potential,
                    "blow_up": g.blow_up,
                }),
                failure,
            )
        }
    };
    Ok(Outcome { results, failure })
}

#[derive(Debug, Deserialize)]
struct EquivalenceParams {
    q: f64,
    #[serde(default)]
    gamma0: f64,
    #[serde(default = "one")]
    time_scale: f64,
}

fn one() -> f64 {
    1.0
}

pub(crate) fn run_equivalence_cmd(scn: &Scenario, ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let ep: EquivalenceParams = scn.params()?;
    let setup = EquivalenceSetup {
        q: ep.q,
        gamma0: ep.gamma0,
        f0: require(scn.initial.f0, "f0")?,
        fdot0: require(scn.initial.fdot0, "fdot0")?,
        time_scale: ep.time_scale,
        span: scn.span()?,
        tol: ctx.tol,
        points: scn.points()?,
    };
    let run = run_equivalence(&setup)?;
    let n = run.report.points;
    out.csv(
        "equivalence.csv",
        &["x", "f", "u", "t", "H", "a"],
        &[
            &run.f.independent[..n],
            &run.f.state[..n],
            &run.u[..n],
            &run.h.independent[..n],
            &run.h.state[..n],
            &run.a.state[..n],
        ],
    )?;
    out.dat(
        "equivalence.dat",
        &["x", "u", "sH"],
        &[
            &run.f.independent[..n],
            &run.u[..n],
            &run.h.state[..n].iter().map(|h| h * setup.time_scale).collect::<Vec<_>>(),
        ],
    )?;
    let r = &run.report;
    let failure = (!r.passed).then(|| {
        format!(
            "deviations u={:e}, f={:e} against tolerance {:e}",
            r.u_deviation, r.f_deviation, r.tolerance
        )
    });
    let mut results = serde_json::to_value(r).expect("report serializes");
    results["max_deviation"] = json!(r.u_deviation.max(r.f_deviation));
    Ok(Outcome { results, failure })
}

#[derive(Debug, Deserialize)]
struct GaussianSpec {
    #[serde(default)]
    mean: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    #[serde(default = "default_density_points")]
    points: usize,
}

fn default_density_points() -> usize {
    4001
}

#[derive(Debug, Deserialize)]
struct CramerRaoSpec {
    sigma: f64,
    samples: usize,
    #[serde(default = "default_replications")]
    replications: usize,
    #[serde(default)]
    location: f64,
    #[serde(default = "default_estimator")]
    estimator: String,
}

fn default_replications() -> usize {
    4000
}

fn default_estimator() -> String {
    "mean".into()
}

#[derive(Debug, Deserialize)]
struct InfoParams {
    #[serde(default)]
    density_csv: Option<String>,
    #[serde(default)]
    gaussian: Option<GaussianSpec>,
    #[serde(default = "default_q_values")]
    q_values: Vec<f64>,
    #[serde(default)]
    cramer_rao: Option<CramerRaoSpec>,
}

fn default_q_values() -> Vec<f64> {
    vec![0.5, 1.5, 2.0]
}

pub(crate) fn run_info(scn: &Scenario, ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let ip: InfoParams = scn.params()?;
    let density = match (&ip.density_csv, &ip.gaussian) {
        (Some(path), _) => {
            let path = scn.resolve(path);
            GridDensity::read_csv(&path)
                .map_err(|e| CliError::Input(format!("cannot load density {}: {e}", path.display())))?
        }
        (None, Some(g)) => GridDensity::gaussian(g.mean, g.sigma, g.lo, g.hi, g.points)?,
        (None, None) => {
            return Err(CliError::Input(
                "info needs params.density_csv or params.gaussian".into(),
            ))
        }
    };
    out.dat("density.dat", &["x", "f"], &[density.xs(), density.fs()])?;

    let tsallis: Vec<Value> = ip
        .q_values
        .iter()
        .map(|&q| match tsallis_entropy(&density, q) {
            Ok(v) => json!({ "q": q, "value": v }),
            Err(e) => json!({ "q": q, "error": e.to_string() }),
        })
        .collect();
    let fisher_q: Vec<Value> = ip
        .q_values
        .iter()
        .map(|&q| match fisher_information_q_report(&density, q) {
            Ok(r) => json!({ "q": q, "value": r.value, "clipped_cells": r.clipped_cells }),
            Err(e) => json!({ "q": q, "error": e.to_string() }),
        })
        .collect();
    let cramer_rao = match &ip.cramer_rao {
        None => Value::Null,
        Some(spec) => {
            if !(spec.sigma > 0.0) {
                return Err(CliError::Input("cramer_rao.sigma must be positive".into()));
            }
            let estimator: fn(&mut [f64]) -> f64 = match spec.estimator.as_str() {
                "mean" => estimators::mean,
                "median" => estimators::median,
                "first" => estimators::first,
                other => return Err(CliError::Input(format!("unknown estimator {other}"))),
            };
            let exp = EstimationExperiment {
                true_location: spec.location,
                sample_count: spec.samples,
                estimator,
                replications: spec.replications,
                rng_seed: ctx.seed,
            };
            serde_json::to_value(cramer_rao_experiment(&GaussianFamily { sigma: spec.sigma }, &exp)?)
                .expect("report serializes")
        }
    };
    let results = json!({
        "points": density.len(),
        "mass": density.mass(),
        "normalized": density.is_normalized(),
        "shannon": shannon_entropy(&density)?,
        "fisher": fisher_information(&density)?,
        "tsallis": tsallis,
        "fisher_q": fisher_q,
        "cramer_rao": cramer_rao,
    });
    out.json("info.json", &results)?;
    Ok(Outcome { results, failure: None })
}
