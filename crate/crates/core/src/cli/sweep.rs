//! Parameter grids over density scenarios.
//!
//! Grid syntax: axes separated by `;`, each `name=items` with items
//! separated by `,`. An item is a value, an inclusive range `lo:hi:step`,
//! or `!v` to drop `v` from the axis. Example:
//! `q=-5:5:0.25,!0.5;gamma0=-1`.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::commands::{run_epi, EpiSummary};
use super::output::{fmt_f64, OutputDir};
use super::scenario::Scenario;
use super::{CliError, Context, Outcome};
use crate::cosmo::singularity_class;
use crate::epi::EpiParams;
use crate::linearizer::{alpha_beta_of_q, check_special_q};

/// Axes a grid may vary.
pub const AXES: [&str; 6] = ["q", "gamma0", "c", "x0", "f0", "fdot0"];

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

fn parse_number(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Input(format!("bad grid value '{s}'")))
}

fn parse_range(item: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = item.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!("range '{item}' must be lo:hi:step")));
    }
    let (lo, hi, step) = (parse_number(parts[0])?, parse_number(parts[1])?, parse_number(parts[2])?);
    if !(step > 0.0) || hi < lo {
        return Err(CliError::Input(format!("range '{item}' needs lo <= hi and step > 0")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    if count > 1_000_000 {
        return Err(CliError::Input(format!("range '{item}' is too large")));
    }
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

pub fn parse_grid(spec: &str) -> Result<Vec<Axis>, CliError> {
    let mut axes: Vec<Axis> = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, items) = part
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("grid axis '{part}' lacks '='")))?;
        let name = name.trim();
        if !AXES.contains(&name) {
            return Err(CliError::Input(format!(
                "unknown grid axis '{name}'; expected one of {}",
                AXES.join(", ")
            )));
        }
        if axes.iter().any(|a| a.name == name) {
            return Err(CliError::Input(format!("grid axis '{name}' given twice")));
        }
        let mut values = Vec::new();
        let mut excluded = Vec::new();
        for item in items.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            if let Some(v) = item.strip_prefix('!') {
                excluded.push(parse_number(v)?);
            } else if item.contains(':') {
                values.extend(parse_range(item)?);
            } else {
                values.push(parse_number(item)?);
            }
        }
        values.retain(|v| !excluded.iter().any(|e| (v - e).abs() <= 1e-12 * e.abs().max(1.0)));
        axes.push(Axis {
            name: name.to_owned(),
            values,
        });
    }
    Ok(axes)
}

/// Cartesian product, last axis fastest. Empty when there are no axes or
/// any axis is empty.
pub fn grid_points(axes: &[Axis]) -> Vec<Vec<(String, f64)>> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Vec::new();
    }
    let mut points: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut next = p.clone();
                    next.push((axis.name.clone(), *v));
                    next
                })
            })
            .collect();
    }
    points
}

pub const AGGREGATE_HEADER: [&str; 9] = [
    "q",
    "c",
    "gamma0",
    "beta_over_alpha2",
    "special_q",
    "regime",
    "singularity_class",
    "c_drift",
    "status",
];

fn default_base() -> Scenario {
    serde_json::from_value(json!({
        "model": "Epi",
        "params": { "q": 2.0, "gamma0": -1.0, "c": 1.0 },
        "span": [0.0, 1.0],
        "points": 101,
    }))
    .expect("default scenario parses")
}

fn apply_point(base: &Scenario, point: &[(String, f64)]) -> Scenario {
    let mut scn = base.clone();
    if !scn.params.is_object() {
        scn.params = json!({});
    }
    for (name, v) in point {
        match name.as_str() {
            "f0" => scn.initial.f0 = Some(*v),
            "fdot0" => scn.initial.fdot0 = Some(*v),
            other => scn.params[other] = json!(v),
        }
    }
    scn
}

fn aggregate_row(p: &EpiParams, summary: Option<&EpiSummary>, status: String) -> Vec<String> {
    let ab = alpha_beta_of_q(p.q).ok();
    let ratio = ab.map(|ab| ab.beta / (ab.alpha * ab.alpha));
    let special = check_special_q(p.q).unwrap_or(false);
    let regime = summary.map_or_else(
        || format!("{:?}", crate::epi::classify_regime(p.c, p.gamma0)),
        |s| format!("{:?}", s.regime),
    );
    let c = summary.map_or(p.c, |s| s.params.c);
    let singular = singularity_class(p.q, c, p.gamma0)
        .map_or_else(|_| "Unphysical".to_owned(), |s| format!("{s:?}"));
    vec![
        fmt_f64(p.q),
        fmt_f64(c),
        fmt_f64(p.gamma0),
        ratio.map_or_else(String::new, fmt_f64),
        special.to_string(),
        regime,
        singular,
        summary.and_then(|s| s.c_drift).map_or_else(String::new, fmt_f64),
        status,
    ]
}

pub(crate) fn run_sweep(
    base: Option<&Scenario>,
    grid: &str,
    ctx: &Context,
    out: &mut OutputDir,
) -> Result<Outcome, CliError> {
    let base = base.cloned().unwrap_or_else(default_base);
    base.require_model(&["Epi"])?;
    let axes = parse_grid(grid)?;
    let points = grid_points(&axes);

    let rows: Vec<Result<Vec<String>, CliError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, point)| {
            let scn = apply_point(&base, point);
            let p: EpiParams = scn.params()?;
            let mut sub = out.subdir(&format!("point_{i:05}"))?;
            let (row, manifest) = match run_epi(&scn, ctx, &mut sub, false) {
                Ok((outcome, summary)) => {
                    let status = match &outcome.failure {
                        Some(_) => summary.status.clone(),
                        None if summary.status == "rejected" => "rejected".to_owned(),
                        None => "ok".to_owned(),
                    };
                    let row = aggregate_row(&p, Some(&summary), status.clone());
                    (row, json!({ "point": point_json(point), "status": status, "results": outcome.results }))
                }
                Err(e) => {
                    let status = format!("error: {e}");
                    let row = aggregate_row(&p, None, status.clone());
                    (row, json!({ "point": point_json(point), "status": status, "results": Value::Null }))
                }
            };
            sub.json("manifest.json", &manifest)?;
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    out.csv_rows("aggregate.csv", &AGGREGATE_HEADER, &rows)?;
    let mut special: Vec<f64> = rows
        .iter()
        .filter(|r| r[4] == "true")
        .filter_map(|r| r[0].parse().ok())
        .collect();
    special.sort_by(f64::total_cmp);
    special.dedup();
    let results = json!({
        "axes": axes.iter().map(|a| json!({ "name": a.name, "count": a.values.len() })).collect::<Vec<_>>(),
        "points": rows.len(),
        "special_q_values": special,
        "failed_points": rows.iter().filter(|r| r[8].starts_with("error")).count(),
    });
    Ok(Outcome { results, failure: None })
}

fn point_json(point: &[(String, f64)]) -> Value {
    Value::Object(point.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_lists_and_exclusions() {
        let axes = parse_grid("q=-5:5:0.25,!0.5; gamma0=-1,1").unwrap();
        assert_eq!(axes.len(), 2);
        assert_eq!(axes[0].values.len(), 40);
        assert!(!axes[0].values.contains(&0.5));
        assert!(axes[0].values.contains(&2.0) && axes[0].values.contains(&-1.0));
        assert_eq!(*axes[0].values.last().unwrap(), 5.0);
        assert_eq!(grid_points(&axes).len(), 80);
        assert_eq!(grid_points(&axes)[1], vec![("q".into(), -5.0), ("gamma0".into(), 1.0)]);
    }

    #[test]
    fn empty_grid_has_no_points() {
        assert!(grid_points(&parse_grid("").unwrap()).is_empty());
        assert!(grid_points(&parse_grid("q=").unwrap()).is_empty());
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["z=1", "q", "q=1:2", "q=a", "q=2:1:1", "q=1;q=2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
