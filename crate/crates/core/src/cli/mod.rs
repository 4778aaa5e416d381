//! Scenario-driven runner behind the `epi-lab` binary.
//!
//! Every run writes `manifest.json` into the output directory with the
//! inputs, the crate version, all reported residuals and deviations, and a
//! status. Exit codes: 0 success, 1 bad input, 2 numerical failure (outputs
//! written so far are kept).

mod commands;
pub mod output;
pub mod scenario;
pub mod sweep;

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::Error as ModelError;
use output::OutputDir;
use scenario::Scenario;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Info,
    Epi,
    Linearize,
    Cosmo,
    Equivalence,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Overrides the scenario's `tol`.
    pub tol: Option<f64>,
    pub seed: u64,
    pub grid: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            scenario_path: None,
            output_dir: output_dir.into(),
            tol: None,
            seed: 0,
            grid: None,
        }
    }

    pub fn scenario(mut self, path: impl Into<PathBuf>) -> Self {
        self.scenario_path = Some(path.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// One JSON object on one line, for the error stream.
    pub fn diagnostic_line(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() })
            .to_string()
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        use ModelError::*;
        match e {
            StepSizeUnderflow { .. }
            | TooManySteps(_)
            | NonConvergent { .. }
            | NoSignChange { .. }
            | NonFiniteIntegrand { .. }
            | ZeroCrossing
            | DegenerateModes
            | SignChange(_)
            | BiasedEstimator { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Resolved run settings passed to the commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Context {
    pub tol: f64,
    pub seed: u64,
}

/// What a command reports back: results for the manifest and, if a check
/// failed or a solution ended early, a reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub failure: Option<String>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: Command,
    inputs: Value,
    results: &'a Value,
    outputs: Vec<String>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub results: Value,
}

fn load_scenario(config: &RunConfig) -> Result<Option<Scenario>, CliError> {
    let Some(path) = &config.scenario_path else {
        return Ok(None);
    };
    if !path.exists() {
        return Err(CliError::Input(format!("scenario {} does not exist", path.display())));
    }
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Input("density path is not valid UTF-8".into()))?;
        let mut scn: Scenario = serde_json::from_value(json!({
            "model": "Info",
            "params": { "density_csv": name },
        }))
        .expect("literal scenario parses");
        scn.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return Ok(Some(scn));
    }
    Scenario::load(path).map(Some)
}

fn dispatch(
    config: &RunConfig,
    scenario: Option<&Scenario>,
    ctx: &Context,
    out: &mut OutputDir,
) -> Result<Outcome, CliError> {
    let need = || {
        scenario.ok_or_else(|| {
            CliError::Input(format!("--scenario is required for {:?}", config.command).to_lowercase())
        })
    };
    match config.command {
        Command::Info => {
            let s = need()?;
            s.require_model(&["Info"])?;
            commands::run_info(s, ctx, out)
        }
        Command::Epi => {
            let s = need()?;
            s.require_model(&["Epi"])?;
            commands::run_epi(s, ctx, out, true).map(|(o, _)| o)
        }
        Command::Linearize => {
            let s = need()?;
            s.require_model(&["Linearize"])?;
            commands::run_linearize(s, ctx, out)
        }
        Command::Cosmo => {
            let s = need()?;
            s.require_model(&["TruncatedViscous", "FullCausal", "PerfectFluidLambda", "BianchiI"])?;
            commands::run_cosmo(s, ctx, out)
        }
        Command::Equivalence => {
            let s = need()?;
            s.require_model(&["Equivalence"])?;
            commands::run_equivalence_cmd(s, ctx, out)
        }
        Command::Sweep => sweep::run_sweep(scenario, config.grid.as_deref().unwrap_or(""), ctx, out),
    }
}

/// Runs one command. The manifest is written whenever the output directory
/// could be created, including on failure.
pub fn run(config: &RunConfig) -> Result<RunSummary, CliError> {
    if let Some(tol) = config.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {tol}")));
        }
    }
    let mut out = OutputDir::create(&config.output_dir)?;
    let scenario = load_scenario(config);
    let outcome = scenario.as_ref().map_err(Clone::clone).and_then(|scn| {
        let tol = config
            .tol
            .or(scn.as_ref().and_then(|s| s.tol))
            .unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Input(format!("tol must be positive, got {tol}")));
        }
        let ctx = Context { tol, seed: config.seed };
        dispatch(config, scn.as_ref(), &ctx, &mut out)
    });

    let inputs = json!({
        "scenario_path": config.scenario_path.as_ref().map(|p| p.display().to_string()),
        "scenario": scenario.as_ref().ok().and_then(|s| s.as_ref()).map(|s| serde_json::to_value(s).ok()),
        "tol": config.tol,
        "seed": config.seed,
        "grid": config.grid,
    });
    let (results, status, error, err) = match &outcome {
        Ok(o) => match &o.failure {
            None => (o.results.clone(), "pass", None, None),
            Some(msg) => (
                o.results.clone(),
                "fail",
                Some(msg.clone()),
                Some(CliError::Numerical(msg.clone())),
            ),
        },
        Err(e) => (Value::Null, "error", Some(e.to_string()), Some(e.clone())),
    };
    let mut outputs = out.files().to_vec();
    outputs.push("manifest.json".into());
    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool: "epi-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: config.command,
        inputs,
        results: &results,
        outputs,
        status,
        error,
    };
    out.json("manifest.json", &manifest)?;
    match err {
        Some(e) => Err(e),
        None => Ok(RunSummary {
            output_dir: out.path().to_path_buf(),
            results,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(CliError::from(ModelError::TooManySteps(5)).exit_code(), 2);
        assert_eq!(CliError::from(ModelError::AlphaZero).exit_code(), 1);
        let line = CliError::Input("bad\nthing".into()).diagnostic_line();
        assert!(!line.contains('\n'));
        let v: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["exit_code"], 1);
    }
}
