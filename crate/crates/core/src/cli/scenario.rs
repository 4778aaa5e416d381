use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;

/// On-disk scenario: `{"model", "params", "initial", "span", "tol"}`.
///
/// `points` sets the size of the uniform output grid; the remaining keys
/// are model-specific and kept verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub span: Option<(f64, f64)>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Potential>,
    /// Directory relative paths in `params` resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Initial data; each model reads the keys it needs.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fdot0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub udot0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub H0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub Hdot0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub G0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub Gdot0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
}

/// `V(φ) = V0 exp(slope φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    #[serde(rename = "V0")]
    pub v0: f64,
    #[serde(default)]
    pub slope: f64,
}

impl Potential {
    pub fn eval(&self, phi: f64) -> f64 {
        self.v0 * (self.slope * phi).exp()
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read scenario {}: {e}", path.display())))?;
        let mut s: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("malformed scenario {}: {e}", path.display())))?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.params.clone())
            .map_err(|e| CliError::Input(format!("bad params for model {}: {e}", self.model)))
    }

    pub fn span(&self) -> Result<(f64, f64), CliError> {
        let span = self
            .span
            .ok_or_else(|| CliError::Input(format!("model {} needs a span", self.model)))?;
        if !(span.0.is_finite() && span.1.is_finite() && span.1 > span.0) {
            return Err(CliError::Input(format!("span must be increasing and finite, got {span:?}")));
        }
        Ok(span)
    }

    pub fn points(&self) -> Result<usize, CliError> {
        match self.points {
            Some(n) if n < 3 => Err(CliError::Input(format!("points must be >= 3, got {n}"))),
            Some(n) => Ok(n),
            None => Ok(201),
        }
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        self.base_dir.join(relative)
    }

    pub fn require_model(&self, expected: &[&str]) -> Result<(), CliError> {
        if expected.contains(&self.model.as_str()) {
            Ok(())
        } else {
            Err(CliError::Input(format!(
                "model {} not accepted here; expected one of {}",
                self.model,
                expected.join(", ")
            )))
        }
    }
}

pub(crate) fn require(v: Option<f64>, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Input(format!("initial.{name} is required")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_rejects_unknown_initial_keys() {
        let s: Scenario = serde_json::from_str(
            r#"{"model":"Epi","params":{"q":2,"gamma0":-1},"initial":{"f0":1},"span":[0,1]}"#,
        )
        .unwrap();
        assert_eq!(s.initial.f0, Some(1.0));
        assert_eq!(s.span().unwrap(), (0.0, 1.0));
        assert_eq!(s.points().unwrap(), 201);
        let bad = serde_json::from_str::<Scenario>(r#"{"model":"Epi","initial":{"g0":1}}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn span_must_increase() {
        let s: Scenario = serde_json::from_str(r#"{"model":"Epi","span":[1,0]}"#).unwrap();
        assert!(s.span().is_err());
    }
}
