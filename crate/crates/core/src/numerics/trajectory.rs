use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered samples of a scalar solution `y(s)` and its derivative `dy/ds`.
///
/// The same carrier holds `f(x)`, `u(x)`, `H(t)`, `G(t)` and `z(eta)`; the
/// `label` says which.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub independent: Vec<f64>,
    pub state: Vec<f64>,
    pub derivative: Vec<f64>,
    pub label: String,
    /// Abscissa where the blow-up ceiling was crossed, if integration
    /// stopped early.
    pub blow_up: Option<f64>,
}

impl Trajectory {
    /// Builds a trajectory, checking lengths and strict monotonicity.
    pub fn new(
        independent: Vec<f64>,
        state: Vec<f64>,
        derivative: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if independent.len() != state.len() || state.len() != derivative.len() {
            return Err(Error::LengthMismatch);
        }
        if independent.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: independent.len(),
            });
        }
        if let Some(i) = first_non_increasing(&independent) {
            return Err(Error::NonMonotonic(i));
        }
        Ok(Self {
            independent,
            state,
            derivative,
            label: label.into(),
            blow_up: None,
        })
    }

    pub fn len(&self) -> usize {
        self.independent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.independent.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.independent[0]
    }

    pub fn end(&self) -> f64 {
        *self.independent.last().expect("non-empty trajectory")
    }

    pub fn blew_up(&self) -> bool {
        self.blow_up.is_some()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Iterates `(s, y, dy/ds)` triples.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.independent
            .iter()
            .zip(&self.state)
            .zip(&self.derivative)
            .map(|((&s, &y), &d)| (s, y, d))
    }

    /// Reverses sample order. Callers use it when the independent variable
    /// was produced in decreasing order.
    pub(crate) fn reverse_samples(&mut self) {
        self.independent.reverse();
        self.state.reverse();
        self.derivative.reverse();
    }
}

pub(crate) fn first_non_increasing(xs: &[f64]) -> Option<usize> {
    xs.windows(2)
        .position(|w| !(w[1] > w[0]))
        .map(|i| i + 1)
}

/// Largest pointwise relative deviation `|a - b| / max(|a|, |b|)`.
pub fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Cumulative integral of samples `y(s)` whose derivative `dy/ds` is also
/// known, using the endpoint-corrected trapezoid rule (fourth order).
pub fn cumulative_hermite(s: &[f64], y: &[f64], dy: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    out.push(acc);
    for i in 1..s.len() {
        let h = s[i] - s[i - 1];
        acc += 0.5 * h * (y[i - 1] + y[i]) + h * h / 12.0 * (dy[i - 1] - dy[i]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_monotone() {
        let err = Trajectory::new(vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![0.0; 3], "t");
        assert_eq!(err.unwrap_err(), Error::NonMonotonic(2));
    }

    #[test]
    fn rejects_short_and_mismatched() {
        assert!(matches!(
            Trajectory::new(vec![0.0], vec![0.0], vec![0.0], "t"),
            Err(Error::TooFewSamples { .. })
        ));
        assert_eq!(
            Trajectory::new(vec![0.0, 1.0], vec![0.0], vec![0.0, 1.0], "t").unwrap_err(),
            Error::LengthMismatch
        );
    }

    #[test]
    fn hermite_is_exact_for_cubics() {
        let s: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = s.iter().map(|x| x * x * x - x).collect();
        let dy: Vec<f64> = s.iter().map(|x| 3.0 * x * x - 1.0).collect();
        let c = cumulative_hermite(&s, &y, &dy);
        let last = *s.last().unwrap();
        let exact = last.powi(4) / 4.0 - last * last / 2.0;
        assert!((c.last().unwrap() - exact).abs() < 1e-12);
    }
}
