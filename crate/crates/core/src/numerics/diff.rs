use crate::error::{Error, Result};
use crate::numerics::trajectory::first_non_increasing;

/// Second-order derivative estimates of `ys` at every abscissa in `xs`.
///
/// Three-point central differences inside, one-sided three-point stencils
/// at the ends. Non-uniform spacing is handled by the Lagrange weights.
pub fn finite_diff(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if ys.len() != n {
        return Err(Error::LengthMismatch);
    }
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    if let Some(i) = first_non_increasing(xs) {
        return Err(Error::NonMonotonic(i));
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = xs[i] - xs[i - 1];
        let h2 = xs[i + 1] - xs[i];
        out[i] = -h2 / (h1 * (h1 + h2)) * ys[i - 1]
            + (h2 - h1) / (h1 * h2) * ys[i]
            + h1 / (h2 * (h1 + h2)) * ys[i + 1];
    }
    let (h1, h2) = (xs[1] - xs[0], xs[2] - xs[1]);
    out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * ys[0] + (h1 + h2) / (h1 * h2) * ys[1]
        - h1 / (h2 * (h1 + h2)) * ys[2];
    let (h1, h2) = (xs[n - 2] - xs[n - 3], xs[n - 1] - xs[n - 2]);
    out[n - 1] = h2 / (h1 * (h1 + h2)) * ys[n - 3] - (h1 + h2) / (h1 * h2) * ys[n - 2]
        + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * ys[n - 1];
    Ok(out)
}

/// Differentiates `ys` twice.
pub fn second_diff(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    finite_diff(xs, &finite_diff(xs, ys)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, h: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + h * i as f64).collect()
    }

    #[test]
    fn constant_gives_zero() {
        let xs = grid(0.0, 0.1, 10);
        let d = finite_diff(&xs, &[3.0; 10]).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn quadratic_is_exact() {
        let xs = grid(-1.0, 0.125, 17);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let d = finite_diff(&xs, &ys).unwrap();
        for (x, v) in xs.iter().zip(&d) {
            assert!((v - 2.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_exact_on_uneven_grid() {
        let xs = [0.0, 0.1, 0.35, 0.4, 1.0, 1.7];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d = finite_diff(&xs, &ys).unwrap();
        for (x, v) in xs.iter().zip(&d) {
            assert!((v - (6.0 * x - 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn sine_within_taylor_bound() {
        let xs = grid(0.0, 1e-3, 2001);
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let d = finite_diff(&xs, &ys).unwrap();
        for (x, v) in xs.iter().zip(&d) {
            assert!((v - x.cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn cubic_second_derivative() {
        let h = 1e-3;
        let xs = grid(0.0, h, 1001);
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        let d2 = second_diff(&xs, &ys).unwrap();
        for i in 2..xs.len() - 2 {
            assert!((d2[i] - 6.0 * xs[i]).abs() < 10.0 * h * h, "i={i}");
        }
    }

    #[test]
    fn too_few() {
        assert_eq!(
            finite_diff(&[0.0, 1.0], &[0.0, 1.0]).unwrap_err(),
            Error::TooFewSamples { needed: 3, got: 2 }
        );
    }
}
