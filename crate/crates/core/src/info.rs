//! Information functionals on sampled densities.
//!
//! | Function | Quantity |
//! |----------|----------|
//! | [`shannon_entropy`] | `S = -∫ f ln f dx` |
//! | [`tsallis_entropy`] | `S_q = ∫ f (1 - f^(q-1)) / (q - 1) dx` |
//! | [`fisher_information`] | `I = ∫ (f')² / f dx` |
//! | [`fisher_information_q`] | `I_q = ∫ f^(q-2) (f')² dx` |
//! | [`cramer_rao_experiment`] | Monte Carlo check of `I · e² ≥ 1` |
//!
//! Integrals use trapezoid weights on a uniform grid and derivatives come
//! from [`finite_diff`]. Cells whose density is below [`ZERO_DENSITY`] are
//! left out of the Fisher integrands and counted.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::finite_diff;

/// Densities below this value are treated as zero.
pub const ZERO_DENSITY: f64 = 1e-30;
/// Allowed deviation of the trapezoid integral from one.
pub const NORMALIZATION_TOL: f64 = 1e-6;
const UNIFORMITY_TOL: f64 = 1e-12;

/// A density sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    xs: Vec<f64>,
    fs: Vec<f64>,
    cell_width: f64,
}

impl GridDensity {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::LengthMismatch);
        }
        if xs.len() < 3 {
            return Err(Error::TooFewSamples {
                needed: 3,
                got: xs.len(),
            });
        }
        let cell_width = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        if !(cell_width > 0.0) || !cell_width.is_finite() {
            return Err(Error::InvalidGrid("abscissae must increase".into()));
        }
        // Rounding in x0 + i*h is proportional to |x|, not to h.
        let slack = UNIFORMITY_TOL * cell_width
            + 4.0 * f64::EPSILON * xs[0].abs().max(xs[xs.len() - 1].abs());
        if let Some(i) = xs
            .windows(2)
            .position(|w| ((w[1] - w[0]) - cell_width).abs() > slack)
        {
            return Err(Error::InvalidGrid(format!("spacing is not uniform at index {}", i + 1)));
        }
        if let Some(i) = fs.iter().position(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::InvalidGrid(format!("density value at index {i} is {}", fs[i])));
        }
        Ok(Self { xs, fs, cell_width })
    }

    /// Samples `density` at `points` equally spaced abscissae on `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, points: usize, density: impl Fn(f64) -> f64) -> Result<Self> {
        if points < 3 || !(hi > lo) {
            return Err(Error::InvalidGrid(format!("[{lo}, {hi}] with {points} points")));
        }
        let h = (hi - lo) / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| lo + h * i as f64).collect();
        let fs = xs.iter().map(|&x| density(x)).collect();
        Self::new(xs, fs)
    }

    /// Normal density with the given mean and standard deviation.
    pub fn gaussian(mean: f64, sigma: f64, lo: f64, hi: f64, points: usize) -> Result<Self> {
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        Self::from_fn(lo, hi, points, |x| {
            let z = (x - mean) / sigma;
            norm * (-0.5 * z * z).exp()
        })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn fs(&self) -> &[f64] {
        &self.fs
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Trapezoid weight of sample `i`.
    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.xs.len() {
            0.5 * self.cell_width
        } else {
            self.cell_width
        }
    }

    fn integrate(&self, integrand: impl Fn(usize) -> f64) -> f64 {
        (0..self.xs.len()).map(|i| self.weight(i) * integrand(i)).sum()
    }

    /// Trapezoid integral of the density.
    pub fn mass(&self) -> f64 {
        self.integrate(|i| self.fs[i])
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() < NORMALIZATION_TOL
    }

    fn require_normalized(&self) -> Result<()> {
        let m = self.mass();
        if (m - 1.0).abs() < NORMALIZATION_TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized(m))
        }
    }

    /// Same samples on a grid shifted by `shift`.
    pub fn translated(&self, shift: f64) -> Self {
        Self {
            xs: self.xs.iter().map(|x| x + shift).collect(),
            fs: self.fs.clone(),
            cell_width: self.cell_width,
        }
    }

    /// Parses a two-column `x,f` CSV with a one-line header.
    pub fn from_csv_reader<R: Read>(reader: R) -> std::result::Result<Self, CsvError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(CsvError::Format(format!("row {} has {} columns", line + 2, rec.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CsvError::Format(format!("row {}: cannot parse {s:?}", line + 2)))
            };
            xs.push(parse(&rec[0])?);
            fs.push(parse(&rec[1])?);
        }
        Ok(Self::new(xs, fs)?)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> std::result::Result<Self, CsvError> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Writes `x,f` rows with 17 significant digits.
    pub fn to_csv_writer<W: Write>(&self, writer: W) -> std::result::Result<(), CsvError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "f"])?;
        for (x, f) in self.xs.iter().zip(&self.fs) {
            w.write_record([format!("{x:.16e}"), format!("{f:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::result::Result<(), CsvError> {
        self.to_csv_writer(std::fs::File::create(path)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed density file: {0}")]
    Format(String),
    #[error(transparent)]
    Density(#[from] Error),
}

/// `-∫ f ln f dx`, with `0 ln 0 = 0`.
pub fn shannon_entropy(d: &GridDensity) -> Result<f64> {
    d.require_normalized()?;
    Ok(-d.integrate(|i| {
        let f = d.fs[i];
        if f > 0.0 {
            f * f.ln()
        } else {
            0.0
        }
    }))
}

/// Tsallis entropy; `q = 1` is Shannon's.
pub fn tsallis_entropy(d: &GridDensity, q: f64) -> Result<f64> {
    if q == 1.0 {
        return shannon_entropy(d);
    }
    d.require_normalized()?;
    let qm1 = q - 1.0;
    // (1 - f^(q-1)) / (q-1) = -expm1((q-1) ln f) / (q-1), stable near q = 1
    Ok(d.integrate(|i| {
        let f = d.fs[i];
        if f > 0.0 {
            -f * (qm1 * f.ln()).exp_m1() / qm1
        } else {
            0.0
        }
    }))
}

/// Value of a Fisher-type functional plus the number of cells left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub value: f64,
    pub clipped_cells: usize,
}

fn fisher_kernel(d: &GridDensity, q: f64) -> Result<FunctionalReport> {
    d.require_normalized()?;
    let n = d.len();
    let positive_interior = d.fs[1..n - 1].iter().filter(|&&f| f > 0.0).count();
    if positive_interior < 3 {
        return Err(Error::DegenerateSupport);
    }
    let df = finite_diff(&d.xs, &d.fs)?;
    let mut clipped = 0;
    let mut total = 0.0;
    for i in 0..n {
        let f = d.fs[i];
        if f < ZERO_DENSITY {
            clipped += 1;
            continue;
        }
        let g = df[i] * df[i];
        let term = if q == 1.0 { g / f } else { f.powf(q - 2.0) * g };
        total += d.weight(i) * term;
    }
    if !total.is_finite() {
        return Err(Error::NonFiniteIntegrand { clipped });
    }
    Ok(FunctionalReport {
        value: total,
        clipped_cells: clipped,
    })
}

/// Fisher information of a translation family, `∫ (f')² / f dx`.
pub fn fisher_information(d: &GridDensity) -> Result<f64> {
    fisher_kernel(d, 1.0).map(|r| r.value)
}

/// Generalized Fisher information `∫ f^(q-2) (f')² dx`.
pub fn fisher_information_q(d: &GridDensity, q: f64) -> Result<f64> {
    fisher_kernel(d, q).map(|r| r.value)
}

/// As [`fisher_information_q`], also reporting how many cells were clipped.
pub fn fisher_information_q_report(d: &GridDensity, q: f64) -> Result<FunctionalReport> {
    fisher_kernel(d, q)
}

/// A location-parameterized family `f(x - location)`.
pub trait LocationFamily: Sync {
    fn sample<R: Rng + ?Sized>(&self, location: f64, rng: &mut R) -> f64;

    fn density(&self, x: f64, location: f64) -> f64;

    /// Interval that carries essentially all of the mass.
    fn support(&self, location: f64) -> (f64, f64);

    /// The density on a uniform grid over [`support`](Self::support).
    fn grid_density(&self, location: f64, points: usize) -> Result<GridDensity> {
        let (lo, hi) = self.support(location);
        GridDensity::from_fn(lo, hi, points, |x| self.density(x, location))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFamily {
    pub sigma: f64,
}

impl LocationFamily for GaussianFamily {
    fn sample<R: Rng + ?Sized>(&self, location: f64, rng: &mut R) -> f64 {
        Normal::new(location, self.sigma)
            .expect("positive sigma")
            .sample(rng)
    }

    fn density(&self, x: f64, location: f64) -> f64 {
        let z = (x - location) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    fn support(&self, location: f64) -> (f64, f64) {
        (location - 10.0 * self.sigma, location + 10.0 * self.sigma)
    }
}

/// Common estimators of a location parameter.
pub mod estimators {
    pub fn mean(samples: &mut [f64]) -> f64 {
        samples.iter().sum::<f64>() / samples.len() as f64
    }

    pub fn median(samples: &mut [f64]) -> f64 {
        samples.sort_unstable_by(f64::total_cmp);
        let n = samples.len();
        if n % 2 == 1 {
            samples[n / 2]
        } else {
            0.5 * (samples[n / 2 - 1] + samples[n / 2])
        }
    }

    /// Uses only the first observation.
    pub fn first(samples: &mut [f64]) -> f64 {
        samples[0]
    }
}

/// Setup of a repeated estimation of a location parameter.
#[derive(Clone)]
pub struct EstimationExperiment<E> {
    pub true_location: f64,
    pub sample_count: usize,
    pub estimator: E,
    pub replications: usize,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CramerRaoReport {
    /// Fisher information of one observation.
    pub fisher_per_sample: f64,
    /// `sample_count` times the per-sample information.
    pub fisher_total: f64,
    /// Monte Carlo mean-square error of the estimator.
    pub mse: f64,
    pub mse_stderr: f64,
    pub mean_estimate: f64,
    /// `fisher_total * mse`; at least one for unbiased estimators.
    pub product: f64,
    pub violates_bound: bool,
}

const SHARDS: usize = 16;
const FISHER_GRID_POINTS: usize = 8001;

/// Runs the experiment and compares its mean-square error with `1/I`.
///
/// Replications are split into a fixed number of shards, each with its own
/// ChaCha stream derived from `rng_seed`, so results do not depend on the
/// thread count.
pub fn cramer_rao_experiment<F, E>(family: &F, exp: &EstimationExperiment<E>) -> Result<CramerRaoReport>
where
    F: LocationFamily,
    E: Fn(&mut [f64]) -> f64 + Sync,
{
    if exp.sample_count == 0 || exp.replications < 2 {
        return Err(Error::InvalidParameters(
            "need sample_count >= 1 and replications >= 2".into(),
        ));
    }
    let grid = family.grid_density(exp.true_location, FISHER_GRID_POINTS)?;
    let fisher_per_sample = fisher_information(&grid)?;

    let per_shard = exp.replications.div_ceil(SHARDS);
    let estimates: Vec<f64> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let start = shard * per_shard;
            let end = ((shard + 1) * per_shard).min(exp.replications);
            let mut rng = ChaCha8Rng::seed_from_u64(exp.rng_seed);
            rng.set_stream(shard as u64);
            let mut buf = vec![0.0; exp.sample_count];
            (start..end)
                .map(|_| {
                    for s in buf.iter_mut() {
                        *s = family.sample(exp.true_location, &mut rng);
                    }
                    (exp.estimator)(&mut buf)
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();

    let r = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / r;
    let var_est = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let bias_stderr = (var_est / r).sqrt();
    if (mean - exp.true_location).abs() >= 3.0 * bias_stderr {
        return Err(Error::BiasedEstimator {
            mean,
            truth: exp.true_location,
            stderr: bias_stderr,
        });
    }
    let sq: Vec<f64> = estimates
        .iter()
        .map(|e| (e - exp.true_location).powi(2))
        .collect();
    let mse = sq.iter().sum::<f64>() / r;
    let mse_var = sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (r - 1.0);
    let mse_stderr = (mse_var / r).sqrt();
    let fisher_total = fisher_per_sample * exp.sample_count as f64;
    let product = fisher_total * mse;
    Ok(CramerRaoReport {
        fisher_per_sample,
        fisher_total,
        mse,
        mse_stderr,
        mean_estimate: mean,
        product,
        violates_bound: product < 1.0 - 5.0 * mse_stderr / mse,
    })
}
