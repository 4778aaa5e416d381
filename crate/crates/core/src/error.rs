use thiserror::Error;

/// Errors raised by the numerical and model layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integration span is empty: [{0}, {1}]")]
    EmptySpan(f64, f64),
    #[error("tolerances must be positive (rel={rel}, abs={abs})")]
    InvalidTolerance { rel: f64, abs: f64 },
    #[error("initial condition is not finite")]
    NonFiniteInitialCondition,
    #[error("step size underflow at {at}: step {step:e} below floor")]
    StepSizeUnderflow { at: f64, step: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("quadrature did not converge: estimated error {error:e} after {intervals} intervals")]
    NonConvergent { error: f64, intervals: usize },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("abscissae must be strictly increasing (index {0})")]
    NonMonotonic(usize),
    #[error("sample series lengths differ")]
    LengthMismatch,

    #[error("density is not normalized: integral = {0}")]
    NotNormalized(f64),
    #[error("density grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("density has fewer than 3 strictly positive interior samples")]
    DegenerateSupport,
    #[error("integrand is not finite ({clipped} cells clipped)")]
    NonFiniteIntegrand { clipped: usize },
    #[error("estimator is biased: mean {mean} vs true {truth} (stderr {stderr:e})")]
    BiasedEstimator { mean: f64, truth: f64, stderr: f64 },

    #[error("density must be strictly positive, got {0}")]
    NonPositiveDensity(f64),
    #[error("c - gamma0 * f = {0} is not positive; solution is complex here")]
    ComplexRegion(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("closed-form base {0} is negative for this branch")]
    NegativeBase(f64),
    #[error("maximum diagnostics require c > 0 and gamma0 > 0")]
    WrongRegime,

    #[error("alpha = 2q - 1 vanishes at q = 1/2")]
    AlphaZero,
    #[error("u changes sign at index {0}; the eta map folds there")]
    SignChange(usize),
    #[error("characteristic roots are complex (1 - 4 beta' = {0})")]
    ComplexRoots(f64),
    #[error("modal exponents coincide; two-mode fit is degenerate")]
    DegenerateModes,
    #[error("z(eta) reaches zero; u vanishes and the inverse map degenerates")]
    ZeroCrossing,

    #[error("expansion rate H must be positive")]
    ZeroExpansionRate,
    #[error("Friedmann constraint is negative here: H^2 = {0}")]
    ForbiddenRegion(f64),
    #[error("dG/dt vanishes")]
    ZeroGdot,
    #[error("the tau = -c t rescaling needs c != 0")]
    ZeroC,
    #[error("d2G/dt2 must be positive to evaluate e^f (got {0})")]
    NonPositiveGddot(f64),
    #[error("scalar potential must be positive (got {0})")]
    NonPositivePotential(f64),
    #[error("physical range needs gamma0 < 0 (got {0})")]
    UnphysicalGamma0(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
