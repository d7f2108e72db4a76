use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not traceless (|tr| = {trace:e})")]
    NotTraceless { trace: f64 },
    #[error("matrix is not unimodular (|det - 1| = {defect:e})")]
    NotUnimodular { defect: f64 },
    #[error("matrix is not unitary (|M M^* - I| = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("determinant has non-positive real part ({re:e}); integration diverged")]
    DeterminantDiverged { re: f64 },
    #[error("matrix is not Hermitian (|X - X^*| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("point is not on the hyperboloid ({reason})")]
    NotOnHyperboloid { reason: &'static str },
    #[error("{name} = {value} is outside its admissible range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("spectral parameter must be nonzero")]
    ZeroLambda,
    #[error("tangent argument {argument} is within {distance:e} of a pole (margin {margin})")]
    PoleProximity { argument: f64, distance: f64, margin: f64 },
    #[error("point ({re}, {im}) lies outside the domain of the data")]
    OutsideDomain { re: f64, im: f64 },
    #[error("analytic derivatives are not available for this seed")]
    AnalyticUnavailable,
    #[error("seed is not rank-one at the evaluated point (|det| = {det:e})")]
    NotRankOne { det: f64 },
    #[error("grid {nx}x{ny} is smaller than the required {min}x{min}")]
    GridTooSmall { nx: usize, ny: usize, min: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("step size underflow at path parameter {position} (h = {step:e})")]
    StepUnderflow { position: f64, step: f64 },
    #[error(
        "connection is not integrable: flatness residual {max_flatness_residual:e}, \
         path-order defect {cell_defect:e}"
    )]
    NonIntegrable { max_flatness_residual: f64, cell_defect: f64 },
    #[error("degenerate induced metric at grid point ({i}, {j}): e^2u = {value:e}")]
    DegenerateMetric { i: usize, j: usize, value: f64 },
    #[error("loop does not close (gap {gap:e})")]
    LoopNotClosed { gap: f64 },
    #[error("denominator vanishes ({what})")]
    SingularDenominator { what: &'static str },
    #[error("non-finite value encountered ({what})")]
    NonFinite { what: &'static str },
}
