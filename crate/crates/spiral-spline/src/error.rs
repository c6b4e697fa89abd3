use thiserror::Error;

/// Errors produced by validation, estimation, refinement and optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("waypoint count {points} does not match time count {times} (need at least 3 of each)")]
    CountMismatch { times: usize, points: usize },

    #[error("times must be strictly increasing (violated at index {index})")]
    NonMonotoneTimes { index: usize },

    #[error("segment {segment}: chord ratio {ratio} too close to or above 1; sampling is too sparse or too straight")]
    ChordTooLong { segment: usize, ratio: f64 },

    #[error("segment {segment}: zero chord (repeated waypoint)")]
    ZeroChord { segment: usize },

    #[error("segment {segment}: discrete curvature {curvature} below floor {floor}; data nearly collinear there")]
    CurvatureTooSmall {
        segment: usize,
        curvature: f64,
        floor: f64,
    },

    #[error("segment {segment}: duration ratio {ratio} outside configured band [{min}, {max}]")]
    GapRatio {
        segment: usize,
        ratio: f64,
        min: f64,
        max: f64,
    },

    #[error("t = {t} outside the spline domain [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },

    #[error("singular tridiagonal system (zero pivot in row {row})")]
    SingularSystem { row: usize },

    #[error("segment {segment}: negative discriminant {discriminant} under the square root; spacing too coarse for this branch")]
    NegativeDiscriminant { segment: usize, discriminant: f64 },

    #[error("spline carries a quartic extension; the reduced coordinates only cover plain cubics")]
    ExtensionPresent,

    #[error("continuity identities violated (defect {defect} at knot {knot}); coefficients are off the constraint manifold")]
    ContinuityViolated { knot: usize, defect: f64 },

    #[error("singular Jacobian in Newton step")]
    SingularJacobian,

    #[error(
        "no convergence: residual {residual} after {iterations} iterations (best iterate attached)"
    )]
    NoConvergence {
        residual: f64,
        iterations: usize,
        best: Box<crate::spline::AngleSpline>,
    },

    #[error("optimizer seed has no converged refined spline")]
    SeedNotConverged,

    #[error(
        "constraint violated: final interpolation residual {residual} exceeds tolerance {tol}"
    )]
    ConstraintViolated { residual: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
