//! Unit-speed planar interpolation by natural second-order spiral splines.
//!
//! Given waypoints `Y_0..Y_n` and strictly increasing times `T_0..T_n`,
//! this crate finds C^2 unit-speed curves `y(t)` with `y(T_j) = Y_j` and
//! zero curvature at both ends. The turning angle of such a curve is a
//! C^1 cubic spline, so the curve is a track-sum of second-order spirals.
//! There are `2^n` solution branches, one per choice of concavity sign per
//! segment; for each branch the crate produces
//!
//! 1. a closed-form coefficient estimate ([`estimate`]) via two
//!    tridiagonal solves (one explicit formula set when `n = 2`),
//! 2. an exact interpolant ([`refine`]) by damped Newton on the reduced
//!    coordinates, seeded from the estimate, and
//! 3. optionally a lower-energy neighbor ([`optimize_energy`]) within a
//!    quartic extension of the angle family.
//!
//! Branches are ranked by bending energy `J = integral theta'(t)^2 dt`.
//!
//! ```
//! use spiral_spline::{
//!     estimate_branch, refine_branch, validate, InterpolationProblem,
//!     QuadratureConfig, SignVector, SolverConfig, ValidationConfig, Vec2,
//! };
//!
//! let problem = InterpolationProblem::new(
//!     vec![0.0, 0.5, 1.1],
//!     vec![Vec2::new(0.0, 0.0), Vec2::new(0.48, 0.12), Vec2::new(1.0, 0.0)],
//! )
//! .unwrap();
//! let chord = validate(&problem, &ValidationConfig::default()).unwrap();
//! let quad = QuadratureConfig::default();
//! let mut best: Option<spiral_spline::BranchResult> = None;
//! for sigma in SignVector::enumerate(problem.n()) {
//!     let mut branch = estimate_branch(&problem, &chord, sigma, &quad).unwrap();
//!     // branches without an exact interpolant at this spacing are skipped
//!     if refine_branch(&mut branch, &problem, &quad, &SolverConfig::default()).is_err() {
//!         continue;
//!     }
//!     if best.as_ref().map_or(true, |b| branch.selected_energy() < b.selected_energy()) {
//!         best = Some(branch);
//!     }
//! }
//! assert!(best.unwrap().converged);
//! ```

// indexed loops mirror the matrix and recurrence notation throughout
#![allow(clippy::needless_range_loop)]

mod branch;
mod curve;
mod error;
mod estimator;
mod extension;
mod geom;
mod optimizer;
mod problem;
mod quad;
mod refiner;
mod sign;
mod spline;
mod tridiag;
mod uv;

pub use branch::{estimate_branch, refine_branch, BranchResult};
pub use curve::{
    elastic_energy, eval_curve, eval_tilde_curve, interpolation_residual, segment_displacement,
};
pub use error::{Error, Result};
pub use estimator::{
    estimate, estimate_b_stage1, estimate_b_stage2, estimate_n2, recover_cda, rho_endpoints,
    rho_interior, RhoVector,
};
pub use extension::{slope_defect, ConstantFamily, Extension, QuarticFamily};
pub use geom::Vec2;
pub use optimizer::{optimize_branch, optimize_energy};
pub use problem::{unwrap_angles, validate, ChordData, InterpolationProblem, ValidationConfig};
pub use quad::{composite_simpson, QuadratureConfig};
pub use refiner::{refine, RefineDiagnostics, SolverConfig};
pub use sign::SignVector;
pub use spline::{AngleSpline, SegmentCoeffs};
pub use tridiag::TridiagonalSystem;
pub use uv::{coeffs_from_uv, coeffs_from_uvp, uv_from_coeffs, ExtendedUvp, UVParams};
