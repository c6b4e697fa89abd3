//! Per-branch bookkeeping for the estimate / refine / optimize pipeline.

use crate::curve::{elastic_energy, interpolation_residual};
use crate::error::Result;
use crate::estimator::estimate;
use crate::problem::{ChordData, InterpolationProblem};
use crate::quad::QuadratureConfig;
use crate::refiner::{refine, SolverConfig};
use crate::sign::SignVector;
use crate::spline::AngleSpline;

/// Everything computed for one sign vector.
#[derive(Debug, Clone)]
pub struct BranchResult {
    pub sigma: SignVector,
    pub estimate: AngleSpline,
    pub estimate_energy: f64,
    pub refined: Option<AngleSpline>,
    pub refined_energy: Option<f64>,
    pub optimized: Option<AngleSpline>,
    pub optimized_energy: Option<f64>,
    /// Interpolation residual of the most-processed spline.
    pub residual: f64,
    /// Newton iterations spent by refinement (0 until it runs).
    pub iterations: usize,
    /// Whether the last solve met its tolerance (false until one runs).
    pub converged: bool,
}

impl BranchResult {
    /// The furthest-processed spline.
    pub fn selected_spline(&self) -> &AngleSpline {
        self.optimized
            .as_ref()
            .or(self.refined.as_ref())
            .unwrap_or(&self.estimate)
    }

    /// Energy of the furthest-processed spline.
    pub fn selected_energy(&self) -> f64 {
        self.optimized_energy
            .or(self.refined_energy)
            .unwrap_or(self.estimate_energy)
    }
}

/// Estimate one branch and measure its knot gaps.
pub fn estimate_branch(
    problem: &InterpolationProblem,
    chord: &ChordData,
    sigma: SignVector,
    quad: &QuadratureConfig,
) -> Result<BranchResult> {
    let spline = estimate(chord, &sigma)?;
    let energy = elastic_energy(&spline, quad);
    let residual = interpolation_residual(&spline, problem, quad);
    Ok(BranchResult {
        sigma,
        estimate: spline,
        estimate_energy: energy,
        refined: None,
        refined_energy: None,
        optimized: None,
        optimized_energy: None,
        residual,
        iterations: 0,
        converged: false,
    })
}

/// Refine a branch in place.
pub fn refine_branch(
    result: &mut BranchResult,
    problem: &InterpolationProblem,
    quad: &QuadratureConfig,
    solver: &SolverConfig,
) -> Result<()> {
    let (refined, diag) = refine(&result.estimate, problem, quad, solver)?;
    result.refined_energy = Some(elastic_energy(&refined, quad));
    result.refined = Some(refined);
    result.residual = diag.residual;
    result.iterations = diag.iterations;
    result.converged = diag.converged;
    Ok(())
}
