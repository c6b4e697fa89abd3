//! Energy minimization over the extended spline family.
//!
//! The quartic parameters `p` enlarge the family; interpolation still pins
//! (u, v) once `p` is fixed, because the constraints form a square system
//! in (u, v). The optimizer therefore walks in `p` alone: every probe
//! restores feasibility with the refiner's damped Newton (warm-started
//! from the previous solution) and the energy is read off the restored
//! spline. Descent is quasi-Newton (BFGS) with a backtracking line search,
//! so accepted iterates stay feasible and the energy never increases; with
//! `p` frozen the seed comes back unchanged.

use std::sync::Arc;

use crate::branch::BranchResult;
use crate::curve::{elastic_energy, interpolation_residual, segment_displacement_with};
use crate::error::{Error, Result};
use crate::extension::QuarticFamily;
use crate::problem::InterpolationProblem;
use crate::quad::QuadratureConfig;
use crate::refiner::{newton_solve, SolverConfig};
use crate::spline::AngleSpline;
use crate::uv::{coeffs_from_uvp, uv_from_coeffs, ExtendedUvp, UVParams};

/// Simpson subintervals for reported energies of extended splines.
const ENERGY_SUBINTERVALS: usize = 128;
/// Central-difference step for the reduced gradient in `p`.
const GRADIENT_STEP: f64 = 1e-5;
/// Reduced-gradient stopping threshold.
const GRADIENT_TOL: f64 = 1e-5;
const MAX_OUTER_ITERATIONS: usize = 200;
const MAX_LINE_HALVINGS: usize = 30;

struct Reduced<'a> {
    family: &'a Arc<dyn QuarticFamily>,
    knots: Vec<f64>,
    targets: Vec<(f64, f64)>,
    solver: SolverConfig,
    subintervals: usize,
}

impl<'a> Reduced<'a> {
    fn spline_at(&self, uv_flat: &[f64], p: &[Vec<f64>]) -> AngleSpline {
        let uvp = ExtendedUvp {
            uv: UVParams::from_flat(uv_flat),
            params: p.to_vec(),
        };
        coeffs_from_uvp(&uvp, &self.knots, self.family)
    }

    fn constraint_residual(&self, uv_flat: &[f64], p: &[Vec<f64>]) -> Vec<f64> {
        let spline = self.spline_at(uv_flat, p);
        let mut out = Vec::with_capacity(2 * self.targets.len());
        for (j, &(tx, ty)) in self.targets.iter().enumerate() {
            let z = segment_displacement_with(&spline, j, self.subintervals);
            out.push(z.x - tx);
            out.push(z.y - ty);
        }
        out
    }

    /// Restore feasibility at fixed `p`, warm-started from `uv`.
    fn restore(&self, uv: &[f64], p: &[Vec<f64>]) -> Result<Vec<f64>> {
        let f = |x: &[f64]| self.constraint_residual(x, p);
        let inner = SolverConfig {
            residual_tol: self.solver.residual_tol * 0.1,
            ..self.solver
        };
        let outcome = newton_solve(&f, uv.to_vec(), &inner)?;
        if !outcome.converged {
            return Err(Error::NoConvergence {
                residual: outcome.residual,
                iterations: outcome.iterations,
                best: Box::new(self.spline_at(&outcome.x, p)),
            });
        }
        Ok(outcome.x)
    }

    fn energy(&self, uv: &[f64], p: &[Vec<f64>]) -> f64 {
        let spline = self.spline_at(uv, p);
        elastic_energy(
            &spline,
            &QuadratureConfig {
                simpson_subintervals: ENERGY_SUBINTERVALS,
                max_subintervals: ENERGY_SUBINTERVALS,
            },
        )
    }
}

fn unflatten(x: &[f64], blocks: usize, q: usize) -> Vec<Vec<f64>> {
    (0..blocks)
        .map(|j| x[j * q..(j + 1) * q].to_vec())
        .collect()
}

/// Minimize the bending energy over the extended family, seeded from a
/// refined branch with the quartic parameters at zero.
///
/// On success the returned spline interpolates to the solver tolerance and
/// its energy does not exceed the seed's.
pub fn optimize_energy(
    seed: &BranchResult,
    problem: &InterpolationProblem,
    family: &Arc<dyn QuarticFamily>,
    quad: &QuadratureConfig,
    solver: &SolverConfig,
) -> Result<(AngleSpline, f64)> {
    quad.assert_valid();
    let refined = match (&seed.refined, seed.converged) {
        (Some(spline), true) => spline,
        _ => return Err(Error::SeedNotConverged),
    };
    let n = refined.n();
    let q = family.param_dim();

    // pick a quadrature level fine enough that the restored spline meets
    // the residual tolerance under the 4x high-resolution measurement
    let mut subintervals = quad.simpson_subintervals;
    let uv0 = uv_from_coeffs(refined)?.to_flat();
    let zero_p = vec![vec![0.0; q]; n];
    let mut reduced = Reduced {
        family,
        knots: refined.knots().to_vec(),
        targets: (0..n)
            .map(|j| {
                let d = problem.displacement(j);
                (d.x, d.y)
            })
            .collect(),
        solver: *solver,
        subintervals,
    };
    let mut uv_seed = uv0;
    loop {
        reduced.subintervals = subintervals;
        uv_seed = reduced.restore(&uv_seed, &zero_p)?;
        let spline = reduced.spline_at(&uv_seed, &zero_p);
        let measured = interpolation_residual(
            &spline,
            problem,
            &QuadratureConfig {
                simpson_subintervals: subintervals,
                max_subintervals: quad.max_subintervals,
            },
        );
        if measured <= solver.residual_tol {
            break;
        }
        if subintervals >= quad.max_subintervals {
            return Err(Error::ConstraintViolated {
                residual: measured,
                tol: solver.residual_tol,
            });
        }
        subintervals *= 2;
    }

    let seed_energy = reduced.energy(&uv_seed, &zero_p);
    let dim = n * q;

    // reduced objective with feasibility restoration; None when the
    // constraint solve fails for that parameter point
    let eval = |p_flat: &[f64], warm: &[f64]| -> Option<(f64, Vec<f64>)> {
        let p = unflatten(p_flat, n, q);
        let uv = reduced.restore(warm, &p).ok()?;
        Some((reduced.energy(&uv, &p), uv))
    };
    let gradient = |p_flat: &[f64], warm: &[f64]| -> Option<Vec<f64>> {
        let mut g = vec![0.0; dim];
        for i in 0..dim {
            let mut xp = p_flat.to_vec();
            xp[i] += GRADIENT_STEP;
            let (fp, _) = eval(&xp, warm)?;
            xp[i] = p_flat[i] - GRADIENT_STEP;
            let (fm, _) = eval(&xp, warm)?;
            g[i] = (fp - fm) / (2.0 * GRADIENT_STEP);
        }
        Some(g)
    };

    let mut p = vec![0.0; dim];
    let mut uv = uv_seed.clone();
    let mut energy = seed_energy;
    let mut inv_hessian = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        inv_hessian[i][i] = 1.0;
    }
    let mut grad = match gradient(&p, &uv) {
        Some(g) => g,
        None => return polish(&mut reduced, problem, quad, uv_seed, &zero_p),
    };

    for _ in 0..MAX_OUTER_ITERATIONS {
        let gnorm = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gnorm <= GRADIENT_TOL {
            break;
        }
        let mut dir = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                dir[i] -= inv_hessian[i][j] * grad[j];
            }
        }
        let slope: f64 = dir.iter().zip(&grad).map(|(d, g)| d * g).sum();
        if slope >= 0.0 {
            // reset a non-descent quasi-Newton state to steepest descent
            for i in 0..dim {
                for j in 0..dim {
                    inv_hessian[i][j] = if i == j { 1.0 } else { 0.0 };
                }
                dir[i] = -grad[i];
            }
        }
        let slope: f64 = dir.iter().zip(&grad).map(|(d, g)| d * g).sum();

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_LINE_HALVINGS {
            let trial: Vec<f64> = p.iter().zip(&dir).map(|(pi, di)| pi + alpha * di).collect();
            if let Some((e, uv_trial)) = eval(&trial, &uv) {
                if e <= energy + 1e-4 * alpha * slope {
                    accepted = Some((trial, e, uv_trial));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((p_new, e_new, uv_new)) = accepted else {
            break;
        };
        let g_new = match gradient(&p_new, &uv_new) {
            Some(g) => g,
            None => {
                p = p_new;
                energy = e_new;
                uv = uv_new;
                break;
            }
        };

        // BFGS update of the inverse Hessian
        let s: Vec<f64> = p_new.iter().zip(&p).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let s_norm: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * s_norm * y_norm {
            let rho = 1.0 / sy;
            let mut hy = vec![0.0; dim];
            for i in 0..dim {
                for j in 0..dim {
                    hy[i] += inv_hessian[i][j] * y[j];
                }
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..dim {
                for j in 0..dim {
                    inv_hessian[i][j] +=
                        (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        p = p_new;
        energy = e_new;
        uv = uv_new;
        grad = g_new;
    }

    if energy >= seed_energy {
        return polish(&mut reduced, problem, quad, uv_seed, &zero_p);
    }
    polish(&mut reduced, problem, quad, uv, &unflatten(&p, n, q))
}

/// Verify the result at high resolution, re-restoring at doubled
/// quadrature if the optimized spline turned out wigglier than the seed
/// calibration assumed.
fn polish(
    reduced: &mut Reduced,
    problem: &InterpolationProblem,
    quad: &QuadratureConfig,
    mut uv: Vec<f64>,
    p: &[Vec<f64>],
) -> Result<(AngleSpline, f64)> {
    loop {
        let spline = reduced.spline_at(&uv, p);
        let measured = interpolation_residual(
            &spline,
            problem,
            &QuadratureConfig {
                simpson_subintervals: reduced.subintervals,
                max_subintervals: quad.max_subintervals,
            },
        );
        if measured <= reduced.solver.residual_tol {
            let energy = reduced.energy(&uv, p);
            return Ok((spline, energy));
        }
        if reduced.subintervals >= quad.max_subintervals {
            return Err(Error::ConstraintViolated {
                residual: measured,
                tol: reduced.solver.residual_tol,
            });
        }
        reduced.subintervals *= 2;
        uv = reduced.restore(&uv, p)?;
    }
}

/// Optimize a branch in place.
pub fn optimize_branch(
    result: &mut BranchResult,
    problem: &InterpolationProblem,
    family: &Arc<dyn QuarticFamily>,
    quad: &QuadratureConfig,
    solver: &SolverConfig,
) -> Result<()> {
    let (spline, energy) = optimize_energy(result, problem, family, quad, solver)?;
    // report the residual at the cap resolution, not the solver's
    result.residual = interpolation_residual(
        &spline,
        problem,
        &QuadratureConfig {
            simpson_subintervals: quad.max_subintervals,
            max_subintervals: quad.max_subintervals,
        },
    );
    result.optimized = Some(spline);
    result.optimized_energy = Some(energy);
    Ok(())
}
