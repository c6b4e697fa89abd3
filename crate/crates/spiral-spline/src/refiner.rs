//! Gap closing: solve the interpolation conditions exactly.
//!
//! In the reduced coordinates the conditions are a square nonlinear system
//! `z_j(u, v) = Y_j - Y_{j-1}`; it is solved by damped Newton with a
//! central-difference Jacobian, starting from the branch estimate. The
//! segment integrals are discretized by composite Simpson; after the solve
//! converges, the residual is re-measured at four times the resolution and
//! the subinterval count doubles until that measurement meets the
//! tolerance or hits the cap.

use crate::curve::{interpolation_residual, segment_displacement_with};
use crate::error::{Error, Result};
use crate::problem::InterpolationProblem;
use crate::quad::QuadratureConfig;
use crate::spline::AngleSpline;
use crate::uv::{coeffs_from_uv, uv_from_coeffs, UVParams};

/// Newton solver knobs.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Target for the high-resolution interpolation residual (length units).
    pub residual_tol: f64,
    /// Newton iteration budget per quadrature level.
    pub max_iterations: usize,
    /// Central-difference step for the Jacobian.
    pub fd_step: f64,
    /// Backtracking factor in (0, 1).
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-10,
            max_iterations: 50,
            fd_step: 1e-6,
            damping: 0.5,
        }
    }
}

const MAX_BACKTRACKS: usize = 20;

/// Outcome bookkeeping for a refinement run.
#[derive(Debug, Clone, Copy)]
pub struct RefineDiagnostics {
    /// Newton iterations summed over quadrature levels.
    pub iterations: usize,
    /// High-resolution interpolation residual of the result.
    pub residual: f64,
    /// Simpson subintervals per segment at the final level.
    pub subintervals: usize,
    pub converged: bool,
}

pub(crate) struct NewtonOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Damped Newton on `f(x) = 0` with max-norm control: steps are halved
/// until the residual strictly decreases, so accepted iterates never get
/// worse.
pub(crate) fn newton_solve(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: Vec<f64>,
    cfg: &SolverConfig,
) -> Result<NewtonOutcome> {
    let dim = x0.len();
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x = x0;
    let mut fx = f(&x);
    let mut res = norm(&fx);
    let mut iterations = 0;
    while res > cfg.residual_tol && iterations < cfg.max_iterations {
        // central-difference Jacobian, column by column
        let mut jac = vec![vec![0.0; dim]; dim];
        for col in 0..dim {
            let h = cfg.fd_step;
            let mut xp = x.clone();
            xp[col] += h;
            let fp = f(&xp);
            xp[col] = x[col] - h;
            let fm = f(&xp);
            for row in 0..dim {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let neg_fx: Vec<f64> = fx.iter().map(|v| -v).collect();
        let step = solve_dense(jac, neg_fx).ok_or(Error::SingularJacobian)?;

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_BACKTRACKS {
            let trial: Vec<f64> = x
                .iter()
                .zip(&step)
                .map(|(xi, si)| xi + scale * si)
                .collect();
            let ft = f(&trial);
            let rt = norm(&ft);
            if rt < res {
                x = trial;
                fx = ft;
                res = rt;
                accepted = true;
                break;
            }
            scale *= cfg.damping;
        }
        iterations += 1;
        if !accepted {
            break; // stalled; caller decides what to do with the best iterate
        }
    }
    Ok(NewtonOutcome {
        x,
        iterations,
        residual: res,
        converged: res <= cfg.residual_tol,
    })
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            if m == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn system_residual(
    x: &[f64],
    knots: &[f64],
    targets: &[(f64, f64)],
    subintervals: usize,
) -> Vec<f64> {
    let uv = UVParams::from_flat(x);
    let spline = coeffs_from_uv(&uv, knots);
    let n = uv.n();
    let mut out = Vec::with_capacity(2 * n);
    for (j, &(tx, ty)) in targets.iter().enumerate().take(n) {
        let z = segment_displacement_with(&spline, j, subintervals);
        out.push(z.x - tx);
        out.push(z.y - ty);
    }
    out
}

/// Close the interpolation gaps of a branch estimate.
pub fn refine(
    estimate: &AngleSpline,
    problem: &InterpolationProblem,
    quad: &QuadratureConfig,
    solver: &SolverConfig,
) -> Result<(AngleSpline, RefineDiagnostics)> {
    quad.assert_valid();
    let knots = estimate.knots().to_vec();
    let n = estimate.n();
    let targets: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let d = problem.displacement(j);
            (d.x, d.y)
        })
        .collect();

    let mut x = uv_from_coeffs(estimate)?.to_flat();
    let mut total_iterations = 0;
    let mut m = quad.simpson_subintervals;

    let measure = |x: &[f64], m: usize| {
        let spline = coeffs_from_uv(&UVParams::from_flat(x), &knots);
        let residual = interpolation_residual(
            &spline,
            problem,
            &QuadratureConfig {
                simpson_subintervals: m,
                max_subintervals: quad.max_subintervals,
            },
        );
        (spline, residual)
    };

    // already interpolating to tolerance (checked at the cap resolution):
    // nothing to solve
    let (spline, measured) = measure(&x, quad.max_subintervals);
    if measured <= solver.residual_tol {
        return Ok((
            spline,
            RefineDiagnostics {
                iterations: 0,
                residual: measured,
                subintervals: m,
                converged: true,
            },
        ));
    }

    // solve the discretized system one digit tighter than the target so
    // the high-resolution measurement is not dominated by the solve itself
    let inner = SolverConfig {
        residual_tol: solver.residual_tol * 0.1,
        ..*solver
    };
    loop {
        let residual_fn = |y: &[f64]| system_residual(y, &knots, &targets, m);
        let outcome = newton_solve(&residual_fn, x, &inner)?;
        total_iterations += outcome.iterations;
        x = outcome.x;

        let (spline, measured) = measure(&x, m);
        if outcome.converged && measured <= solver.residual_tol {
            return Ok((
                spline,
                RefineDiagnostics {
                    iterations: total_iterations,
                    residual: measured,
                    subintervals: m,
                    converged: true,
                },
            ));
        }
        if m >= quad.max_subintervals {
            return Err(Error::NoConvergence {
                residual: measured,
                iterations: total_iterations,
                best: Box::new(spline),
            });
        }
        // a stalled coarse level is retried at finer quadrature from the
        // best iterate so far
        m *= 2;
    }
}
