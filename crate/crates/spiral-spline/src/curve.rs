//! Reconstruction of the planar curve from its turning angle, and the
//! functionals defined on it.
//!
//! The curve through `start` is `y(t) = start + integral of (cos theta,
//! sin theta)`; its velocity is a unit vector by construction. The
//! re-anchored variant restarts the integral from the matching waypoint on
//! every segment, so it interpolates exactly but may jump at the knots
//! until the gaps are closed.

use crate::error::Result;
use crate::geom::Vec2;
use crate::problem::InterpolationProblem;
use crate::quad::{composite_simpson, QuadratureConfig};
use crate::spline::AngleSpline;

/// Simpson approximation of the displacement over segment `j` (0-based),
/// `integral_0^{L_j} (cos theta_j, sin theta_j) ds`.
pub fn segment_displacement(spline: &AngleSpline, j: usize, quad: &QuadratureConfig) -> Vec2 {
    segment_displacement_with(spline, j, quad.simpson_subintervals)
}

pub(crate) fn segment_displacement_with(spline: &AngleSpline, j: usize, m: usize) -> Vec2 {
    let lengths = spline.lengths();
    partial_displacement_with(spline, j, lengths[j], m)
}

/// Displacement over `[0, s]` of segment `j`.
fn partial_displacement_with(spline: &AngleSpline, j: usize, s: f64, m: usize) -> Vec2 {
    if s == 0.0 {
        return Vec2::ZERO;
    }
    Vec2::new(
        composite_simpson(|u| spline.theta_local(j, u).cos(), 0.0, s, m),
        composite_simpson(|u| spline.theta_local(j, u).sin(), 0.0, s, m),
    )
}

/// Point of the curve anchored at `start`, at global time `t`.
pub fn eval_curve(
    spline: &AngleSpline,
    start: Vec2,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<Vec2> {
    let (seg, s) = spline.locate(t)?;
    let m = quad.simpson_subintervals;
    let mut point = start;
    for j in 0..seg {
        point += segment_displacement_with(spline, j, m);
    }
    Ok(point + partial_displacement_with(spline, seg, s, m))
}

/// Point of the re-anchored curve: on segment `j` the integral restarts at
/// waypoint `j - 1`, so every knot is hit exactly from the right.
pub fn eval_tilde_curve(
    spline: &AngleSpline,
    problem: &InterpolationProblem,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<Vec2> {
    let (seg, s) = spline.locate(t)?;
    let anchor = problem.waypoints()[seg];
    Ok(anchor + partial_displacement_with(spline, seg, s, quad.simpson_subintervals))
}

/// Bending energy `integral theta'(t)^2 dt` of the unit-speed curve.
///
/// Plain cubic segments integrate in closed form; segments with a quartic
/// extension fall back to Simpson at the configured resolution.
pub fn elastic_energy(spline: &AngleSpline, quad: &QuadratureConfig) -> f64 {
    let lengths = spline.lengths();
    let mut total = 0.0;
    for (j, l) in lengths.iter().enumerate() {
        if spline.extension().is_some() {
            total += composite_simpson(
                |s| {
                    let d = spline.theta_prime_local(j, s);
                    d * d
                },
                0.0,
                *l,
                quad.simpson_subintervals,
            );
        } else {
            let seg = spline.segments()[j];
            let (b, c, d) = (seg.b, seg.c, seg.d);
            // integral of (b + 2 c s + 3 d s^2)^2
            total += b * b * l
                + 2.0 * b * c * l.powi(2)
                + (4.0 * c * c + 6.0 * b * d) * l.powi(3) / 3.0
                + 3.0 * c * d * l.powi(4)
                + 1.8 * d * d * l.powi(5);
        }
    }
    total
}

/// Worst gap `max_j |y(T_j) - Y_j|`, measured with quadrature at four
/// times the solver resolution.
pub fn interpolation_residual(
    spline: &AngleSpline,
    problem: &InterpolationProblem,
    quad: &QuadratureConfig,
) -> f64 {
    let m = 4 * quad.simpson_subintervals;
    let mut point = problem.waypoints()[0];
    let mut worst: f64 = 0.0;
    for j in 0..spline.n() {
        point += segment_displacement_with(spline, j, m);
        worst = worst.max((point - problem.waypoints()[j + 1]).norm());
    }
    worst
}
