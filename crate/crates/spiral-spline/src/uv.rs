//! Reduced coordinates for the constraint manifold.
//!
//! A natural C^1 cubic angle spline on n segments has 4n coefficients tied
//! by 2n linear conditions. The 2n-dimensional chart used here is
//!
//!   v_1 = a_1,            v_j = b_j L_j   (j >= 2)
//!   u_j = a_{j+1} (j <= n-1),   u_n = d_n L_n^3
//!
//! and its inverse reconstructs all coefficients so that the continuity and
//! end conditions hold identically, whatever (u, v) is. Interpolation then
//! becomes a square system in (u, v), which is what the refiner solves.
//! The extended chart appends one parameter block per segment for the
//! quartic terms and corrects c_j, d_j so the identities keep holding.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extension::{Extension, QuarticFamily};
use crate::spline::{AngleSpline, SegmentCoeffs};

#[derive(Debug, Clone, PartialEq)]
pub struct UVParams {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl UVParams {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len());
        UVParams { u, v }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Flat layout `[u, v]` used by the solvers.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut x = self.u.clone();
        x.extend_from_slice(&self.v);
        x
    }

    pub fn from_flat(x: &[f64]) -> Self {
        assert!(x.len().is_multiple_of(2));
        let n = x.len() / 2;
        UVParams {
            u: x[..n].to_vec(),
            v: x[n..].to_vec(),
        }
    }
}

/// Extract the reduced coordinates from a plain cubic spline that sits on
/// the constraint manifold.
pub fn uv_from_coeffs(spline: &AngleSpline) -> Result<UVParams> {
    if spline.extension().is_some() {
        return Err(Error::ExtensionPresent);
    }
    let (c0, c1) = spline.continuity_defect();
    let (b_start, b_end) = spline.end_slopes();
    let defect = c0.max(c1).max(b_start.abs()).max(b_end.abs());
    if defect > 1e-8 {
        return Err(Error::ContinuityViolated { knot: 0, defect });
    }
    let n = spline.n();
    let lengths = spline.lengths();
    let segs = spline.segments();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    v[0] = segs[0].a;
    for j in 1..n {
        v[j] = segs[j].b * lengths[j];
    }
    for j in 0..n - 1 {
        u[j] = segs[j + 1].a;
    }
    u[n - 1] = segs[n - 1].d * lengths[n - 1].powi(3);
    Ok(UVParams { u, v })
}

fn base_coeffs(uv: &UVParams, lengths: &[f64]) -> Vec<SegmentCoeffs> {
    let n = uv.n();
    assert_eq!(lengths.len(), n);
    assert!(n >= 2);
    let (u, v) = (&uv.u, &uv.v);
    let mut segs = Vec::with_capacity(n);
    for j in 0..n {
        let l = lengths[j];
        let a = if j == 0 { v[0] } else { u[j - 1] };
        let b = if j == 0 { 0.0 } else { v[j] / l };
        let (c, d) = if j == 0 {
            let ln = lengths[1];
            (
                -(l * v[1] - 3.0 * ln * (u[0] - v[0])) / (l * l * ln),
                (l * v[1] - 2.0 * ln * (u[0] - v[0])) / (l.powi(3) * ln),
            )
        } else if j < n - 1 {
            let ln = lengths[j + 1];
            (
                -(l * v[j + 1] + 2.0 * ln * v[j] - 3.0 * ln * (u[j] - u[j - 1])) / (l * l * ln),
                (l * v[j + 1] + ln * v[j] - 2.0 * ln * (u[j] - u[j - 1])) / (l.powi(3) * ln),
            )
        } else {
            (
                -(3.0 * u[n - 1] + v[n - 1]) / (2.0 * l * l),
                u[n - 1] / l.powi(3),
            )
        };
        segs.push(SegmentCoeffs::new(a, b, c, d));
    }
    segs
}

/// Rebuild the plain cubic spline from reduced coordinates; the result
/// satisfies the continuity and natural end conditions identically.
pub fn coeffs_from_uv(uv: &UVParams, knots: &[f64]) -> AngleSpline {
    let lengths: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    AngleSpline::new(knots.to_vec(), base_coeffs(uv, &lengths))
}

/// Reduced coordinates plus per-segment quartic parameters.
#[derive(Debug, Clone)]
pub struct ExtendedUvp {
    pub uv: UVParams,
    /// One block per segment, sized by the family.
    pub params: Vec<Vec<f64>>,
}

impl ExtendedUvp {
    pub fn seed(uv: UVParams, family: &dyn QuarticFamily) -> Self {
        let n = uv.n();
        ExtendedUvp {
            uv,
            params: vec![vec![0.0; family.param_dim()]; n],
        }
    }
}

/// Extended chart: quartic terms `F(p_j, t) t^4` with c/d corrections that
/// preserve C^1 continuity and the zero end slopes for any C^1 family.
pub fn coeffs_from_uvp(
    uvp: &ExtendedUvp,
    knots: &[f64],
    family: &Arc<dyn QuarticFamily>,
) -> AngleSpline {
    let lengths: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let n = uvp.uv.n();
    let mut segs = base_coeffs(&uvp.uv, &lengths);
    for (j, seg) in segs.iter_mut().enumerate() {
        let l = lengths[j];
        let p = &uvp.params[j];
        let f = family.value(p, l);
        let ft = family.slope(p, l);
        if j < n - 1 {
            seg.c += f * l * l + ft * l.powi(3);
            seg.d += -2.0 * f * l - ft * l * l;
        } else {
            seg.c += -2.0 * f * l * l - ft * l.powi(3) / 2.0;
            // d_n carries no correction
        }
    }
    AngleSpline::new(knots.to_vec(), segs)
        .with_extension(Extension::new(Arc::clone(family), uvp.params.clone()))
}
