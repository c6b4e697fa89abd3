//! Piecewise angle functions.
//!
//! An [`AngleSpline`] holds the turning angle of a unit-speed planar curve
//! as one cubic `a_j + b_j s + c_j s^2 + d_j s^3` per segment in the local
//! time `s = t - T_{j-1}`, plus an optional quartic extension term. The
//! natural splines produced by the estimator and refiner satisfy
//!
//!   a_{j+1} = a_j + b_j L_j + c_j L_j^2 + d_j L_j^3
//!   b_{j+1} = b_j + 2 c_j L_j + 3 d_j L_j^2
//!   b_1 = 0 = b_n + 2 c_n L_n + 3 d_n L_n^2
//!
//! so the angle is C^1 with zero slope at both ends, which makes the curve
//! C^2 with vanishing end curvature.

use crate::error::{Error, Result};
use crate::extension::Extension;

/// Cubic coefficients for one segment, in segment-local time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegmentCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SegmentCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        SegmentCoeffs { a, b, c, d }
    }

    fn value(&self, s: f64) -> f64 {
        self.a + s * (self.b + s * (self.c + s * self.d))
    }

    fn slope(&self, s: f64) -> f64 {
        self.b + s * (2.0 * self.c + s * 3.0 * self.d)
    }
}

#[derive(Debug, Clone)]
pub struct AngleSpline {
    knots: Vec<f64>,
    segments: Vec<SegmentCoeffs>,
    extension: Option<Extension>,
}

impl AngleSpline {
    pub fn new(knots: Vec<f64>, segments: Vec<SegmentCoeffs>) -> Self {
        assert_eq!(knots.len(), segments.len() + 1, "one segment per knot gap");
        AngleSpline {
            knots,
            segments,
            extension: None,
        }
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        assert_eq!(extension.params.len(), self.segments.len());
        self.extension = Some(extension);
        self
    }

    pub fn n(&self) -> usize {
        self.segments.len()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn segments(&self) -> &[SegmentCoeffs] {
        &self.segments
    }

    pub fn extension(&self) -> Option<&Extension> {
        self.extension.as_ref()
    }

    pub fn start_time(&self) -> f64 {
        self.knots[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.knots.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Segment owning `t`: segments are left-closed right-open, the last
    /// one closed. Returns the 0-based index and the local time.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (start, end) = (self.start_time(), self.end_time());
        if t < start || t > end {
            return Err(Error::OutOfDomain { t, start, end });
        }
        let idx = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.n() - 1),
            Err(i) => i - 1,
        };
        Ok((idx, t - self.knots[idx]))
    }

    /// Angle on segment `j` at local time `s`, including any extension.
    pub fn theta_local(&self, j: usize, s: f64) -> f64 {
        let mut v = self.segments[j].value(s);
        if let Some(ext) = &self.extension {
            v += ext.term(j, s);
        }
        v
    }

    /// Angle slope on segment `j` at local time `s`.
    pub fn theta_prime_local(&self, j: usize, s: f64) -> f64 {
        let mut v = self.segments[j].slope(s);
        if let Some(ext) = &self.extension {
            v += ext.term_slope(j, s);
        }
        v
    }

    /// Turning angle at global time `t`.
    pub fn theta(&self, t: f64) -> Result<f64> {
        let (j, s) = self.locate(t)?;
        Ok(self.theta_local(j, s))
    }

    /// Turning rate (signed curvature of the curve) at global time `t`.
    pub fn theta_prime(&self, t: f64) -> Result<f64> {
        let (j, s) = self.locate(t)?;
        Ok(self.theta_prime_local(j, s))
    }

    /// Largest gap in the value and slope matching conditions across
    /// interior knots, extension included.
    pub fn continuity_defect(&self) -> (f64, f64) {
        let lengths = self.lengths();
        let mut c0: f64 = 0.0;
        let mut c1: f64 = 0.0;
        for j in 0..self.n() - 1 {
            let l = lengths[j];
            c0 = c0.max((self.theta_local(j, l) - self.theta_local(j + 1, 0.0)).abs());
            c1 = c1.max((self.theta_prime_local(j, l) - self.theta_prime_local(j + 1, 0.0)).abs());
        }
        (c0, c1)
    }

    /// Slope magnitudes at the two ends; both are zero for natural splines.
    pub fn end_slopes(&self) -> (f64, f64) {
        let lengths = self.lengths();
        let n = self.n();
        (
            self.theta_prime_local(0, 0.0),
            self.theta_prime_local(n - 1, lengths[n - 1]),
        )
    }
}
