//! Quartic extension families for the angle splines.
//!
//! A family supplies a C^1 function `F(p, t)` of a per-segment parameter
//! block `p` and the segment-local time `t`; the extended angle on segment
//! `j` is the cubic plus `F(p_j, t) t^4`. New families plug in through the
//! trait without touching the optimizer.

use std::sync::Arc;

pub trait QuarticFamily: Send + Sync {
    /// Short identifier used in serialized output.
    fn tag(&self) -> &'static str;

    /// Parameter block size per segment.
    fn param_dim(&self) -> usize;

    /// `F(p, t)`.
    fn value(&self, p: &[f64], t: f64) -> f64;

    /// `dF/dt (p, t)`.
    fn slope(&self, p: &[f64], t: f64) -> f64;
}

/// `F(p, t) = p_0`, one parameter per segment.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantFamily;

impl QuarticFamily for ConstantFamily {
    fn tag(&self) -> &'static str {
        "constant"
    }

    fn param_dim(&self) -> usize {
        1
    }

    fn value(&self, p: &[f64], _t: f64) -> f64 {
        p[0]
    }

    fn slope(&self, _p: &[f64], _t: f64) -> f64 {
        0.0
    }
}

/// Largest mismatch between the family's declared slope and a central
/// finite difference of its value, over the given probe points.
pub fn slope_defect(family: &dyn QuarticFamily, params: &[Vec<f64>], times: &[f64]) -> f64 {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for p in params {
        for &t in times {
            let fd = (family.value(p, t + h) - family.value(p, t - h)) / (2.0 * h);
            worst = worst.max((fd - family.slope(p, t)).abs());
        }
    }
    worst
}

/// Per-segment parameters bound to their family.
#[derive(Clone)]
pub struct Extension {
    pub family: Arc<dyn QuarticFamily>,
    /// One block of `family.param_dim()` reals per segment.
    pub params: Vec<Vec<f64>>,
}

impl Extension {
    pub fn new(family: Arc<dyn QuarticFamily>, params: Vec<Vec<f64>>) -> Self {
        let q = family.param_dim();
        assert!(
            params.iter().all(|p| p.len() == q),
            "every parameter block must have the family's dimension"
        );
        Extension { family, params }
    }

    /// `F(p_j, t) t^4` for segment `j` (0-based).
    pub fn term(&self, j: usize, t: f64) -> f64 {
        self.family.value(&self.params[j], t) * t.powi(4)
    }

    /// Derivative of `F(p_j, t) t^4` in `t`.
    pub fn term_slope(&self, j: usize, t: f64) -> f64 {
        let p = &self.params[j];
        self.family.slope(p, t) * t.powi(4) + 4.0 * self.family.value(p, t) * t.powi(3)
    }
}

impl std::fmt::Debug for Extension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Extension")
            .field("family", &self.family.tag())
            .field("params", &self.params)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_slope_is_consistent() {
        let params: Vec<Vec<f64>> = vec![vec![0.3], vec![-1.2], vec![0.0]];
        let times = [0.0, 0.17, 0.5, 0.93];
        assert!(slope_defect(&ConstantFamily, &params, &times) < 1e-6);
    }
}
