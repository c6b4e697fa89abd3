//! Composite Simpson quadrature.

/// Subinterval counts used when integrating along spline segments.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Even subintervals per segment for the solver's integrals.
    pub simpson_subintervals: usize,
    /// Ceiling for the refinement loop that doubles the count.
    pub max_subintervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            simpson_subintervals: 4,
            max_subintervals: 256,
        }
    }
}

impl QuadratureConfig {
    pub fn assert_valid(&self) {
        assert!(
            self.simpson_subintervals >= 4
                && self.simpson_subintervals.is_multiple_of(2)
                && self.max_subintervals >= self.simpson_subintervals
                && self.max_subintervals.is_multiple_of(2),
            "subinterval counts must be even, at least 4, and capped consistently"
        );
    }
}

/// Composite Simpson rule with `m` (even) subintervals on [a, b].
pub fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    debug_assert!(m >= 2 && m.is_multiple_of(2));
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
