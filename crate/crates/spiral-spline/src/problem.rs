//! Interpolation data and chord preprocessing.
//!
//! A problem is a list of strictly increasing times and one waypoint per
//! time. Validation derives per-segment chord quantities: durations `L_j`,
//! normalized chords `q_j = (Y_j - Y_{j-1}) / L_j` with ratios
//! `r_j = |q_j| in (0, 1)`, unwrapped chord angles `omega_j`, and the
//! discrete curvatures `k_j = sqrt(12 (1 - r_j^2)) / (L_j r_j)`.

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Times and waypoints to interpolate with a unit-speed curve.
#[derive(Debug, Clone)]
pub struct InterpolationProblem {
    times: Vec<f64>,
    waypoints: Vec<Vec2>,
}

impl InterpolationProblem {
    /// Requires equal counts, at least three samples and strictly
    /// increasing times. Feasibility of the chords themselves is checked
    /// by [`validate`], not here.
    pub fn new(times: Vec<f64>, waypoints: Vec<Vec2>) -> Result<Self> {
        if times.len() != waypoints.len() || times.len() < 3 {
            return Err(Error::CountMismatch {
                times: times.len(),
                points: waypoints.len(),
            });
        }
        for i in 1..times.len() {
            // negated form also rejects NaN times
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(times[i] > times[i - 1]) {
                return Err(Error::NonMonotoneTimes { index: i });
            }
        }
        Ok(InterpolationProblem { times, waypoints })
    }

    /// Number of segments.
    pub fn n(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn waypoints(&self) -> &[Vec2] {
        &self.waypoints
    }

    /// Segment durations `L_j = T_j - T_{j-1}`.
    pub fn lengths(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Waypoint displacement over segment `j` (0-based).
    pub fn displacement(&self, j: usize) -> Vec2 {
        self.waypoints[j + 1] - self.waypoints[j]
    }
}

/// Admissibility knobs. The theory only asks for a positive curvature
/// floor and comparable segment durations; none of the constants are
/// pinned numerically, so they are configuration.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    /// Reject segments whose discrete curvature falls below this.
    pub curvature_floor: f64,
    /// Reject chord ratios at or above this guard (strictly below 1).
    pub chord_radius_ceiling: f64,
    /// Allowed `L_j / mean(L)` band.
    pub min_gap_ratio: f64,
    pub max_gap_ratio: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            curvature_floor: 1e-3,
            chord_radius_ceiling: 1.0 - 1e-12,
            min_gap_ratio: 0.1,
            max_gap_ratio: 10.0,
        }
    }
}

/// Per-segment chord quantities derived from a validated problem.
#[derive(Debug, Clone)]
pub struct ChordData {
    knots: Vec<f64>,
    lengths: Vec<f64>,
    chords: Vec<Vec2>,
    radii: Vec<f64>,
    angles: Vec<f64>,
    curvatures: Vec<f64>,
}

impl ChordData {
    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    /// The times `T_0..T_n` the data was built from.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn chords(&self) -> &[Vec2] {
        &self.chords
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Unwrapped chord angles, `|angles[j+1] - angles[j]| <= pi`.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }
}

/// Recover angles for the chords so that each `q_j = r_j (cos w_j, sin w_j)`
/// with `w_1` principal in (-pi, pi] and every subsequent angle the lift
/// nearest its predecessor. A tie (exactly pi apart) resolves upward.
pub fn unwrap_angles(chords: &[Vec2]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(chords.len());
    for (j, q) in chords.iter().enumerate() {
        if q.norm() == 0.0 {
            return Err(Error::ZeroChord { segment: j + 1 });
        }
        let principal = q.angle();
        if let Some(&prev) = out.last() {
            let two_pi = 2.0 * std::f64::consts::PI;
            let turns = ((prev - principal) / two_pi + 0.5).floor();
            out.push(principal + two_pi * turns);
        } else {
            out.push(principal);
        }
    }
    Ok(out)
}

/// Check the problem against the admissibility knobs and build chord data.
pub fn validate(problem: &InterpolationProblem, cfg: &ValidationConfig) -> Result<ChordData> {
    assert!(
        cfg.curvature_floor > 0.0,
        "curvature floor must be positive"
    );
    assert!(
        cfg.chord_radius_ceiling > 0.0 && cfg.chord_radius_ceiling < 1.0,
        "chord radius ceiling must lie in (0, 1)"
    );
    assert!(
        0.0 < cfg.min_gap_ratio && cfg.min_gap_ratio < cfg.max_gap_ratio,
        "gap ratio band must be positive and ordered"
    );
    let n = problem.n();
    let lengths = problem.lengths();
    let mean_len = lengths.iter().sum::<f64>() / n as f64;

    let mut chords = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    let mut curvatures = Vec::with_capacity(n);
    for j in 0..n {
        let gap = lengths[j] / mean_len;
        if gap < cfg.min_gap_ratio || gap > cfg.max_gap_ratio {
            return Err(Error::GapRatio {
                segment: j + 1,
                ratio: gap,
                min: cfg.min_gap_ratio,
                max: cfg.max_gap_ratio,
            });
        }
        let q = problem.displacement(j) * (1.0 / lengths[j]);
        let r = q.norm();
        if r == 0.0 {
            return Err(Error::ZeroChord { segment: j + 1 });
        }
        if r >= cfg.chord_radius_ceiling {
            return Err(Error::ChordTooLong {
                segment: j + 1,
                ratio: r,
            });
        }
        let k = (12.0 * (1.0 - r * r)).sqrt() / (lengths[j] * r);
        if k < cfg.curvature_floor {
            return Err(Error::CurvatureTooSmall {
                segment: j + 1,
                curvature: k,
                floor: cfg.curvature_floor,
            });
        }
        chords.push(q);
        radii.push(r);
        curvatures.push(k);
    }
    let angles = unwrap_angles(&chords)?;
    Ok(ChordData {
        knots: problem.times().to_vec(),
        lengths,
        chords,
        radii,
        angles,
        curvatures,
    })
}
