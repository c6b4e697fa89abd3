//! Closed-form coefficient estimates for one branch.
//!
//! For two segments the eight coefficients come from explicit formulas in
//! the chord quantities. For three or more segments the slopes `b_j` are
//! estimated in two passes of tridiagonal solves: the first pass needs no
//! branch signs and feeds the square-root terms `rho_j`, the second pass
//! refines the slopes with those terms on the right-hand side, and the
//! remaining coefficients follow by back-substitution:
//!
//!   interior:  c_j L_j   = (-3 b_{j+1} - 7 b_j) / 4 + 5 rho_j / 2
//!              d_j L_j^2 = 5 (b_{j+1} + b_j) / 6 - 5 rho_j / 3
//!   first:     c_1 L_1   = (-3 b_2 + 10 rho_1) / 4
//!              d_1 L_1^2 = 5 (b_2 - 2 rho_1) / 6
//!   last:      c_n L_n   = -(7 b_n - 10 rho_n) / 4
//!              d_n L_n^2 = 5 (b_n - 2 rho_n) / 6
//!   offsets:   a_j = omega_j - b_j L_j / 2 - c_j L_j^2 / 3 - d_j L_j^3 / 4
//!
//! The `rho` vector is computed once, after the first pass, and reused for
//! both the second-pass right-hand side and the back-substitution.

use crate::error::{Error, Result};
use crate::problem::ChordData;
use crate::sign::SignVector;
use crate::spline::{AngleSpline, SegmentCoeffs};
use crate::tridiag::TridiagonalSystem;

/// Discriminants at or below this are treated as infeasible for the branch.
const DISCRIMINANT_FLOOR: f64 = 1e-14;

/// Signed square-root terms, one per segment, with the raw discriminants
/// kept for diagnostics.
#[derive(Debug, Clone)]
pub struct RhoVector {
    values: Vec<f64>,
    discriminants: Vec<f64>,
}

impl RhoVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Quantity under each square root: `1 - k^2 L^2 / 20` at the two ends,
    /// `k^2 (1 - k^2 L^2 / 20) - (b_{j+1} - b_j)^2 / 60` in the interior.
    pub fn discriminants(&self) -> &[f64] {
        &self.discriminants
    }
}

fn end_rho(k: f64, l: f64, sign: f64, segment: usize) -> Result<(f64, f64)> {
    let disc = 1.0 - k * k * l * l / 20.0;
    if disc <= DISCRIMINANT_FLOOR {
        return Err(Error::NegativeDiscriminant {
            segment,
            discriminant: disc,
        });
    }
    Ok((sign * k * disc.sqrt(), disc))
}

/// The two endpoint terms `rho_1 = s_1 k_1 sqrt(1 - k_1^2 L_1^2 / 20)` and
/// likewise `rho_n`.
pub fn rho_endpoints(chord: &ChordData, sigma: &SignVector) -> Result<(f64, f64)> {
    let n = chord.n();
    assert_eq!(sigma.len(), n);
    let (k, l) = (chord.curvatures(), chord.lengths());
    let (first, _) = end_rho(k[0], l[0], sigma.factor(0), 1)?;
    let (last, _) = end_rho(k[n - 1], l[n - 1], sigma.factor(n - 1), n)?;
    Ok((first, last))
}

/// Full vector: endpoints as above, interior entries corrected by the
/// slope difference, `rho_j = s_j sqrt(k_j^2 (1 - k_j^2 L_j^2 / 20) -
/// (b_{j+1} - b_j)^2 / 60)`.
pub fn rho_interior(chord: &ChordData, sigma: &SignVector, b: &[f64]) -> Result<RhoVector> {
    let n = chord.n();
    assert_eq!(sigma.len(), n);
    assert_eq!(b.len(), n);
    let (k, l) = (chord.curvatures(), chord.lengths());
    let mut values = vec![0.0; n];
    let mut discriminants = vec![0.0; n];
    let (v, disc) = end_rho(k[0], l[0], sigma.factor(0), 1)?;
    values[0] = v;
    discriminants[0] = disc;
    let (v, disc) = end_rho(k[n - 1], l[n - 1], sigma.factor(n - 1), n)?;
    values[n - 1] = v;
    discriminants[n - 1] = disc;
    for j in 1..n - 1 {
        let kk = k[j];
        let db = b[j + 1] - b[j];
        let disc = kk * kk * (1.0 - kk * kk * l[j] * l[j] / 20.0) - db * db / 60.0;
        if disc <= DISCRIMINANT_FLOOR {
            return Err(Error::NegativeDiscriminant {
                segment: j + 1,
                discriminant: disc,
            });
        }
        values[j] = sigma.factor(j) * disc.sqrt();
        discriminants[j] = disc;
    }
    Ok(RhoVector {
        values,
        discriminants,
    })
}

/// Closed-form estimate for exactly two segments.
pub fn estimate_n2(chord: &ChordData, sigma: &SignVector) -> Result<AngleSpline> {
    assert_eq!(chord.n(), 2, "closed form requires exactly two segments");
    let (rho1, rho2) = rho_endpoints(chord, sigma)?;
    let l = chord.lengths();
    let w = chord.angles();
    let (l1, l2, w1, w2) = (l[0], l[1], w[0], w[1]);
    let lsum = l1 + l2;

    let a1 = (12.0 * (2.0 * l1 * w1 + 3.0 * l2 * w1 + l1 * w2)
        - 5.0 * l1 * (4.0 * rho1 * l1 + 3.0 * rho1 * l2 + rho2 * l2))
        / (36.0 * lsum);
    let a2 = (12.0 * (l1 * w2 + l2 * w1) + 5.0 * l1 * l2 * (rho1 - rho2)) / (12.0 * lsum);
    let b1 = 0.0;
    let b2 = (24.0 * (w2 - w1) - 10.0 * (rho2 * l2 + rho1 * l1)) / (3.0 * lsum);
    let c1 =
        (12.0 * (w1 - w2) + 5.0 * (2.0 * rho1 * l1 + rho1 * l2 + rho2 * l2)) / (2.0 * l1 * lsum);
    let c2 = (84.0 * (w1 - w2) + 5.0 * (7.0 * rho1 * l1 + 3.0 * rho2 * l1 + 10.0 * rho2 * l2))
        / (6.0 * l2 * lsum);
    let d1 = (60.0 * (w2 - w1) - 5.0 * (8.0 * rho1 * l1 + 3.0 * rho1 * l2 + 5.0 * rho2 * l2))
        / (9.0 * l1 * l1 * lsum);
    let d2 = (60.0 * (w2 - w1) - 5.0 * (5.0 * rho1 * l1 + 3.0 * rho2 * l1 + 8.0 * rho2 * l2))
        / (9.0 * l2 * l2 * lsum);

    Ok(AngleSpline::new(
        chord.knots().to_vec(),
        vec![
            SegmentCoeffs::new(a1, b1, c1, d1),
            SegmentCoeffs::new(a2, b2, c2, d2),
        ],
    ))
}

/// First-pass slope estimates: row 1 pins `b_1 = 0`, the remaining rows are
/// `L_{j} b_j + 2 (L_j + L_{j+1}) b_{j+1} + L_{j+1} b_{j+2} = 6 (w_{j+1} - w_j)`.
pub fn estimate_b_stage1(chord: &ChordData) -> Result<Vec<f64>> {
    let n = chord.n();
    assert!(n >= 3, "two-pass pipeline requires at least three segments");
    let l = chord.lengths();
    let w = chord.angles();
    let sub: Vec<f64> = (0..n - 1).map(|i| l[i]).collect();
    let mut diag = Vec::with_capacity(n);
    diag.push(1.0);
    diag.extend((1..n).map(|i| 2.0 * (l[i - 1] + l[i])));
    let mut sup = Vec::with_capacity(n - 1);
    sup.push(0.0);
    sup.extend((1..n - 1).map(|i| l[i]));
    let mut rhs = Vec::with_capacity(n);
    rhs.push(0.0);
    rhs.extend((1..n).map(|i| 6.0 * (w[i] - w[i - 1])));
    let system = TridiagonalSystem::new(sub, diag, sup, rhs);
    debug_assert!(system.is_diagonally_dominant());
    system.solve()
}

fn stage2_system(chord: &ChordData, rho: &RhoVector) -> TridiagonalSystem {
    let n = chord.n();
    let l = chord.lengths();
    let w = chord.angles();
    let r = rho.values();
    let sub: Vec<f64> = (0..n - 1).map(|i| -l[i]).collect();
    let mut diag = Vec::with_capacity(n);
    diag.push(1.0);
    diag.extend((1..n).map(|i| 3.0 * (l[i - 1] + l[i])));
    let mut sup = Vec::with_capacity(n - 1);
    sup.push(0.0);
    sup.extend((1..n - 1).map(|i| -l[i]));
    let mut rhs = Vec::with_capacity(n);
    rhs.push(0.0);
    rhs.extend(
        (1..n).map(|i| 24.0 * (w[i] - w[i - 1]) - 10.0 * (l[i - 1] * r[i - 1] + l[i] * r[i])),
    );
    TridiagonalSystem::new(sub, diag, sup, rhs)
}

/// Second-pass slopes, with `rho` evaluated at the first-pass estimates.
pub fn estimate_b_stage2(chord: &ChordData, sigma: &SignVector, b2: &[f64]) -> Result<Vec<f64>> {
    let rho = rho_interior(chord, sigma, b2)?;
    let system = stage2_system(chord, &rho);
    debug_assert!(system.is_diagonally_dominant());
    system.solve()
}

/// Back-substitute curvature coefficients and angle offsets from refined
/// slopes `b` and the pass-one `rho` vector.
pub fn recover_cda(chord: &ChordData, b: &[f64], rho: &RhoVector) -> AngleSpline {
    let n = chord.n();
    assert_eq!(b.len(), n);
    let l = chord.lengths();
    let w = chord.angles();
    let r = rho.values();
    let mut segments = Vec::with_capacity(n);
    for j in 0..n {
        let (cl, dl2) = if j == 0 {
            (
                (-3.0 * b[1] + 10.0 * r[0]) / 4.0,
                5.0 * (b[1] - 2.0 * r[0]) / 6.0,
            )
        } else if j == n - 1 {
            (
                -(7.0 * b[j] - 10.0 * r[j]) / 4.0,
                5.0 * (b[j] - 2.0 * r[j]) / 6.0,
            )
        } else {
            (
                (-3.0 * b[j + 1] - 7.0 * b[j]) / 4.0 + 2.5 * r[j],
                5.0 * (b[j + 1] + b[j]) / 6.0 - 5.0 * r[j] / 3.0,
            )
        };
        let c = cl / l[j];
        let d = dl2 / (l[j] * l[j]);
        let a = w[j] - b[j] * l[j] / 2.0 - c * l[j] * l[j] / 3.0 - d * l[j].powi(3) / 4.0;
        segments.push(SegmentCoeffs::new(a, b[j], c, d));
    }
    AngleSpline::new(chord.knots().to_vec(), segments)
}

/// Branch estimate: closed form for two segments, two-pass pipeline above.
pub fn estimate(chord: &ChordData, sigma: &SignVector) -> Result<AngleSpline> {
    assert_eq!(sigma.len(), chord.n());
    if chord.n() == 2 {
        return estimate_n2(chord, sigma);
    }
    let b2 = estimate_b_stage1(chord)?;
    let rho = rho_interior(chord, sigma, &b2)?;
    let b_hat = stage2_system(chord, &rho).solve()?;
    Ok(recover_cda(chord, &b_hat, &rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::problem::{validate, InterpolationProblem, ValidationConfig};

    fn chord_for(times: &[f64], pts: &[(f64, f64)]) -> ChordData {
        let p =
            InterpolationProblem::new(times.to_vec(), pts.iter().map(|&p| Vec2::from(p)).collect())
                .unwrap();
        validate(&p, &ValidationConfig::default()).unwrap()
    }

    fn two_segment_chord() -> ChordData {
        chord_for(&[0.0, 0.5, 1.1], &[(0.0, 0.0), (0.48, 0.12), (1.0, 0.0)])
    }

    #[test]
    fn endpoint_rho_matches_scalar_oracle() {
        let chord = two_segment_chord();
        let sigma = SignVector::new(vec![1, 1]).unwrap();
        let (rho1, _) = rho_endpoints(&chord, &sigma).unwrap();
        assert!((rho1 - 1.003300972398073).abs() < 1e-13);

        let flipped = SignVector::new(vec![-1, 1]).unwrap();
        let (neg, _) = rho_endpoints(&chord, &flipped).unwrap();
        assert_eq!(neg, -rho1);
    }

    #[test]
    fn endpoint_rho_tends_to_curvature_for_short_segments() {
        // k L -> 0 makes the square root factor go to 1
        let chord = chord_for(
            &[0.0, 0.01, 0.02],
            &[(0.0, 0.0), (0.0099999, 0.00004), (0.0199997, 0.0)],
        );
        let sigma = SignVector::all_plus(2);
        let (rho1, _) = rho_endpoints(&chord, &sigma).unwrap();
        let k1 = chord.curvatures()[0];
        assert!((rho1 - k1).abs() / k1 < 1e-5);
    }

    #[test]
    fn interior_rho_reduces_to_endpoint_form_for_constant_b() {
        let chord = chord_for(
            &[0.0, 0.55, 1.1, 1.7, 2.4, 3.0],
            &[
                (0.0, 0.0),
                (0.5, 0.15),
                (1.0, 0.0),
                (1.5, -0.1),
                (2.0, -0.2),
                (2.5, -0.5),
            ],
        );
        let sigma = SignVector::all_plus(5);
        let b = vec![0.7; 5];
        let rho = rho_interior(&chord, &sigma, &b).unwrap();
        for j in 1..4 {
            let k = chord.curvatures()[j];
            let l = chord.lengths()[j];
            let expect = k * (1.0 - k * k * l * l / 20.0).sqrt();
            assert!((rho.values()[j] - expect).abs() < 1e-14);
        }
        assert!(rho.discriminants().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn two_segment_energies_match_published_values() {
        let chord = two_segment_chord();
        let quad = crate::quad::QuadratureConfig::default();
        let cases = [
            (vec![1, 1], 17.59832720840977),
            (vec![-1, 1], 10.59238372099035),
            (vec![1, -1], 4.122974913291645),
            (vec![-1, -1], 5.3915264525511155),
        ];
        for (signs, expected) in cases {
            let sigma = SignVector::new(signs).unwrap();
            let spline = estimate_n2(&chord, &sigma).unwrap();
            let energy = crate::curve::elastic_energy(&spline, &quad);
            assert!(
                (energy - expected).abs() < 1e-10,
                "sigma {sigma}: {energy} vs {expected}"
            );
        }
    }

    #[test]
    fn mirror_symmetric_data_gives_mirror_estimates() {
        // waypoints symmetric about x = 0.48, equal durations
        let chord = chord_for(&[0.0, 0.55, 1.1], &[(0.0, 0.0), (0.48, 0.13), (0.96, 0.0)]);
        let quad = crate::quad::QuadratureConfig::default();
        let plus_minus = estimate_n2(&chord, &SignVector::new(vec![1, -1]).unwrap()).unwrap();
        let minus_plus = estimate_n2(&chord, &SignVector::new(vec![-1, 1]).unwrap()).unwrap();
        let e1 = crate::curve::elastic_energy(&plus_minus, &quad);
        let e2 = crate::curve::elastic_energy(&minus_plus, &quad);
        assert!((e1 - e2).abs() < 1e-10, "{e1} vs {e2}");
        // mirror image: theta of one equals the reflected theta of the other
        let l = chord.lengths();
        for s in [0.1, 0.3, 0.5] {
            let t1 = plus_minus.theta_local(0, s);
            let t2 = minus_plus.theta_local(1, l[1] - s);
            assert!((t1 + t2).abs() < 1e-10, "{t1} vs {t2}");
        }
    }

    #[test]
    fn stage1_is_zero_for_parallel_chords() {
        // collinear waypoints with slack (the curve wiggles in between):
        // all chord angles are equal, so the first pass has a zero rhs
        let chord = chord_for(
            &[0.0, 1.0, 2.0, 3.0],
            &[(0.0, 0.0), (0.9, 0.0), (1.8, 0.0), (2.7, 0.0)],
        );
        let b2 = estimate_b_stage1(&chord).unwrap();
        assert_eq!(b2, vec![0.0; 3]);
    }

    #[test]
    fn stage1_circle_slopes_are_near_unit_rate() {
        let times: Vec<f64> = (0..=7)
            .map(|j| j as f64 * std::f64::consts::PI / 10.0)
            .collect();
        let pts: Vec<(f64, f64)> = times.iter().map(|&t| (t.cos(), t.sin())).collect();
        let chord = chord_for(&times, &pts);
        let b2 = estimate_b_stage1(&chord).unwrap();
        assert_eq!(b2[0], 0.0);
        // end-condition echo leaves the entries nearest the ends off by more
        for j in 2..6 {
            assert!((b2[j] - 1.0).abs() < 0.1, "b2[{j}] = {}", b2[j]);
        }
        assert!((b2[1] - 1.0).abs() < 0.3);
        assert!((b2[6] - 1.0).abs() < 0.3);
    }

    #[test]
    fn stage2_first_entry_is_zero() {
        let chord = chord_for(
            &[0.0, 0.55, 1.1, 1.7, 2.4, 3.0],
            &[
                (0.0, 0.0),
                (0.5, 0.15),
                (1.0, 0.0),
                (1.5, -0.1),
                (2.0, -0.2),
                (2.5, -0.5),
            ],
        );
        let b2 = estimate_b_stage1(&chord).unwrap();
        for sigma in [SignVector::all_plus(5), SignVector::all_minus(5)] {
            let b3 = estimate_b_stage2(&chord, &sigma, &b2).unwrap();
            assert_eq!(b3[0], 0.0);
        }
    }

    #[test]
    fn recovery_satisfies_end_identities() {
        let chord = chord_for(
            &[0.0, 0.55, 1.1, 1.7, 2.4, 3.0],
            &[
                (0.0, 0.0),
                (0.5, 0.15),
                (1.0, 0.0),
                (1.5, -0.1),
                (2.0, -0.2),
                (2.5, -0.5),
            ],
        );
        let sigma = SignVector::new(vec![-1, -1, 1, -1, 1]).unwrap();
        let spline = estimate(&chord, &sigma).unwrap();
        let l = chord.lengths();
        let segs = spline.segments();
        let n = chord.n();

        // c_1 L_1 + (9/10) d_1 L_1^2 = rho_1 and the mirrored identity at the end
        let b2 = estimate_b_stage1(&chord).unwrap();
        let rho = rho_interior(&chord, &sigma, &b2).unwrap();
        let lhs1 = segs[0].c * l[0] + 0.9 * segs[0].d * l[0] * l[0];
        assert!((lhs1 - rho.values()[0]).abs() < 1e-12);
        let lhsn = -segs[n - 1].c * l[n - 1] - 2.1 * segs[n - 1].d * l[n - 1] * l[n - 1];
        assert!((lhsn - rho.values()[n - 1]).abs() < 1e-12);

        // natural end condition from the last-segment recovery
        let (left, right) = spline.end_slopes();
        assert_eq!(left, 0.0);
        assert!(right.abs() < 1e-12);

        // C0/C1 identities hold across all interior knots
        let (c0, c1) = spline.continuity_defect();
        assert!(c0 < 1e-10, "c0 defect {c0}");
        assert!(c1 < 1e-10, "c1 defect {c1}");
    }

    #[test]
    fn five_segment_energies_are_stable() {
        // frozen cross-language values for the two-pass pipeline
        let chord = chord_for(
            &[0.0, 0.55, 1.1, 1.7, 2.4, 3.0],
            &[
                (0.0, 0.0),
                (0.5, 0.15),
                (1.0, 0.0),
                (1.5, -0.1),
                (2.0, -0.2),
                (2.5, -0.5),
            ],
        );
        let quad = crate::quad::QuadratureConfig::default();
        let cases = [
            (vec![-1, -1, 1, -1, 1], 17.064826401734596),
            (vec![-1, 1, -1, 1, -1], 24.39726353955252),
            (vec![1, -1, 1, -1, 1], 19.26479171589353),
            (vec![1, 1, 1, 1, 1], 95.2330456070718),
            (vec![-1, 1, 1, 1, 1], 77.50448270859962),
            (vec![-1, -1, 1, 1, 1], 59.74579343032958),
        ];
        for (signs, expected) in cases {
            let sigma = SignVector::new(signs).unwrap();
            let spline = estimate(&chord, &sigma).unwrap();
            let energy = crate::curve::elastic_energy(&spline, &quad);
            assert!(
                (energy - expected).abs() < 1e-9,
                "sigma {sigma}: {energy} vs {expected}"
            );
        }
    }

    #[test]
    fn circle_estimates_match_frozen_values() {
        let times: Vec<f64> = (0..=7)
            .map(|j| j as f64 * std::f64::consts::PI / 10.0)
            .collect();
        let pts: Vec<(f64, f64)> = times.iter().map(|&t| (t.cos(), t.sin())).collect();
        let chord = chord_for(&times, &pts);
        let quad = crate::quad::QuadratureConfig::default();
        let plus = estimate(&chord, &SignVector::all_plus(7)).unwrap();
        let minus = estimate(&chord, &SignVector::all_minus(7)).unwrap();
        let ep = crate::curve::elastic_energy(&plus, &quad);
        let em = crate::curve::elastic_energy(&minus, &quad);
        assert!((ep - 2.1249566439916334).abs() < 1e-10, "{ep}");
        assert!((em - 37.20954400831919).abs() < 1e-9, "{em}");
    }

    // The mid-segment slope b + cL tracks sigma * k only on the branch
    // whose signs match the data's own concavity, and only away from the
    // zero-slope end layers; every other branch swings much harder even at
    // fine spacing. Assert the version that actually holds.
    #[test]
    fn concavity_tracks_branch_signs_on_the_data_branch() {
        let times: Vec<f64> = (0..=7)
            .map(|j| j as f64 * std::f64::consts::PI / 10.0)
            .collect();
        let pts: Vec<(f64, f64)> = times.iter().map(|&t| (t.cos(), t.sin())).collect();
        let chord = chord_for(&times, &pts);
        let l = chord.lengths();
        let sigma = SignVector::all_plus(7);
        let spline = estimate(&chord, &sigma).unwrap();
        for j in 1..6 {
            let seg = spline.segments()[j];
            let combo = seg.b + seg.c * l[j];
            assert_eq!(combo.signum(), sigma.factor(j), "segment {j}");
            let k = chord.curvatures()[j];
            assert!(
                (combo.abs() - k).abs() / k < 0.15,
                "segment {j}: |b + cL| = {} vs k = {k}",
                combo.abs()
            );
        }
    }
}
