use serde::{Deserialize, Serialize};

use super::{radius_schedule, two_sided_content};
use crate::error::{Error, Result};
use crate::mmspace::{BallProfile, PointCloudSpace, VertexId};
use crate::riesz::safe_ratio;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricReport {
    /// `LHS / (r · surface / m(B_{λr}))`.
    pub ratio: f64,
    /// `min{m(B ∩ E), m(B \ E)} / m(B)`.
    pub lhs: f64,
    /// Content of the boundary layer inside `B_{λr}` at the smallest radius.
    pub surface: f64,
    pub big_ball_mass: f64,
    /// `(s, m(B_s(S)) / 2s)` over the schedule.
    pub profile: Vec<(f64, f64)>,
    pub boundary_contaminated: bool,
}

/// Relative isoperimetric ratio of `E` on `B_r(center)`. The boundary
/// layer is the set of vertices of `B_{λr}` with a neighbor on the other
/// side of `E`.
pub fn relative_isoperimetric_check(
    space: &PointCloudSpace,
    set: &[bool],
    center: VertexId,
    r: f64,
    lambda: f64,
) -> Result<IsoperimetricReport> {
    space.check_vertex(center)?;
    if set.len() != space.len() {
        return Err(Error::input("set mask length differs from the space"));
    }
    if !(r > 0.0 && lambda >= 1.0) {
        return Err(Error::precondition(format!("need r > 0 and λ >= 1, got r={r}, λ={lambda}")));
    }
    let prof = BallProfile::new(space, center);
    let ball = prof.ball(r);
    let big = prof.ball(lambda * r);
    let mass = |ids: &[VertexId], inside: bool| -> f64 {
        ids.iter().filter(|&&i| set[i] == inside).map(|&i| space.weight(i)).sum()
    };
    let m_ball = mass(ball, true) + mass(ball, false);
    let lhs = if m_ball > 0.0 { mass(ball, true).min(mass(ball, false)) / m_ball } else { 0.0 };
    let big_ball_mass = mass(big, true) + mass(big, false);
    let layer: Vec<VertexId> = big
        .iter()
        .copied()
        .filter(|&i| space.neighbors(i).iter().any(|&(j, _)| set[j] != set[i]))
        .collect();
    let content = two_sided_content(space, &layer, &radius_schedule(space.resolution(), lambda * r / 4.0))?;
    // closest schedule radius to the limit
    let surface = content.profile.last().map_or(0.0, |p| p.1);
    let boundary = space.boundary_mask();
    let boundary_contaminated = big.iter().any(|&i| boundary[i]);
    Ok(IsoperimetricReport {
        ratio: safe_ratio(lhs, r * surface / big_ball_mass),
        lhs,
        surface,
        big_ball_mass,
        profile: content.profile,
        boundary_contaminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use std::f64::consts::PI;

    #[test]
    fn trivial_sets() {
        let s = gallery::euclidean_grid(2, 1.0, 0.02).unwrap();
        let c = s.nearest_vertex(&[0.0, 0.0]).unwrap();
        for fill in [true, false] {
            let rep = relative_isoperimetric_check(&s, &vec![fill; s.len()], c, 0.1, 2.0).unwrap();
            assert_eq!(rep.lhs, 0.0);
            assert_eq!(rep.ratio, 0.0);
        }
    }

    #[test]
    fn half_plane_matches_planar_value() {
        let s = gallery::euclidean_grid(2, 1.0, 0.005).unwrap();
        let c = s.nearest_vertex(&[0.0, 0.0]).unwrap();
        let e: Vec<bool> = (0..s.len()).map(|i| s.coords(i)[0] <= 0.0).collect();
        let rep = relative_isoperimetric_check(&s, &e, c, 0.1, 2.0).unwrap();
        let want = PI * 2.0 / 4.0;
        assert!((rep.ratio / want - 1.0).abs() < 0.2, "{} vs {want}", rep.ratio);
        assert!(!rep.boundary_contaminated);
    }

    #[test]
    fn checkerboard_has_huge_surface() {
        let ratios = |h: f64| {
            let s = gallery::euclidean_grid(2, 0.6, h).unwrap();
            let c = s.nearest_vertex(&[0.0, 0.0]).unwrap();
            let half: Vec<bool> = (0..s.len()).map(|i| s.coords(i)[0] <= 0.0).collect();
            let board: Vec<bool> = (0..s.len())
                .map(|i| {
                    let p = s.coords(i);
                    ((p[0] / h).round() as i64 + (p[1] / h).round() as i64).rem_euclid(2) == 0
                })
                .collect();
            let smooth = relative_isoperimetric_check(&s, &half, c, 0.1, 2.0).unwrap().ratio;
            let rough = relative_isoperimetric_check(&s, &board, c, 0.1, 2.0).unwrap().ratio;
            (smooth, rough)
        };
        let (smooth, rough) = ratios(0.01);
        let (_, finer) = ratios(0.005);
        assert!(rough < 0.15 * smooth, "{rough} {smooth}");
        assert!(finer < 0.6 * rough, "{finer} {rough}");
    }
}
