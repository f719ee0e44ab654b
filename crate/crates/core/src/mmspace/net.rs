use super::{euclid, MetricKind, PointCloudSpace, VertexId};
use crate::error::{Error, Result};
use crate::shortest;

/// Greedy farthest-point δ-net seeded with `x` and `y`.
///
/// The returned list starts with `x, y` followed by the inserted points in
/// insertion order. Pairwise distances are `>= delta` and every vertex lies
/// at distance `< delta` from some net point (vertices unreachable under the
/// graph metric are ignored).
pub fn delta_net(space: &PointCloudSpace, delta: f64, x: VertexId, y: VertexId) -> Result<Vec<VertexId>> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    if !(delta > 0.0) {
        return Err(Error::precondition(format!("net scale must be positive, got {delta}")));
    }
    let dxy = space.distance(x, y);
    if delta >= dxy {
        return Err(Error::precondition(format!(
            "net scale {delta} must be below d(x, y) = {dxy}"
        )));
    }
    let n = space.len();
    let mut mindist = vec![f64::INFINITY; n];
    let mut net = Vec::new();
    let insert = |c: VertexId, mindist: &mut Vec<f64>, net: &mut Vec<VertexId>| {
        net.push(c);
        match space.metric_kind() {
            MetricKind::AmbientEuclidean => {
                let p = space.coords(c);
                for (j, md) in mindist.iter_mut().enumerate() {
                    let d = euclid(p, space.coords(j));
                    if d < *md {
                        *md = d;
                    }
                }
            }
            MetricKind::GraphPath => shortest::relax_min_distances(space.adjacency(), c, mindist),
        }
    };
    insert(x, &mut mindist, &mut net);
    insert(y, &mut mindist, &mut net);
    loop {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (j, &d) in mindist.iter().enumerate() {
            if d.is_finite() && d > best.0 {
                best = (d, j);
            }
        }
        if best.1 == usize::MAX || best.0 < delta {
            break;
        }
        insert(best.1, &mut mindist, &mut net);
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn tiny_delta_takes_everything() {
        let s = gallery::segment(6).unwrap();
        let net = delta_net(&s, 0.1, 0, 5).unwrap();
        assert_eq!(net.len(), 6);
        assert_eq!(&net[..2], &[0, 5]);
    }

    #[test]
    fn seeds_always_present() {
        let s = gallery::segment(11).unwrap();
        let net = delta_net(&s, 1.0 - 1e-6, 0, 10).unwrap();
        assert_eq!(net, vec![0, 10]);
    }

    #[test]
    fn delta_above_pair_distance_is_rejected() {
        let s = gallery::segment(11).unwrap();
        assert!(matches!(delta_net(&s, 0.5, 0, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn grid_net_separation_and_covering() {
        let s = gallery::euclidean_grid(2, 1.0, 0.05).unwrap();
        let x = s.nearest_vertex(&[-0.4, 0.0]).unwrap();
        let y = s.nearest_vertex(&[0.4, 0.0]).unwrap();
        let delta = 0.2;
        let net = delta_net(&s, delta, x, y).unwrap();
        for (a, &p) in net.iter().enumerate() {
            for &q in &net[a + 1..] {
                assert!(s.distance(p, q) >= delta);
            }
        }
        for v in 0..s.len() {
            let cover = net.iter().map(|&p| s.distance(p, v)).fold(f64::INFINITY, f64::min);
            assert!(cover < delta, "vertex {v} uncovered");
        }
    }

    #[test]
    fn graph_metric_net_covers() {
        let s = gallery::GridBuilder::new(2, 1.0, 0.1)
            .metric(MetricKind::GraphPath)
            .build()
            .unwrap();
        let net = delta_net(&s, 0.3, 0, s.len() - 1).unwrap();
        let dists: Vec<Vec<f64>> = net.iter().map(|&p| s.distances_from(p)).collect();
        for v in 0..s.len() {
            assert!(dists.iter().any(|d| d[v] < 0.3));
        }
        for (a, da) in dists.iter().enumerate() {
            for &q in &net[a + 1..] {
                assert!(da[q] >= 0.3);
            }
        }
    }
}
