use crate::error::{Error, Result};

use super::{SpatialGraph, Vertex};

/// Splits every edge of length `L >= d` into the fewest equal collinear
/// pieces that are all strictly shorter than `d`; shorter edges are kept.
///
/// Original vertices keep their ids and indices; new vertices are appended
/// with fresh ids in canonical edge order.
pub fn interpolate(graph: &SpatialGraph, d: f64) -> Result<SpatialGraph> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Config(format!("interpolation distance must be positive, got {d}")));
    }
    let mut vertices = graph.vertices().to_vec();
    let mut edges = Vec::with_capacity(graph.edge_count());
    let mut next_id = graph.next_id();
    for &(a, b) in graph.edges() {
        let k = pieces(graph.edge_length((a, b)), d);
        if k == 1 {
            edges.push((a, b));
            continue;
        }
        let (pa, pb) = (graph.pos(a), graph.pos(b));
        let mut prev = a;
        for j in 1..k {
            let idx = vertices.len();
            vertices.push(Vertex {
                id: next_id,
                pos: pa.lerp(pb, j as f64 / k as f64),
            });
            next_id += 1;
            edges.push((prev, idx));
            prev = idx;
        }
        edges.push((prev, b));
    }
    SpatialGraph::from_parts(graph.width(), graph.height(), vertices, edges)
}

/// Minimal `k` with `length / k < d`.
pub(crate) fn pieces(length: f64, d: f64) -> usize {
    if length < d {
        1
    } else {
        let mut k = (length / d).floor() as usize + 1;
        while length / (k as f64) >= d {
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn segment(len: f64) -> SpatialGraph {
        SpatialGraph::from_positions(100.0, 10.0, &[Point::new(0.0, 0.0), Point::new(len, 0.0)], &[(0, 1)]).unwrap()
    }

    #[test]
    fn fifty_meters_becomes_three_pieces() {
        let g = interpolate(&segment(50.0), 20.0).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        for &e in g.edges() {
            assert!((g.edge_length(e) - 50.0 / 3.0).abs() < 1e-9);
        }
        assert!(g.vertices()[2..].iter().all(|v| v.id >= 2));
    }

    #[test]
    fn short_edge_unchanged_and_exact_length_split() {
        let g = segment(19.9);
        assert_eq!(interpolate(&g, 20.0).unwrap(), g);
        assert_eq!(interpolate(&segment(20.0), 20.0).unwrap().edge_count(), 2);
        assert_eq!(interpolate(&segment(40.0), 20.0).unwrap().edge_count(), 3);
    }

    #[test]
    fn non_positive_distance_rejected() {
        assert!(matches!(interpolate(&segment(5.0), 0.0), Err(Error::Config(_))));
        assert!(matches!(interpolate(&segment(5.0), -1.0), Err(Error::Config(_))));
    }
}
