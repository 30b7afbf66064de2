use std::collections::BTreeSet;

use crate::geometry::turn_angle_deg;

use super::SpatialGraph;

/// Removes degree-2 vertices whose two edges are within `angle_tol` degrees
/// of collinear, merging the edges, until no such vertex remains.
///
/// Vertices are visited in ascending id order. A vertex is kept when the
/// merge would duplicate an existing edge.
pub fn simplify(graph: &SpatialGraph, angle_tol: f64) -> SpatialGraph {
    let n = graph.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|i| graph.neighbors(i).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| graph.id(i));

    loop {
        let mut changed = false;
        for &v in &order {
            if !alive[v] || adj[v].len() != 2 {
                continue;
            }
            let mut it = adj[v].iter();
            let (a, b) = (*it.next().unwrap(), *it.next().unwrap());
            if adj[a].contains(&b) || graph.pos(a) == graph.pos(b) {
                continue;
            }
            if turn_angle_deg(graph.pos(a), graph.pos(v), graph.pos(b)) > angle_tol {
                continue;
            }
            adj[a].remove(&v);
            adj[b].remove(&v);
            adj[a].insert(b);
            adj[b].insert(a);
            adj[v].clear();
            alive[v] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let mut remap = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for i in 0..n {
        if alive[i] {
            remap[i] = vertices.len();
            vertices.push(graph.vertices()[i]);
        }
    }
    let mut edges = Vec::new();
    for (a, list) in adj.iter().enumerate() {
        for &b in list.range(a + 1..) {
            edges.push((remap[a], remap[b]));
        }
    }
    SpatialGraph::from_parts(graph.width(), graph.height(), vertices, edges)
        .expect("simplify preserves graph invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn right_angle_corner_retained() {
        let g = SpatialGraph::from_positions(
            100.0,
            100.0,
            &[Point::new(0.0, 0.0), Point::new(50.0, 0.0), Point::new(50.0, 50.0)],
            &[(0, 1), (1, 2)],
        )
        .unwrap();
        assert_eq!(simplify(&g, 5.0), g);
    }

    #[test]
    fn collinear_chain_collapses() {
        let g = SpatialGraph::from_positions(
            100.0,
            100.0,
            &[Point::new(0.0, 0.0), Point::new(25.0, 0.0), Point::new(50.0, 0.1), Point::new(75.0, 0.0)],
            &[(0, 1), (1, 2), (2, 3)],
        )
        .unwrap();
        let s = simplify(&g, 5.0);
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edge_ids().collect::<Vec<_>>(), vec![(0, 3)]);
    }

    #[test]
    fn triangle_is_not_collapsed_into_a_duplicate_edge() {
        let g = SpatialGraph::from_positions(
            100.0,
            100.0,
            &[Point::new(0.0, 0.0), Point::new(20.0, 0.5), Point::new(40.0, 0.0)],
            &[(0, 1), (1, 2), (0, 2)],
        )
        .unwrap();
        assert_eq!(simplify(&g, 5.0).edge_count(), 3);
    }

    #[test]
    fn empty_graph() {
        let g = SpatialGraph::empty(10.0, 10.0).unwrap();
        assert_eq!(simplify(&g, 5.0), g);
    }
}
