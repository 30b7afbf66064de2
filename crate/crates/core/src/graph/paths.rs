use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::{SpatialGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq)]
struct State {
    dist: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over an adjacency list with non-negative weights. Unreached
/// nodes are `f64::INFINITY`.
pub(crate) fn dijkstra(adjacency: &[Vec<(usize, f64)>], sources: &[(usize, f64)]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    let mut heap = BinaryHeap::new();
    for &(node, d) in sources {
        if d < dist[node] {
            dist[node] = d;
            heap.push(State { dist: d, node });
        }
    }
    while let Some(State { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adjacency[node] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(State { dist: nd, node: next });
            }
        }
    }
    dist
}

pub(crate) fn weighted_adjacency(graph: &SpatialGraph) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); graph.vertex_count()];
    for &(a, b) in graph.edges() {
        let w = graph.edge_length((a, b));
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    adj
}

/// Euclidean-weighted path lengths from vertex index `source` to every vertex.
pub fn single_source_lengths(graph: &SpatialGraph, source: usize) -> Vec<f64> {
    dijkstra(&weighted_adjacency(graph), &[(source, 0.0)])
}

/// Exact shortest path length between two vertex ids, `None` if unreachable.
pub fn shortest_path_length(graph: &SpatialGraph, a: VertexId, b: VertexId) -> Result<Option<f64>> {
    let ia = graph
        .index_of(a)
        .ok_or_else(|| Error::Validation(format!("unknown vertex {a}")))?;
    let ib = graph
        .index_of(b)
        .ok_or_else(|| Error::Validation(format!("unknown vertex {b}")))?;
    let d = single_source_lengths(graph, ia)[ib];
    Ok(d.is_finite().then_some(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn path_and_components() {
        let g = SpatialGraph::from_positions(
            10.0,
            10.0,
            &[
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(5.0, 5.0),
                Point::new(6.0, 5.0),
            ],
            &[(0, 1), (1, 2), (3, 4)],
        )
        .unwrap();
        assert_eq!(shortest_path_length(&g, 0, 2).unwrap(), Some(2.0));
        assert_eq!(shortest_path_length(&g, 2, 0).unwrap(), Some(2.0));
        assert_eq!(shortest_path_length(&g, 1, 1).unwrap(), Some(0.0));
        assert_eq!(shortest_path_length(&g, 0, 3).unwrap(), None);
        assert!(shortest_path_length(&g, 0, 42).is_err());
    }
}
