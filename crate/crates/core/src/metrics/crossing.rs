//! Stacked-road crossing points and their matching.

use crate::geometry::{segment_intersection, Point};
use crate::graph::{SegmentGrid, SpatialGraph, VertexId};

use super::topo::greedy_match;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub pos: Point,
    pub edges: ((VertexId, VertexId), (VertexId, VertexId)),
}

/// Intersections between edges that share no vertex, sorted by position.
/// Hits closer than 1 µm (a road passing through a chain vertex) count once.
pub fn crossing_points(graph: &SpatialGraph) -> Vec<Crossing> {
    let grid = SegmentGrid::new(graph, 50.0);
    let edges = graph.edges();
    let mut out = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for j in grid.candidates(graph, i, 0.0) {
            if j <= i {
                continue;
            }
            let (c, d) = edges[j];
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if let Some((p, _, _)) = segment_intersection(graph.pos(a), graph.pos(b), graph.pos(c), graph.pos(d)) {
                out.push(Crossing {
                    pos: p,
                    edges: ((graph.id(a), graph.id(b)), (graph.id(c), graph.id(d))),
                });
            }
        }
    }
    out.sort_by(|x, y| x.pos.y.total_cmp(&y.pos.y).then(x.pos.x.total_cmp(&y.pos.x)).then(x.edges.cmp(&y.edges)));
    let mut kept: Vec<Crossing> = Vec::with_capacity(out.len());
    for c in out {
        if !kept.iter().rev().take_while(|k| c.pos.y - k.pos.y <= 1e-6).any(|k| k.pos.dist(c.pos) <= 1e-6) {
            kept.push(c);
        }
    }
    kept
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingMatch {
    pub precision: f64,
    pub recall: f64,
    pub matched: usize,
    pub proposed: usize,
    pub truth: usize,
}

/// Greedy one-to-one matching of crossing points. An empty denominator
/// yields 1.
pub fn crossing_match(truth: &SpatialGraph, proposal: &SpatialGraph, match_dist: f64) -> CrossingMatch {
    let t: Vec<Point> = crossing_points(truth).iter().map(|c| c.pos).collect();
    let p: Vec<Point> = crossing_points(proposal).iter().map(|c| c.pos).collect();
    let matched = greedy_match(&t, &p, match_dist).len();
    let ratio = |n: usize| if n == 0 { 1.0 } else { matched as f64 / n as f64 };
    CrossingMatch {
        precision: ratio(p.len()),
        recall: ratio(t.len()),
        matched,
        proposed: p.len(),
        truth: t.len(),
    }
}
