//! Shared machinery: nearest points on a graph and path searches from
//! points that lie inside edges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::{project_onto_segment, Point};
use crate::graph::{SegmentGrid, SpatialGraph};

/// Tolerance for treating a position along an edge as its endpoint.
pub(crate) const ON_VERTEX_EPS: f64 = 1e-9;

/// A point on an edge, `offset` meters from the edge's first endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EdgePoint {
    pub edge: usize,
    pub offset: f64,
    pub pos: Point,
}

pub(crate) struct Network<'a> {
    pub graph: &'a SpatialGraph,
    grid: SegmentGrid,
    pub adjacency: Vec<Vec<(usize, f64)>>,
    pub lengths: Vec<f64>,
    /// Edge indices incident to each vertex.
    pub incident: Vec<Vec<usize>>,
}

impl<'a> Network<'a> {
    pub fn new(graph: &'a SpatialGraph) -> Self {
        let mut adjacency = vec![Vec::new(); graph.vertex_count()];
        let mut incident = vec![Vec::new(); graph.vertex_count()];
        let mut lengths = Vec::with_capacity(graph.edge_count());
        for (i, &(a, b)) in graph.edges().iter().enumerate() {
            let w = graph.edge_length((a, b));
            lengths.push(w);
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
            incident[a].push(i);
            incident[b].push(i);
        }
        Network {
            graph,
            grid: SegmentGrid::new(graph, 25.0),
            adjacency,
            lengths,
            incident,
        }
    }

    pub fn point_at(&self, edge: usize, offset: f64) -> EdgePoint {
        let (a, b) = self.graph.edges()[edge];
        let len = self.lengths[edge];
        EdgePoint {
            edge,
            offset,
            pos: self.graph.pos(a).lerp(self.graph.pos(b), offset / len),
        }
    }

    /// Closest point on any edge within `max_dist` of `p`.
    ///
    /// Edges within 1 µm of the best distance count as tied (a point on a
    /// stacked crossing lies on both roads); ties go to the edge best aligned
    /// with `dir` when given, then to the lowest edge index.
    pub fn nearest(&self, p: Point, max_dist: f64, dir: Option<Point>) -> Option<(EdgePoint, f64)> {
        let mut hits: Vec<(EdgePoint, f64)> = Vec::new();
        for e in self.grid.near_point(p, max_dist) {
            let (a, b) = self.graph.edges()[e];
            let (pa, pb) = (self.graph.pos(a), self.graph.pos(b));
            let t = project_onto_segment(p, pa, pb);
            let q = pa.lerp(pb, t);
            let d = q.dist(p);
            if d <= max_dist {
                hits.push((
                    EdgePoint {
                        edge: e,
                        offset: t * self.lengths[e],
                        pos: q,
                    },
                    d,
                ));
            }
        }
        let best = hits.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
        let alignment = |h: &(EdgePoint, f64)| match dir {
            Some(dir) => {
                let (a, b) = self.graph.edges()[h.0.edge];
                let v = self.graph.pos(b) - self.graph.pos(a);
                (v.dot(dir) / (v.norm() * dir.norm())).abs()
            }
            None => 0.0,
        };
        hits.into_iter()
            .filter(|h| h.1 <= best + 1e-6)
            .min_by(|x, y| {
                alignment(y)
                    .total_cmp(&alignment(x))
                    .then(x.1.total_cmp(&y.1))
                    .then(x.0.edge.cmp(&y.0.edge))
            })
    }

    pub fn direction(&self, edge: usize) -> Point {
        let (a, b) = self.graph.edges()[edge];
        self.graph.pos(b) - self.graph.pos(a)
    }

    /// Vertex distances from a point inside an edge, exploring only up to
    /// `limit` meters. Unreached vertices stay infinite.
    pub fn distances_from(&self, root: &EdgePoint, limit: f64) -> Vec<f64> {
        let (a, b) = self.graph.edges()[root.edge];
        let len = self.lengths[root.edge];
        bounded_dijkstra(&self.adjacency, &[(a, root.offset), (b, len - root.offset)], limit)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct State(f64, usize);

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn bounded_dijkstra(adjacency: &[Vec<(usize, f64)>], sources: &[(usize, f64)], limit: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    let mut heap = BinaryHeap::new();
    for &(n, d) in sources {
        if d < dist[n] {
            dist[n] = d;
            heap.push(State(d, n));
        }
    }
    while let Some(State(d, n)) = heap.pop() {
        if d > dist[n] || d > limit {
            continue;
        }
        for &(m, w) in &adjacency[n] {
            let nd = d + w;
            if nd < dist[m] {
                dist[m] = nd;
                heap.push(State(nd, m));
            }
        }
    }
    dist
}
