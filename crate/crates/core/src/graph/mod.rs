//! Undirected spatial road graph and the preprocessing applied before
//! encoding.

mod compare;
mod conflict;
mod interpolate;
mod io;
mod paths;
mod simplify;
mod spatial;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{segment_segment_closest, Point};

pub use compare::{structurally_equal, vertex_matching};
pub use conflict::{resolve_conflicts, ConflictReport, DEFAULT_MAX_ITER, SHIFT_STEP};
pub use interpolate::interpolate;
pub use io::{load_graph, save_graph};
pub use paths::{shortest_path_length, single_source_lengths};
pub use simplify::simplify;
pub use spatial::SegmentGrid;

pub type VertexId = u64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub pos: Point,
}

/// An undirected graph whose vertices carry positions in meters inside a
/// `width x height` extent.
///
/// Edges are stored as pairs of vertex *indices* `(lo, hi)` with `lo < hi`,
/// sorted and unique. The graph is immutable once built; every algorithm
/// returns a new graph.
#[derive(Debug, Clone)]
pub struct SpatialGraph {
    width: f64,
    height: f64,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    index: HashMap<VertexId, usize>,
}

impl PartialEq for SpatialGraph {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.vertices == other.vertices
            && self.edges == other.edges
    }
}

impl SpatialGraph {
    pub fn empty(width: f64, height: f64) -> Result<Self> {
        Self::new(width, height, Vec::new(), &[])
    }

    /// Builds and validates a graph from explicit vertex ids.
    pub fn new(
        width: f64,
        height: f64,
        vertices: Vec<Vertex>,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self> {
        if !(width.is_finite() && height.is_finite() && width >= 0.0 && height >= 0.0) {
            return Err(Error::Validation(format!(
                "extent {width} x {height} must be finite and non-negative"
            )));
        }
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate vertex id {}", v.id)));
            }
            let Point { x, y } = v.pos;
            if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 || x > width || y > height {
                return Err(Error::Validation(format!(
                    "vertex {} at ({x}, {y}) lies outside the extent [0, {width}] x [0, {height}]",
                    v.id
                )));
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let ia = *index
                .get(&a)
                .ok_or_else(|| Error::Validation(format!("edge ({a}, {b}) references unknown vertex {a}")))?;
            let ib = *index
                .get(&b)
                .ok_or_else(|| Error::Validation(format!("edge ({a}, {b}) references unknown vertex {b}")))?;
            pairs.push((ia, ib));
        }
        Self::build(width, height, vertices, index, pairs)
    }

    /// Builds a graph whose vertex ids equal their position in `positions`.
    pub fn from_positions(
        width: f64,
        height: f64,
        positions: &[Point],
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let vertices = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| Vertex { id: i as VertexId, pos })
            .collect();
        let edges: Vec<(VertexId, VertexId)> =
            edges.iter().map(|&(a, b)| (a as VertexId, b as VertexId)).collect();
        Self::new(width, height, vertices, &edges)
    }

    /// Internal constructor for algorithms that already hold valid indices.
    pub(crate) fn from_parts(
        width: f64,
        height: f64,
        vertices: Vec<Vertex>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate vertex id {}", v.id)));
            }
        }
        Self::build(width, height, vertices, index, edges)
    }

    fn build(
        width: f64,
        height: f64,
        vertices: Vec<Vertex>,
        index: HashMap<VertexId, usize>,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            if a >= vertices.len() || b >= vertices.len() {
                return Err(Error::Validation(format!("edge index ({a}, {b}) out of range")));
            }
            let (ida, idb) = (vertices[a].id, vertices[b].id);
            if a == b {
                return Err(Error::Validation(format!("self-loop on vertex {ida}")));
            }
            if vertices[a].pos == vertices[b].pos {
                return Err(Error::Validation(format!("edge ({ida}, {idb}) has zero length")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            let (a, b) = w[0];
            return Err(Error::Validation(format!(
                "duplicate edge ({}, {})",
                vertices[a].id, vertices[b].id
            )));
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(SpatialGraph {
            width,
            height,
            vertices,
            edges,
            adjacency,
            index,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Edges as `(lo, hi)` vertex index pairs in canonical order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (self.vertices[a].id, self.vertices[b].id))
    }

    pub fn pos(&self, index: usize) -> Point {
        self.vertices[index].pos
    }

    pub fn id(&self, index: usize) -> VertexId {
        self.vertices[index].id
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_length(&self, edge: (usize, usize)) -> f64 {
        self.pos(edge.0).dist(self.pos(edge.1))
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|&e| self.edge_length(e)).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Smallest id not yet used by any vertex.
    pub fn next_id(&self) -> VertexId {
        self.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0)
    }

    /// Same topology with new vertex positions (indices unchanged).
    pub(crate) fn with_positions(&self, positions: &[Point]) -> Result<Self> {
        let vertices = self
            .vertices
            .iter()
            .zip(positions)
            .map(|(v, &pos)| Vertex { id: v.id, pos })
            .collect();
        Self::from_parts(self.width, self.height, vertices, self.edges.clone())
    }

    /// Same graph with vertices sorted by `(y, x)` and ids renumbered from 0.
    pub fn canonical_by_position(&self) -> SpatialGraph {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (self.pos(a), self.pos(b));
            pa.y.total_cmp(&pb.y).then(pa.x.total_cmp(&pb.x)).then(a.cmp(&b))
        });
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let vertices = order
            .iter()
            .enumerate()
            .map(|(new, &old)| Vertex { id: new as VertexId, pos: self.pos(old) })
            .collect();
        let edges = self.edges.iter().map(|&(a, b)| (remap[a], remap[b])).collect();
        Self::from_parts(self.width, self.height, vertices, edges).expect("relabeling preserves invariants")
    }

    /// Summary counts used in reports.
    pub fn stats(&self, d_max: usize, separation: f64) -> GraphStats {
        let mut degree_histogram = vec![0; self.max_degree() + 1];
        for list in &self.adjacency {
            degree_histogram[list.len()] += 1;
        }
        let over_degree = self.adjacency.iter().filter(|l| l.len() > d_max).count();
        let grid = SegmentGrid::new(self, separation.max(1.0));
        let mut close_edge_pairs = 0;
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            for j in grid.candidates(self, i, separation) {
                if j <= i {
                    continue;
                }
                let (c, d) = self.edges[j];
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                let (dist, _, _) = segment_segment_closest(self.pos(a), self.pos(b), self.pos(c), self.pos(d));
                if dist < separation {
                    close_edge_pairs += 1;
                }
            }
        }
        GraphStats {
            vertex_count: self.vertices.len(),
            edge_count: self.edges.len(),
            degree_histogram,
            over_degree,
            close_edge_pairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `degree_histogram[k]` counts vertices of degree `k`.
    pub degree_histogram: Vec<usize>,
    /// Vertices whose degree exceeds `D_max`.
    pub over_degree: usize,
    /// Non-adjacent edge pairs closer than the separation threshold.
    pub close_edge_pairs: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(id: VertexId, x: f64, y: f64) -> Vertex {
        Vertex { id, pos: Point::new(x, y) }
    }

    #[test]
    fn rejects_invalid_graphs() {
        let two = || vec![v(0, 0.0, 0.0), v(1, 20.0, 0.0)];
        assert!(SpatialGraph::new(100.0, 100.0, two(), &[(0, 1)]).is_ok());
        assert!(SpatialGraph::new(100.0, 100.0, two(), &[(0, 99)]).is_err());
        assert!(SpatialGraph::new(100.0, 100.0, two(), &[(0, 0)]).is_err());
        assert!(SpatialGraph::new(100.0, 100.0, two(), &[(0, 1), (1, 0)]).is_err());
        assert!(SpatialGraph::new(10.0, 100.0, two(), &[]).is_err());
        let dup = vec![v(3, 0.0, 0.0), v(3, 20.0, 0.0)];
        assert!(SpatialGraph::new(100.0, 100.0, dup, &[]).is_err());
        let stacked = vec![v(0, 5.0, 5.0), v(1, 5.0, 5.0)];
        assert!(SpatialGraph::new(100.0, 100.0, stacked.clone(), &[]).is_ok());
        assert!(SpatialGraph::new(100.0, 100.0, stacked, &[(0, 1)]).is_err());
    }

    #[test]
    fn stats_histogram_sums_to_vertex_count() {
        let g = SpatialGraph::from_positions(
            100.0,
            100.0,
            &[
                Point::new(0.0, 0.0),
                Point::new(50.0, 0.0),
                Point::new(50.0, 50.0),
                Point::new(0.0, 50.0),
                Point::new(90.0, 90.0),
            ],
            &[(0, 1), (1, 2), (2, 3), (1, 3)],
        )
        .unwrap();
        let s = g.stats(2, 5.0);
        assert_eq!(s.degree_histogram.iter().sum::<usize>(), 5);
        assert_eq!(s.degree_histogram, vec![1, 1, 2, 1]);
        assert_eq!(s.over_degree, 1);
        assert_eq!(s.close_edge_pairs, 0);
    }
}
