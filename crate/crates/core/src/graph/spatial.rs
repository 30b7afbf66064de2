use std::collections::HashMap;

use crate::geometry::Point;

use super::SpatialGraph;

/// Uniform bucket grid over edge bounding boxes for neighbourhood queries.
#[derive(Debug, Clone)]
pub struct SegmentGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SegmentGrid {
    pub fn new(graph: &SpatialGraph, cell: f64) -> Self {
        let positions: Vec<Point> = graph.vertices().iter().map(|v| v.pos).collect();
        Self::from_segments(&positions, graph.edges(), cell)
    }

    pub fn from_segments(positions: &[Point], edges: &[(usize, usize)], cell: f64) -> Self {
        let cell = cell.max(1e-6);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &(a, b)) in edges.iter().enumerate() {
            let (lo, hi) = bbox(positions[a], positions[b]);
            for key in cells(lo, hi, cell) {
                buckets.entry(key).or_default().push(i);
            }
        }
        SegmentGrid { cell, buckets }
    }

    /// Edge indices whose buckets overlap the axis-aligned box `[lo, hi]`,
    /// sorted and unique.
    pub fn query_box(&self, lo: Point, hi: Point) -> Vec<usize> {
        let mut out = Vec::new();
        for key in cells(lo, hi, self.cell) {
            if let Some(list) = self.buckets.get(&key) {
                out.extend_from_slice(list);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edges possibly within `margin` of edge `edge` (includes `edge` itself).
    pub fn candidates(&self, graph: &SpatialGraph, edge: usize, margin: f64) -> Vec<usize> {
        let (a, b) = graph.edges()[edge];
        self.near_segment(graph.pos(a), graph.pos(b), margin)
    }

    pub fn near_segment(&self, a: Point, b: Point, margin: f64) -> Vec<usize> {
        let (lo, hi) = bbox(a, b);
        self.query_box(
            Point::new(lo.x - margin, lo.y - margin),
            Point::new(hi.x + margin, hi.y + margin),
        )
    }

    pub fn near_point(&self, p: Point, radius: f64) -> Vec<usize> {
        self.query_box(
            Point::new(p.x - radius, p.y - radius),
            Point::new(p.x + radius, p.y + radius),
        )
    }
}

fn bbox(a: Point, b: Point) -> (Point, Point) {
    (
        Point::new(a.x.min(b.x), a.y.min(b.y)),
        Point::new(a.x.max(b.x), a.y.max(b.y)),
    )
}

fn cells(lo: Point, hi: Point, cell: f64) -> impl Iterator<Item = (i64, i64)> {
    let x0 = (lo.x / cell).floor() as i64;
    let x1 = (hi.x / cell).floor() as i64;
    let y0 = (lo.y / cell).floor() as i64;
    let y1 = (hi.y / cell).floor() as i64;
    (y0..=y1).flat_map(move |y| (x0..=x1).map(move |x| (x, y)))
}
