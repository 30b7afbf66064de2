//! Choice of one encoded direction per undirected edge under the
//! one-edge-per-sector restriction.
//!
//! Edges are visited in order of (lower endpoint id, forward angle). Each
//! edge is encoded forward (from its lower-id endpoint) when that sector is
//! free at the tail, reversed when only the reverse sector is free (the
//! undirected fix), and otherwise split at a midpoint vertex whose two
//! outgoing edges both point back at the original endpoints (the
//! interpolatable fix).

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{SpatialGraph, Vertex, VertexId};

use super::sector::{angle, sector_index};
use super::snap::CellSnap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    /// Vertex index in [`Orientation::graph`].
    pub tail: usize,
    pub head: usize,
    /// Sector in `1..=D_max`.
    pub sector: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FixReport {
    /// Undirected edges in the input graph.
    pub edges: usize,
    pub forward: usize,
    pub undirected_fixes: usize,
    pub interpolation_fixes: usize,
}

impl FixReport {
    pub fn undirected_ratio(&self) -> f64 {
        ratio(self.undirected_fixes, self.edges)
    }

    pub fn interpolation_ratio(&self) -> f64 {
        ratio(self.interpolation_fixes, self.edges)
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

#[derive(Debug, Clone)]
pub struct Orientation {
    /// Input graph plus any midpoint vertices added by splits.
    pub graph: SpatialGraph,
    pub edges: Vec<OrientedEdge>,
    pub report: FixReport,
}

pub fn orient_edges(graph: &SpatialGraph, d_max: usize) -> Result<Orientation> {
    orient(graph, d_max, None)
}

pub(crate) fn orient(graph: &SpatialGraph, d_max: usize, snap: Option<&mut CellSnap>) -> Result<Orientation> {
    if d_max < 3 {
        return Err(Error::Config(format!("D_max must be at least 3, got {d_max}")));
    }
    let mut snap = snap;
    let mut vertices: Vec<Vertex> = graph.vertices().to_vec();
    let mut occupied: Vec<Vec<bool>> = vec![vec![false; d_max]; vertices.len()];
    let mut next_id: VertexId = graph.next_id();
    let mut out_edges = Vec::with_capacity(graph.edge_count());
    let mut undirected_edges: Vec<(usize, usize)> = Vec::with_capacity(graph.edge_count());
    let mut report = FixReport {
        edges: graph.edge_count(),
        ..FixReport::default()
    };

    let sector_between = |from: Point, to: Point| {
        let d = to - from;
        sector_index(angle(d.x, d.y), d_max)
    };

    let mut order: Vec<(VertexId, f64, usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (tail, head) = if graph.id(a) <= graph.id(b) { (a, b) } else { (b, a) };
            let d = graph.pos(head) - graph.pos(tail);
            (graph.id(tail), angle(d.x, d.y), tail, head)
        })
        .collect();
    order.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)).then((x.2, x.3).cmp(&(y.2, y.3))));

    for (_, _, a, b) in order {
        let (pa, pb) = (vertices[a].pos, vertices[b].pos);
        let s_ab = sector_between(pa, pb);
        if !occupied[a][s_ab] {
            occupied[a][s_ab] = true;
            out_edges.push(OrientedEdge { tail: a, head: b, sector: s_ab + 1 });
            undirected_edges.push((a, b));
            report.forward += 1;
            continue;
        }
        let s_ba = sector_between(pb, pa);
        if !occupied[b][s_ba] {
            occupied[b][s_ba] = true;
            out_edges.push(OrientedEdge { tail: b, head: a, sector: s_ba + 1 });
            undirected_edges.push((a, b));
            report.undirected_fixes += 1;
            continue;
        }
        let mid = split_point(pa, pb, snap.as_deref_mut(), vertices[a].id, vertices[b].id)?;
        let s_ma = sector_between(mid, pa);
        let s_mb = sector_between(mid, pb);
        if s_ma == s_mb {
            return Err(Error::Unrepresentable(vertices[a].id, vertices[b].id));
        }
        let m = vertices.len();
        vertices.push(Vertex { id: next_id, pos: mid });
        next_id += 1;
        let mut occ = vec![false; d_max];
        occ[s_ma] = true;
        occ[s_mb] = true;
        occupied.push(occ);
        out_edges.push(OrientedEdge { tail: m, head: a, sector: s_ma + 1 });
        out_edges.push(OrientedEdge { tail: m, head: b, sector: s_mb + 1 });
        undirected_edges.push((a, m));
        undirected_edges.push((m, b));
        report.interpolation_fixes += 1;
    }

    let graph = SpatialGraph::from_parts(graph.width(), graph.height(), vertices, undirected_edges)?;
    Ok(Orientation {
        graph,
        edges: out_edges,
        report,
    })
}

fn split_point(pa: Point, pb: Point, snap: Option<&mut CellSnap>, ida: VertexId, idb: VertexId) -> Result<Point> {
    match snap {
        None => Ok(pa.lerp(pb, 0.5)),
        Some(snap) => {
            for t in [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65, 0.3, 0.7] {
                if let Some(p) = snap.claim(pa.lerp(pb, t)) {
                    if p != pa && p != pb {
                        return Ok(p);
                    }
                }
            }
            Err(Error::Unrepresentable(ida, idb))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(angles_deg: &[f64], len: f64) -> SpatialGraph {
        let c = Point::new(100.0, 100.0);
        let mut pts = vec![c];
        let mut edges = Vec::new();
        for (i, &a) in angles_deg.iter().enumerate() {
            let r = a.to_radians();
            pts.push(Point::new(c.x + len * r.cos(), c.y + len * r.sin()));
            edges.push((0, i + 1));
        }
        SpatialGraph::from_positions(200.0, 200.0, &pts, &edges).unwrap()
    }

    fn assert_sector_unique(o: &Orientation, d_max: usize) {
        let mut seen = std::collections::HashSet::new();
        for e in &o.edges {
            assert!(seen.insert((e.tail, e.sector)), "sector {} used twice at {}", e.sector, e.tail);
            let d = o.graph.pos(e.head) - o.graph.pos(e.tail);
            assert_eq!(super::super::sector_of(d.x, d.y, d_max).unwrap(), e.sector);
        }
    }

    #[test]
    fn same_sector_pair_gets_reversed() {
        let g = star(&[10.0, 20.0], 15.0);
        let o = orient_edges(&g, 6).unwrap();
        assert_eq!(o.report.forward, 1);
        assert_eq!(o.report.undirected_fixes, 1);
        assert_eq!(o.report.interpolation_fixes, 0);
        let from_center = o.edges.iter().filter(|e| e.tail == 0).count();
        assert_eq!(from_center, 1);
        assert_sector_unique(&o, 6);
    }

    #[test]
    fn both_ends_blocked_forces_a_split() {
        let polar = |from: Point, deg: f64, len: f64| {
            let r = f64::to_radians(deg);
            Point::new(from.x + len * r.cos(), from.y + len * r.sin())
        };
        let a = Point::new(100.0, 100.0);
        let b = polar(a, 8.0, 20.0);
        let x = polar(b, 225.0, 20.0);
        let pts = [
            x,                     // 0: edges to 4 (10 deg) and 2 (45 deg) share sector 1
            a,                     // 1: edges to 3 (3 deg) and 2 (8 deg) share sector 1
            b,                     // 2: reverse edges to 0 (225 deg) and 1 (188 deg) share sector 4
            polar(a, 3.0, 18.0),   // 3
            polar(x, 10.0, 20.0),  // 4
        ];
        let g = SpatialGraph::from_positions(200.0, 200.0, &pts, &[(0, 4), (0, 2), (1, 3), (1, 2)]).unwrap();
        let o = orient_edges(&g, 6).unwrap();
        assert_eq!(o.report.forward, 2);
        assert_eq!(o.report.undirected_fixes, 1);
        assert_eq!(o.report.interpolation_fixes, 1);
        assert_eq!(o.graph.vertex_count(), 6);
        assert_eq!(o.graph.edge_count(), 5);
        let mid = o.graph.pos(5);
        assert!(mid.dist(a.lerp(b, 0.5)) < 1e-12);
        assert_eq!(o.edges.iter().filter(|e| e.tail == 5).count(), 2);
        assert_sector_unique(&o, 6);
    }

    #[test]
    fn axis_aligned_grid_needs_no_fixes() {
        let mut pts = Vec::new();
        let mut edges = Vec::new();
        for y in 0..5 {
            for x in 0..5 {
                pts.push(Point::new(10.0 + 20.0 * x as f64, 10.0 + 20.0 * y as f64 + 0.5));
                let i = y * 5 + x;
                if x < 4 {
                    edges.push((i, i + 1));
                }
                if y < 4 {
                    edges.push((i, i + 5));
                }
            }
        }
        let g = SpatialGraph::from_positions(120.0, 120.0, &pts, &edges).unwrap();
        let o = orient_edges(&g, 6).unwrap();
        assert_eq!(o.report.undirected_fixes + o.report.interpolation_fixes, 0);
        assert_sector_unique(&o, 6);
    }

    #[test]
    fn d_max_below_three_rejected() {
        let g = star(&[0.0], 10.0);
        assert!(orient_edges(&g, 2).is_err());
    }
}
