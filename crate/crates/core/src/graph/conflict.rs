//! Separation of vertices belonging to overlapping or crossing edges.
//!
//! Rule: for every pair of vertex-disjoint edges that cross or pass within
//! `min_sep`, each endpoint pair (one endpoint from each edge) closer than
//! `min_sep` is pushed apart. Each vertex of an offending pair moves
//! [`SHIFT_STEP`] meters along the line of its own offending edge, in the
//! sign combination that maximises the new separation; ties prefer moving
//! away from the crossing point. A vertex moves at most once per iteration
//! and never leaves the extent.

use crate::error::{Error, Result};
use crate::geometry::{segment_segment_closest, Point};

use super::{SegmentGrid, SpatialGraph, VertexId};

pub const SHIFT_STEP: f64 = 0.5;
pub const DEFAULT_MAX_ITER: usize = 100;
/// Moves that would shrink an incident edge below this are not taken.
const MIN_EDGE_LENGTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConflictReport {
    pub iterations: usize,
    pub converged: bool,
    /// Vertex pairs still closer than `min_sep` when iteration stopped.
    pub remaining: Vec<(VertexId, VertexId)>,
    pub moved_vertices: usize,
    pub max_displacement: f64,
}

#[derive(Debug, Clone, Copy)]
struct Offence {
    p: usize,
    q: usize,
    /// Other endpoint of `p`'s offending edge.
    p_other: usize,
    q_other: usize,
}

pub fn resolve_conflicts(graph: &SpatialGraph, min_sep: f64, max_iter: usize) -> Result<(SpatialGraph, ConflictReport)> {
    if !(min_sep > 0.0 && min_sep.is_finite()) {
        return Err(Error::Config(format!("min_sep must be positive, got {min_sep}")));
    }
    let original: Vec<Point> = graph.vertices().iter().map(|v| v.pos).collect();
    let mut pos = original.clone();
    let mut iterations = 0;
    let mut offences = find_offences(graph, &pos, min_sep);
    while !offences.is_empty() && iterations < max_iter {
        iterations += 1;
        let mut moved = vec![false; pos.len()];
        let mut any = false;
        for off in &offences {
            any |= push_apart(graph, &mut pos, &mut moved, off);
        }
        offences = find_offences(graph, &pos, min_sep);
        if !any {
            break;
        }
    }
    let mut remaining: Vec<(VertexId, VertexId)> = offences
        .iter()
        .map(|o| {
            let (a, b) = (graph.id(o.p), graph.id(o.q));
            (a.min(b), a.max(b))
        })
        .collect();
    remaining.sort_unstable();
    remaining.dedup();
    let displacement: Vec<f64> = original.iter().zip(&pos).map(|(a, b)| a.dist(*b)).collect();
    let report = ConflictReport {
        iterations,
        converged: remaining.is_empty(),
        remaining,
        moved_vertices: displacement.iter().filter(|&&d| d > 0.0).count(),
        max_displacement: displacement.iter().copied().fold(0.0, f64::max),
    };
    Ok((graph.with_positions(&pos)?, report))
}

fn find_offences(graph: &SpatialGraph, pos: &[Point], min_sep: f64) -> Vec<Offence> {
    let edges = graph.edges();
    let grid = SegmentGrid::from_segments(pos, edges, (4.0 * min_sep).max(20.0));
    let mut out = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for j in grid.near_segment(pos[a], pos[b], min_sep) {
            if j <= i {
                continue;
            }
            let (c, d) = edges[j];
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let (dist, _, _) = segment_segment_closest(pos[a], pos[b], pos[c], pos[d]);
            if dist >= min_sep {
                continue;
            }
            for (p, p_other) in [(a, b), (b, a)] {
                for (q, q_other) in [(c, d), (d, c)] {
                    if pos[p].dist(pos[q]) < min_sep {
                        out.push(Offence { p, q, p_other, q_other });
                    }
                }
            }
        }
    }
    out.sort_unstable_by_key(|o| (o.p.min(o.q), o.p.max(o.q), o.p, o.p_other, o.q_other));
    out
}

/// Applies one step for a single offending pair. Returns whether anything moved.
fn push_apart(graph: &SpatialGraph, pos: &mut [Point], moved: &mut [bool], off: &Offence) -> bool {
    let options = |v: usize, other: usize, moved: &[bool], pos: &[Point]| -> Vec<Point> {
        let mut out = Vec::with_capacity(3);
        if !moved[v] {
            if let Some(u) = (pos[v] - pos[other]).normalized() {
                for dir in [u, u * -1.0] {
                    if let Some(p) = step_inside(graph, pos, v, dir) {
                        out.push(p);
                    }
                }
            }
        }
        out.push(pos[v]);
        out
    };
    let p_opts = options(off.p, off.p_other, moved, pos);
    let q_opts = options(off.q, off.q_other, moved, pos);
    let mut best = (pos[off.p].dist(pos[off.q]), pos[off.p], pos[off.q]);
    for &pp in &p_opts {
        for &qq in &q_opts {
            let d = pp.dist(qq);
            if d > best.0 + 1e-12 {
                best = (d, pp, qq);
            }
        }
    }
    let mut any = false;
    if best.1 != pos[off.p] {
        pos[off.p] = best.1;
        moved[off.p] = true;
        any = true;
    }
    if best.2 != pos[off.q] {
        pos[off.q] = best.2;
        moved[off.q] = true;
        any = true;
    }
    any
}

/// Position after moving `v` by up to one step along unit `dir`, shortened to
/// stay inside the extent; `None` if no admissible move exists.
fn step_inside(graph: &SpatialGraph, pos: &[Point], v: usize, dir: Point) -> Option<Point> {
    let p = pos[v];
    let mut t = SHIFT_STEP;
    for (coord, delta, max) in [(p.x, dir.x, graph.width()), (p.y, dir.y, graph.height())] {
        if delta > 0.0 {
            t = t.min((max - coord) / delta);
        } else if delta < 0.0 {
            t = t.min(-coord / delta);
        }
    }
    if t <= 1e-9 {
        return None;
    }
    let np = Point::new(
        (p.x + dir.x * t).clamp(0.0, graph.width()),
        (p.y + dir.y * t).clamp(0.0, graph.height()),
    );
    let too_short = graph
        .neighbors(v)
        .iter()
        .any(|&n| np.dist(pos[n]) < MIN_EDGE_LENGTH);
    (!too_short).then_some(np)
}
