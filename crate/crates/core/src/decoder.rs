//! Tensor-to-graph decoding: vertex extraction by non-maximum suppression on
//! the vertexness channel, then edge connection by minimising
//!
//! ```text
//! d(v, i, u) = |(v + vec_i) - u| + w * (1 - cos(vec_i, u - v))
//! ```
//!
//! over nearby candidates `u`, accepting the best `u` only when its
//! Euclidean term is within `max_connect_dist`.

use std::collections::{BTreeSet, HashMap};

use crate::encoder::GteTensor;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{SpatialGraph, Vertex, VertexId};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeConfig {
    /// Vertexness threshold.
    pub p_thr: f32,
    /// Edgeness threshold.
    pub edge_thr: f32,
    /// Weight of the cosine-distance term.
    pub w: f64,
    /// Cap on the Euclidean term of the best match, meters.
    pub max_connect_dist: f64,
    /// Candidates farther than this from `v` are not considered, meters.
    pub candidate_radius: f64,
    /// Side of the square suppression window, cells (odd).
    pub nms_window: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            p_thr: 0.5,
            edge_thr: 0.5,
            w: 100.0,
            max_connect_dist: 15.0,
            candidate_radius: 30.0,
            nms_window: 3,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f32| p > 0.0 && p < 1.0;
        if !prob(self.p_thr) || !prob(self.edge_thr) {
            return Err(Error::Config(format!(
                "thresholds must lie in (0, 1), got p_thr = {} and edge_thr = {}",
                self.p_thr, self.edge_thr
            )));
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return Err(Error::Config(format!("w must be non-negative, got {}", self.w)));
        }
        if !(self.max_connect_dist > 0.0 && self.candidate_radius >= self.max_connect_dist) {
            return Err(Error::Config(format!(
                "need candidate_radius >= max_connect_dist > 0, got {} and {}",
                self.candidate_radius, self.max_connect_dist
            )));
        }
        if self.nms_window % 2 == 0 {
            return Err(Error::Config(format!("nms_window must be odd, got {}", self.nms_window)));
        }
        Ok(())
    }
}

/// A vertex candidate: a local maximum of the vertexness map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub cell: (usize, usize),
    pub pos: Point,
    pub vertexness: f32,
}

/// Counters emitted alongside a decoded graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeReport {
    /// Edge slots above threshold at candidate cells.
    pub slot_total: usize,
    pub slot_connected: usize,
    /// Slots with no acceptable match, including zero-vector slots.
    pub slot_unmatched: usize,
    pub zero_vectors: usize,
    pub vertices: usize,
    pub edges: usize,
}

impl DecodeReport {
    pub const CSV_HEADER: &'static str = "slot_total,slot_connected,slot_unmatched,vertices,edges";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.slot_total, self.slot_connected, self.slot_unmatched, self.vertices, self.edges
        )
    }
}

/// Strict local maxima of the vertexness above `p_thr`, in (y, x) order.
///
/// Equal neighbours are resolved in favour of the lexicographically smallest
/// `(y, x)`; the window is truncated at the grid border.
pub fn extract_vertices(t: &GteTensor, cfg: &DecodeConfig) -> Vec<Candidate> {
    let half = cfg.nms_window / 2;
    let (w, h) = (t.width(), t.height());
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let p = t.vertexness(x, y);
            if !(p > cfg.p_thr) {
                continue;
            }
            let mut is_max = true;
            'window: for ny in y.saturating_sub(half)..=(y + half).min(h - 1) {
                for nx in x.saturating_sub(half)..=(x + half).min(w - 1) {
                    if (nx, ny) == (x, y) {
                        continue;
                    }
                    let q = t.vertexness(nx, ny);
                    if q > p || (q == p && (ny, nx) < (y, x)) {
                        is_max = false;
                        break 'window;
                    }
                }
            }
            if is_max {
                out.push(Candidate {
                    cell: (x, y),
                    pos: Point::new(x as f64 * t.lambda(), y as f64 * t.lambda()),
                    vertexness: p,
                });
            }
        }
    }
    out
}

/// The two terms of the edge distance for one `(v, slot, u)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeScore {
    pub score: f64,
    /// `|(v + vec) - u|`.
    pub euclidean: f64,
}

/// Edge distance between candidate `v` with slot vector `vec` and candidate
/// `u`. `None` when `vec` is zero or `u` coincides with `v`.
pub fn edge_distance(v: Point, vec: Point, u: Point, w: f64) -> Option<EdgeScore> {
    let to_u = u - v;
    let (nv, nu) = (vec.norm(), to_u.norm());
    if nv == 0.0 || nu == 0.0 {
        return None;
    }
    let euclidean = (v + vec).dist(u);
    let cos_dist = 1.0 - vec.dot(to_u) / (nv * nu);
    Some(EdgeScore {
        score: euclidean + w * cos_dist,
        euclidean,
    })
}

/// Bucket grid over candidate positions.
pub struct CandidateIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl CandidateIndex {
    pub fn new(candidates: &[Candidate], radius: f64) -> Self {
        let cell = radius.max(1e-6);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, c) in candidates.iter().enumerate() {
            buckets.entry(Self::key(cell, c.pos)).or_default().push(i);
        }
        CandidateIndex { cell, buckets }
    }

    fn key(cell: f64, p: Point) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Indices of candidates within `radius` of `p`, ascending.
    pub fn within(&self, candidates: &[Candidate], p: Point, radius: f64) -> Vec<usize> {
        let (kx, ky) = Self::key(self.cell, p);
        let reach = (radius / self.cell).ceil() as i64;
        let mut out = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if let Some(list) = self.buckets.get(&(kx + dx, ky + dy)) {
                    out.extend(list.iter().copied().filter(|&i| candidates[i].pos.dist(p) <= radius));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Minimiser of the edge distance over candidates within `candidate_radius`
/// of `candidates[v]`, excluding `v`. Ties go to the lower index. The distance
/// cap is not applied here.
pub fn best_match(
    v: usize,
    vec: Point,
    candidates: &[Candidate],
    index: &CandidateIndex,
    cfg: &DecodeConfig,
) -> Option<(usize, EdgeScore)> {
    let origin = candidates[v].pos;
    let mut best: Option<(usize, EdgeScore)> = None;
    for u in index.within(candidates, origin, cfg.candidate_radius) {
        if u == v {
            continue;
        }
        let Some(s) = edge_distance(origin, vec, candidates[u].pos, cfg.w) else {
            continue;
        };
        if best.map_or(true, |(_, b)| s.score < b.score) {
            best = Some((u, s));
        }
    }
    best
}

/// Connects candidates through their edge slots. Vertex ids in the output
/// are candidate indices.
pub fn connect_edges(candidates: &[Candidate], t: &GteTensor, cfg: &DecodeConfig) -> (SpatialGraph, DecodeReport) {
    let index = CandidateIndex::new(candidates, cfg.candidate_radius);
    let ids: Vec<usize> = (0..candidates.len()).collect();
    let per_candidate = par::map(&ids, |&v| {
        let (cx, cy) = candidates[v].cell;
        let mut report = DecodeReport::default();
        let mut edges = Vec::new();
        for sector in 1..=t.d_max() {
            let slot = t.edge(cx, cy, sector);
            if !(slot.edgeness > cfg.edge_thr) {
                continue;
            }
            report.slot_total += 1;
            let vec = Point::new(slot.dx as f64, slot.dy as f64);
            if vec.norm() == 0.0 || !vec.x.is_finite() || !vec.y.is_finite() {
                report.zero_vectors += 1;
                report.slot_unmatched += 1;
                continue;
            }
            match best_match(v, vec, candidates, &index, cfg) {
                Some((u, s)) if s.euclidean <= cfg.max_connect_dist => {
                    report.slot_connected += 1;
                    edges.push((v.min(u), v.max(u)));
                }
                _ => report.slot_unmatched += 1,
            }
        }
        (edges, report)
    });

    let mut report = DecodeReport::default();
    let mut edge_set = BTreeSet::new();
    for (edges, r) in per_candidate {
        report.slot_total += r.slot_total;
        report.slot_connected += r.slot_connected;
        report.slot_unmatched += r.slot_unmatched;
        report.zero_vectors += r.zero_vectors;
        edge_set.extend(edges);
    }
    let vertices = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| Vertex { id: i as VertexId, pos: c.pos })
        .collect();
    let graph = SpatialGraph::from_parts(
        t.width() as f64 * t.lambda(),
        t.height() as f64 * t.lambda(),
        vertices,
        edge_set.into_iter().collect(),
    )
    .expect("decoded candidates occupy distinct cells");
    report.vertices = graph.vertex_count();
    report.edges = graph.edge_count();
    (graph, report)
}

pub fn decode_with_report(t: &GteTensor, cfg: &DecodeConfig) -> Result<(SpatialGraph, DecodeReport)> {
    cfg.validate()?;
    let candidates = extract_vertices(t, cfg);
    Ok(connect_edges(&candidates, t, cfg))
}

pub fn decode(t: &GteTensor, cfg: &DecodeConfig) -> Result<SpatialGraph> {
    Ok(decode_with_report(t, cfg)?.0)
}
