//! Marker-based TOPO metric.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{EdgePoint, Network, ON_VERTEX_EPS};
use crate::geometry::Point;
use crate::graph::SpatialGraph;
use crate::{par, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TopoConfig {
    pub subgraph_radius: f64,
    pub seed_spacing: f64,
    pub marker_spacing: f64,
    pub match_dist: f64,
    pub seed_match_dist: f64,
    /// Cap on the number of seeds; when the arc-length placement yields
    /// more, a uniform sample is drawn with `seed`.
    pub max_seeds: Option<usize>,
    pub seed: u64,
}

impl Default for TopoConfig {
    fn default() -> Self {
        TopoConfig {
            subgraph_radius: 300.0,
            seed_spacing: 50.0,
            marker_spacing: 5.0,
            match_dist: 10.0,
            seed_match_dist: 15.0,
            max_seeds: None,
            seed: 0,
        }
    }
}

impl TopoConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("subgraph_radius", self.subgraph_radius),
            ("seed_spacing", self.seed_spacing),
            ("marker_spacing", self.marker_spacing),
            ("match_dist", self.match_dist),
            ("seed_match_dist", self.seed_match_dist),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.marker_spacing >= self.subgraph_radius {
            return Err(Error::Config("marker_spacing must be below subgraph_radius".into()));
        }
        if self.max_seeds == Some(0) {
            return Err(Error::Config("max_seeds must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedRecord {
    pub location: Point,
    pub matched: usize,
    pub proposed: usize,
    pub truth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub seeds: Vec<SeedRecord>,
}

impl TopoResult {
    pub const CSV_HEADER: &'static str = "seed_x,seed_y,matched,proposed,truth";

    pub fn totals(&self) -> (usize, usize, usize) {
        self.seeds.iter().fold((0, 0, 0), |(m, p, t), s| (m + s.matched, p + s.proposed, t + s.truth))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.seeds {
            out.push_str(&format!(
                "{:.3},{:.3},{},{},{}\n",
                s.location.x, s.location.y, s.matched, s.proposed, s.truth
            ));
        }
        out
    }
}

pub fn topo(truth: &SpatialGraph, proposal: &SpatialGraph, cfg: &TopoConfig) -> Result<TopoResult> {
    cfg.validate()?;
    if truth.edge_count() == 0 {
        return Err(Error::Validation("truth graph has no edges".into()));
    }
    let tnet = Network::new(truth);
    let pnet = Network::new(proposal);
    let seeds = place_seeds(&tnet, cfg);

    let records = par::map(&seeds, |root| {
        let truth_markers = markers(&tnet, root, cfg.subgraph_radius, cfg.marker_spacing);
        let Some((proot, _)) = pnet.nearest(root.pos, cfg.seed_match_dist, Some(tnet.direction(root.edge))) else {
            return SeedRecord {
                location: root.pos,
                matched: 0,
                proposed: 0,
                truth: truth_markers.len(),
            };
        };
        let prop_markers = markers(&pnet, &proot, cfg.subgraph_radius, cfg.marker_spacing);
        SeedRecord {
            location: root.pos,
            matched: greedy_match(&truth_markers, &prop_markers, cfg.match_dist).len(),
            proposed: prop_markers.len(),
            truth: truth_markers.len(),
        }
    });

    let (m, p, t) = records.iter().fold((0, 0, 0), |(m, p, t), s| (m + s.matched, p + s.proposed, t + s.truth));
    let precision = if p == 0 { 1.0 } else { m as f64 / p as f64 };
    let recall = if t == 0 { 0.0 } else { m as f64 / t as f64 };
    Ok(TopoResult {
        precision,
        recall,
        f1: super::f1_score(precision, recall),
        seeds: records,
    })
}

/// Seeds every `seed_spacing` meters of arc length, carried across edges in
/// edge order, starting half a spacing in.
fn place_seeds(net: &Network, cfg: &TopoConfig) -> Vec<EdgePoint> {
    let mut seeds = Vec::new();
    let mut next = cfg.seed_spacing / 2.0;
    let mut start = 0.0;
    for (e, &len) in net.lengths.iter().enumerate() {
        while next < start + len {
            seeds.push(net.point_at(e, next - start));
            next += cfg.seed_spacing;
        }
        start += len;
    }
    match cfg.max_seeds {
        Some(cap) if seeds.len() > cap => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut picked = sample(&mut rng, seeds.len(), cap).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| seeds[i]).collect()
        }
        _ => seeds,
    }
}

fn is_multiple(d: f64, spacing: f64) -> bool {
    let k = (d / spacing).round();
    (d - k * spacing).abs() <= 1e-6
}

/// Points whose graph distance from `root` is a multiple of `spacing` and at
/// most `radius`.
pub(crate) fn markers(net: &Network, root: &EdgePoint, radius: f64, spacing: f64) -> Vec<Point> {
    let g = net.graph;
    let dist = net.distances_from(root, radius);
    let limit = radius + 1e-9;
    let mut out = Vec::new();
    let mut touched: Vec<usize> = vec![root.edge];
    for (v, &d) in dist.iter().enumerate() {
        if d <= limit {
            if is_multiple(d, spacing) {
                out.push(g.pos(v));
            }
            touched.extend_from_slice(&net.incident[v]);
        }
    }
    touched.sort_unstable();
    touched.dedup();

    let mut along = Vec::new();
    for e in touched {
        let (a, b) = g.edges()[e];
        let len = net.lengths[e];
        // (origin offset, distance at origin, direction)
        let mut sources = vec![(0.0, dist[a], 1.0), (len, dist[b], -1.0)];
        if e == root.edge {
            sources.push((root.offset, 0.0, 1.0));
            sources.push((root.offset, 0.0, -1.0));
        }
        let reach = |s: f64| {
            sources
                .iter()
                .filter(|&&(o, _, dir)| (s - o) * dir >= -ON_VERTEX_EPS)
                .map(|&(o, base, _)| base + (s - o).abs())
                .fold(f64::INFINITY, f64::min)
        };
        along.clear();
        for &(o, base, dir) in &sources {
            if !base.is_finite() || base > limit {
                continue;
            }
            let span = if dir > 0.0 { len - o } else { o };
            let first = (base / spacing - 1e-9).ceil().max(0.0) as usize;
            let last = ((limit.min(base + span)) / spacing + 1e-9).floor() as usize;
            for k in first..=last {
                let s = o + dir * (k as f64 * spacing - base);
                if s <= ON_VERTEX_EPS || s >= len - ON_VERTEX_EPS {
                    continue;
                }
                if reach(s) >= base + (s - o).abs() - 1e-9 {
                    along.push(s);
                }
            }
        }
        along.sort_by(f64::total_cmp);
        along.dedup_by(|x, y| (*x - *y).abs() <= 1e-6);
        out.extend(along.iter().map(|&s| net.point_at(e, s).pos));
    }
    out
}

/// Greedy one-to-one matching, closest pairs first. Returns matched index
/// pairs `(i, j)` into `a` and `b`.
pub(crate) fn greedy_match(a: &[Point], b: &[Point], max_dist: f64) -> Vec<(usize, usize)> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let cell = max_dist.max(1e-6);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    let key = |p: Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    for (j, &p) in b.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(j);
    }
    let mut pairs = Vec::new();
    for (i, &p) in a.iter().enumerate() {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(js) = buckets.get(&(kx + dx, ky + dy)) {
                    for &j in js {
                        let d = p.dist(b[j]);
                        if d <= max_dist {
                            pairs.push((d, i, j));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::new();
    for (_, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
        }
    }
    out
}
