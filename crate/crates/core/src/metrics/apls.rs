//! Average path length similarity between control points.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{bounded_dijkstra, EdgePoint, Network, ON_VERTEX_EPS};
use crate::geometry::Point;
use crate::graph::SpatialGraph;
use crate::{par, Error, Result};

/// Length differences at or below this are treated as round-off.
const LENGTH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AplsConfig {
    pub snap_dist: f64,
    pub control_spacing: f64,
    /// Pairs sampled per direction; `None` evaluates every pair.
    pub max_pairs: Option<usize>,
    pub seed: u64,
}

impl Default for AplsConfig {
    fn default() -> Self {
        AplsConfig {
            snap_dist: 15.0,
            control_spacing: 50.0,
            max_pairs: Some(500),
            seed: 0,
        }
    }
}

impl AplsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.snap_dist.is_finite() && self.snap_dist > 0.0) {
            return Err(Error::Config("snap_dist must be positive".into()));
        }
        if !(self.control_spacing.is_finite() && self.control_spacing > 0.0) {
            return Err(Error::Config("control_spacing must be positive".into()));
        }
        if self.max_pairs == Some(0) {
            return Err(Error::Config("max_pairs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRecord {
    pub a: Point,
    pub b: Point,
    pub l_truth: f64,
    /// Path length on the compared graph, `None` when a point failed to snap
    /// or the points are disconnected there.
    pub l_prop: Option<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AplsResult {
    pub score: f64,
    /// Truth-to-proposal pairs followed by proposal-to-truth pairs.
    pub pairs: Vec<PairRecord>,
    pub forward_pairs: usize,
}

impl AplsResult {
    pub const CSV_HEADER: &'static str = "a_x,a_y,b_x,b_y,l_truth,l_prop,pair_score";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.pairs {
            let lp = p.l_prop.map_or_else(|| "inf".to_string(), |l| format!("{l:.6}"));
            out.push_str(&format!(
                "{:.3},{:.3},{:.3},{:.3},{:.6},{},{:.9}\n",
                p.a.x, p.a.y, p.b.x, p.b.y, p.l_truth, lp, p.score
            ));
        }
        out
    }
}

pub fn apls(truth: &SpatialGraph, proposal: &SpatialGraph, cfg: &AplsConfig) -> Result<AplsResult> {
    cfg.validate()?;
    if truth.edge_count() == 0 {
        return Err(Error::Validation("truth graph has no edges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tnet = Network::new(truth);
    let pnet = Network::new(proposal);
    let (mut pairs, fwd_snap) = one_direction(&tnet, &pnet, cfg, &mut rng);
    let forward_pairs = pairs.len();
    let (back, back_snap) = one_direction(&pnet, &tnet, cfg, &mut rng);
    pairs.extend(back);

    let score = if pairs.is_empty() {
        // Too few control points to form a pair: fall back to snap coverage.
        let (ok, n) = (fwd_snap.0 + back_snap.0, fwd_snap.1 + back_snap.1);
        if n == 0 {
            0.0
        } else {
            ok as f64 / n as f64
        }
    } else {
        super::kahan_sum(pairs.iter().map(|p| p.score)) / pairs.len() as f64
    };
    Ok(AplsResult { score, pairs, forward_pairs })
}

#[derive(Debug, Clone, Copy)]
enum Control {
    Vertex(usize),
    Inside(EdgePoint),
}

/// Vertices of degree other than 2 plus evenly spaced interior points.
/// Components without such a vertex get their lowest-index vertex.
fn control_points(net: &Network, spacing: f64) -> Vec<Control> {
    let g = net.graph;
    let mut out = Vec::new();
    let mut covered = vec![false; g.vertex_count()];
    for v in 0..g.vertex_count() {
        if g.degree(v) > 0 && g.degree(v) != 2 {
            out.push(Control::Vertex(v));
            covered[v] = true;
        }
    }
    for (e, &len) in net.lengths.iter().enumerate() {
        let pieces = (len / spacing).ceil().max(1.0) as usize;
        for j in 1..pieces {
            out.push(Control::Inside(net.point_at(e, len * j as f64 / pieces as f64)));
            let (a, b) = g.edges()[e];
            covered[a] = true;
            covered[b] = true;
        }
    }
    // Spread coverage over components; uncovered ones contribute a vertex.
    let mut comp = vec![usize::MAX; g.vertex_count()];
    for s in 0..g.vertex_count() {
        if comp[s] != usize::MAX || g.degree(s) == 0 {
            continue;
        }
        let mut stack = vec![s];
        let mut members = Vec::new();
        comp[s] = s;
        while let Some(v) = stack.pop() {
            members.push(v);
            for &n in g.neighbors(v) {
                if comp[n] == usize::MAX {
                    comp[n] = s;
                    stack.push(n);
                }
            }
        }
        if !members.iter().any(|&v| covered[v]) {
            out.push(Control::Vertex(s));
        }
    }
    out
}

struct Augmented {
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// Splits edges of `net` at the given points. Returns the augmented
/// adjacency and the node index of each point.
fn augment(net: &Network, points: &[EdgePoint]) -> (Augmented, Vec<usize>) {
    let g = net.graph;
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); g.vertex_count()];
    let mut by_edge: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        by_edge.entry(p.edge).or_default().push((p.offset, i));
    }
    let mut node_of = vec![usize::MAX; points.len()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let len = net.lengths[e];
        let mut chain = vec![(0.0, a)];
        if let Some(list) = by_edge.get_mut(&e) {
            list.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            for &(off, i) in list.iter() {
                let node = if off <= ON_VERTEX_EPS {
                    a
                } else if off >= len - ON_VERTEX_EPS {
                    b
                } else if let Some(&(_, last)) = chain.last().filter(|c| (c.0 - off).abs() <= ON_VERTEX_EPS) {
                    last
                } else {
                    adjacency.push(Vec::new());
                    let n = adjacency.len() - 1;
                    chain.push((off, n));
                    n
                };
                node_of[i] = node;
            }
        }
        chain.push((len, b));
        for w in chain.windows(2) {
            let (o0, n0) = w[0];
            let (o1, n1) = w[1];
            adjacency[n0].push((n1, o1 - o0));
            adjacency[n1].push((n0, o1 - o0));
        }
    }
    (Augmented { adjacency }, node_of)
}

/// Returns pair records and `(snapped, total)` control-point counts.
fn one_direction(from: &Network, to: &Network, cfg: &AplsConfig, rng: &mut ChaCha8Rng) -> (Vec<PairRecord>, (usize, usize)) {
    let controls = control_points(from, cfg.control_spacing);
    let n = controls.len();
    let inside: Vec<EdgePoint> = controls
        .iter()
        .filter_map(|c| match c {
            Control::Inside(p) => Some(*p),
            Control::Vertex(_) => None,
        })
        .collect();
    let (from_aug, inside_nodes) = augment(from, &inside);
    let mut next_inside = 0;
    let mut from_node = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    for c in &controls {
        match c {
            Control::Vertex(v) => {
                from_node.push(*v);
                positions.push(from.graph.pos(*v));
            }
            Control::Inside(p) => {
                from_node.push(inside_nodes[next_inside]);
                positions.push(p.pos);
                next_inside += 1;
            }
        }
    }

    let snaps: Vec<Option<EdgePoint>> = controls
        .iter()
        .zip(&positions)
        .map(|(c, &p)| {
            let dir = match c {
                Control::Inside(e) => Some(from.direction(e.edge)),
                Control::Vertex(_) => None,
            };
            to.nearest(p, cfg.snap_dist, dir).map(|s| s.0)
        })
        .collect();
    let snapped: Vec<EdgePoint> = snaps.iter().flatten().copied().collect();
    let (to_aug, snapped_nodes) = augment(to, &snapped);
    let mut to_node = vec![None; n];
    let mut k = 0;
    for (i, s) in snaps.iter().enumerate() {
        if s.is_some() {
            to_node[i] = Some(snapped_nodes[k]);
            k += 1;
        }
    }
    let coverage = (k, n);

    let pairs = sample_pairs(n, cfg.max_pairs, rng);
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(i, j) in &pairs {
        by_source.entry(i).or_default().push(j);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    let records = par::map(&groups, |(i, targets)| {
        let i = *i;
        let dt = bounded_dijkstra(&from_aug.adjacency, &[(from_node[i], 0.0)], f64::INFINITY);
        let dp = to_node[i].map(|s| bounded_dijkstra(&to_aug.adjacency, &[(s, 0.0)], f64::INFINITY));
        let mut out = Vec::new();
        for &j in targets {
            let lt = dt[from_node[j]];
            if !lt.is_finite() || lt <= LENGTH_EPS {
                continue;
            }
            let lp = match (&dp, to_node[j]) {
                (Some(d), Some(t)) if d[t].is_finite() => Some(d[t]),
                _ => None,
            };
            let score = match lp {
                Some(lp) => {
                    let diff = (lt - lp).abs();
                    let diff = if diff <= LENGTH_EPS * lt.max(1.0) { 0.0 } else { diff };
                    1.0 - (diff / lt).min(1.0)
                }
                None => 0.0,
            };
            out.push(PairRecord {
                a: positions[i],
                b: positions[j],
                l_truth: lt,
                l_prop: lp,
                score,
            });
        }
        out
    });
    (records.into_iter().flatten().collect(), coverage)
}

/// All unordered pairs `(i, j)` with `i < j`, or a uniform sample of them.
fn sample_pairs(n: usize, max_pairs: Option<usize>, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let total = n * n.saturating_sub(1) / 2;
    let all = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    match max_pairs {
        Some(cap) if total > cap => {
            let mut picked = sample(rng, total, cap).into_vec();
            picked.sort_unstable();
            // Row i holds pairs with first element i; walk rows in order.
            let mut out = Vec::with_capacity(cap);
            let (mut i, mut row_start) = (0, 0);
            for k in picked {
                while k >= row_start + (n - 1 - i) {
                    row_start += n - 1 - i;
                    i += 1;
                }
                out.push((i, i + 1 + (k - row_start)));
            }
            out
        }
        _ => all().collect(),
    }
}
