//! Reference implementations used by the integration tests. They favour
//! obviousness over speed: linear scans, Floyd-Warshall, closed forms.

#![allow(dead_code)]

use gte::decoder::Candidate;
use gte::geometry::{project_onto_segment, Point};
use gte::harness::{SynthKind, SynthSpec};
use gte::SpatialGraph;

/// Corpus member `i` of a kind; sized so interpolation stays under 1500
/// vertices and stacked tiles have room for their highways.
pub fn corpus_spec(kind: SynthKind, i: u64) -> SynthSpec {
    let extent = match kind {
        SynthKind::Stacked => 500.0 + (i % 4) as f64 * 100.0,
        _ => 300.0 + (i % 6) as f64 * 100.0,
    };
    SynthSpec {
        kind,
        extent,
        spacing: 80.0 + (i % 5) as f64 * 15.0,
        curviness: (i % 7) as f64 / 10.0,
        overpasses: if kind == SynthKind::Stacked { 2 } else { 0 },
        seed: 1000 + i,
    }
}

/// Jittered lattice with `nx * ny` vertices and every edge present.
pub fn lattice(nx: usize, ny: usize, spacing: f64, jitter: &[f64]) -> SpatialGraph {
    let mut pts = Vec::new();
    for y in 0..ny {
        for x in 0..nx {
            let k = pts.len();
            let j = |o: usize| jitter.get((2 * k + o) % jitter.len().max(1)).copied().unwrap_or(0.0);
            pts.push(Point::new(10.0 + x as f64 * spacing + j(0), 10.0 + y as f64 * spacing + j(1)));
        }
    }
    let mut edges = Vec::new();
    for y in 0..ny {
        for x in 0..nx {
            let v = y * nx + x;
            if x + 1 < nx {
                edges.push((v, v + 1));
            }
            if y + 1 < ny {
                edges.push((v, v + nx));
            }
        }
    }
    let w = 20.0 + nx as f64 * spacing;
    let h = 20.0 + ny as f64 * spacing;
    SpatialGraph::from_positions(w, h, &pts, &edges).unwrap()
}

pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in edges {
        if w < d[a][b] {
            d[a][b] = w;
            d[b][a] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn bellman_ford(n: usize, edges: &[(usize, usize, f64)], source: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; n];
    d[source] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for &(a, b, w) in edges {
            if d[a] + w < d[b] {
                d[b] = d[a] + w;
                changed = true;
            }
            if d[b] + w < d[a] {
                d[a] = d[b] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

pub fn weighted_edges(g: &SpatialGraph) -> Vec<(usize, usize, f64)> {
    g.edges().iter().map(|&(a, b)| (a, b, g.pos(a).dist(g.pos(b)))).collect()
}

// ---------------------------------------------------------------- APLS

struct Control {
    pos: Point,
    dir: Option<Point>,
    /// Vertex index, or (edge, offset).
    at: Result<usize, (usize, f64)>,
}

fn controls(g: &SpatialGraph, spacing: f64) -> Vec<Control> {
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        if g.degree(v) != 0 && g.degree(v) != 2 {
            out.push(Control { pos: g.pos(v), dir: None, at: Ok(v) });
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let (pa, pb) = (g.pos(a), g.pos(b));
        let len = pa.dist(pb);
        let n = (len / spacing).ceil().max(1.0) as usize;
        for j in 1..n {
            let off = len * j as f64 / n as f64;
            out.push(Control { pos: pa.lerp(pb, off / len), dir: Some(pb - pa), at: Err((e, off)) });
        }
    }
    out
}

/// Splits edges at the given (edge, offset) points; returns weighted edges,
/// node count and the node of each point.
fn split_graph(g: &SpatialGraph, points: &[(usize, f64)]) -> (Vec<(usize, usize, f64)>, usize, Vec<usize>) {
    let mut n = g.vertex_count();
    let mut node_of = vec![0; points.len()];
    let mut out = Vec::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let len = g.pos(a).dist(g.pos(b));
        let mut here: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.0 == e)
            .map(|(i, p)| (p.1, i))
            .collect();
        here.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut chain: Vec<(f64, usize)> = vec![(0.0, a)];
        for (off, i) in here {
            if off <= 1e-9 {
                node_of[i] = a;
            } else if off >= len - 1e-9 {
                node_of[i] = b;
            } else if (chain.last().unwrap().0 - off).abs() <= 1e-9 {
                node_of[i] = chain.last().unwrap().1;
            } else {
                chain.push((off, n));
                node_of[i] = n;
                n += 1;
            }
        }
        chain.push((len, b));
        for w in chain.windows(2) {
            out.push((w[0].1, w[1].1, w[1].0 - w[0].0));
        }
    }
    (out, n, node_of)
}

fn snap(to: &SpatialGraph, p: Point, dir: Option<Point>, max: f64) -> Option<(usize, f64)> {
    let mut hits = Vec::new();
    for (e, &(a, b)) in to.edges().iter().enumerate() {
        let (pa, pb) = (to.pos(a), to.pos(b));
        let t = project_onto_segment(p, pa, pb);
        let d = pa.lerp(pb, t).dist(p);
        if d <= max {
            let align = dir.map_or(0.0, |dir| {
                let v = pb - pa;
                (v.dot(dir) / (v.norm() * dir.norm())).abs()
            });
            hits.push((e, t * pa.dist(pb), d, align));
        }
    }
    let best = hits.iter().map(|h| h.2).fold(f64::INFINITY, f64::min);
    hits.retain(|h| h.2 <= best + 1e-6);
    // alignment desc, distance asc, index asc
    hits.sort_by(|x, y| y.3.total_cmp(&x.3).then(x.2.total_cmp(&y.2)).then(x.0.cmp(&y.0)));
    hits.first().map(|h| (h.0, h.1))
}

fn apls_direction(from: &SpatialGraph, to: &SpatialGraph, snap_dist: f64, spacing: f64) -> Vec<f64> {
    let ctl = controls(from, spacing);
    let inside: Vec<(usize, f64)> = ctl.iter().filter_map(|c| c.at.err()).collect();
    let (fe, fnodes, fmap) = split_graph(from, &inside);
    let dfrom = floyd_warshall(fnodes, &fe);
    let mut k = 0;
    let from_node: Vec<usize> = ctl
        .iter()
        .map(|c| match c.at {
            Ok(v) => v,
            Err(_) => {
                k += 1;
                fmap[k - 1]
            }
        })
        .collect();

    let snaps: Vec<Option<(usize, f64)>> = ctl.iter().map(|c| snap(to, c.pos, c.dir, snap_dist)).collect();
    let snapped: Vec<(usize, f64)> = snaps.iter().flatten().copied().collect();
    let (te, tnodes, tmap) = split_graph(to, &snapped);
    let dto = floyd_warshall(tnodes, &te);
    let mut k = 0;
    let to_node: Vec<Option<usize>> = snaps
        .iter()
        .map(|s| {
            s.map(|_| {
                k += 1;
                tmap[k - 1]
            })
        })
        .collect();

    let mut scores = Vec::new();
    for i in 0..ctl.len() {
        for j in i + 1..ctl.len() {
            let lt = dfrom[from_node[i]][from_node[j]];
            if !lt.is_finite() || lt <= 1e-9 {
                continue;
            }
            let lp = match (to_node[i], to_node[j]) {
                (Some(a), Some(b)) if dto[a][b].is_finite() => Some(dto[a][b]),
                _ => None,
            };
            scores.push(match lp {
                None => 0.0,
                Some(lp) => {
                    let diff = (lt - lp).abs();
                    let diff = if diff <= 1e-9 * lt.max(1.0) { 0.0 } else { diff };
                    1.0 - (diff / lt).min(1.0)
                }
            });
        }
    }
    scores
}

/// All-pairs APLS over both directions.
pub fn apls_brute(truth: &SpatialGraph, prop: &SpatialGraph, snap_dist: f64, spacing: f64) -> f64 {
    let mut s = apls_direction(truth, prop, snap_dist, spacing);
    s.extend(apls_direction(prop, truth, snap_dist, spacing));
    s.iter().sum::<f64>() / s.len() as f64
}

// ---------------------------------------------------------------- TOPO

/// Marker counts on a straight road `[0, length]` for a root at `s`,
/// restricted to the covered intervals.
pub fn line_markers(s: f64, radius: f64, spacing: f64, covered: &[(f64, f64)]) -> usize {
    let seg = covered.iter().find(|&&(a, b)| s >= a && s <= b).expect("root on a covered interval");
    let k = (radius / spacing).floor() as i64;
    (-k..=k)
        .filter(|&j| {
            let x = s + j as f64 * spacing;
            x >= seg.0 - 1e-9 && x <= seg.1 + 1e-9
        })
        .count()
}

// ---------------------------------------------------------------- Eq. 1

/// Linear-scan argmin of the edge distance over candidates within
/// `radius` of `v`; `None` if the argmin breaks the cap.
pub fn eq1_brute(v: usize, vec: Point, cands: &[Candidate], w: f64, radius: f64, cap: f64) -> Option<usize> {
    let pv = cands[v].pos;
    let mut best: Option<(usize, f64, f64)> = None;
    for (u, c) in cands.iter().enumerate() {
        if u == v || c.pos.dist(pv) > radius {
            continue;
        }
        let d = c.pos - pv;
        if d.norm() == 0.0 {
            continue;
        }
        let euclid = (pv + vec).dist(c.pos);
        let cos = vec.dot(d) / (vec.norm() * d.norm());
        let score = euclid + w * (1.0 - cos);
        if best.map_or(true, |b| score < b.1) {
            best = Some((u, score, euclid));
        }
    }
    best.filter(|b| b.2 <= cap).map(|b| b.0)
}
