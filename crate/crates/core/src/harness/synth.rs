use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{point_segment_distance, segment_intersection, segment_segment_closest, Point};
use crate::graph::SpatialGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthKind {
    Grid,
    Radial,
    Organic,
    Stacked,
}

impl SynthKind {
    pub const ALL: [SynthKind; 4] = [SynthKind::Grid, SynthKind::Radial, SynthKind::Organic, SynthKind::Stacked];

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Grid => "grid",
            SynthKind::Radial => "radial",
            SynthKind::Organic => "organic",
            SynthKind::Stacked => "stacked",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SynthKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown synthetic kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    /// Side of the square tile, meters.
    pub extent: f64,
    /// Block size or road spacing, meters.
    pub spacing: f64,
    /// 0 gives straight, regular roads; 1 is heavily perturbed.
    pub curviness: f64,
    /// Minimum number of stacked crossings (stacked kind only).
    pub overpasses: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            kind: SynthKind::Grid,
            extent: 600.0,
            spacing: 100.0,
            curviness: 0.3,
            overpasses: 0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.extent.is_finite() && self.extent > 0.0) {
            return Err(Error::Config(format!("extent must be positive, got {}", self.extent)));
        }
        if !(self.spacing.is_finite() && self.spacing >= 30.0) {
            return Err(Error::Config(format!("spacing must be at least 30 m, got {}", self.spacing)));
        }
        if !(0.0..=1.0).contains(&self.curviness) {
            return Err(Error::Config(format!("curviness must lie in [0, 1], got {}", self.curviness)));
        }
        if self.spacing > self.extent {
            return Err(Error::Infeasible(format!(
                "spacing {} exceeds extent {}",
                self.spacing, self.extent
            )));
        }
        Ok(())
    }
}

/// A generated graph and the stacked crossings built into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub graph: SpatialGraph,
    pub crossings: usize,
}

pub fn generate(spec: &SynthSpec) -> Result<Synthetic> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = Builder::default();
    let crossings = match spec.kind {
        SynthKind::Grid => {
            lattice(&mut b, spec, 0.0, &mut rng);
            0
        }
        SynthKind::Radial => {
            radial(&mut b, spec, &mut rng)?;
            0
        }
        SynthKind::Organic => {
            organic(&mut b, spec, &mut rng)?;
            0
        }
        SynthKind::Stacked => {
            let calm = SynthSpec { curviness: spec.curviness * 0.5, ..spec.clone() };
            lattice(&mut b, &calm, spec.spacing * 0.5, &mut rng);
            highways(&mut b, spec, &mut rng)?
        }
    };
    let graph = SpatialGraph::from_positions(spec.extent, spec.extent, &b.points, &b.edges)?;
    Ok(Synthetic { graph, crossings })
}

#[derive(Default)]
struct Builder {
    points: Vec<Point>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn add(&mut self, p: Point) -> usize {
        self.points.push(p);
        self.points.len() - 1
    }

    fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    fn incident_dirs(&self, v: usize) -> Vec<Point> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, _) => Some(self.points[b] - self.points[v]),
                (_, true) => Some(self.points[a] - self.points[v]),
                _ => None,
            })
            .collect()
    }
}

fn clamp_into(p: Point, lo: f64, hi: f64) -> Point {
    Point::new(p.x.clamp(lo, hi), p.y.clamp(lo, hi))
}

/// Square lattice centered in the tile, `margin` meters clear of the border.
fn lattice(b: &mut Builder, spec: &SynthSpec, margin: f64, rng: &mut ChaCha8Rng) {
    let span = spec.extent - 2.0 * margin;
    let n = (span / spec.spacing + 1e-9).floor() as usize + 1;
    let origin = margin + (span - (n - 1) as f64 * spec.spacing) / 2.0;
    let jitter = spec.curviness * spec.spacing * 0.2;
    let first = b.points.len();
    for iy in 0..n {
        for ix in 0..n {
            let mut p = Point::new(origin + ix as f64 * spec.spacing, origin + iy as f64 * spec.spacing);
            if jitter > 0.0 {
                p = p + Point::new(rng.random_range(-jitter..=jitter), rng.random_range(-jitter..=jitter));
            }
            b.add(clamp_into(p, 0.0, spec.extent));
        }
    }
    for iy in 0..n {
        for ix in 0..n {
            let v = first + iy * n + ix;
            if ix + 1 < n {
                b.edges.push((v, v + 1));
            }
            if iy + 1 < n {
                b.edges.push((v, v + n));
            }
        }
    }
}

/// Spokes from the tile center joined by polygonal rings.
fn radial(b: &mut Builder, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Result<()> {
    let c = Point::new(spec.extent / 2.0, spec.extent / 2.0);
    let rings = ((spec.extent / 2.0 - 10.0) / spec.spacing).floor() as usize;
    if rings == 0 {
        return Err(Error::Infeasible("extent too small for one ring".into()));
    }
    let spokes: usize = rng.random_range(4..=8);
    let phase = rng.random_range(0.0..TAU);
    let wobble = spec.curviness * spec.spacing * 0.15;
    let angle_jitter = spec.curviness * (TAU / spokes as f64) * 0.15;
    let center = b.add(c);
    let mut prev_ring = vec![center; spokes];
    for r in 1..=rings {
        let mut ring = Vec::with_capacity(spokes);
        for s in 0..spokes {
            let radius = r as f64 * spec.spacing + if wobble > 0.0 { rng.random_range(-wobble..=wobble) } else { 0.0 };
            let theta = phase
                + s as f64 * TAU / spokes as f64
                + if angle_jitter > 0.0 { rng.random_range(-angle_jitter..=angle_jitter) } else { 0.0 };
            let p = c + Point::new(theta.cos(), theta.sin()) * radius;
            ring.push(b.add(clamp_into(p, 0.0, spec.extent)));
        }
        for s in 0..spokes {
            b.edges.push((prev_ring[s], ring[s]));
            b.edges.push((ring[s], ring[(s + 1) % spokes]));
        }
        prev_ring = ring;
    }
    Ok(())
}

const ORGANIC_CLEARANCE: f64 = 12.0;
const ORGANIC_MIN_ANGLE: f64 = 30.0;
const ORGANIC_MAX_DEGREE: usize = 6;

/// Planar network of curvy roads grown as random walks. New roads start at
/// the border or branch off existing vertices; a walk ends when it joins a
/// nearby vertex or is blocked.
fn organic(b: &mut Builder, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Result<()> {
    let margin = 10.0;
    let (lo, hi) = (margin, spec.extent - margin);
    let step_lo = (spec.spacing * 0.4).max(25.0);
    let step_hi = (spec.spacing * 0.7).max(step_lo + 1.0);
    let target = spec.extent * spec.extent / spec.spacing;
    let turn = (5.0 + 35.0 * spec.curviness).to_radians();
    let mut length = 0.0;
    let mut failures = 0;
    while length < target && failures < 400 {
        // Start: border point heading inward, or a branch off a vertex.
        let (start, mut heading) = if b.points.is_empty() || rng.random_bool(0.3) {
            let t = rng.random_range(lo..hi);
            match rng.random_range(0..4) {
                0 => (Point::new(t, lo), TAU / 4.0),
                1 => (Point::new(t, hi), -TAU / 4.0),
                2 => (Point::new(lo, t), 0.0),
                _ => (Point::new(hi, t), TAU / 2.0),
            }
        } else {
            let v = rng.random_range(0..b.points.len());
            (b.points[v], rng.random_range(0.0..TAU))
        };
        let mut cur = match b.points.iter().position(|&p| p == start) {
            Some(v) => v,
            None => {
                if !vertex_clear(b, start, None) {
                    failures += 1;
                    continue;
                }
                b.add(start)
            }
        };
        let mut steps = 0;
        loop {
            heading += rng.random_range(-turn..=turn);
            let step = rng.random_range(step_lo..step_hi);
            let next = b.points[cur] + Point::new(heading.cos(), heading.sin()) * step;
            // Join an existing vertex within reach.
            let join = (0..b.points.len())
                .filter(|&u| u != cur && b.points[u].dist(next) < step * 0.6)
                .min_by(|&u, &w| b.points[u].dist(next).total_cmp(&b.points[w].dist(next)));
            if let Some(u) = join {
                if can_link(b, cur, u) {
                    length += b.points[cur].dist(b.points[u]);
                    b.edges.push((cur, u));
                    steps += 1;
                }
                break;
            }
            if next.x < lo || next.x > hi || next.y < lo || next.y > hi {
                break;
            }
            if !vertex_clear(b, next, Some(cur)) || !segment_clear(b, cur, next, None) || !angle_ok(b, cur, next) {
                break;
            }
            if b.degree(cur) >= ORGANIC_MAX_DEGREE {
                break;
            }
            let n = b.add(next);
            b.edges.push((cur, n));
            length += step;
            steps += 1;
            cur = n;
        }
        if steps == 0 {
            failures += 1;
            // Drop an isolated start vertex.
            if b.points.len() == cur + 1 && b.degree(cur) == 0 {
                b.points.pop();
            }
        }
    }
    if b.edges.is_empty() {
        return Err(Error::Infeasible("organic growth produced no roads".into()));
    }
    Ok(())
}

fn vertex_clear(b: &Builder, p: Point, from: Option<usize>) -> bool {
    b.points.iter().enumerate().all(|(i, &q)| Some(i) == from || q.dist(p) >= ORGANIC_CLEARANCE)
        && b.edges.iter().all(|&(x, y)| {
            from.is_some_and(|f| f == x || f == y)
                || point_segment_distance(p, b.points[x], b.points[y]) >= ORGANIC_CLEARANCE
        })
}

/// True when segment `a -> p` keeps clear of edges not touching `a` or `to`.
fn segment_clear(b: &Builder, a: usize, p: Point, to: Option<usize>) -> bool {
    let pa = b.points[a];
    b.edges.iter().all(|&(x, y)| {
        let touches = x == a || y == a || to.is_some_and(|t| t == x || t == y);
        if touches {
            // Only forbid overlap with edges at the shared vertex, handled by the angle test.
            return true;
        }
        segment_segment_closest(pa, p, b.points[x], b.points[y]).0 >= ORGANIC_CLEARANCE
    }) && b.points.iter().enumerate().all(|(i, &q)| {
        i == a || to == Some(i) || point_segment_distance(q, pa, p) >= ORGANIC_CLEARANCE
    })
}

fn angle_ok(b: &Builder, v: usize, p: Point) -> bool {
    let dir = p - b.points[v];
    b.incident_dirs(v).iter().all(|&d| {
        let cos = dir.dot(d) / (dir.norm() * d.norm());
        cos.clamp(-1.0, 1.0).acos().to_degrees() >= ORGANIC_MIN_ANGLE
    })
}

fn can_link(b: &Builder, a: usize, u: usize) -> bool {
    let (pa, pu) = (b.points[a], b.points[u]);
    pa.dist(pu) >= 25.0
        && b.degree(a) < ORGANIC_MAX_DEGREE
        && b.degree(u) < ORGANIC_MAX_DEGREE
        && !b.edges.iter().any(|&(x, y)| (x, y) == (a.min(u), a.max(u)) || (x, y) == (a.max(u), a.min(u)))
        && segment_clear(b, a, pu, Some(u))
        && angle_ok(b, a, pu)
        && angle_ok(b, u, pa)
}

/// Minimum distance between a highway and any lattice vertex.
const HIGHWAY_VERTEX_CLEARANCE: f64 = 15.0;

/// Parallel diagonal highways across the tile, crossing lattice edges
/// without sharing vertices. Returns the number of crossings created.
fn highways(b: &mut Builder, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Result<usize> {
    let want = spec.overpasses.max(1);
    let lattice_points = b.points.len();
    let lattice_edges = b.edges.clone();
    // Diagonal lines keep a periodic gap to the lattice vertices, so a
    // clear offset always exists for moderate jitter.
    let angle = if rng.random_bool(0.5) { TAU / 8.0 } else { 3.0 * TAU / 8.0 };
    let dir = Point::new(angle.cos(), angle.sin());
    let normal = Point::new(-dir.y, dir.x);
    let c = Point::new(spec.extent / 2.0, spec.extent / 2.0);
    let reach = spec.extent * std::f64::consts::SQRT_2 / 2.0;
    let mut offsets: Vec<f64> = Vec::new();
    let mut total = 0;
    let mut attempts = 0;
    while total < want {
        attempts += 1;
        if attempts > 200 {
            return Err(Error::Infeasible(format!(
                "placed {total} of {want} overpasses in a {} m tile",
                spec.extent
            )));
        }
        let off = rng.random_range(-reach * 0.8..reach * 0.8);
        if offsets.iter().any(|&o| (o - off).abs() < spec.spacing) {
            continue;
        }
        let Some((p0, p1)) = clip_line(c + normal * off, dir, 1.0, spec.extent - 1.0) else {
            continue;
        };
        if p0.dist(p1) < spec.spacing {
            continue;
        }
        let near_vertex = (0..lattice_points)
            .any(|v| point_segment_distance(b.points[v], p0, p1) < HIGHWAY_VERTEX_CLEARANCE);
        if near_vertex {
            continue;
        }
        let hits = lattice_edges
            .iter()
            .filter(|&&(x, y)| segment_intersection(p0, p1, b.points[x], b.points[y]).is_some())
            .count();
        if hits == 0 {
            continue;
        }
        offsets.push(off);
        let a = b.add(p0);
        let z = b.add(p1);
        b.edges.push((a, z));
        total += hits;
    }
    Ok(total)
}

/// Clips the infinite line through `p` along `dir` to the square [lo, hi]^2.
fn clip_line(p: Point, dir: Point, lo: f64, hi: f64) -> Option<(Point, Point)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (pc, dc) in [(p.x, dir.x), (p.y, dir.y)] {
        if dc.abs() < 1e-12 {
            if pc < lo || pc > hi {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo - pc) / dc, (hi - pc) / dc);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t0 < t1).then(|| (p + dir * t0, p + dir * t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::crossing_points;

    fn spec(kind: SynthKind) -> SynthSpec {
        SynthSpec { kind, seed: 11, ..SynthSpec::default() }
    }

    #[test]
    fn plain_grid_counts() {
        let s = SynthSpec { extent: 2000.0, spacing: 100.0, curviness: 0.0, ..spec(SynthKind::Grid) };
        let g = generate(&s).unwrap().graph;
        assert_eq!((g.vertex_count(), g.edge_count()), (441, 840));
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in SynthKind::ALL {
            let s = SynthSpec { overpasses: 3, ..spec(kind) };
            assert_eq!(generate(&s).unwrap(), generate(&s).unwrap(), "{kind}");
        }
        let a = generate(&spec(SynthKind::Organic)).unwrap();
        let b = generate(&SynthSpec { seed: 12, ..spec(SynthKind::Organic) }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn stacked_records_its_crossings() {
        let s = SynthSpec { overpasses: 5, ..spec(SynthKind::Stacked) };
        let out = generate(&s).unwrap();
        assert!(out.crossings >= 5);
        assert_eq!(crossing_points(&out.graph).len(), out.crossings);
    }

    #[test]
    fn planar_kinds_have_no_crossings() {
        for kind in [SynthKind::Grid, SynthKind::Radial, SynthKind::Organic] {
            for seed in 0..10 {
                let g = generate(&SynthSpec { seed, ..spec(kind) }).unwrap().graph;
                assert!(crossing_points(&g).is_empty(), "{kind} seed {seed}");
            }
        }
    }

    #[test]
    fn organic_degree_is_bounded() {
        for seed in 0..10 {
            let g = generate(&SynthSpec { seed, curviness: 0.8, ..spec(SynthKind::Organic) }).unwrap().graph;
            assert!(g.max_degree() <= 6);
            assert!(g.edge_count() > 10);
        }
    }

    #[test]
    fn too_many_overpasses_is_infeasible() {
        let s = SynthSpec { extent: 300.0, overpasses: 500, ..spec(SynthKind::Stacked) };
        assert!(matches!(generate(&s), Err(Error::Infeasible(_))));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SynthKind::ALL {
            assert_eq!(kind.name().parse::<SynthKind>().unwrap(), kind);
        }
        assert!("mesh".parse::<SynthKind>().is_err());
    }
}
