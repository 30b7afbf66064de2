mod common;

use common::*;
use gte::decoder::{connect_edges, extract_vertices, Candidate};
use gte::graph::{single_source_lengths, SpatialGraph};
use gte::harness::{generate, SynthKind, SynthSpec};
use gte::metrics::{apls, topo, AplsConfig, TopoConfig};
use gte::encoder::EdgeSlot;
use gte::{DecodeConfig, GteTensor, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dijkstra_agrees_with_bellman_ford() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let jitter: Vec<f64> = (0..1000).map(|_| rng.random_range(-8.0..8.0)).collect();
    let full = lattice(20, 25, 40.0, &jitter);
    assert_eq!(full.vertex_count(), 500);
    // Drop a fifth of the edges to make paths irregular.
    let kept: Vec<(usize, usize)> = full.edges().iter().copied().filter(|_| rng.random_bool(0.8)).collect();
    let pts: Vec<Point> = (0..full.vertex_count()).map(|i| full.pos(i)).collect();
    let g = SpatialGraph::from_positions(full.width(), full.height(), &pts, &kept).unwrap();
    let edges = weighted_edges(&g);
    for source in [0, 137, 250, 499] {
        let fast = single_source_lengths(&g, source);
        let slow = bellman_ford(g.vertex_count(), &edges, source);
        for (a, b) in fast.iter().zip(&slow) {
            if b.is_infinite() {
                assert!(a.is_infinite());
            } else {
                assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{a} vs {b}");
            }
        }
    }
}

fn remove_edge(g: &SpatialGraph, edge: (usize, usize)) -> SpatialGraph {
    let pts: Vec<Point> = (0..g.vertex_count()).map(|i| g.pos(i)).collect();
    let edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&e| e != edge).collect();
    SpatialGraph::from_positions(g.width(), g.height(), &pts, &edges).unwrap()
}

#[test]
fn apls_matches_brute_force_on_grid_missing_one_edge() {
    let jitter = [0.0, 3.0, -2.0, 1.5, 4.0, -3.5, 0.5];
    let truth = lattice(7, 7, 60.0, &jitter);
    // Central vertical edge between (3,3) and (3,4).
    let prop = remove_edge(&truth, (3 * 7 + 3, 4 * 7 + 3));
    let cfg = AplsConfig { max_pairs: None, ..AplsConfig::default() };
    let fast = apls(&truth, &prop, &cfg).unwrap().score;
    let slow = apls_brute(&truth, &prop, cfg.snap_dist, cfg.control_spacing);
    assert!((fast - slow).abs() <= 1e-9, "{fast} vs {slow}");
    assert!(fast < 1.0);
}

#[test]
fn apls_matches_brute_force_on_small_synthetic_graphs() {
    let mut checked = 0;
    for seed in 0..40 {
        let spec = SynthSpec { kind: SynthKind::Organic, extent: 300.0, spacing: 100.0, seed, ..SynthSpec::default() };
        let truth = generate(&spec).unwrap().graph;
        if truth.vertex_count() > 50 || truth.edge_count() < 3 {
            continue;
        }
        // Proposal: drop every third edge and shift the rest by a few meters.
        let pts: Vec<Point> = (0..truth.vertex_count()).map(|i| truth.pos(i) + Point::new(2.0, -1.0)).collect();
        let pts: Vec<Point> = pts.iter().map(|p| Point::new(p.x.clamp(0.0, 300.0), p.y.clamp(0.0, 300.0))).collect();
        let edges: Vec<(usize, usize)> = truth.edges().iter().enumerate().filter(|(i, _)| i % 3 != 1).map(|(_, &e)| e).collect();
        let prop = SpatialGraph::from_positions(300.0, 300.0, &pts, &edges).unwrap();
        let cfg = AplsConfig { max_pairs: None, seed, ..AplsConfig::default() };
        let fast = apls(&truth, &prop, &cfg).unwrap().score;
        let slow = apls_brute(&truth, &prop, cfg.snap_dist, cfg.control_spacing);
        assert!((fast - slow).abs() <= 1e-9, "seed {seed}: {fast} vs {slow}");
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} graphs were small enough");
}

fn straight(segments: &[(f64, f64)]) -> SpatialGraph {
    let mut pts = Vec::new();
    let mut edges = Vec::new();
    for &(a, b) in segments {
        pts.push(Point::new(a, 50.0));
        pts.push(Point::new(b, 50.0));
        edges.push((pts.len() - 2, pts.len() - 1));
    }
    SpatialGraph::from_positions(1100.0, 100.0, &pts, &edges).unwrap()
}

#[test]
fn topo_marker_counts_on_a_line_are_analytic() {
    let truth = straight(&[(0.0, 1000.0)]);
    let gap = [(0.0, 350.0), (650.0, 1000.0)];
    let prop = straight(&gap);
    let cfg = TopoConfig::default();
    let r = topo(&truth, &prop, &cfg).unwrap();
    assert_eq!(r.seeds.len(), 20);
    for rec in &r.seeds {
        let s = rec.location.x;
        let t = line_markers(s, cfg.subgraph_radius, cfg.marker_spacing, &[(0.0, 1000.0)]);
        assert_eq!(rec.truth, t, "seed at {s}");
        let covered = gap.iter().any(|&(a, b)| s >= a - cfg.seed_match_dist && s <= b + cfg.seed_match_dist);
        if covered {
            let p = line_markers(s, cfg.subgraph_radius, cfg.marker_spacing, &gap);
            assert_eq!((rec.proposed, rec.matched), (p, p), "seed at {s}");
        } else {
            assert_eq!((rec.proposed, rec.matched), (0, 0), "seed at {s}");
        }
    }
}

#[test]
fn topo_recall_with_a_missing_stretch_follows_the_radius() {
    let truth = straight(&[(0.0, 1000.0)]);
    let prop = straight(&[(0.0, 350.0), (650.0, 1000.0)]);
    // Local subgraphs see only the 30% gap.
    let local = TopoConfig { subgraph_radius: 25.0, ..TopoConfig::default() };
    let r = topo(&truth, &prop, &local).unwrap();
    assert!((r.recall - 0.7).abs() <= 0.05, "{}", r.recall);
    assert_eq!(r.precision, 1.0);
    // Wide subgraphs also lose everything behind the gap.
    let wide = topo(&truth, &prop, &TopoConfig::default()).unwrap();
    assert!(wide.recall < r.recall);
}

#[test]
fn gaussian_blobs_yield_one_candidate_each() {
    let mut t = GteTensor::zeros(60, 40, 6, 1.0).unwrap();
    let centers = [(15usize, 12usize), (40, 25), (52, 8)];
    for &(cx, cy) in &centers {
        for y in 0..40 {
            for x in 0..60 {
                let r2 = (x as f64 - cx as f64).powi(2) + (y as f64 - cy as f64).powi(2);
                let v = (-r2 / (2.0 * 2.0 * 2.0)).exp() as f32;
                let c = &mut t.cell_mut(x, y)[0];
                *c = c.max(v);
            }
        }
    }
    let cands = extract_vertices(&t, &DecodeConfig::default());
    let mut got: Vec<(usize, usize)> = cands.iter().map(|c| c.cell).collect();
    got.sort_by_key(|&(x, y)| (y, x));
    let mut want = centers.to_vec();
    want.sort_by_key(|&(x, y)| (y, x));
    assert_eq!(got, want);
}

#[test]
fn connect_edges_picks_the_brute_force_argmin() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cfg = DecodeConfig::default();
    for _ in 0..300 {
        let mut t = GteTensor::zeros(80, 80, 6, 1.0).unwrap();
        let mut cells = vec![(40usize, 40usize)];
        while cells.len() < rng.random_range(2..12) {
            let c = (rng.random_range(5..75), rng.random_range(5..75));
            if !cells.contains(&c) {
                cells.push(c);
            }
        }
        let cands: Vec<Candidate> = cells
            .iter()
            .map(|&c| Candidate { cell: c, pos: Point::new(c.0 as f64, c.1 as f64), vertexness: 1.0 })
            .collect();
        let vec = Point::new(rng.random_range(-20.0f64..20.0).round(), rng.random_range(-20.0f64..20.0).round());
        if vec.norm() == 0.0 {
            continue;
        }
        let sector = gte::encoder::sector_of(vec.x, vec.y, 6).unwrap();
        t.set_edge(40, 40, sector, EdgeSlot { edgeness: 1.0, dx: vec.x as f32, dy: vec.y as f32 });
        let (g, _) = connect_edges(&cands, &t, &cfg);
        let want = eq1_brute(0, vec, &cands, cfg.w, cfg.candidate_radius, cfg.max_connect_dist);
        let got: Vec<(usize, usize)> = g.edges().to_vec();
        match want {
            Some(u) => assert_eq!(got, vec![(0, u)]),
            None => assert!(got.is_empty()),
        }
    }
}
