//! WebAssembly bindings for the static demo page in `www/`.
//!
//! A [`Scene`] holds one synthetic graph and its encoding. The page draws
//! the vertexness heatmap, decodes noisy copies of the tensor and shows
//! how the orientation fixes change with `D_max`.
//!
//! Geometry crosses the boundary as flat `f64` arrays: segments are
//! `[x0, y0, x1, y1, ...]`, classified segments add a trailing kind.

use gte::encoder::{encode_with_report, orient_edges, preprocess, Encoding};
use gte::harness::{generate, SynthKind, SynthSpec};
use gte::metrics::{apls, crossing_match, topo, AplsConfig, TopoConfig};
use gte::training::{perturb, NoiseConfig};
use gte::{decode, DecodeConfig, EncodeConfig, SpatialGraph};
use wasm_bindgen::prelude::*;

/// Segment kinds reported by [`Scene::orientation`].
pub const FORWARD: f64 = 0.0;
pub const REVERSED: f64 = 1.0;
pub const SPLIT: f64 = 2.0;

fn js(e: gte::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn segments(g: &SpatialGraph) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.edge_count() * 4);
    for &(a, b) in g.edges() {
        let (p, q) = (g.pos(a), g.pos(b));
        out.extend_from_slice(&[p.x, p.y, q.x, q.y]);
    }
    out
}

#[wasm_bindgen]
pub struct Scene {
    truth: SpatialGraph,
    encoding: Encoding,
    crossings: usize,
    last: Option<DecodeSummary>,
}

/// Metrics of the most recent [`Scene::decode_noisy`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeSummary {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub apls: f64,
    pub crossing_recall: f64,
    pub vertices: usize,
    pub edges: usize,
}

impl Scene {
    pub fn build(kind: &str, extent: f64, spacing: f64, curviness: f64, seed: u64) -> gte::Result<Scene> {
        let kind: SynthKind = kind.parse()?;
        let overpasses = if kind == SynthKind::Stacked { 2 } else { 0 };
        let synth = generate(&SynthSpec { kind, extent, spacing, curviness, overpasses, seed })?;
        let cfg = EncodeConfig::default();
        let encoding = encode_with_report(&preprocess(&synth.graph, &cfg)?.0, &cfg)?;
        Ok(Scene { truth: synth.graph, encoding, crossings: synth.crossings, last: None })
    }

    pub fn decode_with(&mut self, sigma_p: f64, sigma_vec: f64, w: f64, seed: u64) -> gte::Result<SpatialGraph> {
        let noise = NoiseConfig { sigma_p, sigma_vec, seed, ..NoiseConfig::default() };
        let decoded = decode(&perturb(&self.encoding.tensor, &noise)?, &DecodeConfig { w, ..DecodeConfig::default() })?;
        let t = topo(&self.encoding.graph, &decoded, &TopoConfig { max_seeds: Some(200), seed, ..TopoConfig::default() })?;
        let a = apls(&self.encoding.graph, &decoded, &AplsConfig { max_pairs: Some(200), seed, ..AplsConfig::default() })?;
        let c = crossing_match(&self.encoding.graph, &decoded, 15.0);
        self.last = Some(DecodeSummary {
            precision: t.precision,
            recall: t.recall,
            f1: t.f1,
            apls: a.score,
            crossing_recall: c.recall,
            vertices: decoded.vertex_count(),
            edges: decoded.edge_count(),
        });
        Ok(decoded)
    }

    pub fn last_summary(&self) -> Option<DecodeSummary> {
        self.last
    }

    /// Dense graph oriented at `d_max`, one `[x0, y0, x1, y1, kind]` row
    /// per encoded edge, plus the undirected and split fix counts.
    pub fn orientation_rows(&self, d_max: usize) -> gte::Result<(Vec<f64>, usize, usize)> {
        let cfg = EncodeConfig { d_max, ..EncodeConfig::default() };
        let dense = preprocess(&self.truth, &cfg)?.0;
        let o = orient_edges(&dense, d_max)?;
        let original = dense.vertex_count();
        let mut rows = Vec::with_capacity(o.edges.len() * 5);
        for e in &o.edges {
            let kind = if e.tail >= original || e.head >= original {
                SPLIT
            } else if o.graph.id(e.tail) > o.graph.id(e.head) {
                REVERSED
            } else {
                FORWARD
            };
            let (p, q) = (o.graph.pos(e.tail), o.graph.pos(e.head));
            rows.extend_from_slice(&[p.x, p.y, q.x, q.y, kind]);
        }
        Ok((rows, o.report.undirected_fixes, o.report.interpolation_fixes))
    }
}

#[wasm_bindgen]
impl Scene {
    /// Generates a graph of kind `grid`, `radial`, `organic` or `stacked`
    /// and encodes it at one meter per cell with `D_max = 6`.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, extent: f64, spacing: f64, curviness: f64, seed: u32) -> Result<Scene, JsError> {
        Scene::build(kind, extent, spacing, curviness, seed as u64).map_err(js)
    }

    pub fn width(&self) -> usize {
        self.encoding.tensor.width()
    }

    pub fn height(&self) -> usize {
        self.encoding.tensor.height()
    }

    /// Overpass crossings placed by the generator.
    pub fn crossings(&self) -> usize {
        self.crossings
    }

    /// Row-major vertexness channel, `width * height` values.
    pub fn vertexness(&self) -> Vec<f32> {
        let t = &self.encoding.tensor;
        let mut out = Vec::with_capacity(t.width() * t.height());
        for y in 0..t.height() {
            for x in 0..t.width() {
                out.push(t.vertexness(x, y));
            }
        }
        out
    }

    pub fn truth_segments(&self) -> Vec<f64> {
        segments(&self.truth)
    }

    /// Perturbs the tensor, decodes it and scores the result. Returns the
    /// decoded segments; metrics are read back with [`Scene::metric`].
    pub fn decode_noisy(&mut self, sigma_p: f64, sigma_vec: f64, w: f64, seed: u32) -> Result<Vec<f64>, JsError> {
        self.decode_with(sigma_p, sigma_vec, w, seed as u64).map(|g| segments(&g)).map_err(js)
    }

    /// One of `precision`, `recall`, `f1`, `apls`, `crossing_recall`,
    /// `vertices`, `edges`. NaN before the first decode.
    pub fn metric(&self, name: &str) -> f64 {
        let Some(s) = self.last else { return f64::NAN };
        match name {
            "precision" => s.precision,
            "recall" => s.recall,
            "f1" => s.f1,
            "apls" => s.apls,
            "crossing_recall" => s.crossing_recall,
            "vertices" => s.vertices as f64,
            "edges" => s.edges as f64,
            _ => f64::NAN,
        }
    }

    /// Encoded edges at `d_max`; kind 0 forward, 1 reversed, 2 split.
    pub fn orientation(&self, d_max: usize) -> Result<Vec<f64>, JsError> {
        self.orientation_rows(d_max).map(|(rows, _, _)| rows).map_err(js)
    }
}
