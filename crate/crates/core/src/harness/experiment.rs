use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};

use super::synth::{generate, SynthSpec};
use crate::decoder::{decode_with_report, DecodeConfig, DecodeReport};
use crate::encoder::{encode_with_report, preprocess, EncodeConfig};
use crate::graph::{simplify, SpatialGraph};
use crate::metrics::{apls, crossing_match, topo, AplsConfig, TopoConfig};
use crate::training::{perturb, NoiseConfig};
use crate::{par, Error, Result};

/// Everything a round-trip run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub encode: EncodeConfig,
    pub decode: DecodeConfig,
    pub noise: NoiseConfig,
    pub topo: TopoConfig,
    pub apls: AplsConfig,
    pub crossing_dist: f64,
    /// Collinearity tolerance for simplify, degrees.
    pub simplify_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            encode: EncodeConfig::default(),
            decode: DecodeConfig::default(),
            noise: NoiseConfig::default(),
            topo: TopoConfig::default(),
            apls: AplsConfig::default(),
            crossing_dist: 15.0,
            simplify_tol: 5.0,
        }
    }
}

impl RunConfig {
    /// Stable textual form; floats use the shortest round-trip repr.
    pub fn canonical(&self) -> String {
        let (e, d, n, t, a) = (&self.encode, &self.decode, &self.noise, &self.topo, &self.apls);
        format!(
            "encode:lambda={:?},d_max={},d={:?},min_sep={:?},max_iter={};\
             decode:p_thr={:?},edge_thr={:?},w={:?},max_connect_dist={:?},candidate_radius={:?},nms_window={};\
             noise:sigma_p={:?},sigma_vec={:?},blur_radius={},drop_rate={:?};\
             topo:radius={:?},seed_spacing={:?},marker_spacing={:?},match_dist={:?},seed_match_dist={:?},max_seeds={:?};\
             apls:snap={:?},spacing={:?},max_pairs={:?};\
             crossing_dist={:?};simplify_tol={:?}",
            e.lambda, e.d_max, e.d, e.min_sep, e.max_iter,
            d.p_thr, d.edge_thr, d.w, d.max_connect_dist, d.candidate_radius, d.nms_window,
            n.sigma_p, n.sigma_vec, n.blur_radius, n.drop_rate,
            t.subgraph_radius, t.seed_spacing, t.marker_spacing, t.match_dist, t.seed_match_dist, t.max_seeds,
            a.snap_dist, a.control_spacing, a.max_pairs,
            self.crossing_dist, self.simplify_tol,
        )
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::canonical`].
    /// Seeds are excluded; rows carry them separately.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    fn with_seed(&self, seed: u64) -> RunConfig {
        let mut cfg = self.clone();
        cfg.noise.seed = seed;
        cfg.topo.seed = seed;
        cfg.apls.seed = seed;
        cfg
    }
}

/// One round-trip outcome. Metric fields are NaN when `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub config_hash: String,
    pub axis: String,
    pub value: f64,
    pub seed: u64,
    pub topo_precision: f64,
    pub topo_recall: f64,
    pub topo_f1: f64,
    /// TOPO F1 against the graph before interpolation and snapping.
    pub topo_f1_input: f64,
    pub apls: f64,
    pub crossing_precision: f64,
    pub crossing_recall: f64,
    pub decode: DecodeReport,
    pub undirected_ratio: f64,
    pub interpolation_ratio: f64,
    pub converged: bool,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl RunRow {
    fn failed(config_hash: String, seed: u64, err: &Error, wall_ms: f64) -> RunRow {
        RunRow {
            config_hash,
            axis: String::new(),
            value: f64::NAN,
            seed,
            topo_precision: f64::NAN,
            topo_recall: f64::NAN,
            topo_f1: f64::NAN,
            topo_f1_input: f64::NAN,
            apls: f64::NAN,
            crossing_precision: f64::NAN,
            crossing_recall: f64::NAN,
            decode: DecodeReport::default(),
            undirected_ratio: f64::NAN,
            interpolation_ratio: f64::NAN,
            converged: false,
            wall_ms,
            error: Some(err.to_string()),
        }
    }

    pub fn csv_row(&self) -> String {
        let err = self.error.as_deref().unwrap_or("").replace([',', '\n', '"'], " ");
        let value = if self.value.is_nan() { String::new() } else { format!("{:?}", self.value) };
        format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{},{:.6},{:.6},{},{:.1},{}",
            self.config_hash,
            self.axis,
            value,
            self.seed,
            self.topo_precision,
            self.topo_recall,
            self.topo_f1,
            self.topo_f1_input,
            self.apls,
            self.crossing_precision,
            self.crossing_recall,
            self.decode.slot_total,
            self.decode.slot_connected,
            self.decode.slot_unmatched,
            self.undirected_ratio,
            self.interpolation_ratio,
            self.converged,
            self.wall_ms,
            err
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<RunRow>,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "config_hash,axis,value,seed,topo_precision,topo_recall,topo_f1,\
topo_f1_input,apls,crossing_precision,crossing_recall,slot_total,slot_connected,slot_unmatched,\
undirected_ratio,interpolation_ratio,converged,wall_ms,error";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    /// Writes rows to `path`. With `append`, rows go after existing content
    /// and the header is written only if the file is empty.
    pub fn write_csv(&self, path: &Path, append: bool) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .write(true)
            .append(append)
            .truncate(!append)
            .open(path)?;
        let empty = file.metadata()?.len() == 0;
        let mut text = self.to_csv();
        if !empty {
            text = text.split_once('\n').map(|(_, rest)| rest.to_string()).unwrap_or_default();
        }
        file.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Distinct axis values in first-seen order.
    pub fn values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|v| v.to_bits() == r.value.to_bits()) {
                out.push(r.value);
            }
        }
        out
    }

    /// Mean of `f` over successful rows with the given axis value.
    pub fn mean(&self, value: f64, f: impl Fn(&RunRow) -> f64) -> f64 {
        let picked: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.error.is_none() && r.value.to_bits() == value.to_bits())
            .map(f)
            .collect();
        if picked.is_empty() {
            f64::NAN
        } else {
            picked.iter().sum::<f64>() / picked.len() as f64
        }
    }

    pub fn errors(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Round trip with default metric settings.
pub fn roundtrip(graph: &SpatialGraph, encode: &EncodeConfig, decode: &DecodeConfig, noise: &NoiseConfig) -> RunRow {
    let cfg = RunConfig {
        encode: *encode,
        decode: decode.clone(),
        noise: *noise,
        ..RunConfig::default()
    };
    roundtrip_with(graph, &cfg)
}

/// interpolate → resolve conflicts → encode → perturb → decode → simplify →
/// metrics. Decoded graphs are scored against the encoded reference graph
/// (the exact geometry the tensor stores), both simplified.
pub fn roundtrip_with(graph: &SpatialGraph, cfg: &RunConfig) -> RunRow {
    let start = Instant::now();
    let hash = cfg.hash();
    let seed = cfg.noise.seed;
    match run(graph, cfg, &hash) {
        Ok(mut row) => {
            row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            row
        }
        Err(e) => RunRow::failed(hash, seed, &e, start.elapsed().as_secs_f64() * 1e3),
    }
}

fn run(graph: &SpatialGraph, cfg: &RunConfig, hash: &str) -> Result<RunRow> {
    let (dense, conflicts) = preprocess(graph, &cfg.encode)?;
    let encoding = encode_with_report(&dense, &cfg.encode)?;
    let noisy = perturb(&encoding.tensor, &cfg.noise)?;
    let (decoded, report) = decode_with_report(&noisy, &cfg.decode)?;
    let reference = simplify(&encoding.graph, cfg.simplify_tol);
    let proposal = simplify(&decoded, cfg.simplify_tol);

    let t = topo(&reference, &proposal, &cfg.topo)?;
    let t_input = topo(graph, &proposal, &cfg.topo)?;
    let a = apls(&reference, &proposal, &cfg.apls)?;
    let c = crossing_match(&reference, &proposal, cfg.crossing_dist);
    Ok(RunRow {
        config_hash: hash.to_string(),
        axis: String::new(),
        value: f64::NAN,
        seed: cfg.noise.seed,
        topo_precision: t.precision,
        topo_recall: t.recall,
        topo_f1: t.f1,
        topo_f1_input: t_input.f1,
        apls: a.score,
        crossing_precision: c.precision,
        crossing_recall: c.recall,
        decode: report,
        undirected_ratio: encoding.fixes.undirected_ratio(),
        interpolation_ratio: encoding.fixes.interpolation_ratio(),
        converged: conflicts.converged,
        wall_ms: 0.0,
        error: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PThr,
    EdgeThr,
    W,
    SigmaP,
    SigmaVec,
    DMax,
    D,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 7] = [
        SweepAxis::PThr,
        SweepAxis::EdgeThr,
        SweepAxis::W,
        SweepAxis::SigmaP,
        SweepAxis::SigmaVec,
        SweepAxis::DMax,
        SweepAxis::D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PThr => "p_thr",
            SweepAxis::EdgeThr => "edge_thr",
            SweepAxis::W => "w",
            SweepAxis::SigmaP => "sigma_p",
            SweepAxis::SigmaVec => "sigma_vec",
            SweepAxis::DMax => "d_max",
            SweepAxis::D => "d",
        }
    }

    pub fn apply(self, cfg: &mut RunConfig, value: f64) -> Result<()> {
        match self {
            SweepAxis::PThr => cfg.decode.p_thr = value as f32,
            SweepAxis::EdgeThr => cfg.decode.edge_thr = value as f32,
            SweepAxis::W => cfg.decode.w = value,
            SweepAxis::SigmaP => cfg.noise.sigma_p = value,
            SweepAxis::SigmaVec => cfg.noise.sigma_vec = value,
            SweepAxis::DMax => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(Error::Config(format!("d_max must be a whole number, got {value}")));
                }
                cfg.encode.d_max = value as usize;
            }
            SweepAxis::D => cfg.encode.d = value,
        }
        Ok(())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAxis(s.to_string()))
    }
}

/// Runs `values × replicates` round trips. Replicate `i` generates its graph
/// and seeds all randomness with `corpus.seed + i`. Rows come back in
/// (value, replicate) order regardless of scheduling.
pub fn sweep(
    corpus: &SynthSpec,
    base: &RunConfig,
    axis: SweepAxis,
    values: &[f64],
    replicates: usize,
) -> Result<ExperimentReport> {
    if values.is_empty() || replicates == 0 {
        return Err(Error::EmptySweep);
    }
    let mut configs = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = base.clone();
        axis.apply(&mut cfg, v)?;
        cfg.encode.validate()?;
        cfg.decode.validate()?;
        cfg.noise.validate()?;
        configs.push(cfg);
    }
    let jobs: Vec<(usize, u64)> = (0..values.len())
        .flat_map(|vi| (0..replicates as u64).map(move |i| (vi, i)))
        .collect();
    let rows = par::map(&jobs, |&(vi, i)| {
        let seed = corpus.seed.wrapping_add(i);
        let spec = SynthSpec { seed, ..corpus.clone() };
        let cfg = configs[vi].with_seed(seed);
        let mut row = match generate(&spec) {
            Ok(s) => roundtrip_with(&s.graph, &cfg),
            Err(e) => RunRow::failed(cfg.hash(), seed, &e, 0.0),
        };
        row.axis = axis.name().to_string();
        row.value = values[vi];
        row
    });
    Ok(ExperimentReport { rows })
}
