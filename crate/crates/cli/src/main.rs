use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gte::decoder::decode_with_report;
use gte::encoder::{encode_with_report, load_tensor, preprocess, save_tensor};
use gte::graph::{load_graph, save_graph};
use gte::harness::{generate, roundtrip_with, sweep, ExperimentReport, RunConfig, SweepAxis, SynthKind, SynthSpec};
use gte::metrics::{apls, crossing_match, topo, AplsConfig, TopoConfig};
use gte::training::{gte_loss, perturb, LossBreakdown, NoiseConfig};
use gte::{DecodeConfig, DecodeReport, EncodeConfig, Error, GRAPH_FORMAT, TENSOR_FORMAT};

#[derive(Parser)]
#[command(name = "gte", about = "Graph-tensor encoding of road graphs", disable_version_flag = true)]
struct Cli {
    /// Print the tool version and file format versions.
    #[arg(short = 'V', long)]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic road graph.
    Synth {
        #[command(flatten)]
        spec: SynthArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Interpolate, resolve conflicts and encode a graph into a tensor.
    Encode {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        encode: EncodeArgs,
    },
    /// Decode a tensor back into a graph.
    Decode {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        decode: DecodeArgs,
    },
    /// Apply synthetic noise to a tensor.
    Perturb {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Masked training loss of a predicted tensor against ground truth.
    Loss {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Compare a proposed graph against ground truth.
    Eval {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        prop: PathBuf,
        #[command(flatten)]
        metrics: MetricArgs,
        /// Write per-seed TOPO records here.
        #[arg(long)]
        topo_csv: Option<PathBuf>,
        /// Write per-pair APLS records here.
        #[arg(long)]
        apls_csv: Option<PathBuf>,
        /// Seeds metric sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Encode, perturb, decode and score one graph.
    Roundtrip {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Seeds the noise and metric sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the report row to this CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Round trips over a parameter axis on a synthetic corpus.
    Sweep {
        #[command(flatten)]
        spec: SynthArgs,
        #[command(flatten)]
        run: RunArgs,
        /// One of p_thr, edge_thr, w, sigma_p, sigma_vec, d_max, d.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        replicates: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Append to an existing CSV instead of replacing it.
        #[arg(long)]
        append: bool,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "grid")]
    kind: String,
    #[arg(long, default_value_t = 600.0)]
    extent: f64,
    #[arg(long, default_value_t = 100.0)]
    spacing: f64,
    #[arg(long, default_value_t = 0.3)]
    curviness: f64,
    #[arg(long, default_value_t = 0)]
    overpasses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SynthArgs {
    fn spec(&self) -> Result<SynthSpec, Error> {
        Ok(SynthSpec {
            kind: self.kind.parse::<SynthKind>()?,
            extent: self.extent,
            spacing: self.spacing,
            curviness: self.curviness,
            overpasses: self.overpasses,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 6)]
    dmax: usize,
    #[arg(long, default_value_t = 20.0)]
    d: f64,
}

impl EncodeArgs {
    fn config(&self) -> EncodeConfig {
        EncodeConfig {
            lambda: self.lambda,
            d_max: self.dmax,
            d: self.d,
            ..EncodeConfig::default()
        }
    }
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long, default_value_t = 0.5)]
    pthr: f32,
    #[arg(long, default_value_t = 0.5)]
    ethr: f32,
    #[arg(long, default_value_t = 100.0)]
    w: f64,
    #[arg(long, default_value_t = 15.0)]
    maxdist: f64,
}

impl DecodeArgs {
    fn config(&self) -> DecodeConfig {
        DecodeConfig {
            p_thr: self.pthr,
            edge_thr: self.ethr,
            w: self.w,
            max_connect_dist: self.maxdist,
            ..DecodeConfig::default()
        }
    }
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long, default_value_t = 0.0)]
    sigma_p: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma_vec: f64,
    #[arg(long, default_value_t = 0)]
    blur: usize,
    #[arg(long, default_value_t = 0.0)]
    drop_rate: f64,
}

impl NoiseArgs {
    fn config(&self, seed: u64) -> NoiseConfig {
        NoiseConfig {
            sigma_p: self.sigma_p,
            sigma_vec: self.sigma_vec,
            blur_radius: self.blur,
            drop_rate: self.drop_rate,
            seed,
        }
    }
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long, default_value_t = 300.0)]
    topo_radius: f64,
    #[arg(long, default_value_t = 50.0)]
    topo_seed_spacing: f64,
    #[arg(long, default_value_t = 5.0)]
    topo_marker_spacing: f64,
    #[arg(long, default_value_t = 10.0)]
    topo_match_dist: f64,
    #[arg(long, default_value_t = 15.0)]
    topo_seed_match_dist: f64,
    #[arg(long, default_value_t = 15.0)]
    apls_snap: f64,
    /// Pairs per direction; 0 evaluates every pair.
    #[arg(long, default_value_t = 500)]
    apls_pairs: usize,
    #[arg(long, default_value_t = 15.0)]
    crossing_dist: f64,
}

impl MetricArgs {
    fn topo(&self) -> TopoConfig {
        TopoConfig {
            subgraph_radius: self.topo_radius,
            seed_spacing: self.topo_seed_spacing,
            marker_spacing: self.topo_marker_spacing,
            match_dist: self.topo_match_dist,
            seed_match_dist: self.topo_seed_match_dist,
            max_seeds: None,
            seed: 0,
        }
    }

    fn apls(&self) -> AplsConfig {
        AplsConfig {
            snap_dist: self.apls_snap,
            max_pairs: (self.apls_pairs > 0).then_some(self.apls_pairs),
            ..AplsConfig::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    encode: EncodeArgs,
    #[command(flatten)]
    decode: DecodeArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    metrics: MetricArgs,
}

impl RunArgs {
    fn config(&self, seed: u64) -> RunConfig {
        RunConfig {
            encode: self.encode.config(),
            decode: self.decode.config(),
            noise: self.noise.config(seed),
            topo: self.metrics.topo(),
            apls: self.metrics.apls(),
            crossing_dist: self.metrics.crossing_dist,
            ..RunConfig::default()
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Synth { spec, output } => {
            let out = generate(&spec.spec()?)?;
            write(&output, &save_graph(&out.graph))?;
            println!(
                "vertices {} edges {} crossings {}",
                out.graph.vertex_count(),
                out.graph.edge_count(),
                out.crossings
            );
        }
        Command::Encode { input, output, encode } => {
            let cfg = encode.config();
            let g = load_graph(&read(&input)?)?;
            let (dense, conflicts) = preprocess(&g, &cfg)?;
            let enc = encode_with_report(&dense, &cfg)?;
            write(&output, &save_tensor(&enc.tensor))?;
            if !conflicts.converged {
                eprintln!("warning: {} overlapping edge pairs remain", conflicts.remaining.len());
            }
            println!(
                "cells {}x{} channels {} edges {} undirected_fixes {} interpolation_fixes {}",
                enc.tensor.width(),
                enc.tensor.height(),
                enc.tensor.channels(),
                enc.fixes.edges,
                enc.fixes.undirected_fixes,
                enc.fixes.interpolation_fixes
            );
        }
        Command::Decode { input, output, decode } => {
            let t = load_tensor(&read(&input)?)?;
            let (g, report) = decode_with_report(&t, &decode.config())?;
            write(&output, &save_graph(&g))?;
            println!("{}\n{}", DecodeReport::CSV_HEADER, report.csv_row());
        }
        Command::Perturb { input, output, noise, seed } => {
            let t = load_tensor(&read(&input)?)?;
            write(&output, &save_tensor(&perturb(&t, &noise.config(seed))?))?;
        }
        Command::Loss { pred, truth } => {
            let p = load_tensor(&read(&pred)?)?;
            let t = load_tensor(&read(&truth)?)?;
            println!("{}\n{}", LossBreakdown::CSV_HEADER, gte_loss(&p, &t)?.csv_row());
        }
        Command::Eval { truth, prop, metrics, topo_csv, apls_csv, seed } => {
            let t = load_graph(&read(&truth)?)?;
            let p = load_graph(&read(&prop)?)?;
            let tr = topo(&t, &p, &TopoConfig { seed, ..metrics.topo() })?;
            let ar = apls(&t, &p, &AplsConfig { seed, ..metrics.apls() })?;
            let cr = crossing_match(&t, &p, metrics.crossing_dist);
            if let Some(path) = topo_csv {
                write(&path, tr.to_csv().as_bytes())?;
            }
            if let Some(path) = apls_csv {
                write(&path, ar.to_csv().as_bytes())?;
            }
            println!(
                "{{\"precision\": {:.6}, \"recall\": {:.6}, \"f1\": {:.6}, \"apls\": {:.6}, \"crossing_precision\": {:.6}, \"crossing_recall\": {:.6}}}",
                tr.precision, tr.recall, tr.f1, ar.score, cr.precision, cr.recall
            );
        }
        Command::Roundtrip { input, run, seed, output } => {
            let g = load_graph(&read(&input)?)?;
            let mut cfg = run.config(seed);
            cfg.topo.seed = seed;
            cfg.apls.seed = seed;
            let row = roundtrip_with(&g, &cfg);
            let report = ExperimentReport { rows: vec![row] };
            if let Some(path) = output {
                report.write_csv(&path, true)?;
            }
            print!("{}", report.to_csv());
        }
        Command::Sweep { spec, run, axis, values, replicates, output, append } => {
            let axis: SweepAxis = axis.parse()?;
            // Replicates reseed everything from the corpus seed.
            let report = sweep(&spec.spec()?, &run.config(spec.seed), axis, &values, replicates)?;
            report.write_csv(&output, append)?;
            println!("value,mean_topo_f1,mean_apls,undirected_ratio,interpolation_ratio,errors");
            for v in report.values() {
                let errors = report.rows.iter().filter(|r| r.value == v && r.error.is_some()).count();
                println!(
                    "{v},{:.6},{:.6},{:.6},{:.6},{errors}",
                    report.mean(v, |r| r.topo_f1),
                    report.mean(v, |r| r.apls),
                    report.mean(v, |r| r.undirected_ratio),
                    report.mean(v, |r| r.interpolation_ratio)
                );
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::UnknownAxis(_) | Error::EmptySweep => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if cli.version {
        println!("gte {} (graph format {GRAPH_FORMAT}, tensor format {TENSOR_FORMAT})", env!("CARGO_PKG_VERSION"));
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required; see `gte --help`");
        return ExitCode::from(1);
    };
    match run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
