//! Synthetic corpora and end-to-end experiments.

mod experiment;
mod synth;

pub use experiment::{roundtrip, roundtrip_with, sweep, ExperimentReport, RunConfig, RunRow, SweepAxis};
pub use synth::{generate, SynthKind, SynthSpec, Synthetic};
