//! Topology similarity metrics between a ground-truth and a proposed graph.

mod apls;
mod crossing;
mod network;
mod topo;

pub use apls::{apls, AplsConfig, AplsResult, PairRecord};
pub use crossing::{crossing_match, crossing_points, Crossing, CrossingMatch};
pub use topo::{topo, SeedRecord, TopoConfig, TopoResult};

/// `2PR / (P + R)`, or 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
