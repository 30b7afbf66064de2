//! Training-side tensor functions: the masked GTE loss and a seeded
//! corruption model standing in for network prediction noise.

mod loss;
mod noise;

pub use loss::{gte_loss, LossBreakdown, PROB_EPS};
pub use noise::{perturb, NoiseConfig};
