use crate::encoder::GteTensor;
use crate::error::{Error, Result};
use crate::par;

/// Lower bound applied to the argument of every logarithm.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub vertex_ce: f64,
    pub edge_ce: f64,
    pub vector_l2: f64,
    pub cells: usize,
    /// Cells whose ground-truth vertexness is 1.
    pub masked_cells: usize,
}

impl LossBreakdown {
    pub const CSV_HEADER: &'static str = "total,vertex_ce,edge_ce,vector_l2,cells,masked_cells";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.total, self.vertex_ce, self.edge_ce, self.vector_l2, self.cells, self.masked_cells
        )
    }

    pub fn per_cell(&self) -> f64 {
        if self.cells == 0 {
            0.0
        } else {
            self.total / self.cells as f64
        }
    }
}

/// Binary cross-entropy against a binary target, with the log argument
/// bounded below by [`PROB_EPS`].
fn bce(truth: f32, predicted: f32) -> f64 {
    let p = predicted as f64;
    if truth >= 0.5 {
        -(p.max(PROB_EPS)).ln()
    } else {
        -((1.0 - p).max(PROB_EPS)).ln()
    }
}

/// Sum over cells of the vertexness cross-entropy plus, at cells where the
/// ground truth has a vertex, the edgeness cross-entropy and the squared
/// error of the edge vectors of every slot.
pub fn gte_loss(predicted: &GteTensor, truth: &GteTensor) -> Result<LossBreakdown> {
    if !predicted.same_shape(truth) {
        return Err(Error::DimensionMismatch(format!(
            "predicted {}x{}x{} vs truth {}x{}x{}",
            predicted.width(),
            predicted.height(),
            predicted.channels(),
            truth.width(),
            truth.height(),
            truth.channels()
        )));
    }
    let channels = truth.channels();
    for (i, &v) in truth.data().iter().enumerate() {
        if GteTensor::is_probability_channel(i % channels) && v != 0.0 && v != 1.0 {
            return Err(Error::Domain(format!("ground-truth probability {v} at element {i} is not binary")));
        }
    }
    if let Some(i) = predicted.data().iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite prediction at element {i}")));
    }

    let d_max = truth.d_max();
    let rows: Vec<usize> = (0..truth.height()).collect();
    let partial = par::map(&rows, |&y| {
        let mut acc = [0.0f64; 3];
        let mut masked = 0usize;
        for x in 0..truth.width() {
            let (p, t) = (predicted.cell(x, y), truth.cell(x, y));
            acc[0] += bce(t[0], p[0]);
            if t[0] == 1.0 {
                masked += 1;
                for i in 1..=d_max {
                    let k = 3 * i - 2;
                    acc[1] += bce(t[k], p[k]);
                    let ex = (p[k + 1] - t[k + 1]) as f64;
                    let ey = (p[k + 2] - t[k + 2]) as f64;
                    acc[2] += ex * ex + ey * ey;
                }
            }
        }
        (acc, masked)
    });

    let vertex_ce = pairwise_sum(&partial.iter().map(|p| p.0[0]).collect::<Vec<_>>());
    let edge_ce = pairwise_sum(&partial.iter().map(|p| p.0[1]).collect::<Vec<_>>());
    let vector_l2 = pairwise_sum(&partial.iter().map(|p| p.0[2]).collect::<Vec<_>>());
    Ok(LossBreakdown {
        total: vertex_ce + edge_ce + vector_l2,
        vertex_ce,
        edge_ce,
        vector_l2,
        cells: truth.width() * truth.height(),
        masked_cells: partial.iter().map(|p| p.1).sum(),
    })
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}
