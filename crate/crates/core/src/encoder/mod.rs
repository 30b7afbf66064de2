//! Graph-to-tensor encoding.
//!
//! A preprocessed graph (interpolated, conflict-resolved) is snapped to the
//! `lambda` grid, each undirected edge gets one encoded direction, and every
//! vertex writes its vertexness and outgoing edge slots into its cell.

mod orient;
mod sector;
mod snap;
mod tensor;

use crate::error::{Error, Result};
use crate::graph::{interpolate, resolve_conflicts, ConflictReport, SpatialGraph, DEFAULT_MAX_ITER};

pub use orient::{orient_edges, FixReport, OrientedEdge, Orientation};
pub use sector::sector_of;
pub use snap::Grid;
pub use tensor::{load_tensor, save_tensor, EdgeSlot, GteTensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeConfig {
    /// Cell size in meters.
    pub lambda: f64,
    pub d_max: usize,
    /// Interpolation spacing: consecutive vertices end up closer than this.
    pub d: f64,
    /// Minimum separation between vertices of overlapping edges.
    pub min_sep: f64,
    pub max_iter: usize,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            lambda: 1.0,
            d_max: 6,
            d: 20.0,
            min_sep: 5.0,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl EncodeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.d_max < 3 {
            return Err(Error::Config(format!("D_max must be at least 3, got {}", self.d_max)));
        }
        if !(self.min_sep > 0.0 && self.d > self.min_sep && self.d.is_finite()) {
            return Err(Error::Config(format!(
                "need d > min_sep > 0, got d = {} and min_sep = {}",
                self.d, self.min_sep
            )));
        }
        Ok(())
    }
}

/// Interpolation followed by conflict resolution.
pub fn preprocess(graph: &SpatialGraph, cfg: &EncodeConfig) -> Result<(SpatialGraph, ConflictReport)> {
    cfg.validate()?;
    let dense = interpolate(graph, cfg.d)?;
    resolve_conflicts(&dense, cfg.min_sep, cfg.max_iter)
}

/// Output of [`encode_with_report`].
#[derive(Debug, Clone)]
pub struct Encoding {
    pub tensor: GteTensor,
    /// The graph the tensor represents exactly: vertices at cell centers,
    /// split vertices included, ids assigned in (y, x) cell order.
    pub graph: SpatialGraph,
    pub fixes: FixReport,
}

/// Encodes an already preprocessed graph.
pub fn encode(graph: &SpatialGraph, cfg: &EncodeConfig) -> Result<GteTensor> {
    Ok(encode_with_report(graph, cfg)?.tensor)
}

pub fn encode_with_report(graph: &SpatialGraph, cfg: &EncodeConfig) -> Result<Encoding> {
    cfg.validate()?;
    let grid = Grid::for_extent(graph.width(), graph.height(), cfg.lambda);
    let (snapped, mut cells) = snap::snap_to_grid(graph, grid)?;
    let orientation = orient::orient(&snapped, cfg.d_max, Some(&mut cells))?;
    let mut tensor = GteTensor::zeros(grid.width, grid.height, cfg.d_max, cfg.lambda)?;
    let g = &orientation.graph;
    for v in g.vertices() {
        let (cx, cy) = grid.cell_of(v.pos);
        tensor.cell_mut(cx, cy)[0] = 1.0;
    }
    for e in &orientation.edges {
        let (tail, head) = (g.pos(e.tail), g.pos(e.head));
        let (cx, cy) = grid.cell_of(tail);
        let d = head - tail;
        tensor.set_edge(
            cx,
            cy,
            e.sector,
            EdgeSlot {
                edgeness: 1.0,
                dx: d.x as f32,
                dy: d.y as f32,
            },
        );
    }
    Ok(Encoding {
        tensor,
        graph: g.canonical_by_position(),
        fixes: orientation.report,
    })
}
