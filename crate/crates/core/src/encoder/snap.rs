use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{SpatialGraph, Vertex, VertexId};

/// Tensor grid geometry: `width x height` cells of `lambda` meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub lambda: f64,
}

impl Grid {
    pub fn for_extent(width: f64, height: f64, lambda: f64) -> Self {
        let cells = |m: f64| ((m / lambda) - 1e-9).ceil().max(0.0) as usize;
        Grid {
            width: cells(width),
            height: cells(height),
            lambda,
        }
    }

    /// Nearest cell, rounding half up per axis and clamping to the grid.
    pub fn cell_of(&self, p: Point) -> (usize, usize) {
        let axis = |v: f64, n: usize| {
            let c = (v / self.lambda + 0.5).floor();
            if c <= 0.0 {
                0
            } else {
                (c as usize).min(n.saturating_sub(1))
            }
        };
        (axis(p.x, self.width), axis(p.y, self.height))
    }

    /// Center of a cell in meters.
    pub fn center(&self, cell: (usize, usize)) -> Point {
        Point::new(cell.0 as f64 * self.lambda, cell.1 as f64 * self.lambda)
    }
}

/// Cells already claimed by a vertex.
#[derive(Debug, Clone)]
pub(crate) struct CellSnap {
    grid: Grid,
    owners: HashMap<(usize, usize), VertexId>,
}

impl CellSnap {
    /// Claims the cell under `p` for a new vertex, returning its center, or
    /// `None` if taken.
    pub fn claim(&mut self, p: Point) -> Option<Point> {
        let cell = self.grid.cell_of(p);
        if self.owners.contains_key(&cell) {
            return None;
        }
        self.owners.insert(cell, VertexId::MAX);
        Some(self.grid.center(cell))
    }
}

/// Moves every vertex to its cell center; two vertices in one cell is an error.
pub(crate) fn snap_to_grid(graph: &SpatialGraph, grid: Grid) -> Result<(SpatialGraph, CellSnap)> {
    if grid.width == 0 || grid.height == 0 {
        if !graph.is_empty() {
            return Err(Error::Config("graph extent is smaller than one cell".into()));
        }
    }
    let mut owners: HashMap<(usize, usize), VertexId> = HashMap::with_capacity(graph.vertex_count());
    let mut vertices = Vec::with_capacity(graph.vertex_count());
    for v in graph.vertices() {
        let cell = grid.cell_of(v.pos);
        if let Some(&other) = owners.get(&cell) {
            return Err(Error::CellCollision(other.min(v.id), other.max(v.id), cell.0, cell.1));
        }
        owners.insert(cell, v.id);
        vertices.push(Vertex { id: v.id, pos: grid.center(cell) });
    }
    let snapped = SpatialGraph::from_parts(
        grid.width as f64 * grid.lambda,
        grid.height as f64 * grid.lambda,
        vertices,
        graph.edges().to_vec(),
    )?;
    Ok((snapped, CellSnap { grid, owners }))
}
