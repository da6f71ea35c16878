use std::fmt::{Debug, Display};
use std::hash::Hash;

use crate::tri::TriCell;

/// Integer grid coordinates of a vertex at the complex's finest resolution.
pub type VertexId = (u64, u64);

/// A nested family of closed cells refining a root cell.
///
/// Every vertex of a cell is also a vertex of one of its children, so the
/// vertex set at level `n` contains all vertices of coarser levels.
pub trait CellComplex: Sync {
    type Cell: Copy + Eq + Hash + Ord + Debug + Display + Send + Sync;

    fn roots(&self) -> Vec<Self::Cell>;
    fn level(&self, cell: Self::Cell) -> u32;
    fn children(&self, cell: Self::Cell) -> Vec<Self::Cell>;
    fn vertices(&self, cell: Self::Cell) -> Vec<VertexId>;
    /// Deepest level whose vertices have ids.
    fn resolution(&self) -> u32;
    /// Cartesian position of a vertex, used for distances.
    fn vertex_point(&self, v: VertexId) -> (f64, f64);
    fn cell_diameter(&self, level: u32) -> f64;
}

pub fn cells_at_level<C: CellComplex>(cx: &C, level: u32) -> Vec<C::Cell> {
    let mut cells = cx.roots();
    for _ in 0..level {
        cells = cells.iter().flat_map(|&c| cx.children(c)).collect();
    }
    cells.sort();
    cells
}

/// Sierpiński triangle cells down to a fixed resolution, in the equilateral
/// realization with unit side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleComplex {
    resolution: u8,
}

impl TriangleComplex {
    pub fn new(resolution: u32) -> crate::Result<Self> {
        if resolution > 30 {
            return Err(crate::Error::Budget(format!("triangle resolution {resolution} exceeds 30")));
        }
        Ok(TriangleComplex { resolution: resolution as u8 })
    }

    /// Frame coordinates `(u, v)` of a vertex.
    pub fn frame_coords(&self, v: VertexId) -> (f64, f64) {
        let s = (1u64 << self.resolution) as f64;
        (v.0 as f64 / s, v.1 as f64 / s)
    }
}

impl CellComplex for TriangleComplex {
    type Cell = TriCell;

    fn roots(&self) -> Vec<TriCell> {
        vec![TriCell::ROOT]
    }

    fn level(&self, cell: TriCell) -> u32 {
        cell.level as u32
    }

    fn children(&self, cell: TriCell) -> Vec<TriCell> {
        cell.children().to_vec()
    }

    fn vertices(&self, cell: TriCell) -> Vec<VertexId> {
        cell.grid_vertices_at(self.resolution).to_vec()
    }

    fn resolution(&self) -> u32 {
        self.resolution as u32
    }

    fn vertex_point(&self, v: VertexId) -> (f64, f64) {
        let (u, w) = self.frame_coords(v);
        (u + 0.5 * w, 0.5 * 3f64.sqrt() * w)
    }

    fn cell_diameter(&self, level: u32) -> f64 {
        (-(level as f64)).exp2()
    }
}
