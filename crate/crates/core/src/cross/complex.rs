//! The cross construction as a [`CellComplex`] for the level-set engine.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::levelset::complex::{CellComplex, VertexId};

use super::model::CrossModel;

/// A square of level `level`, with integer position on the `2^{m level}`
/// grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossCell {
    pub level: u32,
    pub i: u64,
    pub j: u64,
}

impl CrossCell {
    pub const ROOT: CrossCell = CrossCell { level: 0, i: 0, j: 0 };
}

impl fmt::Display for CrossCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}", self.level, self.i, self.j)
    }
}

#[derive(Clone, Debug)]
pub struct CrossComplex {
    model: Arc<CrossModel>,
    resolution: u32,
}

impl CrossComplex {
    pub fn new(model: Arc<CrossModel>, resolution: u32) -> Result<Self> {
        if model.m() * resolution > 62 {
            return Err(Error::Budget(format!(
                "resolution {resolution} needs {} grid bits, more than 62",
                model.m() * resolution
            )));
        }
        Ok(CrossComplex { model, resolution })
    }

    pub fn model(&self) -> &CrossModel {
        &self.model
    }

    fn bits(&self) -> u32 {
        self.model.m()
    }

    /// Level-1 position of `cell` inside its ancestor at `level - 1`.
    pub fn local_digit(&self, cell: CrossCell, level: u32) -> (u32, u32) {
        let shift = self.bits() * (cell.level - level);
        let mask = (1u64 << self.bits()) - 1;
        (((cell.i >> shift) & mask) as u32, ((cell.j >> shift) & mask) as u32)
    }

    /// Level-1 indices along the path from the root to `cell`.
    pub fn path(&self, cell: CrossCell) -> Vec<u32> {
        (1..=cell.level)
            .map(|l| {
                let (a, b) = self.local_digit(cell, l);
                self.model.index_of(a, b).expect("cells are built from retained squares")
            })
            .collect()
    }

    pub fn ancestor(&self, cell: CrossCell, level: u32) -> CrossCell {
        let shift = self.bits() * (cell.level - level);
        CrossCell { level, i: cell.i >> shift, j: cell.j >> shift }
    }

    /// Grid scale of vertex ids relative to cells of `level`.
    fn vertex_scale(&self, level: u32) -> u64 {
        1u64 << (self.bits() * (self.resolution - level))
    }

    /// Corners in the order lower-left, lower-right, upper-left, upper-right.
    pub fn corners(&self, cell: CrossCell) -> [VertexId; 4] {
        let s = self.vertex_scale(cell.level);
        let (x, y) = (cell.i * s, cell.j * s);
        [(x, y), (x + s, y), (x, y + s), (x + s, y + s)]
    }

    pub fn grid_side(&self) -> u64 {
        1u64 << (self.bits() * self.resolution)
    }
}

impl CellComplex for CrossComplex {
    type Cell = CrossCell;

    fn roots(&self) -> Vec<CrossCell> {
        vec![CrossCell::ROOT]
    }

    fn level(&self, cell: CrossCell) -> u32 {
        cell.level
    }

    fn children(&self, cell: CrossCell) -> Vec<CrossCell> {
        let b = self.bits();
        self.model
            .squares()
            .iter()
            .map(|&(a, c)| CrossCell { level: cell.level + 1, i: (cell.i << b) | a as u64, j: (cell.j << b) | c as u64 })
            .collect()
    }

    fn vertices(&self, cell: CrossCell) -> Vec<VertexId> {
        self.corners(cell).to_vec()
    }

    fn resolution(&self) -> u32 {
        self.resolution
    }

    fn vertex_point(&self, v: VertexId) -> (f64, f64) {
        let s = self.grid_side() as f64;
        (v.0 as f64 / s, v.1 as f64 / s)
    }

    fn cell_diameter(&self, level: u32) -> f64 {
        std::f64::consts::SQRT_2 * (-((self.bits() * level) as f64)).exp2()
    }
}
