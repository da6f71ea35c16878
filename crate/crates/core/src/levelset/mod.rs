//! Level-set fronts, descendant trees and the associated measure, generic
//! over a [`CellComplex`].

pub mod audit;
pub mod complex;
pub mod field;
pub mod front;

pub use complex::{cells_at_level, CellComplex, TriangleComplex, VertexId};
pub use field::{random_holder_field, xcoord_field, HolderMeta, NumericMode, RandomHolderSpec, VertexField};
pub use front::{
    build_front, build_measure, cover_audit, descend, intervals_cover, CellFront, DescendantTree,
    LevelMeasure, LevelQuery,
};
