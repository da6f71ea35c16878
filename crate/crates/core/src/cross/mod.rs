pub mod approx;
pub mod audit;
pub mod complex;
pub mod model;
pub mod phi;
pub mod transition;

pub use complex::{CrossCell, CrossComplex};
pub use model::{p_closed_form, Adjacency, ClassTable, CrossModel, SquareClass, SquareType, Thin, TypeCounts};
pub use phi::Expansion;
pub use transition::{transition_bounds, TransitionBounds};
