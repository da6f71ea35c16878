pub mod bounds;
pub mod cross;
pub mod dyadic;
pub mod error;
pub mod geometry;
pub mod holder;
pub mod levelset;
pub mod phi;
pub mod scheme;
pub mod tri;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use geometry::{AffineMap2, BaryPoint, Segment, Triangle};
