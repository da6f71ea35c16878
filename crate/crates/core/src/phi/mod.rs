pub mod admissible;
pub mod audit;
pub mod geom;
pub mod gens;
pub mod optimize;
pub mod witness;

pub use admissible::{parse_address, AdmissibleSet, Block, KeyMap, PhiInterval, RankCounter};
pub use gens::{GenLabel, GenSystem};
pub use witness::PhiWitness;
