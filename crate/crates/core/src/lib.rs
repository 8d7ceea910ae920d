pub mod arith;
pub mod error;
pub mod fitting;
pub mod group_ring;
pub mod lattice;
pub mod mazur_tate;
pub mod modsym;
pub mod parallel;
pub mod selmer;
pub mod verify;

pub use error::{Error, Result};
