pub mod arith;
pub mod error;
pub mod precise;

pub use error::{Error, Result};
pub mod linalg;
pub mod ec;
pub mod group_ring;
pub mod modsym;
pub mod lseries;
pub mod theta;
pub mod derivative;
pub mod verifier;
pub mod cli_io;
