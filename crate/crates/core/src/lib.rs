pub mod arc_powers;
pub mod boundary;
pub mod digraph;
pub mod error;
pub mod farey;
pub mod matrix_powers;
pub mod poly;
pub mod realizations;

pub use error::{Error, Result};
