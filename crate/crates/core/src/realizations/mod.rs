//! Sparsest stochastic matrices with an eigenvalue on a given arc.

mod charpoly;
mod extract;
mod matrix;
mod partition;

pub use charpoly::{char_poly, char_poly_dense, CHAR_POLY_MAX_N};
pub use extract::{partition_class_of, partition_class_of_digraph};
pub use matrix::{build, build_type0, build_type_i, build_type_ii, build_type_iii, SparseStochasticMatrix};
pub use partition::{compositions, join, partition_classes, PartitionClass};
