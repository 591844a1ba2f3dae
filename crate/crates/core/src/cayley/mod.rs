//! Finite-field matrix groups and their Cayley graphs: `PGL_d(F_q)` and
//! `PSL_d(F_q)` from user-supplied generators.

mod field;
mod group;
mod matrix;

pub use field::{FieldSpec, MAX_FIELD_ORDER};
pub use group::{cayley_graph, parse_generators, pgl_order, CayleyGraph, GeneratorSet};
pub use matrix::{canonicalize, Matrix, ProjectiveMatrix};
