//! The projected walk on the sector `N^{d-1}`: SRW on the building, viewed
//! modulo the stabilizer of its starting vertex.
//!
//! Off the boundary each move `gamma` has mass `q^{Z_gamma}/deg`. On the
//! boundary a move that leaves the sector is folded back by sorting the
//! exponent vector, and masses of coinciding targets add. This folding
//! rule reproduces every `d = 3` boundary law exactly; for larger `d` the
//! boundary strata are taken on the same rule without an independent
//! check.

mod evolve;
mod law;
mod point;
mod sim;

pub use evolve::{evolve_exact, evolve_float, Evolution, EvolveConfig, DEFAULT_STATE_CAP};
pub use law::{bias_check, transition_distribution, CoordinateBias, StepLaw};
pub use point::{fold, SectorPoint};
pub use sim::{simulate, standard_normal_tail, tail_experiment, TailExperiment, WalkStats};
