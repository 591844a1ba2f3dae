//! Finite-graph measurements: exact walk evolution, total-variation
//! profiles split by a coloring, spectral certification, and the norm
//! bounds for r-normal operators.

mod bounds;
mod graph;
mod spectral;
mod walk;

pub use bounds::{collision_free_check, collision_free_walks, normal_bound, ram_digraph_bound, CollisionCheck};
pub use graph::{
    complete, cycle, first_unreachable, hypercube, load_coloring, load_graph, petersen, planted_path, write_coloring,
    write_digraph, write_graph, Coloring, LoadedGraph, RegularDigraph, RegularGraph, Walkable,
};
pub use spectral::{
    digraph_spectral_report, spectral_report, spectral_report_with_cap, SolverMode, SpectralReport, DENSE_CAP,
    RESIDUAL_TOL,
};
pub use walk::{
    cutoff_ratio, evolve_srw, fmt12, mixing_times, step, tv_profile, tv_split, CutoffRatio, Distribution,
    EvolutionMode, MixingProfile, Precision, Start, TvSplit, WalkOptions, EXACT_PRODUCT_LIMIT,
};
