//! Solvers for the minimum common string partition (MCSP) problem.
//!
//! Two related strings (same length, same letter multiset) are split into the
//! same multiset of substrings using as few pieces as possible. The crate
//! enumerates the common blocks of an instance, builds the set-partitioning
//! integer programs over them, and solves those programs with a specialised
//! branch-and-bound. On top of that sits a greedy baseline and a two-phase
//! heuristic that first packs long blocks and then completes the partition
//! exactly over the blocks that remain compatible.
//!
//! Positions are 1-based throughout.

pub mod blocks;
pub mod error;
pub mod greedy;
pub mod heuristic;
pub mod instance;
pub mod instgen;
pub mod lp;
pub mod model;
pub mod solver;

pub use blocks::{
    compatible_blocks, enumerate_blocks, l_max, length_histogram, BlockSet, LengthHistogram,
};
pub use error::{Error, Result};
pub use greedy::greedy_partition;
pub use heuristic::{
    run_phase1, run_phase2, sweep_l, two_phase, HeuristicConfig, LChoice, SweepEntry, SweepReport,
    TwoPhaseResult,
};
pub use instance::{
    is_related, validate_blocks, validate_partition, CommonBlock, Instance, Partition, Validity,
    Violation,
};
pub use instgen::generate_instance;
pub use model::{
    build_ilp_orig, build_ilp_ph1, build_ilp_ph2, import_solution, phase1_weight, Formulation,
    IlpModel,
};
pub use solver::{
    brute_force_optimal, solve_max_coverage, solve_min_partition, SolveResult, SolveStatus,
    SolverConfig,
};
