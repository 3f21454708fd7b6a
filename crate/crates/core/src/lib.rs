//! Phase transitions of Erdős–Rényi processes started from an initial graph
//! and of the Bohman–Frieze process.
//!
//! * [`ledger`]: union-find with exact running `S_1..S_4`, `C_1`, `n_1`.
//! * [`process`]: the graph processes and seeded runs.
//! * [`ode`]: the deterministic limit system, its blow-up time and constants.
//! * [`giant`]: the survival fixed point and closed-form giant-component bounds.
//! * [`harness`]: replicated experiments written as CSV.

pub mod giant;
pub mod harness;
pub mod ledger;
pub mod ode;
pub mod process;

pub use ledger::{
    brute_force_moments, delta_k, BruteForceMoments, ComponentLedger, DisjointSetForest,
    LedgerError, MergeOutcome, MomentLedger, SizeDistribution,
};
pub use process::{
    build_initial_graph, poisson_edge_count, run_process, InitialGraphSpec, ProcessKind, RunConfig,
    SimOptions, Simulation, TraceRecord,
};
