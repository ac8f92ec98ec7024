//! Jigsaw percolation on double graphs.
//!
//! A double graph carries two edge sets ("red" and "blue") on one vertex
//! set. The percolation dynamics repeatedly merge clusters joined by at
//! least one edge of each color and stop when no such pair remains; the
//! instance is solved when a single cluster survives. This crate provides
//! exact solvers for the dynamics, Erdős-Rényi ensembles with reproducible
//! seeding, the edge-exposure algorithms used to certify supercritical
//! percolation, closed-form probability bounds evaluated in log space, and
//! Monte Carlo experiment drivers.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod cycle;
pub mod experiments;
pub mod explore;
pub mod graph;
pub mod random;
pub mod solver;

pub use bounds::{
    attach_probability_bounds, doubling_step_bound, log_sum_exp, round_survival_bounds,
    step_success_bound, subcritical_union_bound, union_bound_window, BoundValue,
    RoundSurvivalBounds, StepSuccessBound, DOUBLING_KAPPA,
};
pub use cycle::{cycle_percolates_exact, cycle_percolates_sampled, ArcLayout, CycleOutcome};
pub use experiments::{
    cluster_stats, cycle_puzzle_threshold, estimate_critical_product, estimate_percolation_prob,
    normalized_spread, run_trials, scaling_study, wilson_interval, ClusterStats, ExperimentError,
    RatioPolicy, ScalingRow, SearchVariable, StatsSummary, ThresholdEstimate, TrialBatch,
    TrialOutcome, CYCLE_THRESHOLD_CONSTANT, DEFAULT_REL_TOL,
};
pub use explore::{
    doubling, one_by_one, run_three_stage, run_three_stage_traced, third_sprinkle_completion,
    DoublingRun, ExplorationParams, ExploreError, ExploreTrace, OneByOneRun,
    PercolationCertificate, RevealLedger,
};
pub use graph::{
    connected_components, induce, is_connected, parse_edge_list, write_edge_list, Color,
    DoubleGraph, Graph, GraphError, Induced, ParseError, Partition, Vertex,
};
pub use random::{
    gen_double, gen_er, gen_er_coupled, gen_sprinkles, mix64, pair_count, pair_from_index,
    regime_check, ERParams, ParamError, RegimeReport, SeedSpec, Sprinkles,
};
pub use solver::{
    exhaustive_spanned, is_internally_spanned, mutually_connected_clusters, percolates,
    solve_fast, solve_reference, spanned_witness_from_history, MergeRecord, SolveReport,
    SolveResult, SpannedWitness,
};
