//! Reversible averaging systems: graph-driven averaging dynamics with exact
//! detailed balance, s-energy accounting, flocking runs with hysteresis
//! switching, recursive lower-bound schedules, and pinned stochastic swarms.

pub mod bounds;
pub mod checks;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod flocking;
pub mod graph;
pub mod lower_bound;
pub mod rng;
pub mod swarm;
pub mod system;
pub mod unionfind;

pub use bounds::{theorem2_bound, u_recurrence_bound};
pub use checks::{all_checks, CheckReport};
pub use diagnostics::{check_cover_length, cover_time, CoverLengthReport};
pub use energy::{
    compute_blocks, dirichlet_form, s_energy, s_energy_max, Block, EnergyLedger,
    BLOCK_MERGE_TOLERANCE,
};
pub use error::{Error, Result};
pub use flocking::{
    analysis::{detect_stabilization, fit_flight_line, line_of_sight_gap, StabilizationReport},
    trace::{backward_trace, count_switch_stats, SwitchStats, TraceResult},
    sample_initial_conditions, vcs_step, FlockConfig, FlockRun, FlockState,
};
pub use graph::WeightedGraph;
pub use lower_bound::{
    build_recursive_schedule, build_recursive_schedule_with, execute_schedule, theorem3_bound,
    theorem3_fit_constant, variance_rescaling_factor, ExecuteOptions, PathSpectralModel,
    RecursiveSchedule, ScheduleParams, ScheduleRun,
};
pub use rng::SplitMix64;
pub use swarm::{
    build_failure_matrix, contraction_ratios, convergence_stats, run_swarm, sample_failures,
    sample_failures_mirrored, symmetrize, theorem4_bound, ConvergenceStats, PinMode, SwarmConfig,
    SwarmRun, SymmetrizedSystem, VertexRole,
};
pub use system::{
    build_system, q_inner, q_mean, q_norm_sq, step, variance, EmbeddedState, ReversibleSystem,
};
pub use unionfind::UnionFind;
