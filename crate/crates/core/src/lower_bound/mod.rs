//! Adversarial constructions: the slow path instance with its exact spectral
//! diameter law, and the recursive multi-cluster schedule whose measured
//! s-energy certifies the lower-bound formula.

pub mod path;
pub mod schedule;

pub use path::{PathSpectralModel, PATH_WEIGHT_LIMIT};
pub use schedule::{
    build_recursive_schedule, build_recursive_schedule_with, execute_schedule, theorem3_bound,
    theorem3_fit_constant, variance_rescaling_factor, ExecuteOptions, PhaseAction, PhaseKind,
    PhaseReport, RecursiveSchedule, SchedulePhase, ScheduleParams, ScheduleRun, StopRule,
    DEFAULT_CONTRACTION_CUTOFF, DEFAULT_RECURSION_CUTOFF, DEFAULT_STEP_BUDGET,
};
