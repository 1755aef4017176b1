//! Recursive multi-cluster schedule realizing the s-energy lower bound.
//!
//! The construction splits n agents into m equal clusters on a line, joins the
//! first two clusters for a single step over a bridging edge, lets both spread
//! back to points, recurses on the trailing m - 1 clusters, and repeats while
//! the group's span stays above a cutoff. Every averaging step uses uniform
//! weight rho, so each matrix is a valid reversible system whose smallest
//! positive entry is rho, and the communication graph (all intra-cluster paths
//! plus at most one bridge) never has more than m components.

use crate::bounds::{validate_c, validate_rho, validate_s};
use crate::energy::{compute_blocks_into, powf_s, Block, EnergyLedger};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::system::{build_system, EmbeddedState};

/// Cluster spread below which a contraction phase stops and snaps.
pub const DEFAULT_CONTRACTION_CUTOFF: f64 = 1e-10;
/// Group span below which the recursion merges the group and unwinds.
pub const DEFAULT_RECURSION_CUTOFF: f64 = 1e-3;
/// Executor guard against runaway schedules.
pub const DEFAULT_STEP_BUDGET: usize = 5_000_000;

/// Tunable cutoffs for building and executing schedules.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleParams {
    /// Stop a contraction once every active cluster's spread is below this.
    pub contraction_cutoff: f64,
    /// Stop looping on a cluster group once its span is below this.
    pub recursion_cutoff: f64,
    /// Hard cap on total executed averaging steps.
    pub step_budget: usize,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            contraction_cutoff: DEFAULT_CONTRACTION_CUTOFF,
            recursion_cutoff: DEFAULT_RECURSION_CUTOFF,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

/// What a phase is for, kept for reporting and energy audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    /// One step with a bridging edge between two cluster endpoints.
    Bridge,
    /// Path averaging inside the two bridged clusters until they re-point.
    Contract,
    /// Snap ranges to their arithmetic means (limit of endless averaging).
    Complete,
}

/// When an averaging phase ends.
#[derive(Debug, Clone)]
pub enum StopRule {
    /// Run exactly this many steps.
    Steps(usize),
    /// Run until every half-open vertex range has max - min below the threshold.
    SpreadBelow {
        ranges: Vec<(usize, usize)>,
        threshold: f64,
    },
}

/// What a phase does when executed.
#[derive(Debug, Clone)]
pub enum PhaseAction {
    /// Step the averaging system induced by `graph` until `stop` is met.
    Average { graph: WeightedGraph, stop: StopRule },
    /// Overwrite each half-open vertex range with its arithmetic mean.
    Snap { ranges: Vec<(usize, usize)> },
}

/// One phase of a schedule.
#[derive(Debug, Clone)]
pub struct SchedulePhase {
    pub kind: PhaseKind,
    /// Recursion depth that emitted the phase (0 = outermost group).
    pub depth: usize,
    pub action: PhaseAction,
}

/// A fully built move list plus everything needed to replay it.
#[derive(Debug, Clone)]
pub struct RecursiveSchedule {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub s: f64,
    pub params: ScheduleParams,
    pub phases: Vec<SchedulePhase>,
    /// Cluster 0 at 0, all others at 1.
    pub initial: EmbeddedState,
    /// Analytically tracked positions after the final phase.
    pub predicted_final: Vec<f64>,
}

impl RecursiveSchedule {
    /// Cluster size n / m.
    pub fn cluster_size(&self) -> usize {
        self.n / self.m
    }
}

/// Builds the recursive schedule with default cutoffs.
pub fn build_recursive_schedule(n: usize, m: usize, rho: f64, s: f64) -> Result<RecursiveSchedule> {
    build_recursive_schedule_with(n, m, rho, s, ScheduleParams::default())
}

/// Builds the recursive schedule; positions are tracked analytically so the
/// phase list, the initial state, and the predicted final state are all known
/// before anything is executed.
// Negated comparisons so that NaN parameters are rejected too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn build_recursive_schedule_with(
    n: usize,
    m: usize,
    rho: f64,
    s: f64,
    params: ScheduleParams,
) -> Result<RecursiveSchedule> {
    if m < 2 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m as f64,
            constraint: "the construction needs at least two clusters",
        });
    }
    if !n.is_multiple_of(m) || n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            constraint: "agent count must be a positive multiple of the cluster count",
        });
    }
    if !(rho > 0.0 && rho < 0.25) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            constraint: "uniform weight must lie in (0, 1/4)",
        });
    }
    validate_s(s)?;
    if !(params.recursion_cutoff > 0.0 && params.recursion_cutoff < 1.0) {
        return Err(Error::InvalidParameter {
            name: "recursion_cutoff",
            value: params.recursion_cutoff,
            constraint: "span cutoff must lie in (0, 1)",
        });
    }
    if !(params.contraction_cutoff > 0.0) {
        return Err(Error::InvalidParameter {
            name: "contraction_cutoff",
            value: params.contraction_cutoff,
            constraint: "spread cutoff must be positive",
        });
    }

    let nu = n / m;
    // Intra-cluster path edges, present in every averaging step so the graph
    // never has more than m components; on a cluster sitting at a point they
    // act as the identity.
    let mut intra = Vec::with_capacity(m * nu.saturating_sub(1));
    for c in 0..m {
        for i in c * nu..(c + 1) * nu - 1 {
            intra.push((i, i + 1));
        }
    }
    let contract_graph = WeightedGraph::new(n, &intra)?;
    // Bridge graphs, one per adjacent cluster pair that can be joined.
    let bridge_graphs: Vec<WeightedGraph> = (0..m - 1)
        .map(|c| {
            let mut edges = intra.clone();
            edges.push(((c + 1) * nu - 1, (c + 1) * nu));
            WeightedGraph::new(n, &edges)
        })
        .collect::<Result<_>>()?;

    let mut pos = vec![1.0; m];
    pos[0] = 0.0;
    let mut phases = Vec::new();
    let ctx = BuildCtx {
        nu,
        rho,
        params,
        contract_graph,
        bridge_graphs,
    };
    recurse(&mut phases, 0, &mut pos, 0, &ctx)?;

    let mut initial = vec![1.0; n];
    initial[..nu].fill(0.0);
    let mut predicted_final = Vec::with_capacity(n);
    for &p in &pos {
        predicted_final.extend(std::iter::repeat_n(p, nu));
    }
    Ok(RecursiveSchedule {
        n,
        m,
        rho,
        s,
        params,
        phases,
        initial: EmbeddedState::new(initial),
        predicted_final,
    })
}

struct BuildCtx {
    nu: usize,
    rho: f64,
    params: ScheduleParams,
    contract_graph: WeightedGraph,
    bridge_graphs: Vec<WeightedGraph>,
}

/// Guard against pathological cutoffs generating unbounded phase lists.
const MAX_PHASES: usize = 4_000_000;

fn cluster_range(ctx: &BuildCtx, cluster: usize) -> (usize, usize) {
    (cluster * ctx.nu, (cluster + 1) * ctx.nu)
}

/// Emits phases for the cluster group starting at cluster `first` whose
/// current positions are `pos`; on return the group is merged at the mean of
/// the incoming positions and `pos` is updated to reflect that.
fn recurse(
    phases: &mut Vec<SchedulePhase>,
    first: usize,
    pos: &mut [f64],
    depth: usize,
    ctx: &BuildCtx,
) -> Result<()> {
    let count = pos.len();
    if count < 2 {
        return Ok(());
    }
    loop {
        let span = pos[count - 1] - pos[0];
        if span < ctx.params.recursion_cutoff {
            break;
        }
        if phases.len() > MAX_PHASES {
            return Err(Error::StepBudgetExceeded {
                phase: phases.len(),
                budget: MAX_PHASES,
            });
        }
        // One step over the bridge joining the group's first two clusters.
        phases.push(SchedulePhase {
            kind: PhaseKind::Bridge,
            depth,
            action: PhaseAction::Average {
                graph: ctx.bridge_graphs[first].clone(),
                stop: StopRule::Steps(1),
            },
        });
        // Let both touched clusters contract back to points, then snap them
        // to their exact mass centers.
        let r0 = cluster_range(ctx, first);
        let r1 = cluster_range(ctx, first + 1);
        phases.push(SchedulePhase {
            kind: PhaseKind::Contract,
            depth,
            action: PhaseAction::Average {
                graph: ctx.contract_graph.clone(),
                stop: StopRule::SpreadBelow {
                    ranges: vec![r0, r1],
                    threshold: ctx.params.contraction_cutoff,
                },
            },
        });
        phases.push(SchedulePhase {
            kind: PhaseKind::Complete,
            depth,
            action: PhaseAction::Snap {
                ranges: vec![r0, r1],
            },
        });
        // The bridge moved one boundary vertex of each cluster by rho * span,
        // so each mass center moved by rho * span / nu.
        let delta = ctx.rho * span / ctx.nu as f64;
        pos[0] += delta;
        pos[1] -= delta;
        // The trailing clusters now have the same shape one scale down:
        // first at its group's low end, the rest together above it.
        recurse(phases, first + 1, &mut pos[1..], depth + 1, ctx)?;
    }
    // Merge the whole group once its span falls below the cutoff.
    phases.push(SchedulePhase {
        kind: PhaseKind::Complete,
        depth,
        action: PhaseAction::Snap {
            ranges: vec![(first * ctx.nu, (first + count) * ctx.nu)],
        },
    });
    let mean = pos.iter().sum::<f64>() / count as f64;
    pos.fill(mean);
    Ok(())
}

/// Executor knobs.
#[derive(Debug, Clone, Default)]
pub struct ExecuteOptions {
    /// Overrides the schedule's step budget when set.
    pub step_budget: Option<usize>,
    /// Keep the full per-step block ledger (memory-heavy on long schedules).
    pub keep_ledger: bool,
    /// Record (step, max block length) once every this many steps.
    pub trace_stride: Option<usize>,
}


/// Per-phase slice of an executed run.
#[derive(Debug, Clone)]
pub struct PhaseReport {
    pub kind: PhaseKind,
    pub depth: usize,
    pub steps: usize,
    /// Sum over the phase's steps of sum over blocks of length^s.
    pub energy: f64,
}

/// A fully executed schedule.
#[derive(Debug)]
pub struct ScheduleRun {
    pub s: f64,
    /// Total s-energy: sum over every step of sum over blocks of length^s.
    pub total_energy: f64,
    pub total_steps: usize,
    pub phase_reports: Vec<PhaseReport>,
    /// Present when requested via [`ExecuteOptions::keep_ledger`].
    pub ledger: Option<EnergyLedger>,
    /// (step index, max block length) samples when a stride was requested.
    pub trace: Vec<(usize, f64)>,
    pub final_state: EmbeddedState,
}

/// Replays a schedule, measuring s-energy from the blocks of the full active
/// graph before every averaging step. Snap phases move no energy.
pub fn execute_schedule(schedule: &RecursiveSchedule, options: &ExecuteOptions) -> Result<ScheduleRun> {
    let s = schedule.s;
    let budget = options.step_budget.unwrap_or(schedule.params.step_budget);
    let weights = vec![schedule.rho; schedule.n];
    let mut state = schedule.initial.values.clone();
    let mut next = vec![0.0; schedule.n];
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut ledger = if options.keep_ledger {
        Some(EnergyLedger::new(s)?)
    } else {
        None
    };
    let mut trace = Vec::new();
    let mut total_energy = 0.0;
    let mut total_steps = 0usize;
    let mut phase_reports = Vec::with_capacity(schedule.phases.len());

    for (phase_idx, phase) in schedule.phases.iter().enumerate() {
        let mut report = PhaseReport {
            kind: phase.kind,
            depth: phase.depth,
            steps: 0,
            energy: 0.0,
        };
        match &phase.action {
            PhaseAction::Average { graph, stop } => {
                let sys = build_system(graph, &weights)?;
                loop {
                    match stop {
                        StopRule::Steps(k) => {
                            if report.steps >= *k {
                                break;
                            }
                        }
                        StopRule::SpreadBelow { ranges, threshold } => {
                            if ranges
                                .iter()
                                .all(|&(lo, hi)| spread(&state[lo..hi]) < *threshold)
                            {
                                break;
                            }
                        }
                    }
                    if total_steps >= budget {
                        return Err(Error::StepBudgetExceeded {
                            phase: phase_idx,
                            budget,
                        });
                    }
                    compute_blocks_into(&state, graph, &mut intervals, &mut blocks);
                    let step_energy: f64 =
                        blocks.iter().map(|b| powf_s(b.length(), s)).sum();
                    total_energy += step_energy;
                    report.energy += step_energy;
                    if let Some(ledger) = ledger.as_mut() {
                        ledger.record_blocks(&blocks);
                    }
                    if let Some(stride) = options.trace_stride {
                        if total_steps.is_multiple_of(stride.max(1)) {
                            let widest = blocks
                                .iter()
                                .map(Block::length)
                                .fold(0.0f64, f64::max);
                            trace.push((total_steps, widest));
                        }
                    }
                    sys.apply_into(&state, &mut next);
                    std::mem::swap(&mut state, &mut next);
                    report.steps += 1;
                    total_steps += 1;
                }
            }
            PhaseAction::Snap { ranges } => {
                for &(lo, hi) in ranges {
                    let mean = state[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
                    state[lo..hi].fill(mean);
                }
            }
        }
        phase_reports.push(report);
    }

    Ok(ScheduleRun {
        s,
        total_energy,
        total_steps,
        phase_reports,
        ledger,
        trace,
        final_state: EmbeddedState::new(state),
    })
}

fn spread(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Closed-form lower bound (c / (s rho^(1-s)))^m (n/m)^((1-s)m + 1) on the
/// s-energy achievable with m-component graphs and entry floor rho.
pub fn theorem3_bound(n: usize, m: usize, rho: f64, s: f64, c: f64) -> Result<f64> {
    validate_bound_inputs(n, m, rho, s)?;
    validate_c(c)?;
    let ratio = n as f64 / m as f64;
    Ok((c / (s * rho.powf(1.0 - s))).powi(m as i32) * ratio.powf((1.0 - s) * m as f64 + 1.0))
}

/// Constant c that makes [`theorem3_bound`] equal a measured energy; fitting
/// the corpus minimum yields a c certified by every run.
pub fn theorem3_fit_constant(n: usize, m: usize, rho: f64, s: f64, measured: f64) -> Result<f64> {
    validate_bound_inputs(n, m, rho, s)?;
    if !(measured > 0.0 && measured.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "measured",
            value: measured,
            constraint: "measured energy must be positive and finite",
        });
    }
    let ratio = n as f64 / m as f64;
    let core = measured / ratio.powf((1.0 - s) * m as f64 + 1.0);
    Ok(s * rho.powf(1.0 - s) * core.powf(1.0 / m as f64))
}

/// Scale factor (rho/n)^(s/2) translating the unit-span lower bound to the
/// unit-variance normalization used by the upper bound.
pub fn variance_rescaling_factor(n: usize, rho: f64, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            constraint: "need at least one agent",
        });
    }
    validate_rho(rho)?;
    validate_s(s)?;
    Ok((rho / n as f64).powf(s / 2.0))
}

fn validate_bound_inputs(n: usize, m: usize, rho: f64, s: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            constraint: "need at least one agent",
        });
    }
    if m == 0 || m > n {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m as f64,
            constraint: "component count must satisfy 1 <= m <= n",
        });
    }
    validate_rho(rho)?;
    validate_s(s)
}
