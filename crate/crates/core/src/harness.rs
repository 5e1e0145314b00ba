//! Run orchestration: builds graph representations, drives a kernel through
//! the chosen execution strategy, and assembles the run report.
//!
//! Six strategies are exposed. `vc` pushes every iteration; `eb` block-pulls
//! every iteration; `ec` streams the full edge list every iteration; `vch`
//! and `ech` alternate push with a dense phase (vertex pull / stream) using
//! the vertex-activity rule; `dm` runs the full dual-mode dispatcher,
//! pushing in LowParallel and block-pulling in HighParallel.
//!
//! Filtered and full-scan executions of the same run are bit-identical by
//! construction: full scans feed extra work that the kernels' activity gates
//! turn into exact no-ops, and all mode decisions are taken from *logical*
//! activation counters that are computed the same way in both variants.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algorithms::bfs::UNREACHED;
use crate::algorithms::{BfsKernel, PageRankKernel, WccKernel};
use crate::baselines::{stream_iteration, vertex_pull_iteration};
use crate::dispatcher::{
    counters_snapshot, hub_activated, vertex_activity_high, DispatcherParams, DispatcherState,
    IterationCounters, Mode, ModeSwitchReason,
};
use crate::edge_block::{build_edge_blocks, EdgeBlockConfig, EdgeBlockIndex, SizeClass};
use crate::frontier::{ActiveList, Bitmap};
use crate::gas::{GasKernel, InitialFrontier, IterCtx};
use crate::graph_io::{build_csc, build_csr, CsrGraph, RawEdgeList};
use crate::metrics::{
    mteps, ExecMode, IterationMetrics, LoopCounts, ModeSwitch, ReportParams, RunReport, RunTotals,
};
use crate::pull_engine::{pull_iteration, PipeEvent, PullConfig};
use crate::push_engine::push_iteration;
use crate::VertexId;

/// Environment variable consulted when [`RunConfig::workers`] is 0.
pub const WORKERS_ENV: &str = "DUALGRAPH_WORKERS";

/// Execution strategy selecting which engines a run may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Vertex-centric push on every iteration.
    Vc,
    /// Vertex-centric hybrid: push, switching to vertex pull when dense.
    Vch,
    /// Edge-centric: stream the full edge list every iteration.
    Ec,
    /// Edge-centric hybrid: push, switching to full streams when dense.
    Ech,
    /// Edge-block pull on every iteration.
    Eb,
    /// Dual-mode dispatcher: push in LowParallel, block pull in HighParallel.
    Dm,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Vc,
        Strategy::Vch,
        Strategy::Ec,
        Strategy::Ech,
        Strategy::Eb,
        Strategy::Dm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Vc => "vc",
            Strategy::Vch => "vch",
            Strategy::Ec => "ec",
            Strategy::Ech => "ech",
            Strategy::Eb => "eb",
            Strategy::Dm => "dm",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vc" => Ok(Strategy::Vc),
            "vch" => Ok(Strategy::Vch),
            "ec" => Ok(Strategy::Ec),
            "ech" => Ok(Strategy::Ech),
            "eb" => Ok(Strategy::Eb),
            "dm" => Ok(Strategy::Dm),
            other => Err(format!(
                "unknown strategy `{other}` (expected vc, vch, ec, ech, eb or dm)"
            )),
        }
    }
}

/// Which algorithm to run, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgoKind {
    Bfs {
        source: VertexId,
    },
    PageRank {
        damping: f64,
        epsilon: f64,
        max_iters: u32,
    },
    Wcc,
}

impl AlgoKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoKind::Bfs { .. } => "bfs",
            AlgoKind::PageRank { .. } => "pagerank",
            AlgoKind::Wcc => "wcc",
        }
    }

    /// Parameters as they appear under `params.algorithm` in the report.
    pub fn params_json(&self) -> Value {
        match *self {
            AlgoKind::Bfs { source } => json!({ "source": source }),
            AlgoKind::PageRank {
                damping,
                epsilon,
                max_iters,
            } => json!({
                "damping": damping,
                "epsilon": epsilon,
                "max_iters": max_iters,
            }),
            AlgoKind::Wcc => json!({}),
        }
    }
}

/// Everything a run needs besides the graph and the algorithm.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub dispatcher: DispatcherParams,
    pub blocks: EdgeBlockConfig,
    /// Worker threads for push; 0 resolves via [`WORKERS_ENV`], then the
    /// machine's available parallelism (capped at 8).
    pub workers: usize,
    /// Bound of each pull pipeline pipe, in blocks.
    pub pipe_capacity: usize,
    /// Feed engines every vertex/block instead of the active sets. The
    /// result and all logical counters stay identical; only the raw work
    /// counters grow.
    pub full_scan: bool,
    /// Record the pull pipe event trace.
    pub collect_trace: bool,
    /// Dataset label echoed into the report.
    pub dataset: String,
}

impl RunConfig {
    pub fn new(strategy: Strategy) -> Self {
        RunConfig {
            strategy,
            dispatcher: DispatcherParams::default(),
            blocks: EdgeBlockConfig::default(),
            workers: 0,
            pipe_capacity: 64,
            full_scan: false,
            collect_trace: false,
            dataset: String::new(),
        }
    }
}

/// Resolve the worker-thread count: explicit request, then [`WORKERS_ENV`],
/// then available parallelism capped at 8.
pub fn resolve_workers(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// All graph representations a run can need, built once and shared.
#[derive(Debug, Clone)]
pub struct GraphData {
    pub raw: RawEdgeList,
    pub csr: CsrGraph,
    pub csc: CsrGraph,
    pub blocks: EdgeBlockIndex,
}

impl GraphData {
    pub fn build(raw: RawEdgeList, cfg: &EdgeBlockConfig) -> GraphData {
        let csr = build_csr(&raw);
        let csc = build_csc(&raw);
        let blocks = build_edge_blocks(&raw, cfg);
        GraphData {
            raw,
            csr,
            csc,
            blocks,
        }
    }
}

/// Final algorithm output.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgoResult {
    Bfs {
        depths: Vec<u8>,
        clamped: bool,
    },
    PageRank {
        ranks: Vec<f32>,
        iterations: u32,
        converged: bool,
    },
    Wcc {
        labels: Vec<u32>,
    },
}

impl AlgoResult {
    /// Compact outcome summary embedded in the report.
    pub fn summary_json(&self) -> Value {
        match self {
            AlgoResult::Bfs { depths, clamped } => {
                let reached = depths.iter().filter(|&&d| d != UNREACHED).count();
                let max_depth = depths
                    .iter()
                    .filter(|&&d| d != UNREACHED)
                    .max()
                    .copied()
                    .unwrap_or(0);
                json!({
                    "reached": reached,
                    "unreached": depths.len() - reached,
                    "max_depth": max_depth,
                    "depth_clamped": clamped,
                })
            }
            AlgoResult::PageRank {
                ranks,
                iterations,
                converged,
            } => {
                let sum: f64 = ranks.iter().map(|&r| f64::from(r)).sum();
                let (top_vertex, top_rank) = ranks
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(v, &r)| (v as u64, f64::from(r)))
                    .unwrap_or((0, 0.0));
                json!({
                    "iterations": iterations,
                    "converged": converged,
                    "rank_sum": sum,
                    "top_vertex": top_vertex,
                    "top_rank": top_rank,
                })
            }
            AlgoResult::Wcc { labels } => {
                let mut sizes: BTreeMap<u32, u64> = BTreeMap::new();
                for &l in labels {
                    *sizes.entry(l).or_insert(0) += 1;
                }
                let largest = sizes.values().copied().max().unwrap_or(0);
                json!({
                    "components": sizes.len(),
                    "largest_component": largest,
                })
            }
        }
    }

    /// Cross-strategy equivalence: BFS depths and WCC labels must match
    /// exactly; PageRank ranks within `pr_tolerance` per vertex (iteration
    /// counts may differ between execution orders).
    pub fn approx_equals(&self, other: &AlgoResult, pr_tolerance: f64) -> bool {
        match (self, other) {
            (
                AlgoResult::Bfs {
                    depths: a,
                    clamped: ca,
                },
                AlgoResult::Bfs {
                    depths: b,
                    clamped: cb,
                },
            ) => a == b && ca == cb,
            (AlgoResult::PageRank { ranks: a, .. }, AlgoResult::PageRank { ranks: b, .. }) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|(&x, &y)| (f64::from(x) - f64::from(y)).abs() <= pr_tolerance)
            }
            (AlgoResult::Wcc { labels: a }, AlgoResult::Wcc { labels: b }) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(
        "source vertex {source_vertex} is out of range: the graph has {vertex_count} vertices"
    )]
    InvalidSource {
        source_vertex: VertexId,
        vertex_count: u32,
    },
}

/// A completed run: the report, the algorithm output, and (when tracing was
/// requested) the pull pipe events tagged with their iteration.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub result: AlgoResult,
    pub pipe_events: Vec<(u32, PipeEvent)>,
}

/// Execute one algorithm run over `graph` per `cfg`.
///
/// WCC is defined over undirected connectivity, so a directed input is
/// symmetrized first; the report then shows the symmetrized edge count.
pub fn run(
    graph: &GraphData,
    algo: &AlgoKind,
    cfg: &RunConfig,
) -> Result<RunOutcome, HarnessError> {
    let workers = resolve_workers(cfg.workers);
    let symmetrized;
    let data = if matches!(algo, AlgoKind::Wcc) && graph.raw.directed {
        symmetrized = GraphData::build(graph.raw.symmetrize(), &cfg.blocks);
        &symmetrized
    } else {
        graph
    };
    let vertex_count = data.csr.vertex_count;

    let (driven, result) = match *algo {
        AlgoKind::Bfs { source } => {
            if source >= vertex_count {
                return Err(HarnessError::InvalidSource {
                    source_vertex: source,
                    vertex_count,
                });
            }
            let mut kernel = BfsKernel::new(vertex_count, source);
            let driven = drive(&mut kernel, data, cfg, workers);
            let result = AlgoResult::Bfs {
                depths: kernel.depths(),
                clamped: kernel.depth_clamped(),
            };
            (driven, result)
        }
        AlgoKind::PageRank {
            damping,
            epsilon,
            max_iters,
        } => {
            let mut kernel = PageRankKernel::new(&data.csr, damping, epsilon, max_iters);
            let driven = drive(&mut kernel, data, cfg, workers);
            let result = AlgoResult::PageRank {
                ranks: kernel.ranks(),
                iterations: kernel.iterations(),
                converged: kernel.converged(),
            };
            (driven, result)
        }
        AlgoKind::Wcc => {
            let mut kernel = WccKernel::new(vertex_count);
            let driven = drive(&mut kernel, data, cfg, workers);
            let result = AlgoResult::Wcc {
                labels: kernel.labels(),
            };
            (driven, result)
        }
    };

    let mut totals = RunTotals {
        iterations: driven.iterations.len() as u32,
        wall_seconds: driven.wall_seconds,
        ..RunTotals::default()
    };
    for m in &driven.iterations {
        totals.edges_examined += m.edges_examined;
        totals.edges_streamed += m.edges_streamed;
        totals.loops.absorb(&m.loops);
    }
    totals.mteps = mteps(totals.edges_examined, totals.wall_seconds);

    let report = RunReport {
        schema: 1,
        algorithm: algo.name().to_string(),
        strategy: cfg.strategy.name().to_string(),
        dataset: cfg.dataset.clone(),
        vertex_count,
        edge_count: data.csr.edge_count() as u64,
        group_power: data.blocks.group_power,
        block_count: data.blocks.block_count() as u64,
        class_histogram: data.blocks.class_histogram(),
        params: ReportParams {
            alpha: cfg.dispatcher.alpha,
            beta: cfg.dispatcher.beta,
            gamma: cfg.dispatcher.gamma,
            hub_degree_threshold: cfg.dispatcher.hub_degree_threshold,
            literal_inequalities: cfg.dispatcher.literal_inequalities,
            workers,
            pipe_capacity: cfg.pipe_capacity,
            full_scan: cfg.full_scan,
            algorithm: algo.params_json(),
        },
        totals,
        mode_switches: driven.switches,
        iterations: driven.iterations,
        summary: result.summary_json(),
    };

    Ok(RunOutcome {
        report,
        result,
        pipe_events: driven.events,
    })
}

/// Per-run mode policy realizing a [`Strategy`].
enum ModePolicy {
    Fixed(ExecMode),
    Dispatcher(DispatcherState),
    Hybrid {
        dense_exec: ExecMode,
        params: DispatcherParams,
        dense: bool,
    },
}

impl ModePolicy {
    fn new(strategy: Strategy, initial: InitialFrontier, params: DispatcherParams) -> ModePolicy {
        let starts_dense = matches!(initial, InitialFrontier::AllVertices);
        match strategy {
            Strategy::Vc => ModePolicy::Fixed(ExecMode::Push),
            Strategy::Eb => ModePolicy::Fixed(ExecMode::BlockPull),
            Strategy::Ec => ModePolicy::Fixed(ExecMode::Stream),
            Strategy::Dm => ModePolicy::Dispatcher(DispatcherState::new(
                params,
                DispatcherState::initial_mode(initial),
            )),
            Strategy::Vch => ModePolicy::Hybrid {
                dense_exec: ExecMode::VertexPull,
                params,
                dense: starts_dense,
            },
            Strategy::Ech => ModePolicy::Hybrid {
                dense_exec: ExecMode::Stream,
                params,
                dense: starts_dense,
            },
        }
    }

    fn exec_mode(&self) -> ExecMode {
        match self {
            ModePolicy::Fixed(mode) => *mode,
            ModePolicy::Dispatcher(state) => match state.mode {
                Mode::LowParallel => ExecMode::Push,
                Mode::HighParallel => ExecMode::BlockPull,
            },
            ModePolicy::Hybrid {
                dense_exec, dense, ..
            } => {
                if *dense {
                    *dense_exec
                } else {
                    ExecMode::Push
                }
            }
        }
    }

    /// Fold barrier counters and advance the mode for the next iteration.
    fn transition(&mut self, c: &IterationCounters, after_iteration: u32) -> Option<ModeSwitch> {
        let from = self.exec_mode().parallel_mode();
        let reason = match self {
            ModePolicy::Fixed(_) => None,
            ModePolicy::Dispatcher(state) => state.barrier_transition(c),
            ModePolicy::Hybrid { params, dense, .. } => {
                let ni = c.vertex_count.saturating_sub(c.active_vertices);
                let want_dense =
                    vertex_activity_high(params, c.active_vertices, ni, c.hub_activated);
                if want_dense == *dense {
                    None
                } else {
                    *dense = want_dense;
                    Some(if want_dense && c.hub_activated {
                        ModeSwitchReason::HubActivation
                    } else {
                        ModeSwitchReason::ActiveRatio
                    })
                }
            }
        }?;
        Some(ModeSwitch {
            after_iteration,
            from,
            to: self.exec_mode().parallel_mode(),
            reason,
        })
    }
}

struct DriveOutput {
    iterations: Vec<IterationMetrics>,
    switches: Vec<ModeSwitch>,
    events: Vec<(u32, PipeEvent)>,
    wall_seconds: f64,
}

/// Blocks holding at least one edge whose source changed, minus dead blocks.
fn activate_blocks(
    csr: &CsrGraph,
    changed: &Bitmap,
    index: &EdgeBlockIndex,
    dead: &Bitmap,
) -> Bitmap {
    let mut active = Bitmap::new(index.block_count());
    for src in changed.iter_ones() {
        for &dst in csr.neighbors(src) {
            let b = index.block_of(dst);
            if !dead.test(b) {
                active.set(b);
            }
        }
    }
    active
}

/// Destinations with at least one in-edge from a changed vertex.
fn activate_vertices(csr: &CsrGraph, changed: &Bitmap, vertex_count: u32) -> Bitmap {
    let mut active = Bitmap::new(vertex_count as usize);
    for src in changed.iter_ones() {
        for &dst in csr.neighbors(src) {
            active.set(dst);
        }
    }
    active
}

fn class_histogram_of(blocks: &Bitmap, index: &EdgeBlockIndex) -> [u64; 3] {
    let mut hist = [0u64; 3];
    for b in blocks.iter_ones() {
        hist[index.class_of(b).index()] += 1;
    }
    hist
}

fn count_small_middle(blocks: &Bitmap, index: &EdgeBlockIndex) -> u64 {
    blocks
        .iter_ones()
        .filter(|&b| index.class_of(b) != SizeClass::Large)
        .count() as u64
}

#[derive(Default)]
struct EngineTally {
    edges_examined: u64,
    edges_streamed: u64,
    loops: LoopCounts,
    active_blocks: [u64; 3],
}

/// The iteration loop shared by every algorithm and strategy.
fn drive<K: GasKernel>(
    kernel: &mut K,
    data: &GraphData,
    cfg: &RunConfig,
    workers: usize,
) -> DriveOutput {
    let run_start = Instant::now();
    let vertex_count = data.csr.vertex_count;
    let block_count = data.blocks.block_count();
    let pull_cfg = PullConfig {
        pipe_capacity: cfg.pipe_capacity.max(1),
        trace: cfg.collect_trace,
    };
    let mut policy = ModePolicy::new(cfg.strategy, kernel.initial_frontier(), cfg.dispatcher);

    // Large blocks currently flagged idle (no changes last time processed),
    // and blocks proven dead (no open destination left).
    let mut idle_flags = Bitmap::new(block_count);
    let mut large_idle = 0u64;
    let mut dead_blocks = Bitmap::new(block_count);
    // Logical activation scanned at the previous barrier, reusable by the
    // next block-pull iteration.
    let mut cached_blocks: Option<Bitmap> = None;
    let nonempty_blocks = {
        let mut bm = Bitmap::new(block_count);
        for b in 0..block_count as u32 {
            if data.blocks.edge_count_of(b) > 0 {
                bm.set(b);
            }
        }
        bm
    };

    let mut iterations: Vec<IterationMetrics> = Vec::new();
    let mut switches: Vec<ModeSwitch> = Vec::new();
    let mut events: Vec<(u32, PipeEvent)> = Vec::new();

    let mut iteration = 0u32;
    loop {
        let exec = policy.exec_mode();
        let ctx = IterCtx { iteration };
        let frontier_size = kernel.changed().popcount() as u64;

        // Work sets derive from the changed set before begin_iteration
        // rotates it into the kernel's frontier.
        let push_active: Option<ActiveList> = match exec {
            ExecMode::Push => Some(if cfg.full_scan {
                ActiveList {
                    ids: (0..vertex_count).collect(),
                }
            } else {
                kernel.changed().to_active_list()
            }),
            _ => None,
        };
        let logical_blocks: Option<Bitmap> = match exec {
            ExecMode::BlockPull => Some(cached_blocks.take().unwrap_or_else(|| {
                activate_blocks(&data.csr, kernel.changed(), &data.blocks, &dead_blocks)
            })),
            _ => None,
        };
        let vertex_candidates: Option<Bitmap> = match exec {
            ExecMode::VertexPull => Some(if K::DENSE_PULL || cfg.full_scan {
                let mut bm = Bitmap::new(vertex_count as usize);
                bm.set_all();
                bm
            } else {
                activate_vertices(&data.csr, kernel.changed(), vertex_count)
            }),
            _ => None,
        };

        kernel.begin_iteration(&ctx);
        let timer = Instant::now();
        let mut tally = EngineTally::default();
        match exec {
            ExecMode::Push => {
                let active = push_active.as_ref().expect("push work set");
                let out = push_iteration(&data.csr, active, kernel, workers);
                tally.edges_examined = out.edges_examined;
                tally.loops.push_groups = out.group_loops;
            }
            ExecMode::BlockPull => {
                let logical = logical_blocks.as_ref().expect("block work set");
                tally.active_blocks = class_histogram_of(logical, &data.blocks);
                let dispatch: &Bitmap = if K::DENSE_PULL || cfg.full_scan {
                    &nonempty_blocks
                } else {
                    logical
                };
                let out = pull_iteration(&data.blocks, dispatch, kernel, &pull_cfg);
                tally.edges_examined = out.edges_examined;
                tally.edges_streamed = out.edges_streamed;
                tally.loops.small = out.class_loops[SizeClass::Small.index()];
                tally.loops.middle = out.class_loops[SizeClass::Middle.index()];
                tally.loops.large = out.class_loops[SizeClass::Large.index()];
                // Flag and dead bookkeeping follows logical activation, so
                // full scans cannot advance it faster; dense-pull kernels
                // legitimately process every block in every variant.
                for r in &out.block_results {
                    if !(K::DENSE_PULL || logical.test(r.block)) {
                        continue;
                    }
                    if !r.any_open {
                        dead_blocks.set(r.block);
                    }
                    if r.class == SizeClass::Large {
                        let was = idle_flags.test(r.block);
                        let now = r.changes == 0;
                        if now && !was {
                            idle_flags.set(r.block);
                            large_idle += 1;
                        } else if !now && was {
                            idle_flags.clear(r.block);
                            large_idle -= 1;
                        }
                    }
                }
                if cfg.collect_trace {
                    events.extend(out.events.into_iter().map(|e| (iteration, e)));
                }
            }
            ExecMode::VertexPull => {
                let candidates = vertex_candidates.as_ref().expect("pull work set");
                let out = vertex_pull_iteration(&data.csc, kernel, candidates);
                tally.edges_examined = out.edges_examined;
            }
            ExecMode::Stream => {
                let out = stream_iteration(&data.csr, kernel);
                tally.edges_examined = out.edges_examined;
                tally.edges_streamed = out.edges_examined;
            }
        }
        let wall = timer.elapsed().as_secs_f64();
        let outcome = kernel.end_iteration(&ctx);

        // Barrier: counters describe the frontier the next iteration would
        // process, and they drive the mode decision taken now.
        let hub = hub_activated(
            &data.csr,
            kernel.changed(),
            cfg.dispatcher.hub_degree_threshold,
        );
        let next_blocks: Option<Bitmap> = if exec == ExecMode::BlockPull && !outcome.terminated {
            Some(activate_blocks(
                &data.csr,
                kernel.changed(),
                &data.blocks,
                &dead_blocks,
            ))
        } else {
            None
        };
        let counters = IterationCounters {
            active_vertices: outcome.newly_changed,
            vertex_count: u64::from(vertex_count),
            active_small_middle_blocks: next_blocks
                .as_ref()
                .map(|bm| count_small_middle(bm, &data.blocks))
                .unwrap_or(0),
            total_small_middle_blocks: data.blocks.small_middle_total(),
            large_inactive_flags: large_idle,
            total_large_blocks: data.blocks.large_total(),
            hub_activated: hub,
        };

        iterations.push(IterationMetrics {
            iteration,
            mode: exec,
            active_vertices: frontier_size,
            active_blocks: tally.active_blocks,
            edges_examined: tally.edges_examined,
            edges_streamed: tally.edges_streamed,
            loops: tally.loops,
            newly_activated: outcome.newly_changed,
            hub_activated: hub,
            ratios: counters_snapshot(&counters),
            wall_seconds: wall,
        });

        if outcome.terminated {
            break;
        }
        if let Some(switch) = policy.transition(&counters, iteration) {
            switches.push(switch);
        }
        cached_blocks = next_blocks;
        if policy.exec_mode() != ExecMode::BlockPull {
            cached_blocks = None;
        }
        iteration += 1;
    }

    DriveOutput {
        iterations,
        switches,
        events,
        wall_seconds: run_start.elapsed().as_secs_f64(),
    }
}

/// One leg of a [`compare`] sweep.
#[derive(Debug, Clone, Copy)]
pub struct CompareSpec {
    pub strategy: Strategy,
    /// Override the base config's group power; `None` keeps it.
    pub group_power: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub label: String,
    pub strategy: String,
    pub group_power: u32,
    pub iterations: u32,
    pub edges_examined: u64,
    pub edges_streamed: u64,
    pub loop_total: u64,
    pub mode_switches: usize,
    pub wall_seconds: f64,
    pub mteps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareOutcome {
    pub rows: Vec<CompareRow>,
    /// Whether every leg produced an equivalent result.
    pub results_match: bool,
}

/// Run the same algorithm under several strategies/partitionings and tabulate
/// the work counters. Graph representations are cached per resolved group
/// power.
pub fn compare(
    raw: &RawEdgeList,
    algo: &AlgoKind,
    base: &RunConfig,
    specs: &[CompareSpec],
    pr_tolerance: f64,
) -> Result<CompareOutcome, HarnessError> {
    let mut datasets: BTreeMap<u32, GraphData> = BTreeMap::new();
    let mut rows = Vec::with_capacity(specs.len());
    let mut results: Vec<AlgoResult> = Vec::with_capacity(specs.len());
    for spec in specs {
        let mut cfg = base.clone();
        cfg.strategy = spec.strategy;
        if let Some(p) = spec.group_power {
            cfg.blocks.group_power = Some(p);
        }
        let power = cfg.blocks.resolve_group_power(raw.edge_count() as u64);
        cfg.blocks.group_power = Some(power);
        let data = datasets
            .entry(power)
            .or_insert_with(|| GraphData::build(raw.clone(), &cfg.blocks));
        let out = run(data, algo, &cfg)?;
        rows.push(CompareRow {
            label: if spec.group_power.is_some() {
                format!("{}(n={power})", spec.strategy.name())
            } else {
                spec.strategy.name().to_string()
            },
            strategy: spec.strategy.name().to_string(),
            group_power: power,
            iterations: out.report.totals.iterations,
            edges_examined: out.report.totals.edges_examined,
            edges_streamed: out.report.totals.edges_streamed,
            loop_total: out.report.totals.loops.total(),
            mode_switches: out.report.mode_switches.len(),
            wall_seconds: out.report.totals.wall_seconds,
            mteps: out.report.totals.mteps,
        });
        results.push(out.result);
    }
    let results_match = results
        .windows(2)
        .all(|w| w[0].approx_equals(&w[1], pr_tolerance));
    Ok(CompareOutcome {
        rows,
        results_match,
    })
}

/// One row of the block partition report.
#[derive(Debug, Clone, Serialize)]
pub struct BlockReportRow {
    pub block: u32,
    pub dest_lo: VertexId,
    pub dest_hi: VertexId,
    pub edge_count: u64,
    pub class: SizeClass,
}

pub fn block_report(index: &EdgeBlockIndex) -> Vec<BlockReportRow> {
    (0..index.block_count() as u32)
        .map(|b| {
            let (dest_lo, dest_hi) = index.dest_range(b);
            BlockReportRow {
                block: b,
                dest_lo,
                dest_hi,
                edge_count: index.edge_count_of(b),
                class: index.class_of(b),
            }
        })
        .collect()
}

/// CSV form of [`block_report`], header included even when empty.
pub fn block_report_csv(index: &EdgeBlockIndex) -> String {
    let mut out = String::from("block,dest_lo,dest_hi,edge_count,class\n");
    for row in block_report(index) {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.block,
            row.dest_lo,
            row.dest_hi,
            row.edge_count,
            row.class.name()
        ));
    }
    out
}
