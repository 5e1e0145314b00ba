//! Dual-mode graph analytics engine.
//!
//! The crate processes a graph through two cooperating execution modules and a
//! runtime dispatcher that moves an algorithm between them at iteration
//! barriers:
//!
//! * **Low-parallelism module** ([`push_engine`]): vertex-centric push over the
//!   out-edge CSR. Work is grouped in 16-edge chunks per active vertex, which
//!   suits sparse frontiers.
//! * **High-parallelism module** ([`pull_engine`]): edge-centric pull over an
//!   edge-block store bucketed by destination range. Blocks are classified by
//!   edge count into Small / Middle / Large workloads, dispatched through
//!   bounded FIFO pipes into three class pipelines with logical lane widths
//!   8 / 64 / 256.
//! * **Dispatcher** ([`dispatcher`]): switches modes from per-iteration
//!   counters (active/inactive vertices, active small+middle blocks, large
//!   block inactivity flags) plus a hub-activation trigger.
//!
//! Three algorithms are expressed against a shared gather/apply/scatter kernel
//! contract ([`gas`]): BFS, PageRank, and weakly connected components. The
//! [`harness`] module runs them under six execution strategies (pure push,
//! vertex-centric hybrid, pure edge streaming, non-blocked hybrid, pure
//! edge-block, and the full dual-module system) and records comparable
//! per-iteration metrics.

pub mod algorithms;
pub mod baselines;
pub mod dispatcher;
pub mod edge_block;
pub mod frontier;
pub mod gas;
pub mod graph_io;
pub mod harness;
pub mod metrics;
pub mod pull_engine;
pub mod push_engine;
pub mod synth;

pub use dispatcher::{DispatcherParams, DispatcherState, Mode, SwitchDecision};
pub use edge_block::{choose_group_power, EdgeBlockConfig, EdgeBlockIndex, SizeClass};
pub use frontier::{ActiveList, Bitmap};
pub use gas::{GasKernel, InitialFrontier, IterCtx};
pub use graph_io::{build_csr, parse_edge_list, CsrGraph, GraphError, RawEdgeList};
pub use harness::{compare, run, AlgoKind, AlgoResult, GraphData, RunConfig, Strategy};
pub use metrics::{IterationMetrics, LoopCounts, RunReport};

/// Dense 0-based vertex identifier.
pub type VertexId = u32;
