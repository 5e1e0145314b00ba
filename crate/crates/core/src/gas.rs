//! Kernel contract shared by the push and pull execution engines.
//!
//! Algorithms implement [`GasKernel`] and own all per-vertex state: value
//! arrays, the frontier bitmap (vertices whose state changed last iteration)
//! and the changed bitmap being accumulated this iteration. The engines are
//! generic over the kernel and only see the small vocabulary below:
//!
//! * push (vertex-centric): `scatter(src, dst)` per out-edge of each active
//!   source vertex;
//! * pull (edge-centric): `gather` folds edge contributions into a
//!   per-destination accumulator, `apply` commits it;
//! * `dst_open` / `acc_saturated` let the pull side skip work that cannot
//!   change state (e.g. already-visited destinations, short-circuited ors);
//! * `source_active` is the "does this vertex carry a message" gate used by
//!   edge-stream executors and full-scan reference runs.
//!
//! The engines call `begin_iteration` and `end_iteration` on the single
//! coordinating thread at iteration barriers; everything between may run on
//! multiple threads, so the per-edge hooks take `&self` and kernels use
//! atomics internally. Apply/scatter for a given destination are never run
//! concurrently from two threads for the same destination by the pull engine
//! (block destination ranges are disjoint); push scatters may race and must
//! be commutative unless [`GasKernel::ORDERED_PUSH`] is set, in which case
//! the push engine runs sequentially in canonical edge order (ascending
//! source, CSR edge order within a source).

use crate::frontier::Bitmap;
use crate::VertexId;

/// Where the first iteration's work comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialFrontier {
    /// A single root vertex (traversal-style workloads).
    SingleSource(VertexId),
    /// Every vertex carries an initial message (fixpoint-style workloads).
    AllVertices,
}

/// Per-iteration context handed to the barrier hooks.
#[derive(Debug, Clone, Copy)]
pub struct IterCtx {
    /// 0-based iteration number.
    pub iteration: u32,
}

/// What the kernel reports at the end of an iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterationOutcome {
    /// Vertices whose state changed this iteration.
    pub newly_changed: u64,
    /// True when the algorithm has reached its fixpoint (or iteration cap)
    /// and the harness should stop.
    pub terminated: bool,
}

/// Vertex-program contract executed by the engines. See the module docs for
/// the threading rules each hook must respect.
pub trait GasKernel: Sync {
    /// Per-destination accumulator folded by the pull engine.
    type Acc: Copy + Send;

    /// When true, scatters do not commute (e.g. floating-point sums) and the
    /// push engine must run sequentially in canonical edge order.
    const ORDERED_PUSH: bool = false;

    /// When true, pull iterations dispatch every non-empty block instead of
    /// only activated ones (dense fixpoint sweeps that recompute every
    /// destination each round). Activation is still tracked for scheduling
    /// decisions and metrics; only dispatch widens.
    const DENSE_PULL: bool = false;

    fn initial_frontier(&self) -> InitialFrontier;

    /// Barrier hook: rotate the changed set into the frontier and do any
    /// iteration prep. Runs on the coordinating thread only.
    fn begin_iteration(&mut self, ctx: &IterCtx);

    /// Can `dst` still change state this iteration? Pull work for closed
    /// destinations is skipped without being counted.
    fn dst_open(&self, dst: VertexId) -> bool;

    fn acc_init(&self) -> Self::Acc;

    /// Once saturated, further gathers into this accumulator cannot change
    /// it and are skipped without being counted.
    fn acc_saturated(&self, _acc: &Self::Acc) -> bool {
        false
    }

    /// Fold the contribution of edge `src -> dst` into `acc` (pull side).
    fn gather(&self, src: VertexId, dst: VertexId, acc: Self::Acc) -> Self::Acc;

    /// Commit a folded accumulator to `dst`. Returns true when the vertex
    /// state changed (the kernel also records the change internally).
    fn apply(&self, dst: VertexId, acc: Self::Acc) -> bool;

    /// Process edge `src -> dst` for an active source (push side). Returns
    /// true when `dst`'s state changed.
    fn scatter(&self, src: VertexId, dst: VertexId) -> bool;

    /// Frontier membership: does `src` carry a message this iteration?
    fn source_active(&self, src: VertexId) -> bool;

    /// Barrier hook: finish deferred applies, reconcile bitmaps, decide
    /// termination. Runs on the coordinating thread only.
    fn end_iteration(&mut self, ctx: &IterCtx) -> IterationOutcome;

    /// Vertices whose state changed in the last completed iteration.
    /// Valid between `end_iteration` and the next `begin_iteration` (and
    /// right after construction, where it holds the initial frontier).
    fn changed(&self) -> &Bitmap;
}
