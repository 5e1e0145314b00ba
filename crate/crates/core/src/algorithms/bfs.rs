//! Breadth-first search kernel.
//!
//! Level-synchronous BFS: iteration `i` discovers exactly the vertices at
//! depth `i + 1`, whichever engine runs it. Depths are stored as `u8` with
//! [`UNREACHED`] marking undiscovered vertices; discoveries beyond depth
//! [`MAX_DEPTH`] are clamped and flagged so callers can surface a warning.

use std::sync::atomic::{AtomicBool, AtomicU8, Ordering};

use crate::frontier::Bitmap;
use crate::gas::{GasKernel, InitialFrontier, IterCtx, IterationOutcome};
use crate::VertexId;

/// Depth value for vertices never discovered.
pub const UNREACHED: u8 = u8::MAX;
/// Largest representable depth; deeper discoveries clamp here.
pub const MAX_DEPTH: u8 = u8::MAX - 1;

pub struct BfsKernel {
    source: VertexId,
    depth: Vec<AtomicU8>,
    visited: Bitmap,
    frontier: Bitmap,
    changed: Bitmap,
    /// Depth assigned to vertices discovered this iteration.
    discover_depth: u8,
    /// True when `discover_depth` had to clamp at [`MAX_DEPTH`].
    discover_clamped: bool,
    clamped: AtomicBool,
}

impl BfsKernel {
    pub fn new(vertex_count: u32, source: VertexId) -> Self {
        assert!(source < vertex_count, "source out of range");
        let depth = (0..vertex_count)
            .map(|v| AtomicU8::new(if v == source { 0 } else { UNREACHED }))
            .collect();
        let mut visited = Bitmap::new(vertex_count as usize);
        visited.set(source);
        let mut changed = Bitmap::new(vertex_count as usize);
        changed.set(source);
        BfsKernel {
            source,
            depth,
            visited,
            frontier: Bitmap::new(vertex_count as usize),
            changed,
            discover_depth: 1,
            discover_clamped: false,
            clamped: AtomicBool::new(false),
        }
    }

    /// Claim `dst` for this iteration's level. The visited bit is the atomic
    /// claim, so exactly one racer wins and the stored depth is the same no
    /// matter who wins or in which order scatters run.
    fn try_visit(&self, dst: VertexId) -> bool {
        if self.visited.shared_set(dst) {
            self.depth[dst as usize].store(self.discover_depth, Ordering::Relaxed);
            if self.discover_clamped {
                self.clamped.store(true, Ordering::Relaxed);
            }
            self.changed.shared_set(dst);
            true
        } else {
            false
        }
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn depths(&self) -> Vec<u8> {
        self.depth
            .iter()
            .map(|d| d.load(Ordering::Relaxed))
            .collect()
    }

    /// True when some discovery clamped at [`MAX_DEPTH`], i.e. reported
    /// depths past that point are lower bounds.
    pub fn depth_clamped(&self) -> bool {
        self.clamped.load(Ordering::Relaxed)
    }
}

impl GasKernel for BfsKernel {
    type Acc = bool;

    fn initial_frontier(&self) -> InitialFrontier {
        InitialFrontier::SingleSource(self.source)
    }

    fn begin_iteration(&mut self, ctx: &IterCtx) {
        std::mem::swap(&mut self.frontier, &mut self.changed);
        self.changed.clear_all();
        let level = u64::from(ctx.iteration) + 1;
        self.discover_clamped = level > u64::from(MAX_DEPTH);
        self.discover_depth = if self.discover_clamped {
            MAX_DEPTH
        } else {
            level as u8
        };
    }

    fn dst_open(&self, dst: VertexId) -> bool {
        !self.visited.test(dst)
    }

    fn acc_init(&self) -> bool {
        false
    }

    fn acc_saturated(&self, acc: &bool) -> bool {
        *acc
    }

    fn gather(&self, src: VertexId, _dst: VertexId, acc: bool) -> bool {
        acc || self.frontier.test(src)
    }

    fn apply(&self, dst: VertexId, acc: bool) -> bool {
        if acc {
            self.try_visit(dst)
        } else {
            false
        }
    }

    fn scatter(&self, _src: VertexId, dst: VertexId) -> bool {
        self.try_visit(dst)
    }

    fn source_active(&self, src: VertexId) -> bool {
        self.frontier.test(src)
    }

    fn end_iteration(&mut self, _ctx: &IterCtx) -> IterationOutcome {
        self.visited.reconcile();
        let newly = self.changed.reconcile() as u64;
        IterationOutcome {
            newly_changed: newly,
            terminated: newly == 0,
        }
    }

    fn changed(&self) -> &Bitmap {
        &self.changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Drive the kernel by hand the way the push engine would on the path
    /// graph 0 -> 1 -> 2.
    #[test]
    fn push_discovers_path_level_by_level() {
        let mut k = BfsKernel::new(3, 0);
        assert_eq!(k.initial_frontier(), InitialFrontier::SingleSource(0));

        k.begin_iteration(&IterCtx { iteration: 0 });
        assert!(k.source_active(0));
        assert!(!k.source_active(1));
        assert!(k.scatter(0, 1), "first visit changes state");
        let out = k.end_iteration(&IterCtx { iteration: 0 });
        assert_eq!(out.newly_changed, 1);
        assert!(!out.terminated);

        k.begin_iteration(&IterCtx { iteration: 1 });
        assert!(k.source_active(1));
        assert!(k.scatter(1, 2));
        assert!(!k.scatter(1, 2), "second claim is a no-op");
        k.end_iteration(&IterCtx { iteration: 1 });

        // Frontier {2} has no out-edges; the empty iteration terminates.
        k.begin_iteration(&IterCtx { iteration: 2 });
        let out = k.end_iteration(&IterCtx { iteration: 2 });
        assert!(out.terminated);

        assert_eq!(k.depths(), vec![0, 1, 2]);
        assert!(!k.depth_clamped());
    }

    /// Same discovery through the pull-side hooks.
    #[test]
    fn pull_hooks_agree_with_push() {
        let mut k = BfsKernel::new(3, 0);
        k.begin_iteration(&IterCtx { iteration: 0 });
        assert!(k.dst_open(1));
        let mut acc = k.acc_init();
        assert!(!k.acc_saturated(&acc));
        acc = k.gather(0, 1, acc);
        assert!(k.acc_saturated(&acc), "a frontier in-edge saturates the or");
        assert!(k.apply(1, acc));
        assert!(!k.apply(2, false), "false accumulator is a no-op");
        k.end_iteration(&IterCtx { iteration: 0 });
        assert_eq!(k.depths(), vec![0, 1, UNREACHED]);
        assert!(!k.dst_open(1), "visited destinations close");
    }

    #[test]
    fn discoveries_past_max_depth_clamp_and_flag() {
        let mut k = BfsKernel::new(4, 0);
        k.begin_iteration(&IterCtx { iteration: 253 });
        k.scatter(0, 1);
        assert!(!k.depth_clamped(), "depth 254 still fits");
        k.begin_iteration(&IterCtx { iteration: 254 });
        k.scatter(1, 2);
        assert!(k.depth_clamped());
        assert_eq!(k.depths()[1], MAX_DEPTH);
        assert_eq!(k.depths()[2], MAX_DEPTH);
    }
}
