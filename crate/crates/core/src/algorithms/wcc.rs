//! Weakly connected components via synchronous label propagation.
//!
//! Every vertex starts labeled with its own id; each iteration every changed
//! vertex offers its label along out-edges and destinations keep the minimum.
//! Labels are double-buffered: gathers and scatters read the labels produced
//! by the previous iteration, updates land in the next buffer, so results do
//! not depend on edge order or thread schedule. Run on a symmetrized graph
//! this converges to per-component minima (connectivity of the undirected
//! support); the kernel itself just performs the propagation it is handed.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::frontier::Bitmap;
use crate::gas::{GasKernel, InitialFrontier, IterCtx, IterationOutcome};
use crate::VertexId;

pub struct WccKernel {
    /// Labels after the last completed iteration.
    labels: Vec<AtomicU32>,
    /// Labels being produced this iteration (copied from `labels` at the
    /// start, lowered by `fetch_min`).
    next: Vec<AtomicU32>,
    frontier: Bitmap,
    changed: Bitmap,
}

impl WccKernel {
    pub fn new(vertex_count: u32) -> Self {
        let labels: Vec<_> = (0..vertex_count).map(AtomicU32::new).collect();
        let next = (0..vertex_count).map(AtomicU32::new).collect();
        let mut changed = Bitmap::new(vertex_count as usize);
        changed.set_all();
        WccKernel {
            labels,
            next,
            frontier: Bitmap::new(vertex_count as usize),
            changed,
        }
    }

    fn offer(&self, dst: VertexId, label: u32) -> bool {
        // Deciding against the stable `labels` buffer (not `next`) keeps the
        // changed set identical for any arrival order: dst changes iff some
        // in-label beats its previous-iteration label.
        if label < self.labels[dst as usize].load(Ordering::Relaxed) {
            self.next[dst as usize].fetch_min(label, Ordering::Relaxed);
            self.changed.shared_set(dst);
            true
        } else {
            false
        }
    }

    pub fn labels(&self) -> Vec<u32> {
        self.labels
            .iter()
            .map(|l| l.load(Ordering::Relaxed))
            .collect()
    }
}

impl GasKernel for WccKernel {
    type Acc = u32;

    fn initial_frontier(&self) -> InitialFrontier {
        InitialFrontier::AllVertices
    }

    fn begin_iteration(&mut self, _ctx: &IterCtx) {
        std::mem::swap(&mut self.frontier, &mut self.changed);
        self.changed.clear_all();
        for (next, cur) in self.next.iter_mut().zip(&self.labels) {
            *next.get_mut() = cur.load(Ordering::Relaxed);
        }
    }

    fn dst_open(&self, _dst: VertexId) -> bool {
        true
    }

    fn acc_init(&self) -> u32 {
        u32::MAX
    }

    fn acc_saturated(&self, acc: &u32) -> bool {
        // Label 0 is the global minimum; nothing can lower the fold further.
        *acc == 0
    }

    fn gather(&self, src: VertexId, _dst: VertexId, acc: u32) -> u32 {
        acc.min(self.labels[src as usize].load(Ordering::Relaxed))
    }

    fn apply(&self, dst: VertexId, acc: u32) -> bool {
        self.offer(dst, acc)
    }

    fn scatter(&self, src: VertexId, dst: VertexId) -> bool {
        let label = self.labels[src as usize].load(Ordering::Relaxed);
        self.offer(dst, label)
    }

    fn source_active(&self, src: VertexId) -> bool {
        self.frontier.test(src)
    }

    fn end_iteration(&mut self, _ctx: &IterCtx) -> IterationOutcome {
        std::mem::swap(&mut self.labels, &mut self.next);
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
