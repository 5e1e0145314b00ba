//! PageRank kernel with residual push and dense pull.
//!
//! Semantics are synchronous (Jacobi) power iteration with a dangling-mass
//! redistribution term: for damping d over n vertices,
//!
//! ```text
//! rank'[v] = (1 - d)/n + d * (sum_{u->v} rank[u]/outdeg(u) + DM/n)
//! DM       = sum over out-degree-0 vertices of rank[u]
//! ```
//!
//! Ranks are stored as `f32`, all arithmetic runs in `f64`. Three rank
//! buffers rotate at the barrier (`prev`, `cur`, `next`), and a persistent
//! `f64` accumulator per vertex caches the in-neighbor sum:
//!
//! * push iterations add the residual `(cur[u] - prev[u])/outdeg(u)` of each
//!   changed source into its targets' accumulators — float sums do not
//!   commute, so [`GasKernel::ORDERED_PUSH`] makes the engine run scatters
//!   sequentially in canonical edge order;
//! * pull iterations rebuild accumulators from scratch; the kernel requests
//!   [`GasKernel::DENSE_PULL`] so every destination is rebuilt each pull
//!   round, which keeps runs bit-for-bit reproducible regardless of which
//!   blocks a scheduler would have skipped;
//! * at the barrier, every vertex whose accumulator moved — or every vertex,
//!   when the dangling mass changed — gets its rank recomputed from the
//!   cached accumulator.
//!
//! A vertex is *changed* when its stored `f32` rank differs bit-for-bit from
//! the previous iteration; that drives frontiers and termination, so
//! filtered execution computes exactly what a dense sweep would. The
//! epsilon test (`|delta| < epsilon`) feeds a separate converged set used
//! only for termination and reporting.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use crate::frontier::Bitmap;
use crate::gas::{GasKernel, InitialFrontier, IterCtx, IterationOutcome};
use crate::graph_io::CsrGraph;
use crate::VertexId;

pub struct PageRankKernel {
    damping: f64,
    epsilon: f64,
    max_iters: u32,
    n: usize,
    /// Ranks two iterations back (f32 bits); push residuals read this.
    prev: Vec<AtomicU32>,
    /// Ranks after the last completed iteration (f32 bits).
    cur: Vec<AtomicU32>,
    /// Ranks being produced this iteration (f32 bits).
    next: Vec<AtomicU32>,
    /// Cached in-neighbor sums (f64 bits), maintained across iterations.
    acc: Vec<AtomicU64>,
    out_degree: Vec<u32>,
    /// Out-degree-0 vertices, ascending.
    dangling: Vec<VertexId>,
    /// Dangling mass of the iteration in flight.
    dangling_mass: f64,
    last_dangling_bits: Option<u64>,
    dangling_changed: bool,
    /// Destinations committed by pull applies this iteration.
    applied: Bitmap,
    /// Destinations whose accumulator was nudged by push this iteration.
    touched: Bitmap,
    frontier: Bitmap,
    changed: Bitmap,
    /// Vertices whose last recompute moved less than epsilon.
    converged: Bitmap,
    iterations_run: u32,
    hit_fixpoint: bool,
}

impl PageRankKernel {
    pub fn new(csr: &CsrGraph, damping: f64, epsilon: f64, max_iters: u32) -> Self {
        assert!((0.0..1.0).contains(&damping), "damping must be in [0, 1)");
        assert!(epsilon >= 0.0, "epsilon must be non-negative");
        let n = csr.vertex_count as usize;
        let init = if n == 0 { 0.0f32 } else { 1.0f32 / n as f32 };
        let out_degree: Vec<u32> = (0..csr.vertex_count).map(|v| csr.out_degree(v)).collect();
        let dangling = (0..csr.vertex_count)
            .filter(|&v| out_degree[v as usize] == 0)
            .collect();
        let mut changed = Bitmap::new(n);
        changed.set_all();
        PageRankKernel {
            damping,
            epsilon,
            max_iters: max_iters.max(1),
            n,
            prev: (0..n).map(|_| AtomicU32::new(0.0f32.to_bits())).collect(),
            cur: (0..n).map(|_| AtomicU32::new(init.to_bits())).collect(),
            next: (0..n).map(|_| AtomicU32::new(0)).collect(),
            acc: (0..n).map(|_| AtomicU64::new(0.0f64.to_bits())).collect(),
            out_degree,
            dangling,
            dangling_mass: 0.0,
            last_dangling_bits: None,
            dangling_changed: false,
            applied: Bitmap::new(n),
            touched: Bitmap::new(n),
            frontier: Bitmap::new(n),
            changed,
            converged: Bitmap::new(n),
            iterations_run: 0,
            hit_fixpoint: false,
        }
    }

    fn rank_of(buf: &[AtomicU32], v: VertexId) -> f32 {
        f32::from_bits(buf[v as usize].load(Ordering::Relaxed))
    }

    /// Recompute `dst`'s rank from a fold value, updating the changed and
    /// converged sets. Safe from multiple threads as long as no two racers
    /// target the same destination (the engines guarantee that).
    fn commit(&self, dst: VertexId, acc: f64) -> bool {
        let n = self.n as f64;
        let new64 = (1.0 - self.damping) / n + self.damping * (acc + self.dangling_mass / n);
        let new = new64 as f32;
        let old = Self::rank_of(&self.cur, dst);
        if (f64::from(new) - f64::from(old)).abs() < self.epsilon {
            self.converged.shared_set(dst);
        } else {
            self.converged.shared_clear(dst);
        }
        self.next[dst as usize].store(new.to_bits(), Ordering::Relaxed);
        if new.to_bits() != old.to_bits() {
            self.changed.shared_set(dst);
            true
        } else {
            false
        }
    }

    pub fn ranks(&self) -> Vec<f32> {
        self.cur
            .iter()
            .map(|r| f32::from_bits(r.load(Ordering::Relaxed)))
            .collect()
    }

    /// Iterations completed so far.
    pub fn iterations(&self) -> u32 {
        self.iterations_run
    }

    /// True when the run ended because every vertex moved less than epsilon
    /// (or stopped changing at f32 precision), rather than hitting the cap.
    pub fn converged(&self) -> bool {
        self.hit_fixpoint
    }
}

impl GasKernel for PageRankKernel {
    type Acc = f64;

    const ORDERED_PUSH: bool = true;
    const DENSE_PULL: bool = true;

    fn initial_frontier(&self) -> InitialFrontier {
        InitialFrontier::AllVertices
    }

    fn begin_iteration(&mut self, _ctx: &IterCtx) {
        std::mem::swap(&mut self.frontier, &mut self.changed);
        self.changed.clear_all();
        self.applied.clear_all();
        self.touched.clear_all();
        for (next, cur) in self.next.iter_mut().zip(&self.cur) {
            *next.get_mut() = cur.load(Ordering::Relaxed);
        }
        self.dangling_mass = self
            .dangling
            .iter()
            .map(|&v| f64::from(Self::rank_of(&self.cur, v)))
            .sum();
        self.dangling_changed = self.last_dangling_bits != Some(self.dangling_mass.to_bits());
    }

    fn dst_open(&self, _dst: VertexId) -> bool {
        true
    }

    fn acc_init(&self) -> f64 {
        0.0
    }

    fn gather(&self, src: VertexId, _dst: VertexId, acc: f64) -> f64 {
        acc + f64::from(Self::rank_of(&self.cur, src)) / f64::from(self.out_degree[src as usize])
    }

    fn apply(&self, dst: VertexId, acc: f64) -> bool {
        self.acc[dst as usize].store(acc.to_bits(), Ordering::Relaxed);
        self.applied.shared_set(dst);
        self.commit(dst, acc)
    }

    fn scatter(&self, src: VertexId, dst: VertexId) -> bool {
        let residual =
            f64::from(Self::rank_of(&self.cur, src)) - f64::from(Self::rank_of(&self.prev, src));
        let delta = residual / f64::from(self.out_degree[src as usize]);
        let slot = &self.acc[dst as usize];
        // ORDERED_PUSH: the engine runs scatters on one thread, so the
        // load/store pair cannot race.
        let sum = f64::from_bits(slot.load(Ordering::Relaxed)) + delta;
        slot.store(sum.to_bits(), Ordering::Relaxed);
        self.touched.shared_set(dst);
        // Rank updates happen at the barrier; nothing changed yet.
        false
    }

    fn source_active(&self, src: VertexId) -> bool {
        self.frontier.test(src)
    }

    fn end_iteration(&mut self, ctx: &IterCtx) -> IterationOutcome {
        // Commit everything the engines did not already apply: vertices whose
        // accumulator was push-nudged, or all of them when the dangling mass
        // moved (the cached accumulators are still current for the rest).
        if self.dangling_changed {
            for v in 0..self.n as u32 {
                if !self.applied.test(v) {
                    let acc = f64::from_bits(self.acc[v as usize].load(Ordering::Relaxed));
                    self.commit(v, acc);
                }
            }
        } else {
            for v in self.touched.iter_ones() {
                if !self.applied.test(v) {
                    let acc = f64::from_bits(self.acc[v as usize].load(Ordering::Relaxed));
                    self.commit(v, acc);
                }
            }
        }
        self.last_dangling_bits = Some(self.dangling_mass.to_bits());
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        let newly = self.changed.reconcile() as u64;
        let all_converged = self.converged.reconcile() == self.n;
        self.iterations_run = ctx.iteration + 1;
        let fixpoint = newly == 0 || all_converged;
        self.hit_fixpoint = fixpoint;
        IterationOutcome {
            newly_changed: newly,
            terminated: fixpoint || self.iterations_run >= self.max_iters,
        }
    }

    fn changed(&self) -> &Bitmap {
        &self.changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_io::{build_csr, RawEdgeList};

    const D: f64 = 0.85;

    fn csr_of(vertex_count: u32, edges: &[(u32, u32)]) -> CsrGraph {
        let raw = RawEdgeList {
            edges: edges.to_vec(),
            weights: None,
            vertex_count,
            directed: true,
        };
        build_csr(&raw)
    }

    /// Reference iteration with the exact same arithmetic contract: f32
    /// storage, f64 math, fresh in-neighbor sums in ascending source order.
    fn dense_step(ranks: &[f32], csr: &CsrGraph, damping: f64) -> Vec<f32> {
        let n = ranks.len() as f64;
        let outdeg: Vec<usize> = (0..csr.vertex_count)
            .map(|v| csr.out_degree(v) as usize)
            .collect();
        let dm: f64 = (0..ranks.len())
            .filter(|&u| outdeg[u] == 0)
            .map(|u| f64::from(ranks[u]))
            .sum();
        let mut acc = vec![0.0f64; ranks.len()];
        for u in 0..csr.vertex_count {
            for &v in csr.neighbors(u) {
                acc[v as usize] += f64::from(ranks[u as usize]) / outdeg[u as usize] as f64;
            }
        }
        (0..ranks.len())
            .map(|v| ((1.0 - damping) / n + damping * (acc[v] + dm / n)) as f32)
            .collect()
    }

    /// Drive the kernel the way the sequential push engine would.
    fn push_iteration(k: &mut PageRankKernel, csr: &CsrGraph, iteration: u32) -> IterationOutcome {
        let ctx = IterCtx { iteration };
        k.begin_iteration(&ctx);
        for u in 0..csr.vertex_count {
            if k.source_active(u) {
                for &v in csr.neighbors(u) {
                    k.scatter(u, v);
                }
            }
        }
        k.end_iteration(&ctx)
    }

    /// Drive the kernel the way a dense pull sweep would.
    fn pull_iteration(k: &mut PageRankKernel, csc: &CsrGraph, iteration: u32) -> IterationOutcome {
        let ctx = IterCtx { iteration };
        k.begin_iteration(&ctx);
        for v in 0..csc.vertex_count {
            if csc.out_degree(v) > 0 {
                let mut acc = k.acc_init();
                for &u in csc.neighbors(v) {
                    acc = k.gather(u, v, acc);
                }
                k.apply(v, acc);
            }
        }
        k.end_iteration(&ctx)
    }

    #[test]
    fn first_iteration_matches_hand_computation() {
        // Star 0 -> {1, 2}; vertices 1 and 2 dangle.
        let csr = csr_of(3, &[(0, 1), (0, 2)]);
        let mut k = PageRankKernel::new(&csr, D, 0.0, 100);
        push_iteration(&mut k, &csr, 0);
        let r = k.ranks();
        let third = f64::from(1.0f32 / 3.0);
        let dm = third + third;
        let expect0 = ((1.0 - D) / 3.0 + D * (dm / 3.0)) as f32;
        let expect1 = ((1.0 - D) / 3.0 + D * (third / 2.0 + dm / 3.0)) as f32;
        assert_eq!(r[0], expect0);
        assert_eq!(r[1], expect1);
        assert_eq!(r[2], expect1);
        assert!((r.iter().map(|&x| f64::from(x)).sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn residual_push_tracks_dense_reference() {
        let csr = csr_of(
            6,
            &[
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (3, 0),
                (4, 0),
                (4, 5),
                (5, 4),
            ],
        );
        let mut k = PageRankKernel::new(&csr, D, 0.0, 100);
        let mut reference = k.ranks();
        for it in 0..12 {
            push_iteration(&mut k, &csr, it);
            reference = dense_step(&reference, &csr, D);
            for (a, b) in k.ranks().iter().zip(&reference) {
                assert!(
                    (f64::from(*a) - f64::from(*b)).abs() < 1e-12,
                    "iteration {it}: push {a} vs dense {b}"
                );
            }
        }
    }

    #[test]
    fn dense_pull_is_bit_identical_to_reference() {
        let raw = RawEdgeList {
            edges: vec![
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (3, 0),
                (4, 0),
                (4, 5),
                (5, 4),
            ],
            weights: None,
            vertex_count: 6,
            directed: true,
        };
        let csr = build_csr(&raw);
        let csc = crate::graph_io::build_csc(&raw);
        let mut k = PageRankKernel::new(&csr, D, 0.0, 100);
        let mut reference = k.ranks();
        for it in 0..12 {
            pull_iteration(&mut k, &csc, it);
            reference = dense_step(&reference, &csr, D);
            assert_eq!(
                k.ranks().iter().map(|r| r.to_bits()).collect::<Vec<_>>(),
                reference.iter().map(|r| r.to_bits()).collect::<Vec<_>>(),
                "iteration {it}"
            );
        }
    }

    #[test]
    fn dangling_mass_change_recomputes_unconnected_vertices() {
        // Vertex 3 dangles and has no in-edges: its rank must still move
        // whenever the dangling mass does.
        let csr = csr_of(4, &[(0, 1), (1, 2), (2, 0)]);
        let mut k = PageRankKernel::new(&csr, D, 0.0, 100);
        let r0 = k.ranks()[3];
        push_iteration(&mut k, &csr, 0);
        let r1 = k.ranks()[3];
        assert_ne!(r0.to_bits(), r1.to_bits(), "dangling mass moved, so must 3");
        push_iteration(&mut k, &csr, 1);
        // Accumulator of an in-degree-0 vertex never moves.
        assert_eq!(f64::from_bits(k.acc[3].load(Ordering::Relaxed)), 0.0);
    }

    #[test]
    fn epsilon_terminates_with_converged_flag() {
        let csr = csr_of(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]);
        let mut k = PageRankKernel::new(&csr, D, 1e-3, 500);
        for it in 0..500 {
            if push_iteration(&mut k, &csr, it).terminated {
                break;
            }
        }
        assert!(k.converged());
        assert!(k.iterations() < 500, "loose epsilon converges early");
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        // Asymmetric cycle: ranks keep moving well past three iterations.
        let csr = csr_of(3, &[(0, 1), (1, 0), (1, 2), (2, 0)]);
        let mut k = PageRankKernel::new(&csr, D, 0.0, 3);
        let mut last = None;
        for it in 0..10 {
            let out = push_iteration(&mut k, &csr, it);
            if out.terminated {
                last = Some(it);
                break;
            }
        }
        assert_eq!(last, Some(2), "cap of 3 stops after the third iteration");
        assert_eq!(k.iterations(), 3);
        assert!(!k.converged());
    }
}
