//! Edge-centric pull engine: a block dispatcher feeding three size-class
//! pipelines over bounded FIFO pipes.
//!
//! One pull iteration walks the active blocks in ascending id order and
//! hands each to the pipeline for its size class (Small / Middle / Large)
//! through a bounded channel, so dispatch and consumption overlap. Each
//! pipeline folds its block's edges into per-destination accumulators
//! ([`per_destination_reduce`] is the same fold, exposed for tests), then
//! commits destinations in ascending order. Block destination ranges are
//! disjoint, which is what makes concurrent pipelines safe and the final
//! state independent of scheduling.
//!
//! Per-edge filtering: edges whose destination is closed
//! ([`GasKernel::dst_open`]) or whose accumulator is already saturated
//! ([`GasKernel::acc_saturated`]) are skipped without being counted as
//! examined; `edges_streamed` separately counts every edge of every
//! dispatched block, the volume a streaming scan moves regardless of
//! filtering.
//!
//! Loop accounting: a block of `E` edges takes `ceil(E / lane_width)`
//! pipeline loops, with lane widths of [`CLASS_LANES`] edges for Small /
//! Middle / Large. Large blocks additionally stage their edge stream
//! through a 64-byte buffer ([`LARGE_STAGE_EDGES`] edges at a time),
//! preserving order.

use std::sync::atomic::{AtomicU64, Ordering};

use crossbeam_channel::{bounded, Receiver, Sender};
use serde::Serialize;

use crate::edge_block::{EdgeBlockIndex, SizeClass};
use crate::frontier::Bitmap;
use crate::gas::GasKernel;
use crate::VertexId;

/// Edges folded per pipeline loop, indexed by [`SizeClass::index`].
pub const CLASS_LANES: [u32; 3] = [8, 64, 256];

/// Edges staged per 64-byte buffer fill in the Large pipeline.
pub const LARGE_STAGE_EDGES: usize = 8;

/// Pipeline loops needed to fold a block of `edge_count` edges.
pub fn loop_count(class: SizeClass, edge_count: u64) -> u64 {
    edge_count.div_ceil(u64::from(CLASS_LANES[class.index()]))
}

#[derive(Debug, Clone, Copy)]
pub struct PullConfig {
    /// Bound of each dispatcher-to-pipeline pipe, in blocks.
    pub pipe_capacity: usize,
    /// Record a [`PipeEvent`] trace of dispatch and consumption.
    pub trace: bool,
}

impl Default for PullConfig {
    fn default() -> Self {
        PullConfig {
            pipe_capacity: 64,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipeEventKind {
    /// The dispatcher started offering the block on its class pipe.
    Emitted,
    /// A pipeline picked the block up.
    ConsumeStart,
}

/// One timestamped pipe event; `seq` is a global order over all pipes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PipeEvent {
    pub seq: u64,
    pub block: u32,
    pub class: SizeClass,
    pub kind: PipeEventKind,
}

/// Per-block outcome of one pull iteration.
#[derive(Debug, Clone, Copy)]
pub struct BlockResult {
    pub block: u32,
    pub class: SizeClass,
    /// Destinations whose state changed when applied.
    pub changes: u64,
    /// Whether any edge pointed at a still-open destination.
    pub any_open: bool,
}

#[derive(Debug, Default)]
pub struct PullOutcome {
    /// Edges actually folded (open destination, unsaturated accumulator).
    pub edges_examined: u64,
    /// Every edge of every dispatched block, before filtering.
    pub edges_streamed: u64,
    /// Pipeline loops per class, indexed by [`SizeClass::index`].
    pub class_loops: [u64; 3],
    /// Blocks dispatched per class, indexed by [`SizeClass::index`].
    pub blocks_dispatched: [u64; 3],
    /// Per-block results, ascending block id.
    pub block_results: Vec<BlockResult>,
    /// Pipe trace, ascending `seq`; empty unless tracing was requested.
    pub events: Vec<PipeEvent>,
}

enum PipeMsg {
    Block(u32),
    Halt,
}

/// Run one pull iteration over the active blocks.
pub fn pull_iteration<K: GasKernel>(
    index: &EdgeBlockIndex,
    active_blocks: &Bitmap,
    kernel: &K,
    cfg: &PullConfig,
) -> PullOutcome {
    let seq = AtomicU64::new(0);
    let mut pipes: Vec<(Sender<PipeMsg>, Option<Receiver<PipeMsg>>)> = (0..3)
        .map(|_| {
            let (tx, rx) = bounded(cfg.pipe_capacity.max(1));
            (tx, Some(rx))
        })
        .collect();

    std::thread::scope(|scope| {
        let handles: Vec<_> = SizeClass::ALL
            .iter()
            .map(|&class| {
                let rx = pipes[class.index()]
                    .1
                    .take()
                    .expect("one consumer per class");
                let seq = &seq;
                scope.spawn(move || consume_class(index, kernel, class, rx, cfg.trace, seq))
            })
            .collect();

        let mut emit_events = Vec::new();
        for block in active_blocks.iter_ones() {
            let class = index.class_of(block);
            if cfg.trace {
                emit_events.push(PipeEvent {
                    seq: seq.fetch_add(1, Ordering::Relaxed),
                    block,
                    class,
                    kind: PipeEventKind::Emitted,
                });
            }
            pipes[class.index()]
                .0
                .send(PipeMsg::Block(block))
                .expect("class pipeline hung up early");
        }
        for (tx, _) in &pipes {
            tx.send(PipeMsg::Halt)
                .expect("class pipeline hung up early");
        }

        let mut out = PullOutcome {
            events: emit_events,
            ..PullOutcome::default()
        };
        for handle in handles {
            let part = handle.join().expect("pull pipeline panicked");
            out.edges_examined += part.edges_examined;
            out.edges_streamed += part.edges_streamed;
            for i in 0..3 {
                out.class_loops[i] += part.class_loops[i];
                out.blocks_dispatched[i] += part.blocks_dispatched[i];
            }
            out.block_results.extend(part.block_results);
            out.events.extend(part.events);
        }
        out.block_results.sort_unstable_by_key(|r| r.block);
        out.events.sort_unstable_by_key(|e| e.seq);
        out
    })
}

fn consume_class<K: GasKernel>(
    index: &EdgeBlockIndex,
    kernel: &K,
    class: SizeClass,
    rx: Receiver<PipeMsg>,
    trace: bool,
    seq: &AtomicU64,
) -> PullOutcome {
    let width = index.block_width.min(u64::from(index.vertex_count)) as usize;
    let mut scratch = ReduceScratch::new(width, kernel.acc_init());
    let mut out = PullOutcome::default();
    loop {
        match rx.recv().expect("dispatcher dropped pipe before Halt") {
            PipeMsg::Halt => break,
            PipeMsg::Block(block) => {
                if trace {
                    out.events.push(PipeEvent {
                        seq: seq.fetch_add(1, Ordering::Relaxed),
                        block,
                        class,
                        kind: PipeEventKind::ConsumeStart,
                    });
                }
                let result = process_block(index, kernel, block, class, &mut scratch, &mut out);
                out.block_results.push(result);
            }
        }
    }
    out
}

fn process_block<K: GasKernel>(
    index: &EdgeBlockIndex,
    kernel: &K,
    block: u32,
    class: SizeClass,
    scratch: &mut ReduceScratch<K::Acc>,
    out: &mut PullOutcome,
) -> BlockResult {
    let edges = index.edges_of(block);
    let (lo, _) = index.dest_range(block);
    out.edges_streamed += edges.len() as u64;
    out.class_loops[class.index()] += loop_count(class, edges.len() as u64);
    out.blocks_dispatched[class.index()] += 1;

    let fold = if class == SizeClass::Large {
        // Stage the stream through a 64-byte buffer, preserving order.
        let mut folded = FoldStats::default();
        let mut stage = [(0 as VertexId, 0 as VertexId); LARGE_STAGE_EDGES];
        for chunk in edges.chunks(LARGE_STAGE_EDGES) {
            stage[..chunk.len()].copy_from_slice(chunk);
            folded.merge(reduce_into(kernel, &stage[..chunk.len()], lo, scratch));
        }
        folded
    } else {
        reduce_into(kernel, edges, lo, scratch)
    };
    out.edges_examined += fold.examined;

    scratch.offsets.sort_unstable();
    let mut changes = 0u64;
    for &off in &scratch.offsets {
        let dst = lo + off;
        changes += u64::from(kernel.apply(dst, scratch.accs[off as usize]));
    }
    scratch.reset();

    BlockResult {
        block,
        class,
        changes,
        any_open: fold.any_open,
    }
}

/// Reusable per-pipeline fold state. Accumulators are only read for offsets
/// marked touched, so reset just unwinds the touched list.
struct ReduceScratch<A> {
    accs: Vec<A>,
    touched: Vec<bool>,
    offsets: Vec<u32>,
}

impl<A: Copy> ReduceScratch<A> {
    fn new(width: usize, fill: A) -> Self {
        ReduceScratch {
            accs: vec![fill; width],
            touched: vec![false; width],
            offsets: Vec::with_capacity(width.min(4096)),
        }
    }

    fn reset(&mut self) {
        for &off in &self.offsets {
            self.touched[off as usize] = false;
        }
        self.offsets.clear();
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct FoldStats {
    examined: u64,
    any_open: bool,
}

impl FoldStats {
    fn merge(&mut self, other: FoldStats) {
        self.examined += other.examined;
        self.any_open |= other.any_open;
    }
}

fn reduce_into<K: GasKernel>(
    kernel: &K,
    edges: &[(VertexId, VertexId)],
    dest_lo: VertexId,
    scratch: &mut ReduceScratch<K::Acc>,
) -> FoldStats {
    let mut stats = FoldStats::default();
    for &(src, dst) in edges {
        if !kernel.dst_open(dst) {
            continue;
        }
        stats.any_open = true;
        let off = (dst - dest_lo) as usize;
        let acc = if scratch.touched[off] {
            scratch.accs[off]
        } else {
            kernel.acc_init()
        };
        if kernel.acc_saturated(&acc) {
            continue;
        }
        scratch.accs[off] = kernel.gather(src, dst, acc);
        if !scratch.touched[off] {
            scratch.touched[off] = true;
            scratch.offsets.push(off as u32);
        }
        stats.examined += 1;
    }
    stats
}

/// Fold a block's edges into per-destination accumulators without applying
/// them: returns `(destination, accumulator)` pairs in ascending destination
/// order plus the number of edges examined after filtering.
pub fn per_destination_reduce<K: GasKernel>(
    kernel: &K,
    edges: &[(VertexId, VertexId)],
    dest_lo: VertexId,
    width: usize,
) -> (Vec<(VertexId, K::Acc)>, u64) {
    let mut scratch = ReduceScratch::new(width, kernel.acc_init());
    let stats = reduce_into(kernel, edges, dest_lo, &mut scratch);
    scratch.offsets.sort_unstable();
    let pairs = scratch
        .offsets
        .iter()
        .map(|&off| (dest_lo + off, scratch.accs[off as usize]))
        .collect();
    (pairs, stats.examined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{BfsKernel, WccKernel};
    use crate::edge_block::{build_edge_blocks, EdgeBlockConfig};
    use crate::gas::IterCtx;
    use crate::graph_io::RawEdgeList;
    use crate::synth::uniform_graph;

    fn blocks_of(raw: &RawEdgeList, group_power: u32) -> EdgeBlockIndex {
        build_edge_blocks(
            raw,
            &EdgeBlockConfig {
                group_power: Some(group_power),
                ..EdgeBlockConfig::default()
            },
        )
    }

    fn all_blocks(index: &EdgeBlockIndex) -> Bitmap {
        let mut bm = Bitmap::new(index.block_count());
        for b in 0..index.block_count() as u32 {
            if index.edge_count_of(b) > 0 {
                bm.set(b);
            }
        }
        bm
    }

    #[test]
    fn wcc_pull_round_lowers_labels_per_block() {
        // 12 vertices, width 8 -> 2 blocks. Component {0,1,2} and {8,9}.
        let raw = RawEdgeList {
            edges: vec![(0, 1), (1, 2), (2, 0), (8, 9), (9, 8), (1, 9)],
            weights: None,
            vertex_count: 12,
            directed: true,
        };
        let index = blocks_of(&raw, 1);
        assert_eq!(index.block_count(), 2);
        let mut kernel = WccKernel::new(12);
        let ctx = IterCtx { iteration: 0 };
        kernel.begin_iteration(&ctx);
        let out = pull_iteration(&index, &all_blocks(&index), &kernel, &PullConfig::default());
        kernel.end_iteration(&ctx);

        assert_eq!(out.edges_streamed, 6);
        // Labels after one synchronous round: min over in-neighbors, vertex 8
        // keeps its label because its only in-neighbor carries a larger one.
        assert_eq!(kernel.labels(), vec![0, 0, 1, 3, 4, 5, 6, 7, 8, 1, 10, 11]);
        let total_changes: u64 = out.block_results.iter().map(|r| r.changes).sum();
        assert_eq!(total_changes, 3, "vertices 1, 2 and 9 changed");
        assert!(out.block_results.iter().all(|r| r.any_open));
    }

    #[test]
    fn bfs_filtering_skips_closed_and_saturated() {
        // Star into vertex 1: three in-edges, all from frontier vertex 0's
        // component; saturation stops after the first frontier hit.
        let raw = RawEdgeList {
            edges: vec![(0, 1), (2, 1), (3, 1), (0, 4)],
            weights: None,
            vertex_count: 8,
            directed: true,
        };
        let index = blocks_of(&raw, 1);
        let mut kernel = BfsKernel::new(8, 0);
        let ctx = IterCtx { iteration: 0 };
        kernel.begin_iteration(&ctx);
        let out = pull_iteration(&index, &all_blocks(&index), &kernel, &PullConfig::default());
        kernel.end_iteration(&ctx);

        assert_eq!(kernel.depths()[1], 1);
        assert_eq!(kernel.depths()[4], 1);
        // Edge (0,1) saturates dst 1; (2,1) and (3,1) are skipped; (0,4)
        // folds normally. Counting is per-block deterministic.
        assert_eq!(out.edges_examined, 2);
        assert_eq!(out.edges_streamed, 4);
    }

    #[test]
    fn loop_count_uses_class_lane_widths() {
        assert_eq!(loop_count(SizeClass::Small, 0), 0);
        assert_eq!(loop_count(SizeClass::Small, 63), 8);
        assert_eq!(loop_count(SizeClass::Small, 8), 1);
        assert_eq!(loop_count(SizeClass::Middle, 2048), 32);
        assert_eq!(loop_count(SizeClass::Middle, 65), 2);
        assert_eq!(loop_count(SizeClass::Large, 2049), 9);
        assert_eq!(loop_count(SizeClass::Large, 2304), 9);
    }

    #[test]
    fn per_destination_reduce_folds_in_ascending_order() {
        let mut kernel = WccKernel::new(16);
        kernel.begin_iteration(&IterCtx { iteration: 0 });
        let edges = vec![(9, 3), (5, 2), (7, 3), (1, 2)];
        let (pairs, examined) = per_destination_reduce(&kernel, &edges, 0, 8);
        assert_eq!(examined, 4);
        assert_eq!(pairs, vec![(2, 1), (3, 7)]);
    }

    #[test]
    fn dispatch_consumption_overlaps_and_pipes_stay_fifo() {
        // Plenty of small blocks on one class pipe with a tiny capacity:
        // the dispatcher must block until consumption starts, so some
        // ConsumeStart precedes a later Emitted.
        let raw = uniform_graph(1024, 4096, 11);
        let index = blocks_of(&raw, 1);
        let kernel = {
            let mut k = WccKernel::new(1024);
            k.begin_iteration(&IterCtx { iteration: 0 });
            k
        };
        let cfg = PullConfig {
            pipe_capacity: 2,
            trace: true,
        };
        let out = pull_iteration(&index, &all_blocks(&index), &kernel, &cfg);

        // Per-pipe FIFO: consumption order equals emission order per class.
        for class in SizeClass::ALL {
            let emitted: Vec<u32> = out
                .events
                .iter()
                .filter(|e| e.class == class && e.kind == PipeEventKind::Emitted)
                .map(|e| e.block)
                .collect();
            let consumed: Vec<u32> = out
                .events
                .iter()
                .filter(|e| e.class == class && e.kind == PipeEventKind::ConsumeStart)
                .map(|e| e.block)
                .collect();
            assert_eq!(emitted, consumed, "{} pipe must be FIFO", class.name());
        }

        // Overlap: some block is consumed before a later block is emitted.
        let last_emit = out
            .events
            .iter()
            .filter(|e| e.kind == PipeEventKind::Emitted)
            .map(|e| e.seq)
            .max()
            .unwrap();
        let first_consume = out
            .events
            .iter()
            .filter(|e| e.kind == PipeEventKind::ConsumeStart)
            .map(|e| e.seq)
            .min()
            .unwrap();
        assert!(
            first_consume < last_emit,
            "consumption must start while dispatch is still emitting"
        );
    }

    #[test]
    fn pull_outcome_is_schedule_independent() {
        let raw = uniform_graph(512, 8192, 3);
        let index = blocks_of(&raw, 1);
        let run = || {
            let mut kernel = WccKernel::new(512);
            let ctx = IterCtx { iteration: 0 };
            kernel.begin_iteration(&ctx);
            let out = pull_iteration(&index, &all_blocks(&index), &kernel, &PullConfig::default());
            kernel.end_iteration(&ctx);
            (
                kernel.labels(),
                out.edges_examined,
                out.edges_streamed,
                out.class_loops,
            )
        };
        let first = run();
        for _ in 0..5 {
            assert_eq!(run(), first);
        }
    }

    #[test]
    fn large_blocks_stage_through_cache_sized_chunks() {
        // One hot destination: 5000 in-edges -> a Large block; staging must
        // preserve totals and ordering semantics.
        let mut edges: Vec<(u32, u32)> = (0..5000).map(|i| (1 + (i % 500), 0)).collect();
        edges.push((0, 600));
        let raw = RawEdgeList {
            edges,
            weights: None,
            vertex_count: 1024,
            directed: true,
        };
        let index = blocks_of(&raw, 1);
        assert_eq!(index.class_of(0), SizeClass::Large);
        let mut kernel = WccKernel::new(1024);
        let ctx = IterCtx { iteration: 0 };
        kernel.begin_iteration(&ctx);
        let out = pull_iteration(&index, &all_blocks(&index), &kernel, &PullConfig::default());
        kernel.end_iteration(&ctx);
        assert_eq!(out.blocks_dispatched[SizeClass::Large.index()], 1);
        assert_eq!(
            out.class_loops[SizeClass::Large.index()],
            loop_count(SizeClass::Large, 5000)
        );
        assert_eq!(kernel.labels()[0], 0, "label 0 already minimal");
        assert_eq!(kernel.labels()[600], 0);
    }
}
