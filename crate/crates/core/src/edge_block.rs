//! Destination-bucketed edge blocks and workload size classes.
//!
//! The pull engine consumes the graph as *edge blocks*: every block owns a
//! contiguous destination range of width `8^n` and holds all edges whose
//! destination falls in that range, in input order (stable bucketing). The
//! group power `n` is auto-sized from the edge total `G`, the pipeline depth
//! `D`, and the pipeline count `P` as the largest `n >= 1` with
//! `n < (G / (D * P))^(1/8)`, clamped to 1.
//!
//! Blocks are classified by edge count for the three class pipelines:
//! fewer than 64 edges is Small, 64..=2048 is Middle, more than 2048 is
//! Large. Per-block activity flags are packed one bit per block, hence
//! [`block_state_bytes`].

use serde::{Deserialize, Serialize};

use crate::graph_io::RawEdgeList;
use crate::VertexId;

/// Workload class of an edge block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    Small,
    Middle,
    Large,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Small, SizeClass::Middle, SizeClass::Large];

    pub fn index(self) -> usize {
        match self {
            SizeClass::Small => 0,
            SizeClass::Middle => 1,
            SizeClass::Large => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Middle => "middle",
            SizeClass::Large => "large",
        }
    }
}

/// Tunables for block construction and classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeBlockConfig {
    /// Destination-range width exponent (`width = 8^n`); `None` auto-sizes
    /// from the edge count via [`choose_group_power`].
    pub group_power: Option<u32>,
    /// Pipeline depth `D` used by the auto-sizing rule.
    pub pipeline_depth: u32,
    /// Pipeline count `P` used by the auto-sizing rule.
    pub pipeline_count: u32,
    /// Blocks below this edge count are Small.
    pub small_threshold: u64,
    /// Blocks above this edge count are Large.
    pub large_threshold: u64,
}

impl Default for EdgeBlockConfig {
    fn default() -> Self {
        EdgeBlockConfig {
            group_power: None,
            pipeline_depth: 512,
            pipeline_count: 3,
            small_threshold: 64,
            large_threshold: 2048,
        }
    }
}

impl EdgeBlockConfig {
    pub fn resolve_group_power(&self, total_edges: u64) -> u32 {
        self.group_power.unwrap_or_else(|| {
            choose_group_power(total_edges, self.pipeline_depth, self.pipeline_count)
        })
    }
}

/// Largest `n >= 1` satisfying `n < (G / (D * P))^(1/8)`, clamped to 1.
///
/// Evaluated in exact integer arithmetic as `n^8 * D * P < G`, which avoids
/// float rounding at exact-power boundaries (the strict inequality must
/// exclude the boundary itself).
pub fn choose_group_power(total_edges: u64, pipeline_depth: u32, pipeline_count: u32) -> u32 {
    let g = total_edges as u128;
    let dp = u128::from(pipeline_depth) * u128::from(pipeline_count);
    let mut n = 1u32;
    loop {
        let next = u128::from(n + 1).pow(8).saturating_mul(dp);
        if next < g {
            n += 1;
        } else {
            return n;
        }
    }
}

/// Map a block's edge count to its workload class.
pub fn classify(edge_count: u64, cfg: &EdgeBlockConfig) -> SizeClass {
    if edge_count < cfg.small_threshold {
        SizeClass::Small
    } else if edge_count <= cfg.large_threshold {
        SizeClass::Middle
    } else {
        SizeClass::Large
    }
}

/// Bytes needed to keep one activity bit per block.
pub fn block_state_bytes(block_count: u64) -> u64 {
    block_count.div_ceil(8)
}

/// The bucketed edge store consumed by the pull engine.
#[derive(Debug, Clone)]
pub struct EdgeBlockIndex {
    pub group_power: u32,
    /// Destination-range width per block (`8^group_power`).
    pub block_width: u64,
    pub vertex_count: u32,
    /// Prefix offsets into `edges`, one entry per block plus a terminator.
    pub edge_starts: Vec<usize>,
    /// Edges grouped by block, input order preserved within each block.
    pub edges: Vec<(VertexId, VertexId)>,
    pub weights: Option<Vec<u32>>,
    pub classes: Vec<SizeClass>,
}

impl EdgeBlockIndex {
    pub fn block_count(&self) -> usize {
        self.classes.len()
    }

    pub fn block_of(&self, dst: VertexId) -> u32 {
        (u64::from(dst) / self.block_width) as u32
    }

    /// Inclusive destination range `(lo, hi)` owned by block `b`.
    pub fn dest_range(&self, b: u32) -> (VertexId, VertexId) {
        let lo = u64::from(b) * self.block_width;
        let hi = (lo + self.block_width - 1).min(u64::from(self.vertex_count) - 1);
        (lo as VertexId, hi as VertexId)
    }

    pub fn edge_count_of(&self, b: u32) -> u64 {
        (self.edge_starts[b as usize + 1] - self.edge_starts[b as usize]) as u64
    }

    pub fn edges_of(&self, b: u32) -> &[(VertexId, VertexId)] {
        &self.edges[self.edge_starts[b as usize]..self.edge_starts[b as usize + 1]]
    }

    pub fn class_of(&self, b: u32) -> SizeClass {
        self.classes[b as usize]
    }

    /// Block counts per class, indexed by [`SizeClass::index`].
    pub fn class_histogram(&self) -> [u64; 3] {
        let mut hist = [0u64; 3];
        for &c in &self.classes {
            hist[c.index()] += 1;
        }
        hist
    }

    /// Total blocks in the Small and Middle classes (the dispatcher's `Nb`).
    pub fn small_middle_total(&self) -> u64 {
        let h = self.class_histogram();
        h[0] + h[1]
    }

    /// Total Large blocks (the dispatcher's `Nl`).
    pub fn large_total(&self) -> u64 {
        self.class_histogram()[2]
    }
}

/// Bucket the raw edge list into destination-range blocks (stable counting
/// sort, linear in the edge count).
pub fn build_edge_blocks(raw: &RawEdgeList, cfg: &EdgeBlockConfig) -> EdgeBlockIndex {
    let group_power = cfg.resolve_group_power(raw.edge_count() as u64).max(1);
    let block_width = 8u64.pow(group_power.min(21));
    let block_count = (u64::from(raw.vertex_count)).div_ceil(block_width) as usize;

    let block_of = |dst: VertexId| (u64::from(dst) / block_width) as usize;

    let mut starts = vec![0usize; block_count + 1];
    for &(_, dst) in &raw.edges {
        starts[block_of(dst) + 1] += 1;
    }
    for i in 1..=block_count {
        starts[i] += starts[i - 1];
    }

    let mut cursor = starts.clone();
    let mut edges = vec![(0 as VertexId, 0 as VertexId); raw.edge_count()];
    let mut weights = raw.weights.as_ref().map(|_| vec![0u32; raw.edge_count()]);
    for (i, &(src, dst)) in raw.edges.iter().enumerate() {
        let b = block_of(dst);
        let slot = cursor[b];
        cursor[b] += 1;
        edges[slot] = (src, dst);
        if let (Some(out), Some(ws)) = (weights.as_mut(), raw.weights.as_ref()) {
            out[slot] = ws[i];
        }
    }

    let classes = (0..block_count)
        .map(|b| classify((starts[b + 1] - starts[b]) as u64, cfg))
        .collect();

    EdgeBlockIndex {
        group_power,
        block_width,
        vertex_count: raw.vertex_count,
        edge_starts: starts,
        edges,
        weights,
        classes,
    }
}
