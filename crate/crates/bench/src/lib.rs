//! Shared fixtures for the engine benchmarks.

use dualgraph_core::{EdgeBlockConfig, GraphData, RawEdgeList};

/// The benchmark corpus: a connected power-law graph at a given scale.
pub fn fixture(vertices: u32, edges: usize, seed: u64) -> RawEdgeList {
    dualgraph_core::synth::power_law_graph(vertices, edges, 1.6, seed, true)
}

/// All engine-facing representations of [`fixture`].
pub fn fixture_data(vertices: u32, edges: usize, seed: u64) -> GraphData {
    GraphData::build(fixture(vertices, edges, seed), &EdgeBlockConfig::default())
}
