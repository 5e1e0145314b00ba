//! Seeded synthetic graph generators for tests, benches, and CLI demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::graph_io::RawEdgeList;
use crate::VertexId;

/// Power-law graph: destinations follow a Zipf distribution over vertex rank
/// (vertex 0 is the heaviest hub), sources are uniform. With `connected`,
/// a random attachment tree is laid down first so every vertex is reachable
/// from vertex 0 within a logarithmic number of hops; tree edges count
/// toward `edges`, which is raised to `vertices - 1` when necessary.
pub fn power_law_graph(
    vertices: u32,
    edges: usize,
    exponent: f64,
    seed: u64,
    connected: bool,
) -> RawEdgeList {
    assert!(vertices > 0, "power_law_graph needs at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(edges);
    if connected {
        for child in 1..vertices {
            let parent = rng.gen_range(0..child);
            out.push((parent, child));
        }
    }
    let zipf = Zipf::new(u64::from(vertices), exponent).expect("valid zipf parameters");
    while out.len() < edges {
        let src = rng.gen_range(0..vertices);
        let dst = (zipf.sample(&mut rng) as u64 - 1) as VertexId;
        out.push((src, dst));
    }
    RawEdgeList {
        edges: out,
        weights: None,
        vertex_count: vertices,
        directed: true,
    }
}

/// Uniform random directed multigraph.
pub fn uniform_graph(vertices: u32, edges: usize, seed: u64) -> RawEdgeList {
    assert!(vertices > 0, "uniform_graph needs at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..edges)
        .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices)))
        .collect();
    RawEdgeList {
        edges: out,
        weights: None,
        vertex_count: vertices,
        directed: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_is_deterministic_per_seed() {
        let a = power_law_graph(500, 2000, 2.0, 9, true);
        let b = power_law_graph(500, 2000, 2.0, 9, true);
        assert_eq!(a, b);
        assert_ne!(a, power_law_graph(500, 2000, 2.0, 10, true));
    }

    #[test]
    fn power_law_skews_in_degree_toward_low_ids() {
        let g = power_law_graph(1000, 20_000, 2.0, 3, false);
        let mut indeg = vec![0u64; 1000];
        for &(_, d) in &g.edges {
            indeg[d as usize] += 1;
        }
        let head: u64 = indeg[..10].iter().sum();
        let tail: u64 = indeg[500..510].iter().sum();
        assert!(head > tail * 10, "head {head} should dwarf tail {tail}");
    }

    #[test]
    fn connected_tree_reaches_every_vertex() {
        let g = power_law_graph(300, 400, 2.0, 5, true);
        // Follow the tree edges only: every child gets a parent edge first.
        let mut seen = vec![false; 300];
        seen[0] = true;
        for &(p, c) in g.edges.iter().take(299) {
            assert!(seen[p as usize], "parents precede children");
            seen[c as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn uniform_respects_bounds() {
        let g = uniform_graph(50, 500, 1);
        assert_eq!(g.edge_count(), 500);
        assert!(g.edges.iter().all(|&(u, v)| u < 50 && v < 50));
    }
}
