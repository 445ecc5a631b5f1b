//! Fixtures shared by the benchmark targets.

use colt::experiment::{generate_objects, generate_query_set, grid_graph};
use colt::sultree::build_sultree;
use colt::{ColTree, RoadGraph, SulParams, SulTree, VertexId};

pub const SEED: u64 = 17;

/// A weighted grid with an index and one object set, ready to query.
pub struct Fixture {
    pub graph: RoadGraph,
    pub sul: SulTree,
    pub col: ColTree,
    pub objects: Vec<VertexId>,
}

pub fn fixture(side: u32, density: f64, lambda: usize) -> Fixture {
    let graph = grid_graph(side, side, SEED).expect("grid");
    let sul = build_sultree(&graph, &SulParams { seed: SEED, ..SulParams::default() }).expect("sultree");
    let objects = generate_objects(&graph, density, SEED).expect("objects");
    let col = ColTree::build(&sul, &objects, lambda).expect("coltree");
    Fixture { graph, sul, col, objects }
}

/// `count` query groups of `size` vertices each, clustered in 15% of the graph.
pub fn query_groups(graph: &RoadGraph, count: usize, size: usize) -> Vec<Vec<VertexId>> {
    (0..count as u64).map(|i| generate_query_set(graph, size, 15.0, SEED ^ (i + 1)).expect("queries")).collect()
}
