//! Recursive balanced b-way partitioning.
//!
//! The default partitioner uses recursive coordinate bisection when the graph
//! has coordinates and BFS region growing otherwise. Both are deterministic
//! and keep every part within `ceil(|subset| / b)` vertices. Edge cut is not
//! optimised; it only affects index constants, never correctness.

use std::collections::VecDeque;

use crate::graph::{Point, RoadGraph, VertexId};
use crate::{Error, Result};

/// Part index per vertex, aligned with the subset passed to the partitioner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionAssignment {
    pub part_of: Vec<u32>,
}

impl PartitionAssignment {
    /// Groups the subset by part; each group keeps the subset order.
    pub fn parts(&self, subset: &[VertexId], b: usize) -> Vec<Vec<VertexId>> {
        let mut parts = vec![Vec::new(); b];
        for (&v, &p) in subset.iter().zip(&self.part_of) {
            parts[p as usize].push(v);
        }
        parts
    }
}

pub trait Partitioner: Sync {
    fn partition(&self, graph: &RoadGraph, subset: &[VertexId], b: usize) -> Result<PartitionAssignment>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DefaultPartitioner;

impl Partitioner for DefaultPartitioner {
    fn partition(&self, graph: &RoadGraph, subset: &[VertexId], b: usize) -> Result<PartitionAssignment> {
        partition_subgraph(graph, subset, b)
    }
}

/// Splits `subset` into `b` balanced parts. `b` must be a power of two.
pub fn partition_subgraph(graph: &RoadGraph, subset: &[VertexId], b: usize) -> Result<PartitionAssignment> {
    if b < 2 || !b.is_power_of_two() {
        return Err(Error::config("b must be a power of two"));
    }
    if subset.len() < b {
        return Err(Error::config(format!("cannot split {} vertices into {b} parts", subset.len())));
    }
    let part_of = match graph.coordinates() {
        Some(coords) => coordinate_bisection(coords, subset, b),
        None => region_growing(graph, subset, b),
    };
    Ok(PartitionAssignment { part_of })
}

fn coordinate_bisection(coords: &[Point], subset: &[VertexId], b: usize) -> Vec<u32> {
    let mut order: Vec<usize> = (0..subset.len()).collect();
    let mut part_of = vec![0u32; subset.len()];
    bisect(coords, subset, &mut order, b, 0, &mut part_of);
    part_of
}

fn bisect(coords: &[Point], subset: &[VertexId], items: &mut [usize], parts: usize, first: u32, out: &mut [u32]) {
    if parts == 1 {
        for &i in items.iter() {
            out[i] = first;
        }
        return;
    }
    let at = |i: usize| coords[subset[i] as usize];
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for &i in items.iter() {
        let p = at(i);
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let by_x = hi.x - lo.x >= hi.y - lo.y;
    items.sort_by(|&a, &b| {
        let (pa, pb) = (at(a), at(b));
        let (ka, kb) = if by_x { ((pa.x, pa.y), (pb.x, pb.y)) } else { ((pa.y, pa.x), (pb.y, pb.x)) };
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(subset[a].cmp(&subset[b]))
    });
    let mid = items.len().div_ceil(2);
    let (left, right) = items.split_at_mut(mid);
    let half = parts / 2;
    bisect(coords, subset, left, half, first, out);
    bisect(coords, subset, right, half, first + half as u32, out);
}

fn region_growing(graph: &RoadGraph, subset: &[VertexId], b: usize) -> Vec<u32> {
    const NONE: u32 = u32::MAX;
    let n = subset.len();
    let cap = n.div_ceil(b);
    let mut local = vec![NONE; graph.vertex_count()];
    for (i, &v) in subset.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let local_neighbors = |i: usize| {
        graph.neighbors(subset[i]).filter_map(|(u, _)| (local[u as usize] != NONE).then(|| local[u as usize] as usize))
    };

    // Seeds: smallest id first, then repeatedly the vertex farthest (in hops)
    // from every chosen seed.
    let first = (0..n).min_by_key(|&i| subset[i]).unwrap();
    let mut seeds = vec![first];
    let mut hops = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    while seeds.len() < b {
        hops.fill(usize::MAX);
        queue.clear();
        for &s in &seeds {
            hops[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for v in local_neighbors(u) {
                if hops[v] == usize::MAX {
                    hops[v] = hops[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let next = (0..n)
            .filter(|i| !seeds.contains(i))
            .max_by(|&a, &c| hops[a].cmp(&hops[c]).then(subset[c].cmp(&subset[a])))
            .unwrap();
        seeds.push(next);
    }

    let mut part_of = vec![NONE; n];
    let mut sizes = vec![0usize; b];
    let mut frontiers: Vec<VecDeque<usize>> = seeds.iter().map(|&s| VecDeque::from([s])).collect();
    loop {
        let mut grew = false;
        for p in 0..b {
            if sizes[p] >= cap {
                continue;
            }
            while let Some(u) = frontiers[p].pop_front() {
                if part_of[u] != NONE {
                    continue;
                }
                part_of[u] = p as u32;
                sizes[p] += 1;
                frontiers[p].extend(local_neighbors(u).filter(|&v| part_of[v] == NONE));
                grew = true;
                break;
            }
        }
        if !grew {
            break;
        }
    }
    // Vertices cut off from every region go to the smallest part.
    for i in 0..n {
        if part_of[i] == NONE {
            let p = (0..b).min_by_key(|&p| (sizes[p], p)).unwrap();
            part_of[i] = p as u32;
            sizes[p] += 1;
        }
    }
    part_of
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartNode {
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
    pub children: Vec<usize>,
    pub depth: u32,
}

/// Partition hierarchy with nodes numbered in level order (root = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTree {
    pub nodes: Vec<PartNode>,
}

impl PartitionTree {
    pub fn leaves(&self) -> impl Iterator<Item = &PartNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    pub fn height(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }
}

/// Partitions the whole graph into `b` parts recursively until every part
/// has at most `alpha` vertices.
pub fn recursive_partition(graph: &RoadGraph, b: usize, alpha: usize) -> Result<PartitionTree> {
    recursive_partition_with(&DefaultPartitioner, graph, b, alpha)
}

pub fn recursive_partition_with<P: Partitioner + ?Sized>(
    partitioner: &P,
    graph: &RoadGraph,
    b: usize,
    alpha: usize,
) -> Result<PartitionTree> {
    if alpha < b {
        return Err(Error::config("alpha must be at least b"));
    }
    let mut nodes = vec![PartNode { vertices: (0..graph.vertex_count() as VertexId).collect(), children: vec![], depth: 0 }];
    let mut next = 0;
    while next < nodes.len() {
        if nodes[next].vertices.len() > alpha {
            let subset = std::mem::take(&mut nodes[next].vertices);
            let assignment = partitioner.partition(graph, &subset, b)?;
            let depth = nodes[next].depth + 1;
            for mut part in assignment.parts(&subset, b) {
                part.sort_unstable();
                let child = nodes.len();
                nodes[next].children.push(child);
                nodes.push(PartNode { vertices: part, children: vec![], depth });
            }
            nodes[next].vertices = subset;
        }
        next += 1;
    }
    Ok(PartitionTree { nodes })
}
