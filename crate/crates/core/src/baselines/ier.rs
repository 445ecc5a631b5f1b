//! Incremental Euclidean Restriction: best-first R-tree search by euclidean
//! lower bounds, confirmed with exact network distances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::rtree::{RtreeEntries, StrRtree};
use crate::distoracle::DistanceBackend;
use crate::graph::{Dist, Point, RoadGraph, VertexId};
use crate::query::{AggregateFunction, Neighbor, RangeOutput, RankedOutput, Ranking, ResultSet};
use crate::stats::QueryStats;
use crate::{Error, Result};

fn query_points(graph: &RoadGraph, queries: &[VertexId]) -> Result<Vec<(VertexId, Point)>> {
    let coords = graph.coordinates().ok_or_else(|| Error::Unsupported("IER requires vertex coordinates".into()))?;
    if queries.is_empty() {
        return Err(Error::config("query set must not be empty"));
    }
    queries
        .iter()
        .map(|&q| {
            coords.get(q as usize).map(|&p| (q, p)).ok_or_else(|| Error::config(format!("query vertex {q} out of range")))
        })
        .collect()
}

/// AkNN over the objects of `tree`. `backend` must work on the graph the
/// tree was built from, in original ids.
pub fn ier_aknn(
    tree: &StrRtree,
    backend: &mut DistanceBackend<'_>,
    queries: &[VertexId],
    k: usize,
    agg: AggregateFunction,
) -> Result<RankedOutput> {
    let start = Instant::now();
    if k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    let graph = backend.graph();
    let qs = query_points(graph, queries)?;
    let settled_before = backend.vertices_settled();
    let mut stats = QueryStats::default();
    let mut results = ResultSet::new(k, Ranking::Nearest);
    // (key, is_node, id): objects before nodes on equal keys.
    let mut heap: BinaryHeap<Reverse<(Dist, bool, u32)>> = BinaryHeap::new();
    let lb = |d: f64| graph.euclid_to_lower_bound(d);
    if let Some(root) = tree.root() {
        let key = agg.apply(qs.iter().map(|q| lb(tree.node(root).mbr.mindist(q.1))));
        heap.push(Reverse((key, true, root)));
        stats.queue_operations += 1;
    }
    while let Some(Reverse((key, is_node, id))) = heap.pop() {
        stats.queue_operations += 1;
        if results.is_past(key) {
            break;
        }
        if !is_node {
            if !results.can_admit(key, id) {
                continue;
            }
            stats.candidates_retrieved += 1;
            stats.exact_distance_calls += qs.len() as u64;
            let score = agg.apply(qs.iter().map(|q| backend.distance(q.0, id)));
            results.offer(Neighbor::new(id, score));
            continue;
        }
        stats.nodes_visited += 1;
        match &tree.node(id).entries {
            RtreeEntries::Leaf(items) => {
                for &(v, p) in items {
                    let k = agg.apply(qs.iter().map(|q| lb(q.1.euclid(p)))).max(key);
                    if results.can_admit(k, v) {
                        heap.push(Reverse((k, false, v)));
                        stats.queue_operations += 1;
                    }
                }
            }
            RtreeEntries::Inner(children) => {
                for &c in children {
                    let k = agg.apply(qs.iter().map(|q| lb(tree.node(c).mbr.mindist(q.1)))).max(key);
                    if !results.is_past(k) {
                        heap.push(Reverse((k, true, c)));
                        stats.queue_operations += 1;
                    }
                }
            }
        }
    }
    stats.vertices_settled = backend.vertices_settled() - settled_before;
    stats.wall_time = start.elapsed();
    Ok(RankedOutput { neighbors: results.into_vec(), stats, trace: None })
}

pub fn ier_knn(tree: &StrRtree, backend: &mut DistanceBackend<'_>, q: VertexId, k: usize) -> Result<RankedOutput> {
    ier_aknn(tree, backend, &[q], k, AggregateFunction::Max)
}

/// Euclidean lower bounds cannot prune a farthest-neighbour search.
pub fn ier_kfn(_tree: &StrRtree, _backend: &mut DistanceBackend<'_>, _q: VertexId, _k: usize) -> Result<RankedOutput> {
    Err(Error::Unsupported("IER does not support kFN queries".into()))
}

pub fn ier_range(tree: &StrRtree, backend: &mut DistanceBackend<'_>, q: VertexId, r: Dist) -> Result<RangeOutput> {
    let start = Instant::now();
    let graph = backend.graph();
    let qp = query_points(graph, &[q])?[0].1;
    let settled_before = backend.vertices_settled();
    let mut stats = QueryStats::default();
    let mut found = Vec::new();
    let mut stack: Vec<u32> = tree.root().into_iter().collect();
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        stats.nodes_visited += 1;
        if graph.euclid_to_lower_bound(node.mbr.mindist(qp)) > r {
            continue;
        }
        match &node.entries {
            RtreeEntries::Inner(children) => stack.extend(children.iter().rev()),
            RtreeEntries::Leaf(items) => {
                for &(v, p) in items {
                    if graph.euclid_to_lower_bound(qp.euclid(p)) > r {
                        continue;
                    }
                    stats.candidates_retrieved += 1;
                    stats.exact_distance_calls += 1;
                    if backend.distance(q, v) <= r {
                        found.push(v);
                    }
                }
            }
        }
    }
    found.sort_unstable();
    stats.vertices_settled = backend.vertices_settled() - settled_before;
    stats.wall_time = start.elapsed();
    Ok(RangeOutput { objects: found, stats })
}
