//! Reference competitors. Brute force doubles as the correctness oracle.

mod ier;
mod rtree;

pub use ier::{ier_aknn, ier_kfn, ier_knn, ier_range};
pub use rtree::{Mbr, StrRtree, DEFAULT_LEAF_CAPACITY};

use std::time::Instant;

use crate::coltree::QueryVertex;
use crate::distoracle::DistanceBackend;
use crate::graph::{sssp, Dist, RoadGraph, VertexId};
use crate::query::{AggregateFunction, Neighbor, RangeOutput, RankedOutput, Ranking, ResultSet};
use crate::stats::QueryStats;
use crate::sultree::SulTree;
use crate::{Error, Result};

fn distinct(objects: &[VertexId]) -> Vec<VertexId> {
    let mut out = objects.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

fn check_input(graph: &RoadGraph, objects: &[VertexId], queries: &[VertexId], k: Option<usize>) -> Result<()> {
    let n = graph.vertex_count();
    if let Some(&v) = objects.iter().chain(queries).find(|&&v| v as usize >= n) {
        return Err(Error::config(format!("vertex {v} out of range")));
    }
    if queries.is_empty() {
        return Err(Error::config("query set must not be empty"));
    }
    if k == Some(0) {
        return Err(Error::config("k must be at least 1"));
    }
    Ok(())
}

/// Exact AkNN by one full Dijkstra per query vertex. Stats count one logical
/// distance call per (object, query vertex) pair.
pub fn brute_force_aknn(
    graph: &RoadGraph,
    objects: &[VertexId],
    queries: &[VertexId],
    k: usize,
    agg: AggregateFunction,
) -> Result<RankedOutput> {
    let start = Instant::now();
    check_input(graph, objects, queries, Some(k))?;
    let objects = distinct(objects);
    let tables: Vec<Vec<Dist>> = queries.iter().map(|&q| sssp(graph, q)).collect();
    let mut results = ResultSet::new(k, Ranking::Nearest);
    for &p in &objects {
        results.offer(Neighbor::new(p, agg.apply(tables.iter().map(|t| t[p as usize]))));
    }
    let stats = QueryStats {
        exact_distance_calls: (objects.len() * queries.len()) as u64,
        candidates_retrieved: objects.len() as u64,
        vertices_settled: (graph.vertex_count() * queries.len()) as u64,
        wall_time: start.elapsed(),
        ..QueryStats::default()
    };
    Ok(RankedOutput { neighbors: results.into_vec(), stats, trace: None })
}

pub fn brute_force_knn(graph: &RoadGraph, objects: &[VertexId], q: VertexId, k: usize) -> Result<RankedOutput> {
    brute_force_aknn(graph, objects, &[q], k, AggregateFunction::Max)
}

pub fn brute_force_kfn(graph: &RoadGraph, objects: &[VertexId], q: VertexId, k: usize) -> Result<RankedOutput> {
    let start = Instant::now();
    check_input(graph, objects, &[q], Some(k))?;
    let objects = distinct(objects);
    let table = sssp(graph, q);
    let mut results = ResultSet::new(k, Ranking::Farthest);
    for &p in &objects {
        results.offer(Neighbor::new(p, table[p as usize]));
    }
    let stats = QueryStats {
        exact_distance_calls: objects.len() as u64,
        candidates_retrieved: objects.len() as u64,
        vertices_settled: graph.vertex_count() as u64,
        wall_time: start.elapsed(),
        ..QueryStats::default()
    };
    Ok(RankedOutput { neighbors: results.into_vec(), stats, trace: None })
}

/// Ascending original ids within distance `r` of `q`.
pub fn brute_force_range(graph: &RoadGraph, objects: &[VertexId], q: VertexId, r: Dist) -> Result<Vec<VertexId>> {
    Ok(brute_force_range_with_stats(graph, objects, q, r)?.objects)
}

pub fn brute_force_range_with_stats(graph: &RoadGraph, objects: &[VertexId], q: VertexId, r: Dist) -> Result<RangeOutput> {
    let start = Instant::now();
    check_input(graph, objects, &[q], None)?;
    let objects = distinct(objects);
    let table = sssp(graph, q);
    let found = objects.iter().copied().filter(|&p| table[p as usize] <= r).collect();
    let stats = QueryStats {
        exact_distance_calls: objects.len() as u64,
        candidates_retrieved: objects.len() as u64,
        vertices_settled: graph.vertex_count() as u64,
        wall_time: start.elapsed(),
        ..QueryStats::default()
    };
    Ok(RangeOutput { objects: found, stats })
}

/// kFN over every object, visiting them by descending root-landmark upper
/// bound and skipping those that can no longer enter the result.
///
/// `objects` and `q` are original ids; `backend` must work on the SUL-Tree's
/// internal graph.
pub fn aub_kfn(
    objects: &[VertexId],
    sul: &SulTree,
    backend: &mut DistanceBackend<'_>,
    q: VertexId,
    k: usize,
) -> Result<RankedOutput> {
    let start = Instant::now();
    if k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    let n = sul.vertex_count();
    if let Some(&v) = objects.iter().chain([&q]).find(|&&v| v as usize >= n) {
        return Err(Error::config(format!("vertex {v} out of range")));
    }
    let settled_before = backend.vertices_settled();
    let query = QueryVertex::new(sul, sul.to_internal(q));
    let mut candidates: Vec<(Dist, VertexId)> =
        distinct(objects).into_iter().map(|p| (query.bracket(sul, sul.to_internal(p)).1, p)).collect();
    candidates.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut stats = QueryStats { candidates_retrieved: candidates.len() as u64, ..QueryStats::default() };
    let mut results = ResultSet::new(k, Ranking::Farthest);
    for &(ub, p) in &candidates {
        if !results.can_admit(ub, p) {
            if results.is_past(ub) {
                break;
            }
            continue;
        }
        stats.exact_distance_calls += 1;
        results.offer(Neighbor::new(p, backend.distance(query.vertex, sul.to_internal(p))));
    }
    stats.vertices_settled = backend.vertices_settled() - settled_before;
    stats.wall_time = start.elapsed();
    Ok(RankedOutput { neighbors: results.into_vec(), stats, trace: None })
}
