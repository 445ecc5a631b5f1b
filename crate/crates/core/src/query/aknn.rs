//! Aggregate k-nearest-neighbour search and its single-vertex form, kNN.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{
    aggregate_gap, check_k, check_tree, check_vertex, minimizing_index, AggregateFunction, ElementKind,
    Extraction, LeafStart, Neighbor, QueryOptions, Ranking, RankedOutput, ResultSet, Trace,
};
use crate::coltree::{ColTree, QueryVertex};
use crate::distoracle::DistanceBackend;
use crate::graph::{Dist, VertexId, INFINITY};
use crate::stats::QueryStats;
use crate::sultree::SulTree;
use crate::Result;

/// Queue element: `(key, kind, tie id, payload)`. The payload is an internal
/// object id, a node id or a cursor index depending on the kind.
type Element = (Dist, ElementKind, VertexId, u32);

struct Cursor {
    leaf: u32,
    odl: usize,
    /// `d(q_i, l)` for the chosen landmark.
    constants: Vec<Dist>,
    /// Next index on the left is `left - 1`; next on the right is `right`.
    left: usize,
    right: usize,
    last_left: Dist,
    last_right: Dist,
}

struct Search<'a, 'b> {
    col: &'a ColTree,
    sul: &'a SulTree,
    backend: &'a mut DistanceBackend<'b>,
    queries: Vec<QueryVertex>,
    agg: AggregateFunction,
    heap: BinaryHeap<Reverse<Element>>,
    cursors: Vec<Cursor>,
    results: ResultSet,
    stats: QueryStats,
    trace: Option<Trace>,
}

/// The `k` objects minimizing `agg` of the exact distances from `queries`.
/// Returns every object when `k` exceeds the object count.
pub fn aknn(
    col: &ColTree,
    sul: &SulTree,
    backend: &mut DistanceBackend<'_>,
    queries: &[VertexId],
    k: usize,
    agg: AggregateFunction,
) -> Result<RankedOutput> {
    aknn_with(col, sul, backend, queries, k, agg, &QueryOptions::default())
}

pub fn aknn_with(
    col: &ColTree,
    sul: &SulTree,
    backend: &mut DistanceBackend<'_>,
    queries: &[VertexId],
    k: usize,
    agg: AggregateFunction,
    opts: &QueryOptions,
) -> Result<RankedOutput> {
    let start = Instant::now();
    check_k(k)?;
    check_tree(col, sul)?;
    if queries.is_empty() {
        return Err(crate::Error::config("query set must not be empty"));
    }
    let queries = queries
        .iter()
        .map(|&q| check_vertex(sul, q).map(|v| QueryVertex::new(sul, v)))
        .collect::<Result<Vec<_>>>()?;
    let settled_before = backend.vertices_settled();
    let mut search = Search {
        col,
        sul,
        backend,
        queries,
        agg,
        heap: BinaryHeap::new(),
        cursors: Vec::new(),
        results: ResultSet::new(k, Ranking::Nearest),
        stats: QueryStats::default(),
        trace: opts.trace.then(Trace::default),
    };
    if !col.is_empty() {
        search.run();
    }
    let mut stats = search.stats;
    stats.vertices_settled = search.backend.vertices_settled() - settled_before;
    stats.wall_time = start.elapsed();
    Ok(RankedOutput { neighbors: search.results.into_vec(), stats, trace: search.trace })
}

/// The `k` objects nearest to `q`.
pub fn knn(
    col: &ColTree,
    sul: &SulTree,
    backend: &mut DistanceBackend<'_>,
    q: VertexId,
    k: usize,
) -> Result<RankedOutput> {
    knn_with(col, sul, backend, q, k, &QueryOptions::default())
}

pub fn knn_with(
    col: &ColTree,
    sul: &SulTree,
    backend: &mut DistanceBackend<'_>,
    q: VertexId,
    k: usize,
    opts: &QueryOptions,
) -> Result<RankedOutput> {
    aknn_with(col, sul, backend, &[q], k, AggregateFunction::Max, opts)
}

impl Search<'_, '_> {
    fn push(&mut self, e: Element) {
        self.stats.queue_operations += 1;
        self.heap.push(Reverse(e));
    }

    fn node_key(&self, node: u32) -> Dist {
        self.agg.apply(self.queries.iter().map(|q| self.col.node_bounds(self.sul, node, q).lb))
    }

    fn push_node(&mut self, node: u32, floor: Dist) {
        let key = self.node_key(node).max(floor);
        let n = self.col.node(node);
        if !self.results.can_admit(key, n.min_object_id) {
            return;
        }
        let kind = if n.is_leaf() { ElementKind::Leaf } else { ElementKind::Internal };
        self.push((key, kind, node, node));
    }

    fn run(&mut self) {
        self.push_node(0, 0);
        while let Some(Reverse((key, kind, tie, payload))) = self.heap.pop() {
            self.stats.queue_operations += 1;
            let min_id = match kind {
                ElementKind::Object => tie,
                ElementKind::LeafCursor => self.col.node(self.cursors[payload as usize].leaf).min_object_id,
                _ => self.col.node(payload).min_object_id,
            };
            if !self.results.can_admit(key, min_id) {
                if self.results.is_past(key) {
                    break;
                }
                continue;
            }
            let mut exact = None;
            match kind {
                ElementKind::Object => {
                    let score = self.exact_score(payload);
                    exact = Some(score);
                    self.results.offer(Neighbor::new(tie, score));
                }
                ElementKind::Internal => {
                    self.stats.nodes_visited += 1;
                    for i in 0..self.col.node(payload).children.len() {
                        let c = self.col.node(payload).children[i];
                        self.push_node(c, key);
                    }
                }
                ElementKind::Leaf => {
                    self.stats.nodes_visited += 1;
                    self.open_leaf(payload, key);
                }
                ElementKind::LeafCursor => self.advance(payload as usize, key),
            }
            if let Some(t) = self.trace.as_mut() {
                t.extractions.push(Extraction { key, kind, exact });
            }
        }
    }

    fn exact_score(&mut self, p: VertexId) -> Dist {
        self.stats.exact_distance_calls += self.queries.len() as u64;
        let backend = &mut *self.backend;
        self.agg.apply(self.queries.iter().map(|q| backend.distance(q.vertex, p)))
    }

    fn open_leaf(&mut self, leaf: u32, key: Dist) {
        let node = self.col.node(leaf);
        // Landmark with the largest summed lower bound to the query set,
        // the first one when none separates.
        let mut odl = 0;
        let mut best = 0;
        for (j, &l) in node.landmarks.iter().enumerate() {
            let total: Dist = self.queries.iter().map(|q| q.bracket(self.sul, l).0).sum();
            if total > best {
                best = total;
                odl = j;
            }
        }
        let landmark = node.landmarks[odl];
        self.stats.landmark_distance_calls += self.queries.len() as u64;
        let backend = &mut *self.backend;
        let constants: Vec<Dist> = self.queries.iter().map(|q| backend.distance(q.vertex, landmark)).collect();
        let list = &node.odls[odl];
        let start = minimizing_index(list, self.agg, &constants).expect("leaf ODLs are non-empty");
        let value = aggregate_gap(self.agg, list[start].dist as Dist, &constants);
        if let Some(t) = self.trace.as_mut() {
            let best = list.iter().map(|e| aggregate_gap(self.agg, e.dist as Dist, &constants)).min().unwrap();
            t.leaf_starts.push(LeafStart { leaf, index: start, value, best });
        }
        let id = self.cursors.len();
        self.cursors.push(Cursor {
            leaf,
            odl,
            constants,
            left: start,
            right: start + 1,
            last_left: value,
            last_right: value,
        });
        self.emit(id, start, key);
        self.advance(id, key);
    }

    /// Pushes the object at ODL `index` of cursor `id`, keyed by the best of
    /// its leaf-landmark and root-landmark bounds.
    fn emit(&mut self, id: usize, index: usize, floor: Dist) {
        let c = &self.cursors[id];
        let entry = self.col.node(c.leaf).odls[c.odl][index];
        let x = entry.dist as Dist;
        let key = self
            .agg
            .apply(self.queries.iter().zip(&c.constants).map(|(q, &cq)| x.abs_diff(cq).max(q.bracket(self.sul, entry.object).0)))
            .max(floor);
        self.stats.candidates_retrieved += 1;
        let original = self.sul.to_original(entry.object);
        if self.results.can_admit(key, original) {
            self.push((key, ElementKind::Object, original, entry.object));
        }
    }

    /// Emits cursor objects in ascending bound order while they are no worse
    /// than the queue minimum, then re-queues the cursor.
    fn advance(&mut self, id: usize, floor: Dist) {
        loop {
            let c = &self.cursors[id];
            let list = &self.col.node(c.leaf).odls[c.odl];
            let left = (c.left > 0).then(|| aggregate_gap(self.agg, list[c.left - 1].dist as Dist, &c.constants));
            let right = (c.right < list.len()).then(|| aggregate_gap(self.agg, list[c.right].dist as Dist, &c.constants));
            let (value, go_left) = match (left, right) {
                (None, None) => return,
                (Some(l), None) => (l, true),
                (None, Some(r)) => (r, false),
                (Some(l), Some(r)) => (l.min(r), l <= r),
            };
            if self.results.is_past(value) {
                return;
            }
            let queue_min = self.heap.peek().map_or(INFINITY, |e| e.0 .0);
            if value > queue_min {
                let leaf = c.leaf;
                self.push((value.max(floor), ElementKind::LeafCursor, leaf, id as u32));
                return;
            }
            let c = &mut self.cursors[id];
            let index = if go_left {
                if value < c.last_left {
                    self.trace.as_mut().map(|t| t.walk_violations += 1);
                }
                c.last_left = value;
                c.left -= 1;
                c.left
            } else {
                if value < c.last_right {
                    self.trace.as_mut().map(|t| t.walk_violations += 1);
                }
                c.last_right = value;
                c.right += 1;
                c.right - 1
            };
            self.emit(id, index, floor);
        }
    }
}
