//! k-farthest-neighbour search.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{check_k, check_tree, check_vertex, ElementKind, Extraction, Neighbor, QueryOptions, Ranking, RankedOutput, ResultSet, Trace};
use crate::coltree::{ColTree, QueryVertex};
use crate::distoracle::DistanceBackend;
use crate::graph::{Dist, VertexId};
use crate::stats::QueryStats;
use crate::sultree::SulTree;
use crate::Result;

/// Max-heap element: larger keys first, then lower kinds, then lower ids.
type Element = (Dist, Reverse<ElementKind>, Reverse<VertexId>, u32);

struct Cursor {
    leaf: u32,
    odl: usize,
    constant: Dist,
    /// Entries `[0, next)` are still to be emitted, walked from the end.
    next: usize,
}

struct Search<'a, 'b> {
    col: &'a ColTree,
    sul: &'a SulTree,
    backend: &'a mut DistanceBackend<'b>,
    query: QueryVertex,
    heap: BinaryHeap<Element>,
    cursors: Vec<Cursor>,
    results: ResultSet,
    stats: QueryStats,
    trace: Option<Trace>,
}

/// The `k` objects farthest from `q` by exact network distance.
pub fn kfn(col: &ColTree, sul: &SulTree, backend: &mut DistanceBackend<'_>, q: VertexId, k: usize) -> Result<RankedOutput> {
    kfn_with(col, sul, backend, q, k, &QueryOptions::default())
}

pub fn kfn_with(
    col: &ColTree,
    sul: &SulTree,
    backend: &mut DistanceBackend<'_>,
    q: VertexId,
    k: usize,
    opts: &QueryOptions,
) -> Result<RankedOutput> {
    let start = Instant::now();
    check_k(k)?;
    check_tree(col, sul)?;
    let query = QueryVertex::new(sul, check_vertex(sul, q)?);
    let settled_before = backend.vertices_settled();
    let mut search = Search {
        col,
        sul,
        backend,
        query,
        heap: BinaryHeap::new(),
        cursors: Vec::new(),
        results: ResultSet::new(k, Ranking::Farthest),
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

impl Search<'_, '_> {
    fn push(&mut self, key: Dist, kind: ElementKind, tie: VertexId, payload: u32) {
        self.stats.queue_operations += 1;
        self.heap.push((key, Reverse(kind), Reverse(tie), payload));
    }

    fn push_node(&mut self, node: u32, ceiling: Dist) {
        let key = self.col.node_bounds(self.sul, node, &self.query).ub.min(ceiling);
        let n = self.col.node(node);
        if !self.results.can_admit(key, n.min_object_id) {
            return;
        }
        let kind = if n.is_leaf() { ElementKind::Leaf } else { ElementKind::Internal };
        self.push(key, kind, n.min_object_id, node);
    }

    fn run(&mut self) {
        self.push_node(0, Dist::MAX);
        while let Some((key, Reverse(kind), Reverse(tie), payload)) = self.heap.pop() {
            self.stats.queue_operations += 1;
            if !self.results.can_admit(key, tie) {
                if self.results.is_past(key) {
                    break;
                }
                continue;
            }
            let mut exact = None;
            match kind {
                ElementKind::Object => {
                    self.stats.exact_distance_calls += 1;
                    let d = self.backend.distance(self.query.vertex, payload);
                    exact = Some(d);
                    self.results.offer(Neighbor::new(tie, d));
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

    fn open_leaf(&mut self, leaf: u32, key: Dist) {
        let node = self.col.node(leaf);
        // Landmark with the tightest upper bound to q.
        let mut odl = 0;
        let mut best = Dist::MAX;
        for (j, &l) in node.landmarks.iter().enumerate() {
            let ub = self.query.bracket(self.sul, l).1;
            if ub < best {
                best = ub;
                odl = j;
            }
        }
        self.stats.landmark_distance_calls += 1;
        let constant = self.backend.distance(self.query.vertex, node.landmarks[odl]);
        let id = self.cursors.len();
        self.cursors.push(Cursor { leaf, odl, constant, next: node.odls[odl].len() });
        self.advance(id, key);
    }

    /// Emits objects from the far end of the ODL while their bound is at
    /// least the queue maximum, then re-queues the cursor.
    fn advance(&mut self, id: usize, ceiling: Dist) {
        loop {
            let c = &self.cursors[id];
            if c.next == 0 {
                return;
            }
            let entry = self.col.node(c.leaf).odls[c.odl][c.next - 1];
            let value = (c.constant + entry.dist as Dist).min(ceiling);
            if self.results.is_past(value) {
                return;
            }
            if self.heap.peek().is_some_and(|top| value < top.0) {
                let leaf = self.col.node(c.leaf).min_object_id;
                self.push(value, ElementKind::LeafCursor, leaf, id as u32);
                return;
            }
            self.cursors[id].next -= 1;
            self.stats.candidates_retrieved += 1;
            let key = value.min(self.query.bracket(self.sul, entry.object).1);
            let original = self.sul.to_original(entry.object);
            if self.results.can_admit(key, original) {
                self.push(key, ElementKind::Object, original, entry.object);
            }
        }
    }
}
