//! Dijkstra variants: full single-source, multi-target, and the
//! border-restricted subgraph search used while computing SDLs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use super::{Dist, RoadGraph, VertexId, INFINITY};
use crate::bounds::interval_gap;

/// Reusable per-search state. Only touched entries are reset between runs.
#[derive(Debug)]
pub struct SearchScratch {
    dist: Vec<Dist>,
    key: Vec<Dist>,
    settled: Vec<bool>,
    touched: Vec<VertexId>,
    // (key, class, vertex); class orders subgraph vertices before external ones
    // on equal keys.
    heap: BinaryHeap<Reverse<(Dist, u8, VertexId)>>,
}

impl SearchScratch {
    pub fn new(vertex_count: usize) -> Self {
        SearchScratch {
            dist: vec![INFINITY; vertex_count],
            key: vec![INFINITY; vertex_count],
            settled: vec![false; vertex_count],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = INFINITY;
            self.key[v as usize] = INFINITY;
            self.settled[v as usize] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    #[inline]
    fn improve(&mut self, v: VertexId, dist: Dist, key: Dist, class: u8) {
        if self.dist[v as usize] == INFINITY {
            self.touched.push(v);
        }
        self.dist[v as usize] = dist;
        self.key[v as usize] = key;
        self.heap.push(Reverse((key, class, v)));
    }

    /// Pops the next live entry, marking it settled.
    #[inline]
    fn pop(&mut self) -> Option<(Dist, VertexId)> {
        while let Some(Reverse((key, _, v))) = self.heap.pop() {
            if self.settled[v as usize] || key != self.key[v as usize] {
                continue;
            }
            self.settled[v as usize] = true;
            return Some((key, v));
        }
        None
    }
}

/// Distances from one source to every vertex.
pub fn sssp(graph: &RoadGraph, source: VertexId) -> Vec<Dist> {
    let mut scratch = SearchScratch::new(graph.vertex_count());
    scratch.improve(source, 0, 0, 0);
    while let Some((d, u)) = scratch.pop() {
        relax_plain(graph, &mut scratch, u, d);
    }
    scratch.dist
}

#[inline]
fn relax_plain(graph: &RoadGraph, scratch: &mut SearchScratch, u: VertexId, d: Dist) {
    for (v, w) in graph.neighbors(u) {
        let nd = d + w;
        if !scratch.settled[v as usize] && nd < scratch.dist[v as usize] {
            scratch.improve(v, nd, nd, 0);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiTarget {
    /// Distances aligned with the requested targets.
    pub distances: Vec<Dist>,
    pub settled: usize,
}

/// Dijkstra from `source` that stops once every target is settled. The
/// search expands any vertex, so paths may leave and re-enter the target set.
pub fn dijkstra_multi_target(graph: &RoadGraph, source: VertexId, targets: &[VertexId]) -> MultiTarget {
    let n = graph.vertex_count();
    let mut is_target = vec![false; n];
    let mut remaining = 0usize;
    for &t in targets {
        if !is_target[t as usize] {
            is_target[t as usize] = true;
            remaining += 1;
        }
    }
    let mut scratch = SearchScratch::new(n);
    let mut settled = 0;
    scratch.improve(source, 0, 0, 0);
    while remaining > 0 {
        let (d, u) = scratch.pop().expect("target unreachable: graph must be connected");
        settled += 1;
        if is_target[u as usize] {
            remaining -= 1;
        }
        relax_plain(graph, &mut scratch, u, d);
    }
    MultiTarget { distances: targets.iter().map(|&t| scratch.dist[t as usize]).collect(), settled }
}

/// Multi-target Dijkstra whose targets are the contiguous id range `range`.
/// Writes `out[v - range.start] = d(source, v)` and returns the number of
/// settled vertices.
pub fn subgraph_dijkstra(
    graph: &RoadGraph,
    source: VertexId,
    range: Range<VertexId>,
    scratch: &mut SearchScratch,
    out: &mut [Dist],
) -> usize {
    debug_assert_eq!(out.len(), range.len());
    scratch.reset();
    let mut remaining = range.len();
    let mut settled = 0;
    scratch.improve(source, 0, 0, 0);
    while remaining > 0 {
        let (d, u) = scratch.pop().expect("subgraph vertex unreachable: graph must be connected");
        settled += 1;
        if range.contains(&u) {
            out[(u - range.start) as usize] = d;
            remaining -= 1;
        }
        relax_plain(graph, scratch, u, d);
    }
    settled
}

/// Row-major landmark distance table: row `i` holds `d(l_i, v)` for every
/// vertex `v` of the table's id space.
#[derive(Clone, Copy, Debug)]
pub struct LandmarkTable<'a> {
    rows: &'a [u32],
    stride: usize,
}

impl<'a> LandmarkTable<'a> {
    pub fn new(rows: &'a [u32], stride: usize) -> Self {
        assert!(stride > 0 && rows.len() % stride == 0);
        LandmarkTable { rows, stride }
    }

    pub fn landmark_count(&self) -> usize {
        self.rows.len() / self.stride
    }

    #[inline]
    pub fn get(&self, landmark: usize, v: VertexId) -> Dist {
        self.rows[landmark * self.stride + v as usize] as Dist
    }
}

/// Border set of a subgraph and the root-landmark distance ranges over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderContext {
    /// Subgraph vertices with at least one neighbour outside the subgraph.
    pub borders: Vec<VertexId>,
    /// Per root landmark, `(min, max)` distance to any border.
    pub bounds: Vec<(Dist, Dist)>,
    /// Upper bound on the distance between any two subgraph vertices, once
    /// known (twice the largest SDL entry of an already-computed landmark of
    /// the same subgraph).
    pub intra_ub: Option<Dist>,
}

impl BorderContext {
    pub fn new(graph: &RoadGraph, range: Range<VertexId>, root: &LandmarkTable<'_>) -> Self {
        let borders: Vec<VertexId> =
            range.clone().filter(|&v| graph.neighbors(v).any(|(u, _)| !range.contains(&u))).collect();
        let bounds = (0..root.landmark_count())
            .map(|i| {
                borders.iter().fold((INFINITY, 0), |(lo, hi), &b| {
                    let d = root.get(i, b);
                    (lo.min(d), hi.max(d))
                })
            })
            .collect();
        BorderContext { borders, bounds, intra_ub: None }
    }

    /// Lower bound from an external vertex to the nearest border.
    #[inline]
    fn border_lb(&self, root: &LandmarkTable<'_>, v: VertexId) -> Dist {
        self.bounds.iter().enumerate().map(|(i, &(lo, hi))| interval_gap(root.get(i, v), lo, hi)).max().unwrap_or(0)
    }

    /// Upper bound on the distance from `source` to any border.
    fn source_ub(&self, root: &LandmarkTable<'_>, source: VertexId) -> Dist {
        let via_root = self
            .bounds
            .iter()
            .enumerate()
            .map(|(i, &(_, hi))| root.get(i, source).saturating_add(hi))
            .min()
            .unwrap_or(INFINITY);
        self.intra_ub.map_or(via_root, |intra| via_root.min(intra))
    }
}

/// Subgraph SDL search that prunes external vertices which cannot lie on a
/// shortest path re-entering the subgraph.
///
/// Every shortest path that leaves the subgraph re-enters through a border,
/// so an external vertex `v` is useful only if `d(s,v) + LB(v,B)` does not
/// exceed an upper bound on `d(s,b)` for all borders `b`. External vertices
/// are keyed by `d(s,v) + LB(v,B)` (monotonized with pathmax) and subgraph
/// vertices by `d(s,v)`; the search stops once the whole range is settled.
/// Output is identical to [`subgraph_dijkstra`].
///
/// When `keys` is given, the key of every settled vertex is appended in
/// extraction order.
#[allow(clippy::too_many_arguments)]
pub fn border_restricted_dijkstra(
    graph: &RoadGraph,
    source: VertexId,
    range: Range<VertexId>,
    ctx: &BorderContext,
    root: &LandmarkTable<'_>,
    scratch: &mut SearchScratch,
    out: &mut [Dist],
    mut keys: Option<&mut Vec<Dist>>,
) -> usize {
    debug_assert!(range.contains(&source));
    debug_assert_eq!(out.len(), range.len());
    scratch.reset();
    let ub = ctx.source_ub(root, source);
    let mut remaining = range.len();
    let mut settled = 0;
    scratch.improve(source, 0, 0, 0);
    while remaining > 0 {
        let (key, u) = scratch.pop().expect("subgraph vertex unreachable: graph must be connected");
        settled += 1;
        if let Some(keys) = keys.as_deref_mut() {
            keys.push(key);
        }
        let du = scratch.dist[u as usize];
        if range.contains(&u) {
            out[(u - range.start) as usize] = du;
            remaining -= 1;
        }
        for (v, w) in graph.neighbors(u) {
            let nd = du + w;
            if scratch.settled[v as usize] || nd >= scratch.dist[v as usize] {
                continue;
            }
            if range.contains(&v) {
                scratch.improve(v, nd, nd.max(key), 0);
            } else {
                let f = (nd + ctx.border_lb(root, v)).max(key);
                if f <= ub {
                    scratch.improve(v, nd, f, 1);
                }
            }
        }
    }
    settled
}
