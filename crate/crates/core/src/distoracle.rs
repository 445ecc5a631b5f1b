//! Exact point-to-point distance backends.
//!
//! Searches only produce candidates; exact scores come from one of these.
//! A backend owns its scratch space, so each thread needs its own instance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Dist, LandmarkTable, RoadGraph, VertexId, INFINITY};
use crate::sultree::SulTree;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BackendKind {
    #[default]
    BidirectionalDijkstra,
    /// A* guided by landmark lower bounds (ALT).
    AltAStar,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bidijkstra" | "bidirectional" => Ok(BackendKind::BidirectionalDijkstra),
            "alt" | "astar" => Ok(BackendKind::AltAStar),
            other => Err(Error::config(format!("unknown distance backend `{other}`"))),
        }
    }
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackendKind::BidirectionalDijkstra => "bidijkstra",
            BackendKind::AltAStar => "alt",
        })
    }
}

#[derive(Debug)]
struct Side {
    dist: Vec<Dist>,
    settled: Vec<bool>,
    touched: Vec<VertexId>,
    heap: BinaryHeap<Reverse<(Dist, VertexId)>>,
}

impl Side {
    fn new(n: usize) -> Self {
        Side { dist: vec![INFINITY; n], settled: vec![false; n], touched: Vec::new(), heap: BinaryHeap::new() }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = INFINITY;
            self.settled[v as usize] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    fn set(&mut self, v: VertexId, d: Dist, key: Dist) {
        if self.dist[v as usize] == INFINITY {
            self.touched.push(v);
        }
        self.dist[v as usize] = d;
        self.heap.push(Reverse((key, v)));
    }

    /// Smallest live key, dropping stale heap entries.
    fn top(&mut self) -> Dist {
        while let Some(&Reverse((_, v))) = self.heap.peek() {
            if self.settled[v as usize] {
                self.heap.pop();
            } else {
                break;
            }
        }
        self.heap.peek().map_or(INFINITY, |r| r.0 .0)
    }
}

#[derive(Debug)]
pub struct DistanceBackend<'a> {
    kind: BackendKind,
    graph: &'a RoadGraph,
    landmarks: Option<LandmarkTable<'a>>,
    forward: Side,
    backward: Side,
    distance_calls: u64,
    vertices_settled: u64,
}

impl<'a> DistanceBackend<'a> {
    pub fn bidirectional(graph: &'a RoadGraph) -> Self {
        Self::new(BackendKind::BidirectionalDijkstra, graph, None)
    }

    /// ALT A* with `landmarks` indexed in `graph`'s vertex ids.
    pub fn alt(graph: &'a RoadGraph, landmarks: LandmarkTable<'a>) -> Self {
        Self::new(BackendKind::AltAStar, graph, Some(landmarks))
    }

    /// Backend over the SUL-Tree's internal graph; ALT uses the root SDLs.
    pub fn for_sultree(sul: &'a SulTree, kind: BackendKind) -> Self {
        match kind {
            BackendKind::BidirectionalDijkstra => Self::bidirectional(sul.graph()),
            BackendKind::AltAStar => Self::alt(sul.graph(), sul.root_table()),
        }
    }

    fn new(kind: BackendKind, graph: &'a RoadGraph, landmarks: Option<LandmarkTable<'a>>) -> Self {
        let n = graph.vertex_count();
        DistanceBackend {
            kind,
            graph,
            landmarks,
            forward: Side::new(n),
            backward: Side::new(if kind == BackendKind::BidirectionalDijkstra { n } else { 0 }),
            distance_calls: 0,
            vertices_settled: 0,
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn graph(&self) -> &'a RoadGraph {
        self.graph
    }

    pub fn distance_calls(&self) -> u64 {
        self.distance_calls
    }

    pub fn vertices_settled(&self) -> u64 {
        self.vertices_settled
    }

    /// Exact `d(s, t)`.
    pub fn distance(&mut self, s: VertexId, t: VertexId) -> Dist {
        self.distance_calls += 1;
        if s == t {
            return 0;
        }
        match self.kind {
            BackendKind::BidirectionalDijkstra => self.bidirectional_search(s, t),
            BackendKind::AltAStar => self.alt_search(s, t),
        }
    }

    fn bidirectional_search(&mut self, s: VertexId, t: VertexId) -> Dist {
        let graph = self.graph;
        let (fw, bw) = (&mut self.forward, &mut self.backward);
        fw.reset();
        bw.reset();
        fw.set(s, 0, 0);
        bw.set(t, 0, 0);
        let mut best = INFINITY;
        loop {
            let (tf, tb) = (fw.top(), bw.top());
            if tf.saturating_add(tb) >= best || (tf == INFINITY && tb == INFINITY) {
                break;
            }
            let (this, other) = if tf <= tb { (&mut *fw, &*bw) } else { (&mut *bw, &*fw) };
            let Reverse((d, u)) = this.heap.pop().unwrap();
            this.settled[u as usize] = true;
            self.vertices_settled += 1;
            for (v, w) in graph.neighbors(u) {
                let nd = d + w;
                if nd < this.dist[v as usize] {
                    this.set(v, nd, nd);
                }
                let via = other.dist[v as usize];
                if via != INFINITY {
                    best = best.min(nd + via);
                }
            }
        }
        best
    }

    fn alt_search(&mut self, s: VertexId, t: VertexId) -> Dist {
        let graph = self.graph;
        let table = self.landmarks.expect("ALT backend without landmarks");
        let h = |v: VertexId| {
            (0..table.landmark_count()).map(|i| table.get(i, v).abs_diff(table.get(i, t))).max().unwrap_or(0)
        };
        let fw = &mut self.forward;
        fw.reset();
        fw.set(s, 0, h(s));
        while let Some(Reverse((_, u))) = fw.heap.pop() {
            if fw.settled[u as usize] {
                continue;
            }
            fw.settled[u as usize] = true;
            self.vertices_settled += 1;
            let d = fw.dist[u as usize];
            if u == t {
                return d;
            }
            for (v, w) in graph.neighbors(u) {
                let nd = d + w;
                if nd < fw.dist[v as usize] {
                    fw.set(v, nd, nd + h(v));
                }
            }
        }
        INFINITY
    }
}
