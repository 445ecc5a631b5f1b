//! Road-network storage and the shortest-path primitives built on it.

mod codec;
mod dijkstra;
mod dimacs;

use std::collections::BTreeMap;
use std::io::Write;

pub use codec::{read_graph, write_graph};
pub use dijkstra::{
    border_restricted_dijkstra, dijkstra_multi_target, sssp, subgraph_dijkstra, BorderContext,
    LandmarkTable, MultiTarget, SearchScratch,
};
pub use dimacs::{parse_dimacs_co, parse_dimacs_gr};

use crate::{Error, Result};

pub type VertexId = u32;
/// Network distance in the metric units of the edge weights.
pub type Dist = u64;
pub const INFINITY: Dist = Dist::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn euclid(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Weighted graph in compressed adjacency form.
///
/// Graphs coming straight from a parser may be asymmetric or disconnected;
/// [`RoadGraph::normalize`] produces the symmetric, connected form every index
/// in this crate expects.
#[derive(Clone, Debug, PartialEq)]
pub struct RoadGraph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<Dist>,
    coords: Option<Vec<Point>>,
    max_speed: Option<f64>,
}

/// Result of [`RoadGraph::normalize`].
#[derive(Clone, Debug)]
pub struct Normalized {
    pub graph: RoadGraph,
    /// Indexed by original id; `None` for vertices outside the kept component.
    pub old_to_new: Vec<Option<VertexId>>,
    pub new_to_old: Vec<VertexId>,
}

impl Normalized {
    /// Writes the `old new` id map, one pair per line, for kept vertices only.
    pub fn write_id_map<W: Write>(&self, mut out: W) -> Result<()> {
        for (new, &old) in self.new_to_old.iter().enumerate() {
            writeln!(out, "{old} {new}")?;
        }
        Ok(())
    }
}

impl RoadGraph {
    /// Builds a graph from directed arcs. Parallel arcs keep their smallest
    /// weight and self-loops are dropped.
    pub fn from_arcs<I>(vertex_count: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Dist)>,
    {
        let mut best: BTreeMap<(VertexId, VertexId), Dist> = BTreeMap::new();
        for (u, v, w) in arcs {
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(Error::config(format!("arc ({u},{v}) references a vertex out of range")));
            }
            if w == 0 {
                return Err(Error::config(format!("arc ({u},{v}) has zero weight")));
            }
            if u == v {
                continue;
            }
            best.entry((u, v)).and_modify(|x| *x = (*x).min(w)).or_insert(w);
        }
        let mut offsets = vec![0usize; vertex_count + 1];
        for &(u, _) in best.keys() {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        // BTreeMap iteration is sorted by (u, v), so each row is already in place.
        let targets = best.keys().map(|&(_, v)| v).collect();
        let weights = best.values().copied().collect();
        Ok(RoadGraph { offsets, targets, weights, coords: None, max_speed: None })
    }

    /// Builds a symmetric graph from undirected edges.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Dist)>,
    {
        let arcs: Vec<_> = edges.into_iter().flat_map(|(u, v, w)| [(u, v, w), (v, u, w)]).collect();
        Self::from_arcs(vertex_count, arcs)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored arcs (twice the edge count for symmetric graphs).
    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, Dist)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, Dist)> + '_ {
        (0..self.vertex_count() as VertexId).flat_map(move |u| self.neighbors(u).map(move |(v, w)| (u, v, w)))
    }

    pub fn coordinates(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn has_coordinates(&self) -> bool {
        self.coords.is_some()
    }

    /// Largest euclidean-length-to-weight ratio over edges of non-zero length.
    pub fn max_speed(&self) -> Option<f64> {
        self.max_speed
    }

    /// Attaches per-vertex coordinates and recomputes the maximum speed.
    pub fn set_coordinates(&mut self, coords: Vec<Point>) -> Result<()> {
        if coords.len() != self.vertex_count() {
            return Err(Error::config("coordinate count mismatch"));
        }
        self.coords = Some(coords);
        self.max_speed = self.compute_max_speed();
        Ok(())
    }

    fn compute_max_speed(&self) -> Option<f64> {
        let coords = self.coords.as_ref()?;
        self.arcs()
            .filter_map(|(u, v, w)| {
                let len = coords[u as usize].euclid(coords[v as usize]);
                (len > 0.0).then(|| len / w as f64)
            })
            .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v, w)| self.neighbors(v).any(|(x, wx)| x == u && wx == w))
    }

    /// Symmetrizes (keeping the smaller weight of opposing arcs), restricts to
    /// the largest connected component and re-densifies ids in ascending
    /// original order. Equal-size components are resolved in favour of the one
    /// holding the smallest original id.
    pub fn normalize(&self) -> Result<Normalized> {
        let n = self.vertex_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let sym = Self::from_arcs(n, self.arcs().flat_map(|(u, v, w)| [(u, v, w), (v, u, w)]))?;
        let (component, sizes) = sym.components();
        // Components are numbered in order of their smallest vertex, so the
        // first maximum wins ties.
        let keep = sizes.iter().enumerate().fold(0, |best, (c, &s)| if s > sizes[best] { c } else { best });

        let mut old_to_new = vec![None; n];
        let mut new_to_old = Vec::with_capacity(sizes[keep]);
        for v in 0..n {
            if component[v] == keep {
                old_to_new[v] = Some(new_to_old.len() as VertexId);
                new_to_old.push(v as VertexId);
            }
        }
        let arcs = sym.arcs().filter_map(|(u, v, w)| {
            Some((old_to_new[u as usize]?, old_to_new[v as usize]?, w))
        });
        let mut graph = Self::from_arcs(new_to_old.len(), arcs.collect::<Vec<_>>())?;
        if let Some(coords) = &self.coords {
            graph.set_coordinates(new_to_old.iter().map(|&o| coords[o as usize]).collect())?;
        }
        Ok(Normalized { graph, old_to_new, new_to_old })
    }

    /// Component label per vertex and component sizes; labels follow the
    /// order of each component's smallest vertex.
    fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            let mut size = 0;
            label[start] = c;
            stack.push(start as VertexId);
            while let Some(u) = stack.pop() {
                size += 1;
                for (v, _) in self.neighbors(u) {
                    if label[v as usize] == usize::MAX {
                        label[v as usize] = c;
                        stack.push(v);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components().1.len() == 1
    }

    /// Euclidean distance divided by the maximum speed, floored so that it
    /// never exceeds the network distance.
    pub fn euclidean_lower_bound(&self, u: VertexId, v: VertexId) -> Result<Dist> {
        let coords = self
            .coords
            .as_ref()
            .ok_or_else(|| Error::Unsupported("euclidean bound requires coordinates".into()))?;
        Ok(self.euclid_to_lower_bound(coords[u as usize].euclid(coords[v as usize])))
    }

    /// Converts a euclidean length (coordinate units) into an admissible
    /// network-distance lower bound.
    pub fn euclid_to_lower_bound(&self, euclid: f64) -> Dist {
        match self.max_speed {
            Some(speed) if euclid > 0.0 => floor_admissible(euclid / speed),
            _ => 0,
        }
    }

    /// Double-sweep diameter estimate starting at vertex 0.
    pub fn approximate_diameter(&self) -> Dist {
        if self.vertex_count() == 0 {
            return 0;
        }
        let first = sssp(self, 0);
        let far = farthest(&first);
        let second = sssp(self, far);
        second[farthest(&second) as usize]
    }
}

fn farthest(dist: &[Dist]) -> VertexId {
    let mut best = 0;
    for (v, &d) in dist.iter().enumerate() {
        if d != INFINITY && d > dist[best] {
            best = v;
        }
    }
    best as VertexId
}

/// Floors a real-valued bound that is mathematically `<=` some integer
/// distance. The slack absorbs floating-point error in the division so exact
/// ties are not rounded down a whole unit.
fn floor_admissible(x: f64) -> Dist {
    (x * (1.0 + 1e-12) + 1e-9).floor().max(0.0) as Dist
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Path 0-1-2-3-4 with weights 2, 3, 1, 4.
    pub fn p5() -> RoadGraph {
        RoadGraph::from_edges(5, [(0, 1, 2), (1, 2, 3), (2, 3, 1), (3, 4, 4)]).unwrap()
    }

    pub fn grid(w: u32, h: u32) -> RoadGraph {
        let id = |x: u32, y: u32| y * w + x;
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    edges.push((id(x, y), id(x + 1, y), 1 + ((x * 7 + y * 13) % 5) as Dist));
                }
                if y + 1 < h {
                    edges.push((id(x, y), id(x, y + 1), 1 + ((x * 3 + y * 11) % 7) as Dist));
                }
            }
        }
        let mut g = RoadGraph::from_edges((w * h) as usize, edges).unwrap();
        g.set_coordinates((0..h).flat_map(|y| (0..w).map(move |x| Point::new(x as f64, y as f64))).collect())
            .unwrap();
        g
    }
}
