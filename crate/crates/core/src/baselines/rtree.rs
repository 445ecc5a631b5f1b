//! Sort-tile-recursive packed R-tree over object coordinates.

use crate::graph::{Point, RoadGraph, VertexId};
use crate::{Error, Result};

pub const DEFAULT_LEAF_CAPACITY: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mbr {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Mbr {
    pub fn of_point(p: Point) -> Self {
        Mbr { min_x: p.x, min_y: p.y, max_x: p.x, max_y: p.y }
    }

    pub fn union(self, o: Mbr) -> Self {
        Mbr {
            min_x: self.min_x.min(o.min_x),
            min_y: self.min_y.min(o.min_y),
            max_x: self.max_x.max(o.max_x),
            max_y: self.max_y.max(o.max_y),
        }
    }

    pub fn contains(&self, o: &Mbr) -> bool {
        self.min_x <= o.min_x && self.min_y <= o.min_y && self.max_x >= o.max_x && self.max_y >= o.max_y
    }

    /// Euclidean distance from `p` to the nearest point of the rectangle.
    pub fn mindist(&self, p: Point) -> f64 {
        let dx = (self.min_x - p.x).max(0.0).max(p.x - self.max_x);
        let dy = (self.min_y - p.y).max(0.0).max(p.y - self.max_y);
        dx.hypot(dy)
    }

    fn center(&self) -> Point {
        Point::new((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RtreeEntries {
    Leaf(Vec<(VertexId, Point)>),
    Inner(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RtreeNode {
    pub mbr: Mbr,
    pub entries: RtreeEntries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrRtree {
    capacity: usize,
    nodes: Vec<RtreeNode>,
    root: Option<u32>,
    len: usize,
}

/// Orders `items` into tiles of at most `capacity` using sort-tile-recursive
/// slicing on the key points.
fn tile<T>(mut items: Vec<T>, capacity: usize, key: impl Fn(&T) -> Point) -> Vec<Vec<T>> {
    let pages = items.len().div_ceil(capacity);
    let slabs = (pages as f64).sqrt().ceil().max(1.0) as usize;
    let per_slab = slabs * capacity;
    items.sort_by(|a, b| key(a).x.total_cmp(&key(b).x));
    let mut out = Vec::with_capacity(pages);
    let mut rest = items;
    while !rest.is_empty() {
        let tail = rest.split_off(per_slab.min(rest.len()));
        let mut slab = std::mem::replace(&mut rest, tail);
        slab.sort_by(|a, b| key(a).y.total_cmp(&key(b).y));
        while !slab.is_empty() {
            let tail = slab.split_off(capacity.min(slab.len()));
            out.push(std::mem::replace(&mut slab, tail));
        }
    }
    out
}

impl StrRtree {
    /// Packs the distinct `objects` (original ids) of a graph with coordinates.
    pub fn build(graph: &RoadGraph, objects: &[VertexId], capacity: usize) -> Result<Self> {
        let coords = graph.coordinates().ok_or_else(|| Error::Unsupported("R-tree requires vertex coordinates".into()))?;
        if capacity < 2 {
            return Err(Error::config("R-tree capacity must be at least 2"));
        }
        let mut ids = objects.to_vec();
        ids.sort_unstable();
        ids.dedup();
        if let Some(&v) = ids.iter().find(|&&v| v as usize >= coords.len()) {
            return Err(Error::config(format!("vertex {v} out of range")));
        }
        let len = ids.len();
        let mut nodes = Vec::new();
        if ids.is_empty() {
            return Ok(StrRtree { capacity, nodes, root: None, len });
        }
        let points: Vec<(VertexId, Point)> = ids.iter().map(|&v| (v, coords[v as usize])).collect();
        let mut level: Vec<u32> = Vec::new();
        for page in tile(points, capacity, |e| e.1) {
            let mbr = page.iter().map(|e| Mbr::of_point(e.1)).reduce(Mbr::union).unwrap();
            level.push(nodes.len() as u32);
            nodes.push(RtreeNode { mbr, entries: RtreeEntries::Leaf(page) });
        }
        while level.len() > 1 {
            let centers: Vec<(u32, Point)> = level.iter().map(|&i| (i, nodes[i as usize].mbr.center())).collect();
            let mut next = Vec::new();
            for page in tile(centers, capacity, |e| e.1) {
                let children: Vec<u32> = page.iter().map(|e| e.0).collect();
                let mbr = children.iter().map(|&c| nodes[c as usize].mbr).reduce(Mbr::union).unwrap();
                next.push(nodes.len() as u32);
                nodes.push(RtreeNode { mbr, entries: RtreeEntries::Inner(children) });
            }
            level = next;
        }
        Ok(StrRtree { capacity, nodes, root: Some(level[0]), len })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn root(&self) -> Option<u32> {
        self.root
    }

    pub fn node(&self, id: u32) -> &RtreeNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[RtreeNode] {
        &self.nodes
    }
}
