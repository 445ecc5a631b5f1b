//! COL-Tree: a SUL-Tree compacted over an object set.
//!
//! Leaves hold one Object Distance List (ODL) per landmark, sorted by
//! distance. Every node keeps, per own landmark and per root landmark, the
//! smallest and largest distance to any object below it. Subtrees without
//! objects are dropped and a node left with a single child is replaced by
//! that child.
//!
//! Object ids inside the tree are the SUL-Tree's internal ids.

mod codec;

use std::cell::Cell;

pub use codec::{read_coltree, write_coltree};

use crate::bounds::{interval_gap, relaxed_interval_gap};
use crate::graph::{Dist, VertexId, INFINITY};
use crate::sultree::SulTree;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OdlEntry {
    pub dist: u32,
    /// Internal vertex id.
    pub object: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColNode {
    /// SUL-Tree node this node was taken from.
    pub sul_node: u32,
    pub children: Vec<u32>,
    /// Internal ids of the SUL node's landmarks.
    pub landmarks: Vec<VertexId>,
    /// `(M-, M+)` per landmark.
    pub bounds: Vec<(Dist, Dist)>,
    /// `(MR-, MR+)` per root landmark.
    pub root_bounds: Vec<(Dist, Dist)>,
    pub object_count: u32,
    /// Smallest original id of any object below this node.
    pub min_object_id: VertexId,
    /// One ODL per landmark; empty for internal nodes.
    pub odls: Vec<Vec<OdlEntry>>,
}

impl ColNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Lower and upper bound on the distance from a query vertex to every
/// object of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeBounds {
    pub lb: Dist,
    pub ub: Dist,
}

/// Work done by a build: SDL reads and ODL sort comparisons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildWork {
    pub sdl_lookups: u64,
    pub sort_comparisons: u64,
}

impl BuildWork {
    pub fn total(&self) -> u64 {
        self.sdl_lookups + self.sort_comparisons
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColTree {
    lambda: usize,
    sul_identity: u64,
    root_landmarks: usize,
    /// Pre-order; the root is node 0 when the tree is non-empty.
    nodes: Vec<ColNode>,
    object_count: usize,
    work: BuildWork,
}

impl ColTree {
    /// Builds a COL-Tree over `objects` (original vertex ids). Every SUL node
    /// the objects fall into must be materialized.
    pub fn build(sul: &SulTree, objects: &[VertexId], lambda: usize) -> Result<ColTree> {
        if lambda == 0 {
            return Err(Error::config("lambda must be at least 1"));
        }
        let n = sul.vertex_count();
        let mut internal = Vec::with_capacity(objects.len());
        for &p in objects {
            if p as usize >= n {
                return Err(Error::config(format!("object {p} out of range")));
            }
            internal.push(sul.to_internal(p));
        }
        internal.sort_unstable();
        internal.dedup();
        let mut builder = Builder { sul, lambda, nodes: Vec::new(), work: BuildWork::default() };
        if !internal.is_empty() {
            builder.build_node(0, &internal)?;
        }
        Ok(ColTree {
            lambda,
            sul_identity: sul.identity(),
            root_landmarks: sul.root_landmark_count(),
            nodes: builder.nodes,
            object_count: internal.len(),
            work: builder.work,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn object_count(&self) -> usize {
        self.object_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ColNode] {
        &self.nodes
    }

    pub fn node(&self, id: u32) -> &ColNode {
        &self.nodes[id as usize]
    }

    pub fn sul_identity(&self) -> u64 {
        self.sul_identity
    }

    pub fn build_work(&self) -> BuildWork {
        self.work
    }

    pub fn height(&self) -> usize {
        fn depth(t: &ColTree, id: u32) -> usize {
            1 + t.node(id).children.iter().map(|&c| depth(t, c)).max().unwrap_or(0)
        }
        if self.is_empty() {
            0
        } else {
            depth(self, 0)
        }
    }

    /// Internal ids of every object below `node`.
    pub fn objects_under(&self, node: u32, out: &mut Vec<VertexId>) {
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            let n = self.node(id);
            match n.odls.first() {
                Some(odl) => out.extend(odl.iter().map(|e| e.object)),
                None => stack.extend(n.children.iter().rev()),
            }
        }
    }

    /// Lower bound on `d(q, p)` for every object `p` of `node`.
    ///
    /// `landmark_bounds[i]` brackets `d(l_i, q)` for the node's own landmarks
    /// and `root_dists[j]` is the exact `d(l_R_j, q)`.
    pub fn node_lower_bound(&self, node: u32, landmark_bounds: &[(Dist, Dist)], root_dists: &[Dist]) -> Dist {
        let n = self.node(node);
        let own = n
            .bounds
            .iter()
            .zip(landmark_bounds)
            .map(|(&(lo, hi), &(lb, ub))| relaxed_interval_gap(lb, ub, lo, hi))
            .max()
            .unwrap_or(0);
        let root = n.root_bounds.iter().zip(root_dists).map(|(&(lo, hi), &d)| interval_gap(d, lo, hi)).max().unwrap_or(0);
        own.max(root)
    }

    /// Upper bound on `d(q, p)` for every object `p` of `node`, from upper
    /// bounds on `d(l_i, q)` and the exact root-landmark distances.
    pub fn node_upper_bound(&self, node: u32, landmark_ub: &[Dist], root_dists: &[Dist]) -> Dist {
        let n = self.node(node);
        let own = n.bounds.iter().zip(landmark_ub).map(|(&(_, hi), &ub)| ub.saturating_add(hi)).min().unwrap_or(INFINITY);
        let root = n.root_bounds.iter().zip(root_dists).map(|(&(_, hi), &d)| d + hi).min().unwrap_or(INFINITY);
        own.min(root)
    }

    /// Both bounds for query vertex `q` (internal id), deriving the landmark
    /// brackets from the SUL-Tree root.
    pub fn node_bounds(&self, sul: &SulTree, node: u32, q: &QueryVertex) -> NodeBounds {
        let n = self.node(node);
        let brackets: Vec<(Dist, Dist)> = n.landmarks.iter().map(|&l| q.bracket(sul, l)).collect();
        let ubs: Vec<Dist> = brackets.iter().map(|b| b.1).collect();
        NodeBounds {
            lb: self.node_lower_bound(node, &brackets, &q.root),
            ub: self.node_upper_bound(node, &ubs, &q.root),
        }
    }
}

/// A query vertex with its root-landmark distances cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryVertex {
    /// Internal id.
    pub vertex: VertexId,
    pub root: Vec<Dist>,
}

impl QueryVertex {
    pub fn new(sul: &SulTree, vertex: VertexId) -> Self {
        QueryVertex { vertex, root: (0..sul.root_landmark_count()).map(|i| sul.root_dist(i, vertex)).collect() }
    }

    /// `(LB, UB)` on `d(v, q)` from the root landmarks.
    pub fn bracket(&self, sul: &SulTree, v: VertexId) -> (Dist, Dist) {
        let mut lb = 0;
        let mut ub = INFINITY;
        for (i, &dq) in self.root.iter().enumerate() {
            let dv = sul.root_dist(i, v);
            lb = lb.max(dq.abs_diff(dv));
            ub = ub.min(dq + dv);
        }
        (lb, ub)
    }
}

/// Index of the ODL entry whose distance is closest to `target_x2 / 2`;
/// equidistant neighbours resolve to the smaller index. Targets are passed
/// doubled so half-integral values stay exact.
pub fn odl_min_index(odl: &[OdlEntry], target_x2: Dist) -> Result<usize> {
    if odl.is_empty() {
        return Err(Error::config("empty ODL"));
    }
    let at = odl.partition_point(|e| 2 * (e.dist as Dist) < target_x2);
    if at == 0 {
        return Ok(0);
    }
    // First entry carrying the value just below the target.
    let below_at = odl.partition_point(|e| e.dist < odl[at - 1].dist);
    if at == odl.len() {
        return Ok(below_at);
    }
    let below = target_x2 - 2 * odl[at - 1].dist as Dist;
    let above = 2 * odl[at].dist as Dist - target_x2;
    Ok(if below <= above { below_at } else { at })
}

struct Builder<'a> {
    sul: &'a SulTree,
    lambda: usize,
    nodes: Vec<ColNode>,
    work: BuildWork,
}

impl Builder<'_> {
    /// `objects` are sorted internal ids inside SUL node `sul_id`. Returns the
    /// id of the created node.
    fn build_node(&mut self, sul_id: u32, objects: &[VertexId]) -> Result<u32> {
        let sul = self.sul;
        let sn = sul.node(sul_id);
        if !sn.is_leaf() && objects.len() > self.lambda {
            let mut parts = Vec::new();
            let mut rest = objects;
            for &c in &sn.children {
                let end = rest.partition_point(|&p| p < sul.node(c).last);
                if end > 0 {
                    parts.push((c, &rest[..end]));
                }
                rest = &rest[end..];
            }
            if parts.len() == 1 {
                return self.build_node(parts[0].0, parts[0].1);
            }
            if !sn.materialized {
                return Err(Error::SdlNotMaterialized(sul_id));
            }
            let id = self.nodes.len() as u32;
            let bounds = self.landmark_bounds(sul_id, objects);
            self.nodes.push(ColNode {
                sul_node: sul_id,
                children: Vec::new(),
                landmarks: sn.landmarks.clone(),
                bounds,
                root_bounds: Vec::new(),
                object_count: objects.len() as u32,
                min_object_id: VertexId::MAX,
                odls: Vec::new(),
            });
            let mut children = Vec::with_capacity(parts.len());
            for (c, part) in parts {
                children.push(self.build_node(c, part)?);
            }
            let mut root_bounds = vec![(INFINITY, 0); sul.root_landmark_count()];
            let mut min_id = VertexId::MAX;
            for &c in &children {
                let child = &self.nodes[c as usize];
                for (acc, &(lo, hi)) in root_bounds.iter_mut().zip(&child.root_bounds) {
                    *acc = (acc.0.min(lo), acc.1.max(hi));
                }
                min_id = min_id.min(child.min_object_id);
            }
            let node = &mut self.nodes[id as usize];
            node.children = children;
            node.root_bounds = root_bounds;
            node.min_object_id = min_id;
            return Ok(id);
        }
        if !sn.materialized {
            return Err(Error::SdlNotMaterialized(sul_id));
        }
        let comparisons = Cell::new(0u64);
        let mut odls = Vec::with_capacity(sn.landmarks.len());
        for i in 0..sn.landmarks.len() {
            let row = sul.sdl_row(sul_id, i)?;
            let mut odl: Vec<OdlEntry> =
                objects.iter().map(|&p| OdlEntry { dist: row[(p - sn.first) as usize], object: p }).collect();
            odl.sort_unstable_by(|a, b| {
                comparisons.set(comparisons.get() + 1);
                a.cmp(b)
            });
            odls.push(odl);
        }
        self.work.sdl_lookups += (objects.len() * sn.landmarks.len()) as u64;
        self.work.sort_comparisons += comparisons.get();
        let bounds = odls.iter().map(|o| (o[0].dist as Dist, o[o.len() - 1].dist as Dist)).collect();
        let root_bounds = (0..sul.root_landmark_count())
            .map(|j| {
                objects.iter().fold((INFINITY, 0), |(lo, hi), &p| {
                    let d = sul.root_dist(j, p);
                    (lo.min(d), hi.max(d))
                })
            })
            .collect();
        self.work.sdl_lookups += (objects.len() * sul.root_landmark_count()) as u64;
        let id = self.nodes.len() as u32;
        self.nodes.push(ColNode {
            sul_node: sul_id,
            children: Vec::new(),
            landmarks: sn.landmarks.clone(),
            bounds,
            root_bounds,
            object_count: objects.len() as u32,
            min_object_id: objects.iter().map(|&p| sul.to_original(p)).min().unwrap(),
            odls,
        });
        Ok(id)
    }

    fn landmark_bounds(&mut self, sul_id: u32, objects: &[VertexId]) -> Vec<(Dist, Dist)> {
        let sn = self.sul.node(sul_id);
        self.work.sdl_lookups += (objects.len() * sn.landmarks.len()) as u64;
        (0..sn.landmarks.len())
            .map(|i| {
                objects.iter().fold((INFINITY, 0), |(lo, hi), &p| {
                    let d = self.sul.sdl(sul_id, i, p);
                    (lo.min(d), hi.max(d))
                })
            })
            .collect()
    }
}
