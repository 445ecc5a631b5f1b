//! SUL-Tree: a recursive partition of the road network whose nodes carry
//! local landmarks and Subgraph Distance Lists (SDLs).
//!
//! Vertices are renumbered so that every node covers a contiguous id range
//! (`first..last`). The tree owns a copy of the graph in that numbering; all
//! node, landmark and SDL methods use it. [`SulTree::to_internal`] and
//! [`SulTree::to_original`] convert to and from the caller's ids.
//!
//! SDLs live in one flat `u32` array. The row of landmark `i` of node `n`
//! starts at `n.sdl_base + i * n.len()` and holds `d(l_i, v)` at offset
//! `v - n.first`; no vertex ids are stored.

mod codec;
mod landmarks;

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use codec::{read_sultree, write_sultree};
pub use landmarks::{LandmarkPolicy, MINMAX_SAMPLE};

use crate::graph::{
    border_restricted_dijkstra, subgraph_dijkstra, BorderContext, Dist, LandmarkTable, Point, RoadGraph,
    SearchScratch, VertexId, INFINITY,
};
use crate::partition::{recursive_partition_with, DefaultPartitioner, PartitionTree, Partitioner};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SulParams {
    /// Branching factor; a power of two for the default partitioner.
    pub b: usize,
    /// Maximum leaf size.
    pub alpha: usize,
    /// Landmarks per non-root node.
    pub m: usize,
    /// Landmarks at the root.
    pub m_root: usize,
    pub policy: LandmarkPolicy,
    pub seed: u64,
    /// Nodes at this depth or deeper get their SDLs only on demand
    /// ([`SulTree::materialize_for_objects`]). Must be at least 1.
    pub lazy_depth: Option<u32>,
    /// Use the border-restricted search for non-root SDLs.
    pub border_restriction: bool,
    /// Compute the nodes of one level concurrently.
    pub parallel: bool,
    /// Root landmarks in original ids, overriding the policy.
    pub root_landmarks: Option<Vec<VertexId>>,
}

impl Default for SulParams {
    fn default() -> Self {
        SulParams {
            b: 8,
            alpha: 1024,
            m: 2,
            m_root: 16,
            policy: LandmarkPolicy::Random,
            seed: 0,
            lazy_depth: None,
            border_restriction: true,
            parallel: false,
            root_landmarks: None,
        }
    }
}

impl SulParams {
    fn validate(&self) -> Result<()> {
        if self.alpha < self.b {
            return Err(Error::config("alpha must be at least b"));
        }
        if self.m == 0 || self.m_root == 0 {
            return Err(Error::config("landmark counts must be at least 1"));
        }
        if self.lazy_depth == Some(0) {
            return Err(Error::config("the root SDLs cannot be lazy"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SulNode {
    pub first: VertexId,
    pub last: VertexId,
    pub depth: u32,
    pub parent: Option<u32>,
    pub children: Vec<u32>,
    /// Empty until the node is materialized.
    pub landmarks: Vec<VertexId>,
    pub landmark_count: u32,
    pub sdl_base: usize,
    pub materialized: bool,
    /// Vertices settled while computing this node's SDLs.
    pub settled: u64,
}

impl SulNode {
    pub fn range(&self) -> Range<VertexId> {
        self.first..self.last
    }

    pub fn len(&self) -> usize {
        (self.last - self.first) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.first == self.last
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.first <= v && v < self.last
    }
}

#[derive(Clone, Debug)]
pub struct SulTree {
    params: SulParams,
    graph: RoadGraph,
    to_internal: Vec<VertexId>,
    to_original: Vec<VertexId>,
    nodes: Vec<SulNode>,
    sdl: Vec<u32>,
}

/// Builds a SUL-Tree with the default partitioner.
pub fn build_sultree(graph: &RoadGraph, params: &SulParams) -> Result<SulTree> {
    SulTree::build_with(&DefaultPartitioner, graph, params)
}

/// Renumbers vertices so that each partition-tree node is a contiguous range.
/// Returns `(to_internal, ranges)` with `ranges` indexed like `tree.nodes`.
pub fn assign_subgraph_order(tree: &PartitionTree, vertex_count: usize) -> (Vec<VertexId>, Vec<Range<VertexId>>) {
    let mut to_internal = vec![0; vertex_count];
    let mut ranges = vec![0..0; tree.nodes.len()];
    let mut next = 0;
    assign(tree, 0, &mut next, &mut to_internal, &mut ranges);
    (to_internal, ranges)
}

fn assign(
    tree: &PartitionTree,
    node: usize,
    next: &mut VertexId,
    to_internal: &mut [VertexId],
    ranges: &mut [Range<VertexId>],
) {
    let start = *next;
    let n = &tree.nodes[node];
    if n.children.is_empty() {
        for &v in &n.vertices {
            to_internal[v as usize] = *next;
            *next += 1;
        }
    } else {
        for &c in &n.children {
            assign(tree, c, next, to_internal, ranges);
        }
    }
    ranges[node] = start..*next;
}

struct BuildCtx<'a> {
    graph: &'a RoadGraph,
    coords: Option<&'a [Point]>,
    policy: LandmarkPolicy,
    seed: u64,
    restrict: bool,
}

struct NodeOutput {
    landmarks: Vec<VertexId>,
    rows: Vec<u32>,
    settled: u64,
}

fn node_rng(seed: u64, node: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (node as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

impl BuildCtx<'_> {
    /// Chooses `m` landmarks for a node and computes their SDLs. `root` is
    /// `None` for the root itself.
    fn compute_node(
        &self,
        node: usize,
        range: Range<VertexId>,
        m: usize,
        root: Option<&LandmarkTable<'_>>,
        fixed: Option<&[VertexId]>,
        scratch: &mut SearchScratch,
    ) -> Result<NodeOutput> {
        let mut rng = node_rng(self.seed, node);
        let mut border_ctx = root.map(|r| BorderContext::new(self.graph, range.clone(), r));
        let borders: Vec<VertexId> = border_ctx.as_ref().map(|c| c.borders.clone()).unwrap_or_default();
        let len = range.len();
        let mut settled = 0u64;

        let mut search = |source: VertexId, ctx: Option<&BorderContext>, out: &mut [Dist]| -> u64 {
            match (root, ctx) {
                (Some(r), Some(c)) if self.restrict => {
                    border_restricted_dijkstra(self.graph, source, range.clone(), c, r, scratch, out, None) as u64
                }
                _ => subgraph_dijkstra(self.graph, source, range.clone(), scratch, out) as u64,
            }
        };

        let mut chosen: Vec<VertexId> = match (fixed, self.policy) {
            (Some(f), _) => f.to_vec(),
            (None, LandmarkPolicy::Random) => landmarks::random(range.clone(), m, &mut rng),
            (None, LandmarkPolicy::SliceFurthestBorder) => {
                landmarks::slice(self.coords, range.clone(), &borders, m, &mut rng)?
            }
            (None, LandmarkPolicy::BorderMinmax) => {
                let ctx = border_ctx.clone();
                landmarks::border_minmax(range.clone(), &borders, m, &mut rng, &mut |s, out| {
                    search(s, ctx.as_ref(), out);
                })
            }
            // Chosen one at a time below, interleaved with the SDL searches.
            (None, LandmarkPolicy::FurthestBorder) => Vec::new(),
        };

        let mut rows: Vec<Vec<Dist>> = Vec::with_capacity(m);
        let furthest = fixed.is_none() && self.policy == LandmarkPolicy::FurthestBorder;
        if furthest {
            use rand::seq::SliceRandom;
            if let Some(&start) = borders.choose(&mut rng) {
                chosen.push(start);
            }
        }
        let mut i = 0;
        while i < m {
            if furthest && i == chosen.len() {
                match landmarks::next_furthest_border(&borders, range.start, &chosen, &rows) {
                    Some(b) => chosen.push(b),
                    None => landmarks::pad_random(&mut chosen, range.clone(), m, &mut rng),
                }
            }
            let mut row = vec![0; len];
            settled += search(chosen[i], border_ctx.as_ref(), &mut row);
            if let Some(c) = border_ctx.as_mut() {
                if c.intra_ub.is_none() {
                    c.intra_ub = row.iter().max().map(|&d| d.saturating_mul(2));
                }
            }
            rows.push(row);
            i += 1;
        }

        let mut flat = Vec::with_capacity(m * len);
        for row in rows {
            for d in row {
                flat.push(u32::try_from(d).map_err(|_| Error::config("distance exceeds the 32-bit SDL range"))?);
            }
        }
        Ok(NodeOutput { landmarks: chosen, rows: flat, settled })
    }
}

impl SulTree {
    pub fn build_with<P: Partitioner + ?Sized>(partitioner: &P, graph: &RoadGraph, params: &SulParams) -> Result<SulTree> {
        params.validate()?;
        let n = graph.vertex_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(fixed) = &params.root_landmarks {
            if fixed.is_empty() || fixed.iter().any(|&v| v as usize >= n) {
                return Err(Error::config("root landmark override out of range"));
            }
        }
        let partition = recursive_partition_with(partitioner, graph, params.b, params.alpha)?;
        let (to_internal, ranges) = assign_subgraph_order(&partition, n);
        let mut to_original = vec![0; n];
        for (old, &new) in to_internal.iter().enumerate() {
            to_original[new as usize] = old as VertexId;
        }
        let internal_graph = relabel(graph, &to_internal, &to_original)?;

        let mut nodes = Vec::with_capacity(partition.nodes.len());
        let mut sdl_len = 0usize;
        for (id, (p, range)) in partition.nodes.iter().zip(&ranges).enumerate() {
            let len = range.len();
            let m = match (id, &params.root_landmarks) {
                (0, Some(fixed)) => fixed.len(),
                (0, None) => params.m_root.min(len),
                _ => params.m.min(len),
            };
            nodes.push(SulNode {
                first: range.start,
                last: range.end,
                depth: p.depth,
                parent: None,
                children: p.children.iter().map(|&c| c as u32).collect(),
                landmarks: Vec::new(),
                landmark_count: m as u32,
                sdl_base: sdl_len,
                materialized: false,
                settled: 0,
            });
            sdl_len += m * len;
        }
        for id in 0..nodes.len() {
            for c in nodes[id].children.clone() {
                nodes[c as usize].parent = Some(id as u32);
            }
        }
        let mut tree = SulTree {
            params: params.clone(),
            graph: internal_graph,
            to_internal,
            to_original,
            nodes,
            sdl: vec![0; sdl_len],
        };
        let eager: Vec<u32> = (0..tree.nodes.len() as u32)
            .filter(|&id| params.lazy_depth.is_none_or(|d| tree.nodes[id as usize].depth < d))
            .collect();
        tree.materialize_nodes(&eager)?;
        Ok(tree)
    }

    /// Computes SDLs for the given nodes (root first, then level by level).
    fn materialize_nodes(&mut self, ids: &[u32]) -> Result<()> {
        let mut pending: Vec<u32> = ids.iter().copied().filter(|&id| !self.nodes[id as usize].materialized).collect();
        pending.sort_by_key(|&id| (self.nodes[id as usize].depth, id));
        pending.dedup();
        if pending.is_empty() {
            return Ok(());
        }
        if !self.nodes[0].materialized {
            let fixed: Option<Vec<VertexId>> =
                self.params.root_landmarks.as_ref().map(|f| f.iter().map(|&v| self.to_internal[v as usize]).collect());
            let ctx = self.build_ctx();
            let mut scratch = SearchScratch::new(self.graph.vertex_count());
            let m = self.nodes[0].landmark_count as usize;
            let out = ctx.compute_node(0, self.nodes[0].range(), m, None, fixed.as_deref(), &mut scratch)?;
            self.store(0, out);
        }
        let rest: Vec<u32> = pending.into_iter().filter(|&id| id != 0).collect();
        let outputs: Vec<(u32, Result<NodeOutput>)> = {
            let ctx = self.build_ctx();
            let root = self.root_table();
            let nodes = &self.nodes;
            let n = self.graph.vertex_count();
            let job = |scratch: &mut SearchScratch, id: u32| {
                let node = &nodes[id as usize];
                (id, ctx.compute_node(id as usize, node.range(), node.landmark_count as usize, Some(&root), None, scratch))
            };
            // Non-root nodes only depend on the root SDLs, so all of them
            // form one level-barrier round.
            if self.params.parallel {
                rest.par_iter().map_init(|| SearchScratch::new(n), |s, &id| job(s, id)).collect()
            } else {
                let mut scratch = SearchScratch::new(n);
                rest.iter().map(|&id| job(&mut scratch, id)).collect()
            }
        };
        for (id, out) in outputs {
            self.store(id as usize, out?);
        }
        Ok(())
    }

    fn build_ctx(&self) -> BuildCtx<'_> {
        BuildCtx {
            graph: &self.graph,
            coords: self.graph.coordinates(),
            policy: self.params.policy,
            seed: self.params.seed,
            restrict: self.params.border_restriction,
        }
    }

    fn store(&mut self, id: usize, out: NodeOutput) {
        let node = &mut self.nodes[id];
        self.sdl[node.sdl_base..node.sdl_base + out.rows.len()].copy_from_slice(&out.rows);
        node.landmarks = out.landmarks;
        node.settled = out.settled;
        node.materialized = true;
    }

    /// Computes the SDLs of every lazy node on the path from the root to
    /// each object (internal ids).
    pub fn materialize_for_objects(&mut self, objects: &[VertexId]) -> Result<()> {
        let mut wanted = Vec::new();
        for &p in objects {
            if p as usize >= self.graph.vertex_count() {
                return Err(Error::config(format!("object {p} out of range")));
            }
            let mut id = 0u32;
            loop {
                wanted.push(id);
                let node = &self.nodes[id as usize];
                match node.children.iter().find(|&&c| self.nodes[c as usize].contains(p)) {
                    Some(&c) => id = c,
                    None => break,
                }
            }
        }
        self.materialize_nodes(&wanted)
    }

    /// Landmarks the tree's policy picks for `node` when asked for `m` of
    /// them (internal ids).
    pub fn select_landmarks(&self, node: u32, m: usize) -> Result<Vec<VertexId>> {
        let n = &self.nodes[node as usize];
        if m > n.len() {
            return Err(Error::config("m exceeds subgraph size"));
        }
        let root = (node != 0).then(|| self.root_table());
        let mut scratch = SearchScratch::new(self.graph.vertex_count());
        let out = self.build_ctx().compute_node(node as usize, n.range(), m, root.as_ref(), None, &mut scratch)?;
        Ok(out.landmarks)
    }

    pub fn params(&self) -> &SulParams {
        &self.params
    }

    /// The graph in the tree's internal numbering.
    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn nodes(&self) -> &[SulNode] {
        &self.nodes
    }

    pub fn node(&self, id: u32) -> &SulNode {
        &self.nodes[id as usize]
    }

    pub fn root(&self) -> &SulNode {
        &self.nodes[0]
    }

    pub fn height(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    #[inline]
    pub fn to_internal(&self, v: VertexId) -> VertexId {
        self.to_internal[v as usize]
    }

    #[inline]
    pub fn to_original(&self, v: VertexId) -> VertexId {
        self.to_original[v as usize]
    }

    pub fn permutation(&self) -> &[VertexId] {
        &self.to_internal
    }

    /// The flat SDL store.
    pub fn sdl_store(&self) -> &[u32] {
        &self.sdl
    }

    /// SDL row of landmark `i` of `node`.
    pub fn sdl_row(&self, node: u32, i: usize) -> Result<&[u32]> {
        let n = &self.nodes[node as usize];
        if !n.materialized {
            return Err(Error::SdlNotMaterialized(node));
        }
        let start = n.sdl_base + i * n.len();
        Ok(&self.sdl[start..start + n.len()])
    }

    /// `d(l_i, v)` for landmark `i` of a materialized node containing `v`.
    #[inline]
    pub fn sdl(&self, node: u32, i: usize, v: VertexId) -> Dist {
        let n = &self.nodes[node as usize];
        debug_assert!(n.materialized && n.contains(v));
        self.sdl[n.sdl_base + i * n.len() + (v - n.first) as usize] as Dist
    }

    pub fn root_landmark_count(&self) -> usize {
        self.nodes[0].landmark_count as usize
    }

    /// `d(l_R_i, v)` for root landmark `i`.
    #[inline]
    pub fn root_dist(&self, i: usize, v: VertexId) -> Dist {
        self.sdl[i * self.graph.vertex_count() + v as usize] as Dist
    }

    pub fn root_table(&self) -> LandmarkTable<'_> {
        let n = self.graph.vertex_count();
        LandmarkTable::new(&self.sdl[..self.root_landmark_count() * n], n)
    }

    /// Landmark lower bound `max_l |d(l,u) - d(l,v)|` over root landmarks.
    pub fn root_point_lb(&self, u: VertexId, v: VertexId) -> Dist {
        (0..self.root_landmark_count()).map(|i| self.root_dist(i, u).abs_diff(self.root_dist(i, v))).max().unwrap_or(0)
    }

    /// Landmark upper bound `min_l d(l,u) + d(l,v)` over root landmarks.
    pub fn root_point_ub(&self, u: VertexId, v: VertexId) -> Dist {
        (0..self.root_landmark_count()).map(|i| self.root_dist(i, u) + self.root_dist(i, v)).min().unwrap_or(INFINITY)
    }

    /// Border set and root-landmark border bounds of a node.
    pub fn border_context(&self, node: u32) -> BorderContext {
        BorderContext::new(&self.graph, self.nodes[node as usize].range(), &self.root_table())
    }

    /// Deepest node containing `v`.
    pub fn leaf_of(&self, v: VertexId) -> u32 {
        let mut id = 0u32;
        while let Some(&c) = self.nodes[id as usize].children.iter().find(|&&c| self.nodes[c as usize].contains(v)) {
            id = c;
        }
        id
    }

    /// Ratio of vertices settled to SDL entries computed, over materialized
    /// nodes; 1 is ideal.
    pub fn gamma(&self) -> f64 {
        let (settled, entries) = self
            .nodes
            .iter()
            .filter(|n| n.materialized)
            .fold((0u64, 0u64), |(s, e), n| (s + n.settled, e + n.landmark_count as u64 * n.len() as u64));
        settled as f64 / entries.max(1) as f64
    }

    /// Bytes of the SDL store versus the same entries stored as
    /// `(vertex id, distance)` pairs.
    pub fn sdl_size_comparison(&self) -> (usize, usize) {
        let entries = self.sdl.len();
        (entries * std::mem::size_of::<u32>(), entries * (std::mem::size_of::<VertexId>() + std::mem::size_of::<u32>()))
    }

    /// Stable fingerprint of the numbering, parameters and landmarks.
    pub fn identity(&self) -> u64 {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(codec::header_bytes(self));
        for &v in &self.to_internal {
            h.update(v.to_le_bytes());
        }
        for n in &self.nodes {
            for &l in &n.landmarks {
                h.update(l.to_le_bytes());
            }
        }
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }
}

fn relabel(graph: &RoadGraph, to_internal: &[VertexId], to_original: &[VertexId]) -> Result<RoadGraph> {
    let arcs = graph.arcs().map(|(u, v, w)| (to_internal[u as usize], to_internal[v as usize], w));
    let mut g = RoadGraph::from_arcs(graph.vertex_count(), arcs)?;
    if let Some(coords) = graph.coordinates() {
        g.set_coordinates(to_original.iter().map(|&old| coords[old as usize]).collect())?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{grid, p5};
    use crate::graph::sssp;
    use proptest::prelude::*;

    fn small(b: usize, alpha: usize, m: usize, m_root: usize, policy: LandmarkPolicy) -> SulParams {
        SulParams { b, alpha, m, m_root, policy, seed: 7, ..SulParams::default() }
    }

    fn check_sdls(g: &RoadGraph, tree: &SulTree) {
        for (id, node) in tree.nodes().iter().enumerate() {
            assert_eq!(node.landmarks.len(), node.landmark_count as usize);
            for (i, &l) in node.landmarks.iter().enumerate() {
                assert!(node.contains(l));
                let oracle = sssp(g, tree.to_original(l));
                let row = tree.sdl_row(id as u32, i).unwrap();
                for v in node.range() {
                    assert_eq!(row[(v - node.first) as usize] as Dist, oracle[tree.to_original(v) as usize]);
                }
            }
        }
    }

    #[test]
    fn p5_root_sdl_is_path_sums() {
        let params = SulParams { root_landmarks: Some(vec![0]), alpha: 8, b: 2, ..SulParams::default() };
        let tree = build_sultree(&p5(), &params).unwrap();
        assert_eq!(tree.nodes().len(), 1);
        assert_eq!(tree.sdl_row(0, 0).unwrap(), &[0, 2, 5, 6, 10]);
        assert_eq!(tree.root_point_lb(2, 4), 5);
        assert_eq!(tree.root_point_ub(2, 4), 15);
        assert_eq!(tree.root_point_lb(3, 3), 0);
    }

    #[test]
    fn single_leaf_has_identity_order() {
        let tree = build_sultree(&p5(), &small(2, 8, 2, 3, LandmarkPolicy::Random)).unwrap();
        assert_eq!(tree.permutation(), &[0, 1, 2, 3, 4]);
        assert_eq!(tree.root().range(), 0..5);
        assert_eq!(tree.root().landmark_count, 3);
        assert_eq!(tree.gamma(), 1.0);
    }

    #[test]
    fn figure_one_shape() {
        let tree = build_sultree(&grid(11, 2), &small(2, 6, 2, 4, LandmarkPolicy::Random)).unwrap();
        assert_eq!(tree.nodes().len(), 7);
        assert_eq!(tree.height(), 2);
        assert_eq!(tree.node(0).range(), 0..22);
        assert_eq!(tree.node(1).range(), 0..11);
        assert_eq!(tree.node(3).range(), 0..6);
        assert_eq!(tree.node(4).range(), 6..11);
    }

    #[test]
    fn grid_sdls_match_oracle_for_every_policy() {
        let g = grid(12, 10);
        for policy in [
            LandmarkPolicy::Random,
            LandmarkPolicy::FurthestBorder,
            LandmarkPolicy::SliceFurthestBorder,
            LandmarkPolicy::BorderMinmax,
        ] {
            let tree = build_sultree(&g, &small(4, 10, 2, 4, policy)).unwrap();
            check_sdls(&g, &tree);
            let expected: usize = tree.nodes().iter().map(|n| n.landmark_count as usize * n.len()).sum();
            assert_eq!(tree.sdl_store().len(), expected);
            assert!(tree.gamma() >= 1.0);
        }
    }

    #[test]
    fn landmark_counts_clamp_to_tiny_leaves() {
        let tree = build_sultree(&grid(3, 3), &small(8, 8, 2, 16, LandmarkPolicy::FurthestBorder)).unwrap();
        assert_eq!(tree.root().landmark_count, 9);
        assert!(tree.nodes()[1..].iter().all(|n| n.landmark_count as usize == n.len().min(2)));
        check_sdls(&grid(3, 3), &tree);
    }

    #[test]
    fn select_landmarks_rejects_oversized_m() {
        let tree = build_sultree(&p5(), &small(2, 8, 2, 2, LandmarkPolicy::Random)).unwrap();
        assert_eq!(tree.select_landmarks(0, 6).unwrap_err().to_string(), "m exceeds subgraph size");
        assert_eq!(tree.select_landmarks(0, 2).unwrap(), tree.root().landmarks);
    }

    #[test]
    fn furthest_border_on_split_p5() {
        // 0..2 / 3..4 split with alpha = 3: the borders are 2 and 3.
        let tree = build_sultree(&p5(), &small(2, 3, 1, 2, LandmarkPolicy::FurthestBorder)).unwrap();
        assert_eq!(tree.node(1).range(), 0..3);
        assert_eq!(tree.border_context(1).borders, vec![2]);
        assert_eq!(tree.border_context(2).borders, vec![3]);
        assert_eq!(tree.node(1).landmarks, vec![2]);
        assert_eq!(tree.node(2).landmarks, vec![3]);
        let tree = build_sultree(&p5(), &small(2, 3, 2, 2, LandmarkPolicy::FurthestBorder)).unwrap();
        assert_eq!(tree.node(1).landmarks[0], 2);
    }

    #[test]
    fn slice_requires_coordinates() {
        let err = build_sultree(&p5(), &small(2, 3, 2, 2, LandmarkPolicy::SliceFurthestBorder)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn restriction_settles_no_more_than_plain() {
        let g = grid(20, 20);
        let restricted = build_sultree(&g, &small(4, 16, 2, 4, LandmarkPolicy::Random)).unwrap();
        let plain =
            build_sultree(&g, &SulParams { border_restriction: false, ..small(4, 16, 2, 4, LandmarkPolicy::Random) })
                .unwrap();
        assert_eq!(restricted.sdl_store(), plain.sdl_store());
        for (a, b) in restricted.nodes().iter().zip(plain.nodes()) {
            assert!(a.settled <= b.settled);
        }
        assert!(restricted.gamma() < plain.gamma());
    }

    #[test]
    fn parallel_build_is_identical() {
        let g = grid(16, 16);
        let base = small(4, 12, 2, 4, LandmarkPolicy::BorderMinmax);
        let a = build_sultree(&g, &base).unwrap();
        let b = build_sultree(&g, &SulParams { parallel: true, ..base }).unwrap();
        assert_eq!(a.sdl_store(), b.sdl_store());
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.identity(), b.identity());
    }

    #[test]
    fn lazy_nodes_materialize_on_demand() {
        let g = grid(16, 16);
        let params = SulParams { lazy_depth: Some(2), ..small(4, 12, 2, 4, LandmarkPolicy::Random) };
        let mut tree = build_sultree(&g, &params).unwrap();
        let deep = tree.nodes().iter().position(|n| n.depth == 2).unwrap() as u32;
        assert!(matches!(tree.sdl_row(deep, 0), Err(Error::SdlNotMaterialized(id)) if id == deep));
        let v = tree.node(deep).first;
        tree.materialize_for_objects(&[v]).unwrap();
        assert!(tree.node(deep).materialized);
        let eager = build_sultree(&g, &SulParams { lazy_depth: None, ..params }).unwrap();
        assert_eq!(tree.sdl_row(deep, 0).unwrap(), eager.sdl_row(deep, 0).unwrap());
    }

    #[test]
    fn id_free_store_is_half_a_pair_store() {
        let tree = build_sultree(&grid(10, 10), &small(4, 10, 2, 4, LandmarkPolicy::Random)).unwrap();
        let (flat, pairs) = tree.sdl_size_comparison();
        assert!(flat * 100 <= pairs * 55);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ranges_nest_and_bounds_sandwich(w in 3u32..12, h in 3u32..12, seed in 0u64..1000, pairs in prop::collection::vec((0u32..144, 0u32..144), 20)) {
            let g = grid(w, h);
            let n = g.vertex_count() as u32;
            let tree = build_sultree(&g, &SulParams { seed, ..small(2, 6, 2, 3, LandmarkPolicy::Random) }).unwrap();
            for node in tree.nodes() {
                if !node.is_leaf() {
                    let mut at = node.first;
                    for &c in &node.children {
                        prop_assert_eq!(tree.node(c).first, at);
                        at = tree.node(c).last;
                    }
                    prop_assert_eq!(at, node.last);
                }
            }
            for (u, v) in pairs {
                let (u, v) = (u % n, v % n);
                let d = sssp(tree.graph(), u)[v as usize];
                prop_assert!(tree.root_point_lb(u, v) <= d);
                prop_assert!(d <= tree.root_point_ub(u, v));
            }
        }
    }
}
