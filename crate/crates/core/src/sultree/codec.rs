//! `SULT` binary format. The graph itself is not stored; reading needs the
//! same (normalized) graph the tree was built from.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{relabel, LandmarkPolicy, SulNode, SulParams, SulTree};
use crate::graph::{RoadGraph, VertexId};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"SULT";
const VERSION: u32 = 1;
const NONE: u32 = u32::MAX;

pub(super) fn header_bytes(tree: &SulTree) -> Vec<u8> {
    let p = &tree.params;
    let mut out = Vec::with_capacity(48);
    out.write_u32::<LittleEndian>(p.b as u32).unwrap();
    out.write_u32::<LittleEndian>(p.alpha as u32).unwrap();
    out.write_u32::<LittleEndian>(p.m as u32).unwrap();
    out.write_u32::<LittleEndian>(p.m_root as u32).unwrap();
    out.write_u8(p.policy.tag()).unwrap();
    out.write_u64::<LittleEndian>(p.seed).unwrap();
    out.write_u32::<LittleEndian>(p.lazy_depth.unwrap_or(NONE)).unwrap();
    out.write_u8(p.border_restriction as u8).unwrap();
    out.write_u32::<LittleEndian>(tree.vertex_count() as u32).unwrap();
    out.write_u32::<LittleEndian>(tree.nodes.len() as u32).unwrap();
    out
}

pub fn write_sultree<W: Write>(tree: &SulTree, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(VERSION)?;
    out.write_all(&header_bytes(tree))?;
    for &v in &tree.to_internal {
        out.write_u32::<LittleEndian>(v)?;
    }
    for n in &tree.nodes {
        out.write_u32::<LittleEndian>(n.first)?;
        out.write_u32::<LittleEndian>(n.last)?;
        out.write_u32::<LittleEndian>(n.depth)?;
        out.write_u32::<LittleEndian>(n.parent.unwrap_or(NONE))?;
        out.write_u32::<LittleEndian>(n.children.len() as u32)?;
        for &c in &n.children {
            out.write_u32::<LittleEndian>(c)?;
        }
        out.write_u32::<LittleEndian>(n.landmark_count)?;
        out.write_u8(n.materialized as u8)?;
        if n.materialized {
            for &l in &n.landmarks {
                out.write_u32::<LittleEndian>(l)?;
            }
        }
        out.write_u64::<LittleEndian>(n.sdl_base as u64)?;
        out.write_u64::<LittleEndian>(n.settled)?;
    }
    out.write_u64::<LittleEndian>(tree.sdl.len() as u64)?;
    for &d in &tree.sdl {
        out.write_u32::<LittleEndian>(d)?;
    }
    Ok(())
}

struct Reader<R>(R);

impl<R: Read> Reader<R> {
    fn u8(&mut self) -> Result<u8> {
        self.0.read_u8().map_err(Error::from_read)
    }
    fn u32(&mut self) -> Result<u32> {
        self.0.read_u32::<LittleEndian>().map_err(Error::from_read)
    }
    fn u64(&mut self) -> Result<u64> {
        self.0.read_u64::<LittleEndian>().map_err(Error::from_read)
    }
}

/// Reads a tree written by [`write_sultree`]; `graph` is the graph in
/// original ids.
pub fn read_sultree<R: Read>(input: R, graph: &RoadGraph) -> Result<SulTree> {
    let mut r = Reader(input);
    let mut magic = [0u8; 4];
    r.0.read_exact(&mut magic).map_err(Error::from_read)?;
    if &magic != MAGIC {
        return Err(Error::format("bad magic: not a SUL-Tree file"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::format(format!("unsupported SUL-Tree format version {version}")));
    }
    let b = r.u32()? as usize;
    let alpha = r.u32()? as usize;
    let m = r.u32()? as usize;
    let m_root = r.u32()? as usize;
    let policy = LandmarkPolicy::from_tag(r.u8()?).ok_or_else(|| Error::format("unknown landmark policy tag"))?;
    let seed = r.u64()?;
    let lazy = r.u32()?;
    let border_restriction = r.u8()? != 0;
    let n = r.u32()? as usize;
    let node_count = r.u32()? as usize;
    if n != graph.vertex_count() {
        return Err(Error::format("SUL-Tree was built for a different graph"));
    }
    let mut to_internal = Vec::with_capacity(n);
    let mut to_original = vec![NONE; n];
    for old in 0..n {
        let new = r.u32()?;
        if new as usize >= n || to_original[new as usize] != NONE {
            return Err(Error::format("corrupt vertex permutation"));
        }
        to_original[new as usize] = old as VertexId;
        to_internal.push(new);
    }
    let mut nodes = Vec::with_capacity(node_count.min(1 << 20));
    for _ in 0..node_count {
        let first = r.u32()?;
        let last = r.u32()?;
        let depth = r.u32()?;
        let parent = r.u32()?;
        let child_count = r.u32()? as usize;
        let children = (0..child_count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let landmark_count = r.u32()?;
        let materialized = r.u8()? != 0;
        let landmarks = if materialized {
            (0..landmark_count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let sdl_base = r.u64()? as usize;
        let settled = r.u64()?;
        if first > last || last as usize > n || children.iter().any(|&c| c as usize >= node_count) {
            return Err(Error::format("corrupt SUL-Tree node table"));
        }
        nodes.push(SulNode {
            first,
            last,
            depth,
            parent: (parent != NONE).then_some(parent),
            children,
            landmarks,
            landmark_count,
            sdl_base,
            materialized,
            settled,
        });
    }
    let sdl_len = r.u64()? as usize;
    let expected: usize = nodes.iter().map(|n| n.landmark_count as usize * n.len()).sum();
    if sdl_len != expected || nodes.iter().any(|n| n.sdl_base + n.landmark_count as usize * n.len() > sdl_len) {
        return Err(Error::format("corrupt SDL store size"));
    }
    let mut sdl = Vec::with_capacity(sdl_len);
    for _ in 0..sdl_len {
        sdl.push(r.u32()?);
    }
    let params = SulParams {
        b,
        alpha,
        m,
        m_root,
        policy,
        seed,
        lazy_depth: (lazy != NONE).then_some(lazy),
        border_restriction,
        parallel: false,
        root_landmarks: None,
    };
    let internal = relabel(graph, &to_internal, &to_original)?;
    Ok(SulTree { params, graph: internal, to_internal, to_original, nodes, sdl })
}
