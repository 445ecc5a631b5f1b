//! `COLT` binary format. The header carries the identity of the SUL-Tree the
//! COL-Tree was built from; reading against any other SUL-Tree fails.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{BuildWork, ColNode, ColTree, OdlEntry};
use crate::graph::Dist;
use crate::sultree::SulTree;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"COLT";
const VERSION: u32 = 1;

fn write_dist<W: Write>(out: &mut W, d: Dist) -> std::io::Result<()> {
    out.write_u64::<LittleEndian>(d)
}

pub fn write_coltree<W: Write>(tree: &ColTree, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(VERSION)?;
    out.write_u64::<LittleEndian>(tree.sul_identity)?;
    out.write_u64::<LittleEndian>(tree.lambda as u64)?;
    out.write_u64::<LittleEndian>(tree.object_count as u64)?;
    out.write_u32::<LittleEndian>(tree.root_landmarks as u32)?;
    out.write_u64::<LittleEndian>(tree.work.sdl_lookups)?;
    out.write_u64::<LittleEndian>(tree.work.sort_comparisons)?;
    out.write_u32::<LittleEndian>(tree.nodes.len() as u32)?;
    for n in &tree.nodes {
        out.write_u32::<LittleEndian>(n.sul_node)?;
        out.write_u32::<LittleEndian>(n.children.len() as u32)?;
        for &c in &n.children {
            out.write_u32::<LittleEndian>(c)?;
        }
        out.write_u32::<LittleEndian>(n.landmarks.len() as u32)?;
        for (&l, &(lo, hi)) in n.landmarks.iter().zip(&n.bounds) {
            out.write_u32::<LittleEndian>(l)?;
            write_dist(&mut out, lo)?;
            write_dist(&mut out, hi)?;
        }
        for &(lo, hi) in &n.root_bounds {
            write_dist(&mut out, lo)?;
            write_dist(&mut out, hi)?;
        }
        out.write_u32::<LittleEndian>(n.object_count)?;
        out.write_u32::<LittleEndian>(n.min_object_id)?;
        out.write_u32::<LittleEndian>(n.odls.len() as u32)?;
        for odl in &n.odls {
            for e in odl {
                out.write_u32::<LittleEndian>(e.object)?;
                out.write_u32::<LittleEndian>(e.dist)?;
            }
        }
    }
    Ok(())
}

pub fn read_coltree<R: Read>(input: R, sul: &SulTree) -> Result<ColTree> {
    let mut r = input;
    let u32_ = |r: &mut R| r.read_u32::<LittleEndian>().map_err(Error::from_read);
    let u64_ = |r: &mut R| r.read_u64::<LittleEndian>().map_err(Error::from_read);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(Error::from_read)?;
    if &magic != MAGIC {
        return Err(Error::format("bad magic: not a COL-Tree file"));
    }
    let version = u32_(&mut r)?;
    if version != VERSION {
        return Err(Error::format(format!("unsupported COL-Tree format version {version}")));
    }
    let identity = u64_(&mut r)?;
    if identity != sul.identity() {
        return Err(Error::format("checksum mismatch: COL-Tree was built from a different SUL-Tree"));
    }
    let lambda = u64_(&mut r)? as usize;
    let object_count = u64_(&mut r)? as usize;
    let root_landmarks = u32_(&mut r)? as usize;
    let work = BuildWork { sdl_lookups: u64_(&mut r)?, sort_comparisons: u64_(&mut r)? };
    let node_count = u32_(&mut r)? as usize;
    let mut nodes = Vec::with_capacity(node_count.min(1 << 20));
    for _ in 0..node_count {
        let sul_node = u32_(&mut r)?;
        let child_count = u32_(&mut r)? as usize;
        let children = (0..child_count).map(|_| u32_(&mut r)).collect::<Result<Vec<_>>>()?;
        let landmark_count = u32_(&mut r)? as usize;
        let mut landmarks = Vec::with_capacity(landmark_count.min(1 << 16));
        let mut bounds = Vec::with_capacity(landmark_count.min(1 << 16));
        for _ in 0..landmark_count {
            landmarks.push(u32_(&mut r)?);
            bounds.push((u64_(&mut r)?, u64_(&mut r)?));
        }
        let root_bounds = (0..root_landmarks).map(|_| Ok((u64_(&mut r)?, u64_(&mut r)?))).collect::<Result<Vec<_>>>()?;
        let count = u32_(&mut r)?;
        let min_object_id = u32_(&mut r)?;
        let odl_count = u32_(&mut r)? as usize;
        let mut odls = Vec::with_capacity(odl_count.min(1 << 16));
        for _ in 0..odl_count {
            let odl = (0..count)
                .map(|_| Ok(OdlEntry { object: u32_(&mut r)?, dist: u32_(&mut r)? }))
                .collect::<Result<Vec<_>>>()?;
            odls.push(odl);
        }
        if sul_node as usize >= sul.nodes().len()
            || children.iter().any(|&c| c as usize >= node_count)
            || bounds.iter().chain(&root_bounds).any(|&(lo, hi)| lo > hi)
        {
            return Err(Error::format("corrupt COL-Tree node table"));
        }
        nodes.push(ColNode { sul_node, children, landmarks, bounds, root_bounds, object_count: count, min_object_id, odls });
    }
    Ok(ColTree { lambda, sul_identity: identity, root_landmarks, nodes, object_count, work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::grid;
    use crate::sultree::{build_sultree, SulParams};

    fn bytes(tree: &ColTree) -> Vec<u8> {
        let mut out = Vec::new();
        write_coltree(tree, &mut out).unwrap();
        out
    }

    #[test]
    fn round_trip_and_identity_check() {
        let g = grid(10, 9);
        let sul = build_sultree(&g, &SulParams { b: 2, alpha: 8, m_root: 3, ..SulParams::default() }).unwrap();
        let objects: Vec<u32> = (0..90).step_by(4).collect();
        let col = ColTree::build(&sul, &objects, 3).unwrap();
        let data = bytes(&col);
        let back = read_coltree(data.as_slice(), &sul).unwrap();
        assert_eq!(back, col);
        assert_eq!(bytes(&back), data);

        let err = read_coltree(&data[..data.len() - 2], &sul).unwrap_err();
        assert_eq!(err.to_string(), "unexpected end of index");

        let other = build_sultree(&g, &SulParams { b: 2, alpha: 8, m_root: 3, seed: 1, ..SulParams::default() }).unwrap();
        let err = read_coltree(data.as_slice(), &other).unwrap_err();
        assert!(err.to_string().contains("checksum"));
    }

    #[test]
    fn empty_tree_round_trips() {
        let g = grid(4, 4);
        let sul = build_sultree(&g, &SulParams { b: 2, alpha: 4, m_root: 2, ..SulParams::default() }).unwrap();
        let col = ColTree::build(&sul, &[], 3).unwrap();
        assert_eq!(read_coltree(bytes(&col).as_slice(), &sul).unwrap(), col);
    }
}
