//! Binary form of a normalized graph (magic `RGPH`), used by the CLI to avoid
//! re-parsing DIMACS text.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{Point, RoadGraph};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"RGPH";
const VERSION: u32 = 1;

pub fn write_graph<W: Write>(graph: &RoadGraph, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(VERSION)?;
    out.write_u32::<LittleEndian>(graph.vertex_count() as u32)?;
    out.write_u64::<LittleEndian>(graph.arc_count() as u64)?;
    for &o in &graph.offsets {
        out.write_u64::<LittleEndian>(o as u64)?;
    }
    for (&t, &w) in graph.targets.iter().zip(&graph.weights) {
        out.write_u32::<LittleEndian>(t)?;
        out.write_u64::<LittleEndian>(w)?;
    }
    match &graph.coords {
        None => out.write_u8(0)?,
        Some(coords) => {
            out.write_u8(1)?;
            for p in coords {
                out.write_f64::<LittleEndian>(p.x)?;
                out.write_f64::<LittleEndian>(p.y)?;
            }
        }
    }
    Ok(())
}

pub fn read_graph<R: Read>(mut input: R) -> Result<RoadGraph> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(Error::from_read)?;
    if &magic != MAGIC {
        return Err(Error::format("bad magic: not a graph file"));
    }
    let version = input.read_u32::<LittleEndian>().map_err(Error::from_read)?;
    if version != VERSION {
        return Err(Error::format(format!("unsupported graph format version {version}")));
    }
    let n = input.read_u32::<LittleEndian>().map_err(Error::from_read)? as usize;
    let m = input.read_u64::<LittleEndian>().map_err(Error::from_read)? as usize;
    let offsets = (0..=n)
        .map(|_| input.read_u64::<LittleEndian>().map(|o| o as usize))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(Error::from_read)?;
    if offsets.first() != Some(&0) || offsets.last() != Some(&m) || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::format("corrupt adjacency offsets"));
    }
    let mut targets = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let t = input.read_u32::<LittleEndian>().map_err(Error::from_read)?;
        if t as usize >= n {
            return Err(Error::format("arc target out of range"));
        }
        targets.push(t);
        weights.push(input.read_u64::<LittleEndian>().map_err(Error::from_read)?);
    }
    let mut graph = RoadGraph { offsets, targets, weights, coords: None, max_speed: None };
    if input.read_u8().map_err(Error::from_read)? == 1 {
        let coords = (0..n)
            .map(|_| Ok(Point::new(input.read_f64::<LittleEndian>()?, input.read_f64::<LittleEndian>()?)))
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(Error::from_read)?;
        graph.set_coordinates(coords)?;
    }
    Ok(graph)
}
