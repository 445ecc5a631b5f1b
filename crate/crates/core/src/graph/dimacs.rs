//! 9th DIMACS Implementation Challenge `.gr` / `.co` readers.

use std::io::BufRead;

use super::{Dist, Point, RoadGraph, VertexId};
use crate::{Error, Result};

/// Parses a `.gr` file (`p sp <n> <m>` header, `a <u> <v> <w>` arcs with
/// 1-based ids). The result is not yet symmetric or connected; see
/// [`RoadGraph::normalize`].
pub fn parse_dimacs_gr<R: BufRead>(reader: R) -> Result<RoadGraph> {
    let mut vertex_count: Option<usize> = None;
    let mut arcs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") => {}
            Some("p") => {
                if vertex_count.is_some() {
                    return Err(Error::parse(lineno, "duplicate problem line"));
                }
                let (kind, n, m) = (fields.next(), fields.next(), fields.next());
                if kind != Some("sp") {
                    return Err(Error::parse(lineno, "malformed header, expected `p sp <n> <m>`"));
                }
                let n = parse_num::<usize>(n, lineno, "vertex count")?;
                let m = parse_num::<usize>(m, lineno, "arc count")?;
                vertex_count = Some(n);
                arcs.reserve(m);
            }
            Some("a") => {
                let n = vertex_count.ok_or_else(|| Error::parse(lineno, "arc before problem line"))?;
                let u = parse_num::<u64>(fields.next(), lineno, "tail")?;
                let v = parse_num::<u64>(fields.next(), lineno, "head")?;
                let w = parse_num::<i64>(fields.next(), lineno, "weight")?;
                if u == 0 || v == 0 || u > n as u64 || v > n as u64 {
                    return Err(Error::parse(lineno, "vertex id out of range"));
                }
                if w <= 0 {
                    return Err(Error::parse(lineno, "non-positive weight"));
                }
                arcs.push(((u - 1) as VertexId, (v - 1) as VertexId, w as Dist));
            }
            Some(other) => return Err(Error::parse(lineno, format!("unknown line type `{other}`"))),
        }
    }
    let n = vertex_count.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    RoadGraph::from_arcs(n, arcs)
}

/// Parses a `.co` file (`v <id> <x> <y>`, one line per vertex) and attaches
/// the coordinates to `graph`.
pub fn parse_dimacs_co<R: BufRead>(reader: R, graph: &mut RoadGraph) -> Result<()> {
    let n = graph.vertex_count();
    let mut coords: Vec<Option<Point>> = vec![None; n];
    let mut seen = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") | Some("p") => {}
            Some("v") => {
                let id = parse_num::<u64>(fields.next(), lineno, "vertex id")?;
                let x = parse_num::<f64>(fields.next(), lineno, "x")?;
                let y = parse_num::<f64>(fields.next(), lineno, "y")?;
                if id == 0 || id > n as u64 {
                    return Err(Error::parse(lineno, "vertex id out of range"));
                }
                let slot = &mut coords[(id - 1) as usize];
                if slot.is_some() {
                    return Err(Error::parse(lineno, format!("duplicate coordinate for vertex {id}")));
                }
                *slot = Some(Point::new(x, y));
                seen += 1;
            }
            Some(other) => return Err(Error::parse(lineno, format!("unknown line type `{other}`"))),
        }
    }
    if seen != n {
        return Err(Error::config("coordinate count mismatch"));
    }
    graph.set_coordinates(coords.into_iter().map(Option::unwrap).collect())
}

fn parse_num<T: std::str::FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}")))
}
