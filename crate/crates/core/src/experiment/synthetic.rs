//! Desk-scale synthetic road networks with travel-time-like weights drawn
//! independently of geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dist, Point, RoadGraph, VertexId};
use crate::{Error, Result};

pub const MAX_WEIGHT: Dist = 1000;

/// Nearest neighbours each point links to in [`geometric_graph`].
const LINKS: usize = 3;

/// `w x h` grid with unit spacing and weights uniform in `[1, 1000]`.
pub fn grid_graph(w: u32, h: u32, seed: u64) -> Result<RoadGraph> {
    if w == 0 || h == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |x: u32, y: u32| y * w + x;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                edges.push((id(x, y), id(x + 1, y), rng.gen_range(1..=MAX_WEIGHT)));
            }
            if y + 1 < h {
                edges.push((id(x, y), id(x, y + 1), rng.gen_range(1..=MAX_WEIGHT)));
            }
        }
    }
    let mut g = RoadGraph::from_edges((w * h) as usize, edges)?;
    g.set_coordinates((0..h).flat_map(|y| (0..w).map(move |x| Point::new(x as f64, y as f64))).collect())?;
    Ok(g)
}

/// Random geometric graph: `n` points uniform in a square of area `n`, each
/// joined to its nearest neighbours, reduced to the largest component.
pub fn geometric_graph(n: usize, seed: u64) -> Result<RoadGraph> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (n as f64).sqrt();
    let cells = side.ceil().max(1.0) as usize;
    let points: Vec<Point> = (0..n).map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect();
    let cell_of = |p: Point| ((p.x as usize).min(cells - 1), (p.y as usize).min(cells - 1));
    let mut buckets = vec![Vec::new(); cells * cells];
    for (i, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        buckets[cy * cells + cx].push(i as VertexId);
    }
    let mut edges = Vec::new();
    let mut near: Vec<(f64, VertexId)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        near.clear();
        for ring in 0..cells {
            let (x0, x1) = (cx.saturating_sub(ring), (cx + ring).min(cells - 1));
            let (y0, y1) = (cy.saturating_sub(ring), (cy + ring).min(cells - 1));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if x.abs_diff(cx).max(y.abs_diff(cy)) != ring {
                        continue;
                    }
                    for &j in &buckets[y * cells + x] {
                        if j as usize != i {
                            near.push((p.euclid(points[j as usize]), j));
                        }
                    }
                }
            }
            if near.len() >= LINKS {
                near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                // Anything outside the scanned rings is at least `ring` away.
                if near[LINKS - 1].0 <= ring as f64 {
                    break;
                }
            }
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in near.iter().take(LINKS) {
            edges.push((i as VertexId, j, rng.gen_range(1..=MAX_WEIGHT)));
        }
    }
    let mut g = RoadGraph::from_edges(n, edges)?;
    g.set_coordinates(points)?;
    Ok(g.normalize()?.graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_determinism() {
        let g = grid_graph(5, 4, 1).unwrap();
        assert_eq!(g.vertex_count(), 20);
        assert_eq!(g.arc_count(), 2 * (4 * 4 + 5 * 3));
        assert!(g.arcs().all(|(_, _, w)| (1..=MAX_WEIGHT).contains(&w)));
        assert_eq!(g, grid_graph(5, 4, 1).unwrap());
        assert_ne!(g, grid_graph(5, 4, 2).unwrap());
    }

    #[test]
    fn geometric_is_connected_and_sparse() {
        let g = geometric_graph(600, 7).unwrap();
        assert!(g.is_connected());
        assert!(g.vertex_count() > 400);
        assert!(g.is_symmetric());
        assert!(g.arc_count() <= 2 * LINKS * 600);
        assert_eq!(g, geometric_graph(600, 7).unwrap());
    }
}
