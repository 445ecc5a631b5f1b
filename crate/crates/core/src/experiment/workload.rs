//! Object sets and query vertex sets.

use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{RoadGraph, VertexId};
use crate::{Error, Result};

/// `floor(d * |V|)` distinct vertices drawn uniformly, in ascending order.
pub fn generate_objects(graph: &RoadGraph, density: f64, seed: u64) -> Result<Vec<VertexId>> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::config(format!("density must lie in (0, 1], got {density}")));
    }
    let n = graph.vertex_count();
    let count = (density * n as f64).floor() as usize;
    if count == 0 {
        return Err(Error::config(format!("density {density} selects no objects on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<VertexId> = sample(&mut rng, n, count).into_iter().map(|v| v as VertexId).collect();
    out.sort_unstable();
    Ok(out)
}

/// Grows a breadth-first region of `ceil(locality% * |V|)` vertices from a
/// random start and samples `size` distinct vertices from it.
pub fn generate_query_set(graph: &RoadGraph, size: usize, locality: f64, seed: u64) -> Result<Vec<VertexId>> {
    if size == 0 {
        return Err(Error::config("query set size must be at least 1"));
    }
    if !(locality > 0.0 && locality <= 100.0) {
        return Err(Error::config(format!("locality must lie in (0, 100], got {locality}")));
    }
    let n = graph.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let target = ((locality * n as f64 / 100.0).ceil() as usize).clamp(1, n);
    if size > target {
        return Err(Error::config(format!("query set size {size} exceeds region size {target}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = if target == n { (0..n as VertexId).collect() } else { bfs_region(graph, rng.gen_range(0..n as VertexId), target) };
    if size > region.len() {
        return Err(Error::config(format!("query set size {size} exceeds region size {}", region.len())));
    }
    Ok(sample(&mut rng, region.len(), size).into_iter().map(|i| region[i]).collect())
}

fn bfs_region(graph: &RoadGraph, start: VertexId, target: usize) -> Vec<VertexId> {
    let mut seen = vec![false; graph.vertex_count()];
    let mut region = Vec::with_capacity(target);
    let mut queue = VecDeque::from([start]);
    seen[start as usize] = true;
    while let Some(u) = queue.pop_front() {
        region.push(u);
        if region.len() == target {
            break;
        }
        for (v, _) in graph.neighbors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                queue.push_back(v);
            }
        }
    }
    region
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::grid;

    #[test]
    fn objects() {
        let g = grid(5, 2);
        assert_eq!(generate_objects(&g, 1.0, 3).unwrap(), (0..10).collect::<Vec<_>>());
        let half = generate_objects(&g, 0.5, 9).unwrap();
        assert_eq!(half.len(), 5);
        assert!(half.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(half, generate_objects(&g, 0.5, 9).unwrap());
        assert!(generate_objects(&g, 0.05, 1).is_err());
        assert!(generate_objects(&g, 0.0, 1).is_err());
        assert!(generate_objects(&g, 1.5, 1).is_err());
    }

    #[test]
    fn query_sets() {
        let g = grid(10, 10);
        let one = generate_query_set(&g, 1, 100.0, 4).unwrap();
        assert_eq!(one.len(), 1);
        assert!(generate_query_set(&g, 16, 15.0, 4).is_err());
        assert!(generate_query_set(&g, 0, 15.0, 4).is_err());
        for seed in 0..20 {
            let q = generate_query_set(&g, 8, 15.0, seed).unwrap();
            let mut d = q.clone();
            d.sort_unstable();
            d.dedup();
            assert_eq!(d.len(), 8);
            // Membership: every vertex lies in the region grown from the same start.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let region = bfs_region(&g, rng.gen_range(0..100), 15);
            assert!(q.iter().all(|v| region.contains(v)));
        }
    }
}
