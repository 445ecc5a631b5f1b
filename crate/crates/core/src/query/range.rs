//! Range search: every object within network distance `r` of a vertex.

use std::time::Instant;

use super::{check_tree, check_vertex, RangeOutput};
use crate::coltree::{ColTree, QueryVertex};
use crate::distoracle::DistanceBackend;
use crate::graph::{Dist, VertexId};
use crate::stats::QueryStats;
use crate::sultree::SulTree;
use crate::Result;

/// Objects `p` with `d(q, p) <= r`, as ascending original ids.
pub fn range(col: &ColTree, sul: &SulTree, backend: &mut DistanceBackend<'_>, q: VertexId, r: Dist) -> Result<RangeOutput> {
    let start = Instant::now();
    check_tree(col, sul)?;
    let query = QueryVertex::new(sul, check_vertex(sul, q)?);
    let settled_before = backend.vertices_settled();
    let mut stats = QueryStats::default();
    let mut found = Vec::new();
    let mut stack = if col.is_empty() { Vec::new() } else { vec![0u32] };
    while let Some(id) = stack.pop() {
        stats.nodes_visited += 1;
        let bounds = col.node_bounds(sul, id, &query);
        if bounds.lb > r {
            continue;
        }
        if bounds.ub <= r {
            col.objects_under(id, &mut found);
            continue;
        }
        let node = col.node(id);
        if !node.is_leaf() {
            stack.extend(node.children.iter().rev());
            continue;
        }
        // Landmark whose upper bound settles the most entries outright.
        let mut odl = 0;
        let mut best = 0;
        for (j, &l) in node.landmarks.iter().enumerate() {
            let ub = query.bracket(sul, l).1;
            let settled = match r.checked_sub(ub) {
                Some(room) => node.odls[j].partition_point(|e| e.dist as Dist <= room),
                None => 0,
            };
            if settled > best {
                best = settled;
                odl = j;
            }
        }
        let list = &node.odls[odl];
        stats.landmark_distance_calls += 1;
        let c = backend.distance(query.vertex, node.landmarks[odl]);
        let inside = match r.checked_sub(c) {
            Some(room) => list.partition_point(|e| e.dist as Dist <= room),
            None => 0,
        };
        found.extend(list[..inside].iter().map(|e| e.object));
        let low = list.partition_point(|e| (e.dist as Dist) < c.saturating_sub(r)).max(inside);
        let high = list.partition_point(|e| e.dist as Dist <= c + r);
        for e in list[low..high.max(low)].iter() {
            stats.candidates_retrieved += 1;
            let (lb, ub) = query.bracket(sul, e.object);
            if ub <= r {
                found.push(e.object);
            } else if lb <= r {
                stats.exact_distance_calls += 1;
                if backend.distance(query.vertex, e.object) <= r {
                    found.push(e.object);
                }
            }
        }
    }
    let mut objects: Vec<VertexId> = found.into_iter().map(|v| sul.to_original(v)).collect();
    objects.sort_unstable();
    stats.vertices_settled = backend.vertices_settled() - settled_before;
    stats.wall_time = start.elapsed();
    Ok(RangeOutput { objects, stats })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::p5_trees;
    use super::*;
    use crate::baselines::brute_force_range;
    use crate::graph::fixtures::grid;
    use crate::sultree::{build_sultree, SulParams};
    use proptest::prelude::*;

    #[test]
    fn p5_examples() {
        let (_, sul, col) = p5_trees(&[0, 3, 4]);
        let mut b = DistanceBackend::for_sultree(&sul, Default::default());
        assert_eq!(range(&col, &sul, &mut b, 2, 5).unwrap().objects, vec![0, 3, 4]);
        assert_eq!(range(&col, &sul, &mut b, 2, 1).unwrap().objects, vec![3]);
        assert!(range(&col, &sul, &mut b, 2, 0).unwrap().objects.is_empty());
        assert!(range(&col, &sul, &mut b, 7, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_brute_force(
            w in 4u32..13, h in 4u32..13, seed in 0u64..1000, lambda in 1usize..6,
            picks in prop::collection::vec(0u32..1000, 0..30), q in 0u32..1000, r in 0u64..60,
        ) {
            let g = grid(w, h);
            let n = w * h;
            let params = SulParams { b: 2, alpha: 6, m: 2, m_root: 3, seed, ..SulParams::default() };
            let sul = build_sultree(&g, &params).unwrap();
            let objects: Vec<u32> = picks.iter().map(|p| p % n).collect();
            let col = ColTree::build(&sul, &objects, lambda).unwrap();
            let mut b = DistanceBackend::for_sultree(&sul, Default::default());
            let out = range(&col, &sul, &mut b, q % n, r).unwrap();
            prop_assert_eq!(out.objects, brute_force_range(&g, &objects, q % n, r).unwrap());
        }
    }
}
