//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p colt-core --test acceptance`.

use std::time::Instant;

use colt::coltree::{read_coltree, write_coltree, QueryVertex};
use colt::experiment::{
    derive_seed, generate_objects, generate_query_set, geometric_graph, grid_graph, run_experiment_on, strip_time_columns,
    ExperimentSpec, GraphSource, Method, QueryKind, QueryResult,
};
use colt::graph::{border_restricted_dijkstra, sssp, subgraph_dijkstra, SearchScratch};
use colt::query::{self, minimizing_index};
use colt::sultree::{build_sultree, read_sultree, write_sultree};
use colt::{AggregateFunction, BackendKind, ColTree, Dist, DistanceBackend, LandmarkPolicy, RoadGraph, SulParams, SulTree, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const POLICIES: [LandmarkPolicy; 4] = [
    LandmarkPolicy::Random,
    LandmarkPolicy::FurthestBorder,
    LandmarkPolicy::SliceFurthestBorder,
    LandmarkPolicy::BorderMinmax,
];

fn test_graph(i: u64) -> RoadGraph {
    if i % 2 == 0 {
        grid_graph(50, 50, i).unwrap()
    } else {
        geometric_graph(2500, i).unwrap()
    }
}

fn ranked_oracle(objects: &[VertexId], scores: impl Fn(VertexId) -> Dist, k: usize, farthest: bool) -> Vec<(VertexId, Dist)> {
    let mut all: Vec<(VertexId, Dist)> = objects.iter().map(|&p| (p, scores(p))).collect();
    if farthest {
        all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    } else {
        all.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    }
    all.truncate(k);
    all
}

fn pairs(out: &colt::RankedOutput) -> Vec<(VertexId, Dist)> {
    out.neighbors.iter().map(|n| (n.object, n.score)).collect()
}

fn criterion_1() -> Outcome {
    const OBJECT_SETS: u64 = 20;
    const QUERIES: u64 = 50;
    let jobs: Vec<(u64, f64)> = (0..20).flat_map(|g| [(g, 0.01), (g, 0.001)]).collect();
    let results: Vec<(u64, u64, Vec<String>)> = jobs
        .par_iter()
        .map(|&(gi, density)| {
            let graph = test_graph(gi);
            let params = SulParams {
                b: [2, 4, 8][gi as usize % 3],
                alpha: 64,
                m: 2,
                m_root: 8,
                policy: POLICIES[gi as usize % 4],
                seed: gi,
                ..SulParams::default()
            };
            let sul = build_sultree(&graph, &params).unwrap();
            let diameter = graph.approximate_diameter();
            let radii: Vec<Dist> = [1.0, 2.5, 10.0].iter().map(|p| (p / 100.0 * diameter as f64).floor() as Dist).collect();
            let kind = if gi % 5 == 0 { BackendKind::BidirectionalDijkstra } else { BackendKind::AltAStar };
            let mut backend = DistanceBackend::for_sultree(&sul, kind);
            let (mut checks, mut mismatches, mut notes) = (0u64, 0u64, Vec::new());
            for set in 0..OBJECT_SETS {
                let objects = generate_objects(&graph, density, derive_seed(gi, 10, set)).unwrap();
                let col = ColTree::build(&sul, &objects, [4, 16][set as usize % 2]).unwrap();
                for qi in 0..QUERIES {
                    let qs = generate_query_set(&graph, 8, 15.0, derive_seed(gi, 11, set * QUERIES + qi)).unwrap();
                    let tables: Vec<Vec<Dist>> = qs.iter().map(|&q| sssp(&graph, q)).collect();
                    let mut check = |what: String, got: Vec<(VertexId, Dist)>, want: Vec<(VertexId, Dist)>| {
                        checks += 1;
                        if got != want {
                            mismatches += 1;
                            if notes.len() < 3 {
                                notes.push(format!("graph {gi} d={density} set {set} query {qi} {what}"));
                            }
                        }
                    };
                    for agg in [AggregateFunction::Sum, AggregateFunction::Max] {
                        for size in [2usize, 8] {
                            let t = &tables[..size];
                            let want = ranked_oracle(&objects, |p| agg.apply(t.iter().map(|r| r[p as usize])), 10, false);
                            let got = query::aknn(&col, &sul, &mut backend, &qs[..size], 10, agg).unwrap();
                            check(format!("aknn {agg} |Q|={size}"), pairs(&got), want);
                        }
                    }
                    let q = qs[0];
                    let t = &tables[0];
                    let got = query::kfn(&col, &sul, &mut backend, q, 10).unwrap();
                    check("kfn".into(), pairs(&got), ranked_oracle(&objects, |p| t[p as usize], 10, true));
                    for &r in &radii {
                        let got = query::range(&col, &sul, &mut backend, q, r).unwrap();
                        let want: Vec<VertexId> = objects.iter().copied().filter(|&p| t[p as usize] <= r).collect();
                        check(
                            format!("range r={r}"),
                            got.objects.iter().map(|&p| (p, 0)).collect(),
                            want.iter().map(|&p| (p, 0)).collect(),
                        );
                    }
                    for k in [1, 10] {
                        let got = query::knn(&col, &sul, &mut backend, q, k).unwrap();
                        check(format!("knn k={k}"), pairs(&got), ranked_oracle(&objects, |p| t[p as usize], k, false));
                    }
                }
            }
            (checks, mismatches, notes)
        })
        .collect();
    let checks: u64 = results.iter().map(|r| r.0).sum();
    let mismatches: u64 = results.iter().map(|r| r.1).sum();
    let notes: Vec<String> = results.into_iter().flat_map(|r| r.2).take(3).collect();
    outcome(mismatches == 0, format!("{checks} query results checked, {mismatches} mismatches {notes:?}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut pairs_checked, mut violations, mut tree) = (0u64, 0u64, 0u64);
    while pairs_checked < 10_000 {
        let graph = if tree % 2 == 0 { grid_graph(40, 40, tree).unwrap() } else { geometric_graph(1600, tree).unwrap() };
        let params = SulParams {
            b: [2, 4][tree as usize % 2],
            alpha: 32,
            m: 1 + tree as usize % 3,
            m_root: 4 + tree as usize % 5,
            policy: POLICIES[tree as usize % 4],
            seed: tree,
            ..SulParams::default()
        };
        let sul = build_sultree(&graph, &params).unwrap();
        let objects = generate_objects(&graph, 0.05, tree).unwrap();
        let col = ColTree::build(&sul, &objects, 8).unwrap();
        let members: Vec<Vec<VertexId>> = (0..col.nodes().len() as u32)
            .map(|id| {
                let mut out = Vec::new();
                col.objects_under(id, &mut out);
                out.into_iter().map(|v| sul.to_original(v)).collect()
            })
            .collect();
        for _ in 0..20 {
            let q = rng.gen_range(0..graph.vertex_count() as VertexId);
            let dist = sssp(&graph, q);
            let qv = QueryVertex::new(&sul, sul.to_internal(q));
            for (id, objs) in members.iter().enumerate() {
                let b = col.node_bounds(&sul, id as u32, &qv);
                let lo = objs.iter().map(|&p| dist[p as usize]).min().unwrap();
                let hi = objs.iter().map(|&p| dist[p as usize]).max().unwrap();
                pairs_checked += 1;
                if b.lb > lo || b.ub < hi {
                    violations += 1;
                }
            }
        }
        tree += 1;
    }
    outcome(violations == 0, format!("{pairs_checked} (query, node) pairs over {tree} trees, {violations} violations"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trees: Vec<(RoadGraph, SulTree, ColTree)> = (0..4)
        .map(|i| {
            let graph = if i % 2 == 0 { grid_graph(40, 40, i).unwrap() } else { geometric_graph(1600, i).unwrap() };
            let sul = build_sultree(&graph, &SulParams { b: 4, alpha: 64, m: 3, m_root: 8, seed: i, ..SulParams::default() }).unwrap();
            let objects = generate_objects(&graph, 0.08, i).unwrap();
            let col = ColTree::build(&sul, &objects, 12).unwrap();
            (graph, sul, col)
        })
        .collect();
    let mut violations = 0;
    for _ in 0..1000 {
        let (graph, sul, col) = &trees[rng.gen_range(0..trees.len())];
        let leaves: Vec<u32> = (0..col.nodes().len() as u32).filter(|&i| col.node(i).is_leaf()).collect();
        let leaf = col.node(leaves[rng.gen_range(0..leaves.len())]);
        let j = rng.gen_range(0..leaf.landmarks.len());
        let size = rng.gen_range(1..=8);
        let agg = if rng.gen_bool(0.5) { AggregateFunction::Sum } else { AggregateFunction::Max };
        let landmark = sul.to_original(leaf.landmarks[j]);
        let constants: Vec<Dist> = (0..size)
            .map(|_| {
                let q = rng.gen_range(0..graph.vertex_count() as VertexId);
                sssp(graph, q)[landmark as usize]
            })
            .collect();
        let objective = |x: u32| agg.apply(constants.iter().map(|&c| (x as Dist).abs_diff(c)));
        let odl = &leaf.odls[j];
        let chosen = minimizing_index(odl, agg, &constants).unwrap();
        let best = odl.iter().map(|e| objective(e.dist)).min().unwrap();
        if objective(odl[chosen].dist) != best {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("1000 (leaf, Q) instances, {violations} non-optimal starts"))
}

fn criterion_4() -> Outcome {
    let (mut identical, mut rows, mut restricted, mut plain) = (true, 0u64, 0u64, 0u64);
    let mut gammas = Vec::new();
    for i in 0..10u64 {
        let graph = if i % 2 == 0 { grid_graph(40, 40, i).unwrap() } else { geometric_graph(1600, i).unwrap() };
        let params = SulParams { b: [2, 4][i as usize % 2], alpha: 48, m: 2, m_root: 8, seed: i, ..SulParams::default() };
        let sul = build_sultree(&graph, &params).unwrap();
        let without = build_sultree(&graph, &SulParams { border_restriction: false, ..params }).unwrap();
        gammas.push((sul.gamma(), without.gamma()));
        let g = sul.graph();
        let root = sul.root_table();
        let mut scratch = SearchScratch::new(g.vertex_count());
        for (id, node) in sul.nodes().iter().enumerate().skip(1) {
            let ctx = sul.border_context(id as u32);
            let range = node.range();
            for &l in &node.landmarks {
                let mut a = vec![0; range.len()];
                let mut b = vec![0; range.len()];
                restricted += border_restricted_dijkstra(g, l, range.clone(), &ctx, &root, &mut scratch, &mut a, None) as u64;
                plain += subgraph_dijkstra(g, l, range.clone(), &mut scratch, &mut b) as u64;
                identical &= a == b;
                rows += 1;
            }
        }
    }
    let (gr, gp) = gammas.iter().fold((0.0, 0.0), |(x, y), g| (x + g.0, y + g.1));
    let n = gammas.len() as f64;
    outcome(
        identical && restricted < plain,
        format!(
            "{rows} SDL rows identical={identical}, settled {restricted} vs {plain} ({:.1}% fewer), mean gamma {:.3} vs {:.3}",
            100.0 * (1.0 - restricted as f64 / plain as f64),
            gr / n,
            gp / n
        ),
    )
}

fn per_query_calls(report: &colt::experiment::ExperimentReport, method: Method) -> Vec<u64> {
    report.records_for(method).map(|r| r.stats.exact_distance_calls).collect()
}

fn criterion_5() -> Outcome {
    let graph = grid_graph(200, 200, 5).unwrap();
    let spec = ExperimentSpec {
        graph: GraphSource::Grid { width: 200, height: 200 },
        graph_seed: 5,
        kind: QueryKind::Aknn,
        backend: BackendKind::AltAStar,
        object_sets: 5,
        query_sets: 20,
        seed: 5,
        methods: vec![Method::Coltree, Method::Ier, Method::Brute],
        oracle_sample: 1.0,
        parallel: true,
        ..ExperimentSpec::default()
    };
    let report = match run_experiment_on(&spec, &graph) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("experiment failed: {e}")),
    };
    let objects = report.records_for(Method::Coltree).next().unwrap().object_count as f64;
    let col: Vec<&colt::experiment::QueryRecord> = report.records_for(Method::Coltree).collect();
    let candidates = col.iter().map(|r| r.stats.candidates_retrieved as f64).sum::<f64>() / col.len() as f64;
    let c = per_query_calls(&report, Method::Coltree);
    let i = per_query_calls(&report, Method::Ier);
    let wins = c.iter().zip(&i).filter(|(a, b)| a <= b).count() as f64 / c.len() as f64;
    let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len() as f64;
    outcome(
        candidates < objects && wins >= 0.8,
        format!(
            "|P|={objects}, mean candidates {candidates:.2}, exact calls coltree {:.2} vs ier {:.2}, coltree <= ier on {:.1}% of {} queries",
            mean(&c),
            mean(&i),
            wins * 100.0,
            c.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let graph = grid_graph(200, 200, 6).unwrap();
    let spec = ExperimentSpec {
        graph: GraphSource::Grid { width: 200, height: 200 },
        graph_seed: 6,
        kind: QueryKind::Kfn,
        backend: BackendKind::AltAStar,
        object_sets: 5,
        query_sets: 20,
        seed: 6,
        b: 4,
        m: 4,
        alpha: 16,
        lambda: 4,
        policy: LandmarkPolicy::SliceFurthestBorder,
        methods: vec![Method::Coltree, Method::Aub, Method::Brute],
        oracle_sample: 1.0,
        parallel: true,
        ..ExperimentSpec::default()
    };
    let report = match run_experiment_on(&spec, &graph) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("experiment failed: {e}")),
    };
    let results = |m: Method| report.records_for(m).map(|r| r.result.clone()).collect::<Vec<QueryResult>>();
    let equal = results(Method::Coltree) == results(Method::Brute) && results(Method::Aub) == results(Method::Brute);
    let mean = |m: Method| {
        let v = per_query_calls(&report, m);
        v.iter().sum::<u64>() as f64 / v.len() as f64
    };
    let p = report.records_for(Method::Coltree).next().unwrap().object_count as f64;
    let (c, a, b) = (mean(Method::Coltree), mean(Method::Aub), mean(Method::Brute));
    outcome(
        equal && c < 0.5 * p && c < a && a <= b && b == p,
        format!("|P|={p}, mean exact calls coltree {c:.2}, aub {a:.2}, brute {b:.2}, outputs equal={equal}"),
    )
}

fn criterion_7() -> Outcome {
    let graph = grid_graph(200, 200, 7).unwrap();
    let sul = build_sultree(&graph, &SulParams { seed: 7, ..SulParams::default() }).unwrap();
    let mut ratios = Vec::new();
    for &(small, large) in &[(0.025, 0.05), (0.05, 0.1), (0.1, 0.2)] {
        let work = |d: f64| ColTree::build(&sul, &generate_objects(&graph, d, 7).unwrap(), 256).unwrap().build_work().total() as f64;
        ratios.push(work(large) / work(small));
    }
    let expected: usize = sul.nodes().iter().map(|n| n.landmark_count as usize * n.len()).sum();
    let exact = sul.sdl_store().len() == expected;
    let (flat, pair) = sul.sdl_size_comparison();
    let share = flat as f64 / pair as f64;
    outcome(
        ratios.iter().all(|&r| r <= 2.5) && exact && share <= 0.55,
        format!(
            "work ratios on doubling |P| {:?}, SDL entries {} (expected {expected}), id-free store {:.1}% of pair store",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
            sul.sdl_store().len(),
            share * 100.0
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut identical = 0;
    for i in 0..5u64 {
        let graph = if i % 2 == 0 {
            grid_graph(rng.gen_range(10..40), rng.gen_range(10..40), i).unwrap()
        } else {
            geometric_graph(rng.gen_range(200..1200), i).unwrap()
        };
        let b = [2, 4, 8][rng.gen_range(0..3)];
        let params = SulParams {
            b,
            alpha: rng.gen_range(b.max(8)..80),
            m: rng.gen_range(1..4),
            m_root: rng.gen_range(2..10),
            policy: POLICIES[rng.gen_range(0..4)],
            seed: rng.gen(),
            lazy_depth: rng.gen_bool(0.4).then(|| rng.gen_range(1..3)),
            ..SulParams::default()
        };
        let mut sul = build_sultree(&graph, &params).unwrap();
        let objects = generate_objects(&graph, rng.gen_range(0.01..0.3), rng.gen()).unwrap();
        let internal: Vec<VertexId> = objects.iter().map(|&p| sul.to_internal(p)).collect();
        sul.materialize_for_objects(&internal).unwrap();
        let col = ColTree::build(&sul, &objects, rng.gen_range(1..20)).unwrap();

        let mut s1 = Vec::new();
        write_sultree(&sul, &mut s1).unwrap();
        let sul2 = read_sultree(s1.as_slice(), &graph).unwrap();
        let mut s2 = Vec::new();
        write_sultree(&sul2, &mut s2).unwrap();
        let mut c1 = Vec::new();
        write_coltree(&col, &mut c1).unwrap();
        let col2 = read_coltree(c1.as_slice(), &sul2).unwrap();
        let mut c2 = Vec::new();
        write_coltree(&col2, &mut c2).unwrap();
        if s1 == s2 && c1 == c2 {
            identical += 1;
        }
    }
    outcome(identical == 5, format!("{identical}/5 configurations byte-identical after a round trip"))
}

fn criterion_9() -> Outcome {
    let graph = grid_graph(50, 50, 9).unwrap();
    let mut same = 0;
    let kinds = [QueryKind::Aknn, QueryKind::Kfn, QueryKind::Range, QueryKind::Knn];
    for kind in kinds {
        let spec = ExperimentSpec {
            kind,
            density: 0.01,
            object_sets: 4,
            query_sets: 10,
            seed: 9,
            alpha: 128,
            lambda: 16,
            methods: vec![Method::Coltree, Method::Brute, Method::Aub, Method::Ier],
            ..ExperimentSpec::default()
        };
        let run = || strip_time_columns(&run_experiment_on(&spec, &graph).unwrap().to_csv().unwrap()).unwrap();
        if run() == run() {
            same += 1;
        }
    }
    outcome(same == kinds.len(), format!("{same}/{} specs produced identical CSVs modulo time columns", kinds.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle exactness", criterion_1),
        ("bound sandwich", criterion_2),
        ("ODL minimizers", criterion_3),
        ("border-set Dijkstra", criterion_4),
        ("candidate frugality", criterion_5),
        ("kFN efficiency", criterion_6),
        ("complexity sanity", criterion_7),
        ("serialization", criterion_8),
        ("determinism", criterion_9),
    ];
    // Optional criterion numbers on the command line select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {} ({name}): {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
