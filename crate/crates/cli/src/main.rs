//! `colt`: build SUL-Tree / COL-Tree indexes and run object queries.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a result
//! disagrees with the brute-force oracle.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use colt::baselines::{
    aub_kfn, brute_force_aknn, brute_force_kfn, brute_force_range_with_stats, ier_aknn, ier_kfn, ier_range, StrRtree,
    DEFAULT_LEAF_CAPACITY,
};
use colt::coltree::{read_coltree, write_coltree};
use colt::experiment::{generate_objects, run_experiment, ExperimentSpec, Method};
use colt::graph::{parse_dimacs_co, parse_dimacs_gr, read_graph, write_graph};
use colt::query::{self, RankedOutput};
use colt::sultree::{build_sultree, read_sultree, write_sultree};
use colt::{
    AggregateFunction, BackendKind, ColTree, Dist, DistanceBackend, Error, LandmarkPolicy, QueryStats, RoadGraph,
    SulParams, SulTree, VertexId,
};

#[derive(Parser)]
#[command(name = "colt", version, about = "Landmark-tree object search over road networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert DIMACS .gr (and optional .co) files into a normalized binary graph.
    Ingest {
        #[arg(long)]
        gr: PathBuf,
        #[arg(long)]
        co: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        /// Write the `old new` vertex id map here.
        #[arg(long)]
        id_map: Option<PathBuf>,
    },
    /// Build a SUL-Tree over a binary graph.
    BuildSultree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        params: SulArgs,
    },
    /// Build a COL-Tree for an object set over an existing SUL-Tree.
    BuildColtree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        sultree: PathBuf,
        #[arg(long)]
        objects: PathBuf,
        #[arg(long, default_value_t = 256)]
        lambda: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Draw a uniform object set of density d.
    GenObjects {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run one query.
    Query(QueryArgs),
    /// Run an experiment spec and emit CSV.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// Defaults to standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SulArgs {
    #[arg(long, default_value_t = 8)]
    b: usize,
    #[arg(long, default_value_t = 1024)]
    alpha: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 16)]
    m_root: usize,
    /// random, furthest, slice or minmax.
    #[arg(long, default_value = "random")]
    policy: LandmarkPolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave SDLs below this depth unmaterialized.
    #[arg(long)]
    lazy_depth: Option<u32>,
    #[arg(long)]
    no_border_restriction: bool,
    #[arg(long)]
    parallel: bool,
}

impl SulArgs {
    fn params(&self) -> SulParams {
        SulParams {
            b: self.b,
            alpha: self.alpha,
            m: self.m,
            m_root: self.m_root,
            policy: self.policy,
            seed: self.seed,
            lazy_depth: self.lazy_depth,
            border_restriction: !self.no_border_restriction,
            parallel: self.parallel,
            root_landmarks: None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Aknn,
    Kfn,
    Range,
    Knn,
}

#[derive(Args)]
struct QueryArgs {
    kind: Kind,
    #[arg(long)]
    graph: PathBuf,
    /// Whitespace-separated object vertex ids.
    #[arg(long)]
    objects: PathBuf,
    /// Whitespace-separated query vertex ids.
    #[arg(long, required_unless_present = "q")]
    q_file: Option<PathBuf>,
    /// Comma-separated query vertex ids.
    #[arg(long, value_delimiter = ',')]
    q: Vec<VertexId>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value = "max")]
    agg: AggregateFunction,
    #[arg(long)]
    radius: Option<Dist>,
    /// coltree, brute, aub or ier.
    #[arg(long, default_value = "coltree")]
    method: Method,
    /// Saved SUL-Tree; built with default parameters when absent.
    #[arg(long)]
    sultree: Option<PathBuf>,
    /// Saved COL-Tree; built from the objects when absent.
    #[arg(long)]
    coltree: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    lambda: usize,
    /// bidijkstra or alt.
    #[arg(long, default_value = "bidijkstra")]
    backend: BackendKind,
    /// Compare the answer against brute force.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::OracleMismatch(_)) { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> colt::Result<()> {
    match command {
        Command::Ingest { gr, co, out, id_map } => {
            let mut graph = parse_dimacs_gr(BufReader::new(File::open(&gr)?))?;
            if let Some(co) = co {
                parse_dimacs_co(BufReader::new(File::open(co)?), &mut graph)?;
            }
            let normalized = graph.normalize()?;
            write_graph(&normalized.graph, BufWriter::new(File::create(out)?))?;
            if let Some(path) = id_map {
                normalized.write_id_map(BufWriter::new(File::create(path)?))?;
            }
            eprintln!(
                "kept {} of {} vertices, {} arcs",
                normalized.graph.vertex_count(),
                graph.vertex_count(),
                normalized.graph.arc_count()
            );
        }
        Command::BuildSultree { graph, out, params } => {
            let graph = load_graph(&graph)?;
            let sul = build_sultree(&graph, &params.params())?;
            write_sultree(&sul, BufWriter::new(File::create(out)?))?;
            eprintln!("{} nodes, height {}, gamma {:.3}", sul.nodes().len(), sul.height(), sul.gamma());
        }
        Command::BuildColtree { graph, sultree, objects, lambda, out } => {
            let graph = load_graph(&graph)?;
            let mut sul = load_sultree(&sultree, &graph)?;
            let objects = read_ids(&objects)?;
            let col = coltree_for(&mut sul, &objects, lambda)?;
            write_coltree(&col, BufWriter::new(File::create(out)?))?;
            eprintln!("{} objects, {} nodes, height {}", col.object_count(), col.nodes().len(), col.height());
        }
        Command::GenObjects { graph, density, seed, out } => {
            let graph = load_graph(&graph)?;
            let objects = generate_objects(&graph, density, seed)?;
            let mut w = output(out.as_deref())?;
            for p in objects {
                writeln!(w, "{p}")?;
            }
            w.flush()?;
        }
        Command::Query(args) => run_query(args)?,
        Command::Bench { spec, out } => {
            let spec = ExperimentSpec::parse(&std::fs::read_to_string(spec)?)?;
            let report = run_experiment(&spec)?;
            let mut w = output(out.as_deref())?;
            report.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> colt::Result<RoadGraph> {
    read_graph(BufReader::new(File::open(path)?))
}

fn load_sultree(path: &Path, graph: &RoadGraph) -> colt::Result<SulTree> {
    read_sultree(BufReader::new(File::open(path)?), graph)
}

fn read_ids(path: &Path) -> colt::Result<Vec<VertexId>> {
    let mut ids = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        for field in line?.split_whitespace() {
            ids.push(field.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("bad vertex id `{field}`") })?);
        }
    }
    Ok(ids)
}

/// Materializes any lazy SDLs the objects need, then builds the COL-Tree.
fn coltree_for(sul: &mut SulTree, objects: &[VertexId], lambda: usize) -> colt::Result<ColTree> {
    if let Some(&v) = objects.iter().find(|&&v| v as usize >= sul.vertex_count()) {
        return Err(Error::Config(format!("object {v} out of range")));
    }
    let internal: Vec<VertexId> = objects.iter().map(|&p| sul.to_internal(p)).collect();
    sul.materialize_for_objects(&internal)?;
    ColTree::build(sul, objects, lambda)
}

enum Answer {
    Ranked(RankedOutput),
    Range(Vec<VertexId>, QueryStats),
}

impl Answer {
    fn key(&self) -> Vec<(VertexId, Dist)> {
        match self {
            Answer::Ranked(out) => out.neighbors.iter().map(|n| (n.object, n.score)).collect(),
            Answer::Range(ids, _) => ids.iter().map(|&p| (p, 0)).collect(),
        }
    }
}

fn run_query(args: QueryArgs) -> colt::Result<()> {
    let graph = load_graph(&args.graph)?;
    let objects = read_ids(&args.objects)?;
    let queries = match &args.q_file {
        Some(path) => read_ids(path)?,
        None => args.q.clone(),
    };
    if queries.is_empty() {
        return Err(Error::Config("no query vertices given".into()));
    }
    if args.kind != Kind::Aknn && queries.len() != 1 {
        return Err(Error::Config("kfn, range and knn take exactly one query vertex".into()));
    }
    let radius = match (args.kind, args.radius) {
        (Kind::Range, Some(r)) => r,
        (Kind::Range, None) => return Err(Error::Config("range queries need --radius".into())),
        _ => 0,
    };
    let q = queries[0];
    let answer = match args.method {
        Method::Brute => brute(&args, &graph, &objects, &queries, radius)?,
        Method::Ier => {
            let tree = StrRtree::build(&graph, &objects, DEFAULT_LEAF_CAPACITY)?;
            let mut backend = DistanceBackend::bidirectional(&graph);
            match args.kind {
                Kind::Aknn => Answer::Ranked(ier_aknn(&tree, &mut backend, &queries, args.k, args.agg)?),
                Kind::Knn => Answer::Ranked(ier_aknn(&tree, &mut backend, &queries, args.k, AggregateFunction::Max)?),
                Kind::Kfn => Answer::Ranked(ier_kfn(&tree, &mut backend, q, args.k)?),
                Kind::Range => {
                    let out = ier_range(&tree, &mut backend, q, radius)?;
                    Answer::Range(out.objects, out.stats)
                }
            }
        }
        Method::Aub | Method::Coltree => {
            let mut sul = match &args.sultree {
                Some(path) => load_sultree(path, &graph)?,
                None => build_sultree(&graph, &SulParams::default())?,
            };
            let col = match &args.coltree {
                Some(path) => {
                    // Lazy nodes pick landmarks when materialized, which the identity check covers.
                    let internal: Vec<VertexId> = objects.iter().map(|&p| sul.to_internal(p)).collect();
                    sul.materialize_for_objects(&internal)?;
                    read_coltree(BufReader::new(File::open(path)?), &sul)?
                }
                None => coltree_for(&mut sul, &objects, args.lambda)?,
            };
            let mut backend = DistanceBackend::for_sultree(&sul, args.backend);
            match (args.method, args.kind) {
                (Method::Aub, Kind::Kfn) => Answer::Ranked(aub_kfn(&objects, &sul, &mut backend, q, args.k)?),
                (Method::Aub, _) => return Err(Error::Unsupported("aub only answers kfn queries".into())),
                (_, Kind::Aknn) => Answer::Ranked(query::aknn(&col, &sul, &mut backend, &queries, args.k, args.agg)?),
                (_, Kind::Knn) => Answer::Ranked(query::knn(&col, &sul, &mut backend, q, args.k)?),
                (_, Kind::Kfn) => Answer::Ranked(query::kfn(&col, &sul, &mut backend, q, args.k)?),
                (_, Kind::Range) => {
                    let out = query::range(&col, &sul, &mut backend, q, radius)?;
                    Answer::Range(out.objects, out.stats)
                }
            }
        }
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let stats = match &answer {
        Answer::Ranked(r) => {
            for n in &r.neighbors {
                writeln!(out, "{} {}", n.object, n.score)?;
            }
            &r.stats
        }
        Answer::Range(ids, stats) => {
            for p in ids {
                writeln!(out, "{p}")?;
            }
            stats
        }
    };
    out.flush()?;
    eprintln!(
        "exact_distance_calls={} landmark_distance_calls={} candidates_retrieved={} nodes_visited={} wall_time_us={}",
        stats.exact_distance_calls,
        stats.landmark_distance_calls,
        stats.candidates_retrieved,
        stats.nodes_visited,
        stats.wall_time.as_micros()
    );
    if args.check && args.method != Method::Brute {
        let oracle = brute(&args, &graph, &objects, &queries, radius)?;
        if oracle.key() != answer.key() {
            return Err(Error::OracleMismatch(format!("{} result differs from brute force", args.method)));
        }
        eprintln!("oracle check passed");
    }
    Ok(())
}

fn brute(args: &QueryArgs, graph: &RoadGraph, objects: &[VertexId], queries: &[VertexId], radius: Dist) -> colt::Result<Answer> {
    let q = queries[0];
    Ok(match args.kind {
        Kind::Aknn => Answer::Ranked(brute_force_aknn(graph, objects, queries, args.k, args.agg)?),
        Kind::Knn => Answer::Ranked(brute_force_aknn(graph, objects, queries, args.k, AggregateFunction::Max)?),
        Kind::Kfn => Answer::Ranked(brute_force_kfn(graph, objects, q, args.k)?),
        Kind::Range => {
            let out = brute_force_range_with_stats(graph, objects, q, radius)?;
            Answer::Range(out.objects, out.stats)
        }
    })
}
