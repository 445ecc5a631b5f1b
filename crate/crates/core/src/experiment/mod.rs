//! Workload generation, synthetic graphs and the CSV benchmark driver.
//!
//! An experiment is described by a flat `key = value` file:
//!
//! ```text
//! graph = grid:50x50      # or geometric:2500, or a path to a binary graph
//! kind = aknn
//! methods = coltree, brute, ier
//! object_sets = 4
//! query_sets = 10
//! ```
//!
//! Unknown keys are rejected. Every query of every method is timed; index
//! construction is timed separately.

mod synthetic;
mod workload;

pub use synthetic::{geometric_graph, grid_graph, MAX_WEIGHT};
pub use workload::{generate_objects, generate_query_set};

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::baselines::{
    aub_kfn, brute_force_aknn, brute_force_kfn, brute_force_range_with_stats, ier_aknn, ier_kfn, ier_range, StrRtree,
    DEFAULT_LEAF_CAPACITY,
};
use crate::coltree::{write_coltree, ColTree};
use crate::distoracle::{BackendKind, DistanceBackend};
use crate::graph::{read_graph, Dist, RoadGraph, VertexId};
use crate::query::{self, AggregateFunction, Neighbor};
use crate::stats::QueryStats;
use crate::sultree::{build_sultree, LandmarkPolicy, SulParams, SulTree};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Aknn,
    Kfn,
    Range,
    Knn,
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aknn" => Ok(QueryKind::Aknn),
            "kfn" => Ok(QueryKind::Kfn),
            "range" => Ok(QueryKind::Range),
            "knn" => Ok(QueryKind::Knn),
            other => Err(Error::config(format!("unknown query kind `{other}`"))),
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::Aknn => "aknn",
            QueryKind::Kfn => "kfn",
            QueryKind::Range => "range",
            QueryKind::Knn => "knn",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Coltree,
    Brute,
    Aub,
    Ier,
}

impl Method {
    pub fn supports(self, kind: QueryKind) -> bool {
        match self {
            Method::Coltree | Method::Brute => true,
            Method::Aub => kind == QueryKind::Kfn,
            Method::Ier => kind != QueryKind::Kfn,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coltree" => Ok(Method::Coltree),
            "brute" => Ok(Method::Brute),
            "aub" => Ok(Method::Aub),
            "ier" => Ok(Method::Ier),
            other => Err(Error::config(format!("unknown method `{other}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Coltree => "coltree",
            Method::Brute => "brute",
            Method::Aub => "aub",
            Method::Ier => "ier",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    /// Binary graph written by `write_graph`.
    File(PathBuf),
    Grid { width: u32, height: u32 },
    Geometric { vertices: usize },
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(dims) = s.strip_prefix("grid:") {
            let (w, h) = dims.split_once('x').ok_or_else(|| Error::config(format!("bad grid size `{dims}`")))?;
            return Ok(GraphSource::Grid { width: parse_num(w, "grid width")?, height: parse_num(h, "grid height")? });
        }
        if let Some(n) = s.strip_prefix("geometric:") {
            return Ok(GraphSource::Geometric { vertices: parse_num(n, "vertex count")? });
        }
        Ok(GraphSource::File(PathBuf::from(s)))
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File(p) => write!(f, "{}", p.display()),
            GraphSource::Grid { width, height } => write!(f, "grid:{width}x{height}"),
            GraphSource::Geometric { vertices } => write!(f, "geometric:{vertices}"),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::config(format!("invalid {what} `{}`", s.trim())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub graph: GraphSource,
    pub graph_seed: u64,
    pub kind: QueryKind,
    pub k: usize,
    pub density: f64,
    pub query_size: usize,
    /// Percent of |V| covered by the query region.
    pub locality: f64,
    pub agg: AggregateFunction,
    /// Percent of the approximate diameter.
    pub radius: f64,
    pub object_sets: usize,
    pub query_sets: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub b: usize,
    pub alpha: usize,
    pub lambda: usize,
    pub m: usize,
    pub m_root: usize,
    pub policy: LandmarkPolicy,
    pub backend: BackendKind,
    /// Fraction of queries cross-checked against brute force.
    pub oracle_sample: f64,
    pub parallel: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            graph: GraphSource::Grid { width: 50, height: 50 },
            graph_seed: 0,
            kind: QueryKind::Aknn,
            k: 10,
            density: 0.001,
            query_size: 8,
            locality: 15.0,
            agg: AggregateFunction::Max,
            radius: 2.5,
            object_sets: 20,
            query_sets: 50,
            seed: 0,
            methods: vec![Method::Coltree, Method::Brute],
            b: 8,
            alpha: 1024,
            lambda: 256,
            m: 2,
            m_root: 16,
            policy: LandmarkPolicy::Random,
            backend: BackendKind::BidirectionalDijkstra,
            oracle_sample: 0.05,
            parallel: false,
        }
    }
}

impl ExperimentSpec {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got `{line}`")))?;
            spec.set(key.trim(), value.trim()).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "graph" => self.graph = value.parse()?,
            "graph_seed" => self.graph_seed = parse_num(value, key)?,
            "kind" => self.kind = value.parse()?,
            "k" => self.k = parse_num(value, key)?,
            "density" => self.density = parse_num(value, key)?,
            "query_size" => self.query_size = parse_num(value, key)?,
            "locality" => self.locality = parse_num(value, key)?,
            "agg" => self.agg = value.parse()?,
            "radius" => self.radius = parse_num(value, key)?,
            "object_sets" => self.object_sets = parse_num(value, key)?,
            "query_sets" => self.query_sets = parse_num(value, key)?,
            "seed" => self.seed = parse_num(value, key)?,
            "methods" => {
                self.methods = value.split(',').map(|m| m.trim()).filter(|m| !m.is_empty()).map(str::parse).collect::<Result<_>>()?
            }
            "b" => self.b = parse_num(value, key)?,
            "alpha" => self.alpha = parse_num(value, key)?,
            "lambda" => self.lambda = parse_num(value, key)?,
            "m" => self.m = parse_num(value, key)?,
            "m_root" => self.m_root = parse_num(value, key)?,
            "policy" => self.policy = value.parse()?,
            "backend" => self.backend = value.parse()?,
            "oracle_sample" => self.oracle_sample = parse_num(value, key)?,
            "parallel" => self.parallel = parse_num(value, key)?,
            other => return Err(Error::config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::config("density must lie in (0, 1]"));
        }
        if !(self.locality > 0.0 && self.locality <= 100.0) {
            return Err(Error::config("locality must lie in (0, 100]"));
        }
        if !(self.radius >= 0.0) {
            return Err(Error::config("radius must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.oracle_sample) {
            return Err(Error::config("oracle_sample must lie in [0, 1]"));
        }
        if self.k == 0 || self.query_size == 0 || self.lambda == 0 {
            return Err(Error::config("k, query_size and lambda must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("at least one method is required"));
        }
        Ok(())
    }

    pub fn sul_params(&self) -> SulParams {
        SulParams {
            b: self.b,
            alpha: self.alpha,
            m: self.m,
            m_root: self.m_root,
            policy: self.policy,
            seed: self.seed,
            ..SulParams::default()
        }
    }

    pub fn load_graph(&self) -> Result<RoadGraph> {
        match &self.graph {
            GraphSource::File(p) => read_graph(std::io::BufReader::new(std::fs::File::open(p)?)),
            GraphSource::Grid { width, height } => grid_graph(*width, *height, self.graph_seed),
            GraphSource::Geometric { vertices } => geometric_graph(*vertices, self.graph_seed),
        }
    }

    fn vertices_per_query(&self) -> usize {
        if self.kind == QueryKind::Aknn {
            self.query_size
        } else {
            1
        }
    }
}

/// Seed for the `index`-th draw of stream `stream`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const OBJECT_STREAM: u64 = 1;
const QUERY_STREAM: u64 = 2;
const ORACLE_STREAM: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryResult {
    Ranked(Vec<Neighbor>),
    Range(Vec<VertexId>),
}

/// One query executed by one method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub method: Method,
    pub object_set: usize,
    pub query_set: usize,
    pub object_count: usize,
    pub stats: QueryStats,
    pub result: QueryResult,
    pub oracle_checked: bool,
}

/// Per-method index construction figures, averaged over object sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildFigures {
    pub sultree_time: Duration,
    pub sultree_bytes: usize,
    pub gamma: f64,
    pub coltree_time: Duration,
    pub coltree_bytes: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub vertex_count: usize,
    pub diameter: Dist,
    pub radius: Dist,
    pub build: BuildFigures,
    pub records: Vec<QueryRecord>,
}

pub const CSV_HEADER: [&str; 19] = [
    "method",
    "kind",
    "status",
    "queries",
    "oracle_checked",
    "mean_objects",
    "mean_time_us",
    "median_time_us",
    "mean_exact_distance_calls",
    "mean_landmark_distance_calls",
    "mean_candidates_retrieved",
    "mean_nodes_visited",
    "mean_vertices_settled",
    "sultree_build_ms",
    "sultree_bytes",
    "gamma",
    "coltree_build_ms",
    "coltree_bytes",
    "radius",
];

/// Columns that hold wall-clock measurements and vary between runs.
pub const TIME_COLUMNS: [&str; 4] = ["mean_time_us", "median_time_us", "sultree_build_ms", "coltree_build_ms"];

impl ExperimentReport {
    pub fn records_for(&self, method: Method) -> impl Iterator<Item = &QueryRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.spec.methods.iter().map(|&m| self.row(m)).collect()
    }

    fn row(&self, method: Method) -> Vec<String> {
        let kind = self.spec.kind;
        let mut row = vec![method.to_string(), kind.to_string()];
        if !method.supports(kind) {
            row.push("unsupported".into());
            row.resize(CSV_HEADER.len(), String::new());
            return row;
        }
        let recs: Vec<&QueryRecord> = self.records_for(method).collect();
        let n = recs.len().max(1) as f64;
        let mean = |f: &dyn Fn(&QueryRecord) -> f64| format!("{:.3}", recs.iter().map(|r| f(r)).sum::<f64>() / n);
        let mut times: Vec<f64> = recs.iter().map(|r| r.stats.wall_time.as_secs_f64() * 1e6).collect();
        times.sort_by(f64::total_cmp);
        let median = match times.len() {
            0 => 0.0,
            l if l % 2 == 1 => times[l / 2],
            l => (times[l / 2 - 1] + times[l / 2]) / 2.0,
        };
        let uses_sul = matches!(method, Method::Coltree | Method::Aub);
        let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
        row.extend([
            "ok".to_string(),
            recs.len().to_string(),
            recs.iter().filter(|r| r.oracle_checked).count().to_string(),
            mean(&|r| r.object_count as f64),
            mean(&|r| r.stats.wall_time.as_secs_f64() * 1e6),
            format!("{median:.3}"),
            mean(&|r| r.stats.exact_distance_calls as f64),
            mean(&|r| r.stats.landmark_distance_calls as f64),
            mean(&|r| r.stats.candidates_retrieved as f64),
            mean(&|r| r.stats.nodes_visited as f64),
            mean(&|r| r.stats.vertices_settled as f64),
        ]);
        if uses_sul {
            row.extend([ms(self.build.sultree_time), self.build.sultree_bytes.to_string(), format!("{:.4}", self.build.gamma)]);
        } else {
            row.extend([String::new(), String::new(), String::new()]);
        }
        if method == Method::Coltree {
            row.extend([ms(self.build.coltree_time), self.build.coltree_bytes.to_string()]);
        } else {
            row.extend([String::new(), String::new()]);
        }
        row.push(if kind == QueryKind::Range { self.radius.to_string() } else { String::new() });
        row
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(csv_error)?;
        for row in self.rows() {
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        self.write_csv(&mut out)?;
        Ok(String::from_utf8(out).expect("csv output is UTF-8"))
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::format(format!("csv: {other:?}")),
    }
}

/// Blanks the wall-clock columns of a CSV produced by [`ExperimentReport::write_csv`].
pub fn strip_time_columns(csv_text: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    let drop: Vec<bool> = header.iter().map(|h| TIME_COLUMNS.contains(&h)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(csv_error)?;
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        w.write_record(rec.iter().zip(&drop).map(|(v, &d)| if d { "" } else { v })).map_err(csv_error)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("csv output is UTF-8"))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let graph = spec.load_graph()?;
    run_experiment_on(spec, &graph)
}

/// Runs `spec` on an already loaded graph; `spec.graph` is ignored.
pub fn run_experiment_on(spec: &ExperimentSpec, graph: &RoadGraph) -> Result<ExperimentReport> {
    spec.validate()?;
    if !graph.is_connected() {
        return Err(Error::config("experiment graphs must be connected; normalize first"));
    }
    let needs_sul = spec.methods.iter().any(|&m| matches!(m, Method::Coltree | Method::Aub) && m.supports(spec.kind));
    let mut build = BuildFigures::default();
    let sul = if needs_sul {
        let start = Instant::now();
        let sul = build_sultree(graph, &spec.sul_params())?;
        build.sultree_time = start.elapsed();
        build.sultree_bytes = sul.sdl_size_comparison().0;
        build.gamma = sul.gamma();
        Some(sul)
    } else {
        None
    };
    let diameter = graph.approximate_diameter();
    let radius = (spec.radius / 100.0 * diameter as f64).floor() as Dist;
    let ctx = Context { spec, graph, sul: sul.as_ref(), radius };
    let sets: Vec<usize> = (0..spec.object_sets).collect();
    let outcomes: Vec<Result<SetOutcome>> = if spec.parallel {
        sets.par_iter().map(|&i| ctx.run_object_set(i)).collect()
    } else {
        sets.iter().map(|&i| ctx.run_object_set(i)).collect()
    };
    let mut records = Vec::new();
    let mut col_time = Duration::ZERO;
    let mut col_bytes = 0;
    for outcome in outcomes {
        let o = outcome?;
        records.extend(o.records);
        col_time += o.coltree_time;
        col_bytes += o.coltree_bytes;
    }
    if spec.object_sets > 0 {
        build.coltree_time = col_time / spec.object_sets as u32;
        build.coltree_bytes = col_bytes / spec.object_sets;
    }
    Ok(ExperimentReport { spec: spec.clone(), vertex_count: graph.vertex_count(), diameter, radius, build, records })
}

struct Context<'a> {
    spec: &'a ExperimentSpec,
    graph: &'a RoadGraph,
    sul: Option<&'a SulTree>,
    radius: Dist,
}

struct SetOutcome {
    records: Vec<QueryRecord>,
    coltree_time: Duration,
    coltree_bytes: usize,
}

impl Context<'_> {
    fn run_object_set(&self, set: usize) -> Result<SetOutcome> {
        let spec = self.spec;
        let objects = generate_objects(self.graph, spec.density, derive_seed(spec.seed, OBJECT_STREAM, set as u64))?;
        let wants = |m: Method| spec.methods.contains(&m) && m.supports(spec.kind);
        let mut coltree_time = Duration::ZERO;
        let mut coltree_bytes = 0;
        let col = match (wants(Method::Coltree), self.sul) {
            (true, Some(sul)) => {
                let start = Instant::now();
                let col = ColTree::build(sul, &objects, spec.lambda)?;
                coltree_time = start.elapsed();
                let mut bytes = Vec::new();
                write_coltree(&col, &mut bytes)?;
                coltree_bytes = bytes.len();
                Some(col)
            }
            _ => None,
        };
        let rtree = if wants(Method::Ier) { Some(StrRtree::build(self.graph, &objects, DEFAULT_LEAF_CAPACITY)?) } else { None };
        let mut sul_backend = self.sul.map(|s| DistanceBackend::for_sultree(s, spec.backend));
        let mut graph_backend = DistanceBackend::bidirectional(self.graph);
        let mut records = Vec::new();
        for qs in 0..spec.query_sets {
            let index = (set * spec.query_sets + qs) as u64;
            let queries =
                generate_query_set(self.graph, spec.vertices_per_query(), spec.locality, derive_seed(spec.seed, QUERY_STREAM, index))?;
            let check = spec.oracle_sample > 0.0 && unit(derive_seed(spec.seed, ORACLE_STREAM, index)) < spec.oracle_sample;
            let mut oracle: Option<QueryResult> = None;
            for &method in &spec.methods {
                if !method.supports(spec.kind) {
                    continue;
                }
                let (result, stats) = match method {
                    Method::Brute => self.brute(&objects, &queries)?,
                    Method::Coltree => {
                        let col = col.as_ref().expect("built above");
                        self.coltree(col, sul_backend.as_mut().expect("built above"), &queries)?
                    }
                    Method::Aub => {
                        let out = aub_kfn(&objects, self.sul.expect("built above"), sul_backend.as_mut().unwrap(), queries[0], spec.k)?;
                        (QueryResult::Ranked(out.neighbors), out.stats)
                    }
                    Method::Ier => self.ier(rtree.as_ref().expect("built above"), &mut graph_backend, &queries)?,
                };
                if check {
                    if oracle.is_none() {
                        oracle = Some(if method == Method::Brute { result.clone() } else { self.brute(&objects, &queries)?.0 });
                    }
                    if oracle.as_ref() != Some(&result) {
                        return Err(Error::OracleMismatch(format!(
                            "{method} {} disagrees with brute force on object set {set}, query set {qs} (queries {queries:?})",
                            spec.kind
                        )));
                    }
                }
                records.push(QueryRecord {
                    method,
                    object_set: set,
                    query_set: qs,
                    object_count: objects.len(),
                    stats,
                    result,
                    oracle_checked: check,
                });
            }
        }
        Ok(SetOutcome { records, coltree_time, coltree_bytes })
    }

    fn brute(&self, objects: &[VertexId], queries: &[VertexId]) -> Result<(QueryResult, QueryStats)> {
        let spec = self.spec;
        Ok(match spec.kind {
            QueryKind::Aknn => ranked(brute_force_aknn(self.graph, objects, queries, spec.k, spec.agg)?),
            QueryKind::Knn => ranked(brute_force_aknn(self.graph, objects, queries, spec.k, AggregateFunction::Max)?),
            QueryKind::Kfn => ranked(brute_force_kfn(self.graph, objects, queries[0], spec.k)?),
            QueryKind::Range => {
                let out = brute_force_range_with_stats(self.graph, objects, queries[0], self.radius)?;
                (QueryResult::Range(out.objects), out.stats)
            }
        })
    }

    fn coltree(&self, col: &ColTree, backend: &mut DistanceBackend<'_>, queries: &[VertexId]) -> Result<(QueryResult, QueryStats)> {
        let spec = self.spec;
        let sul = self.sul.expect("coltree needs a SUL-Tree");
        Ok(match spec.kind {
            QueryKind::Aknn => ranked(query::aknn(col, sul, backend, queries, spec.k, spec.agg)?),
            QueryKind::Knn => ranked(query::knn(col, sul, backend, queries[0], spec.k)?),
            QueryKind::Kfn => ranked(query::kfn(col, sul, backend, queries[0], spec.k)?),
            QueryKind::Range => {
                let out = query::range(col, sul, backend, queries[0], self.radius)?;
                (QueryResult::Range(out.objects), out.stats)
            }
        })
    }

    fn ier(&self, tree: &StrRtree, backend: &mut DistanceBackend<'_>, queries: &[VertexId]) -> Result<(QueryResult, QueryStats)> {
        let spec = self.spec;
        Ok(match spec.kind {
            QueryKind::Aknn => ranked(ier_aknn(tree, backend, queries, spec.k, spec.agg)?),
            QueryKind::Knn => ranked(ier_aknn(tree, backend, queries, spec.k, AggregateFunction::Max)?),
            QueryKind::Kfn => ranked(ier_kfn(tree, backend, queries[0], spec.k)?),
            QueryKind::Range => {
                let out = ier_range(tree, backend, queries[0], self.radius)?;
                (QueryResult::Range(out.objects), out.stats)
            }
        })
    }
}

fn ranked(out: query::RankedOutput) -> (QueryResult, QueryStats) {
    (QueryResult::Ranked(out.neighbors), out.stats)
}

/// Maps a seed to `[0, 1)`.
fn unit(seed: u64) -> f64 {
    (seed >> 11) as f64 / (1u64 << 53) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(kind: QueryKind) -> ExperimentSpec {
        ExperimentSpec {
            graph: GraphSource::Grid { width: 20, height: 20 },
            kind,
            density: 0.05,
            object_sets: 2,
            query_sets: 5,
            alpha: 32,
            lambda: 4,
            b: 4,
            oracle_sample: 1.0,
            methods: vec![Method::Coltree, Method::Brute, Method::Aub, Method::Ier],
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn parses_specs() {
        let spec = ExperimentSpec::parse(
            "graph = grid:30x20\nkind = kfn # comment\nmethods = coltree, aub\n\nk=5\ndensity=0.01\npolicy=slice\nparallel=true\n",
        )
        .unwrap();
        assert_eq!(spec.graph, GraphSource::Grid { width: 30, height: 20 });
        assert_eq!(spec.kind, QueryKind::Kfn);
        assert_eq!(spec.methods, vec![Method::Coltree, Method::Aub]);
        assert_eq!((spec.k, spec.density, spec.parallel), (5, 0.01, true));
        assert_eq!(spec.policy, LandmarkPolicy::SliceFurthestBorder);
        assert_eq!(spec.query_size, 8);
        assert_eq!(spec.agg, AggregateFunction::Max);
        assert!(matches!(ExperimentSpec::parse("bogus = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ExperimentSpec::parse("k\n"), Err(Error::Parse { line: 1, .. })));
        assert!(ExperimentSpec::parse("density = 0").is_err());
        assert_eq!(ExperimentSpec::parse("graph = /tmp/g.bin").unwrap().graph, GraphSource::File("/tmp/g.bin".into()));
    }

    #[test]
    fn every_kind_passes_the_oracle() {
        for kind in [QueryKind::Aknn, QueryKind::Kfn, QueryKind::Range, QueryKind::Knn] {
            let report = run_experiment(&small_spec(kind)).unwrap();
            let csv = report.to_csv().unwrap();
            let lines: Vec<&str> = csv.lines().collect();
            assert_eq!(lines.len(), 5);
            for (m, line) in report.spec.methods.iter().zip(&lines[1..]) {
                let status = if m.supports(kind) { ",ok," } else { ",unsupported," };
                assert!(line.contains(status), "{kind} {m}: {line}");
            }
            assert_eq!(report.records_for(Method::Brute).count(), 10);
        }
    }

    #[test]
    fn repetitions_multiply_out() {
        let spec = ExperimentSpec { object_sets: 3, query_sets: 4, oracle_sample: 0.0, methods: vec![Method::Brute], ..small_spec(QueryKind::Knn) };
        assert_eq!(run_experiment(&spec).unwrap().records.len(), 12);
    }

    #[test]
    fn deterministic_modulo_time_and_parallel_agnostic() {
        let spec = small_spec(QueryKind::Aknn);
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&ExperimentSpec { parallel: true, ..spec }).unwrap();
        assert_eq!(strip_time_columns(&a.to_csv().unwrap()).unwrap(), strip_time_columns(&b.to_csv().unwrap()).unwrap());
        let strip = |r: &ExperimentReport| {
            r.records.iter().map(|x| (x.method, x.result.clone(), x.stats.exact_distance_calls)).collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(derive_seed(0, 1, 0), derive_seed(0, 2, 0));
        assert_ne!(derive_seed(0, 1, 0), derive_seed(0, 1, 1));
        assert!((0..1000).all(|i| (0.0..1.0).contains(&unit(derive_seed(5, 3, i)))));
    }
}
