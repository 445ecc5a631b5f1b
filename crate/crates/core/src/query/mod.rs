//! Exact object queries over COL-Trees.
//!
//! Every query takes and returns original vertex ids. Rankings break score
//! ties by the smaller object id, and a result is never dropped for a tie:
//! an index entry whose bound equals the current k-th score is still
//! explored when it may hold an object with a smaller id than the current
//! k-th result. Outputs therefore equal the brute-force ranking exactly.

mod aknn;
mod kfn;
mod range;

use std::fmt;
use std::str::FromStr;

pub use aknn::{aknn, aknn_with, knn, knn_with};
pub use kfn::{kfn, kfn_with};
pub use range::range;

use crate::coltree::{ColTree, OdlEntry};
use crate::graph::{Dist, VertexId, INFINITY};
use crate::stats::QueryStats;
use crate::sultree::SulTree;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AggregateFunction {
    Sum,
    #[default]
    Max,
}

impl AggregateFunction {
    pub fn apply<I: IntoIterator<Item = Dist>>(self, values: I) -> Dist {
        let it = values.into_iter();
        match self {
            AggregateFunction::Sum => it.sum(),
            AggregateFunction::Max => it.max().unwrap_or(0),
        }
    }
}

impl FromStr for AggregateFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(AggregateFunction::Sum),
            "max" => Ok(AggregateFunction::Max),
            other => Err(Error::config(format!("unknown aggregate function `{other}`"))),
        }
    }
}

impl fmt::Display for AggregateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregateFunction::Sum => "sum",
            AggregateFunction::Max => "max",
        })
    }
}

/// A value stored twice over so that half-integral points stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Doubled(pub Dist);

impl Doubled {
    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

/// Point minimizing `agg_i |x - C_i|` over the reals: the lower median for
/// `Sum`, the midpoint of the extremes for `Max`.
pub fn aggregate_minimizer(agg: AggregateFunction, constants: &[Dist]) -> Result<Doubled> {
    if constants.is_empty() {
        return Err(Error::config("no constants to minimize over"));
    }
    Ok(match agg {
        AggregateFunction::Sum => {
            let mut sorted = constants.to_vec();
            sorted.sort_unstable();
            Doubled(2 * sorted[(sorted.len() - 1) / 2])
        }
        AggregateFunction::Max => {
            let lo = *constants.iter().min().unwrap();
            let hi = *constants.iter().max().unwrap();
            Doubled(lo + hi)
        }
    })
}

/// `agg_i |x - C_i|`, the aggregate landmark lower bound of an object at
/// landmark distance `x`.
#[inline]
pub(crate) fn aggregate_gap(agg: AggregateFunction, x: Dist, constants: &[Dist]) -> Dist {
    agg.apply(constants.iter().map(|&c| x.abs_diff(c)))
}

/// ODL index with the smallest aggregate gap. The objective is convex in the
/// landmark distance, so the best entry is one of the two around the real
/// minimizer; equal values resolve to the smaller index.
pub fn minimizing_index(odl: &[OdlEntry], agg: AggregateFunction, constants: &[Dist]) -> Result<usize> {
    if odl.is_empty() {
        return Err(Error::config("empty ODL"));
    }
    let target = aggregate_minimizer(agg, constants)?.0;
    let at = odl.partition_point(|e| 2 * (e.dist as Dist) < target);
    let mut best: Option<(Dist, usize)> = None;
    if at > 0 {
        let value = odl[at - 1].dist;
        let first = odl.partition_point(|e| e.dist < value);
        best = Some((aggregate_gap(agg, value as Dist, constants), first));
    }
    if at < odl.len() {
        let cand = (aggregate_gap(agg, odl[at].dist as Dist, constants), at);
        if best.is_none_or(|b| cand < b) {
            best = Some(cand);
        }
    }
    Ok(best.unwrap().1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Neighbor {
    /// Original vertex id.
    pub object: VertexId,
    pub score: Dist,
}

impl Neighbor {
    pub fn new(object: VertexId, score: Dist) -> Self {
        Neighbor { object, score }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ranking {
    /// Ascending score (AkNN, kNN).
    Nearest,
    /// Descending score (kFN).
    Farthest,
}

/// The best `k` objects seen so far under the `(score, id)` rule.
#[derive(Clone, Debug)]
pub struct ResultSet {
    k: usize,
    ranking: Ranking,
    items: Vec<Neighbor>,
}

impl ResultSet {
    pub fn new(k: usize, ranking: Ranking) -> Self {
        ResultSet { k, ranking, items: Vec::with_capacity(k + 1) }
    }

    fn precedes(&self, a: &Neighbor, b: &Neighbor) -> bool {
        match self.ranking {
            Ranking::Nearest => (a.score, a.object) < (b.score, b.object),
            Ranking::Farthest => a.score > b.score || (a.score == b.score && a.object < b.object),
        }
    }

    pub fn is_full(&self) -> bool {
        self.items.len() >= self.k
    }

    /// The current k-th result, once `k` results are held.
    pub fn worst(&self) -> Option<&Neighbor> {
        if self.is_full() {
            self.items.last()
        } else {
            None
        }
    }

    /// `D_k`: the k-th score, or the neutral bound while not full.
    pub fn threshold(&self) -> Dist {
        match (self.worst(), self.ranking) {
            (Some(w), _) => w.score,
            (None, Ranking::Nearest) => INFINITY,
            (None, Ranking::Farthest) => 0,
        }
    }

    /// Whether a group whose scores are bounded by `bound` (below for
    /// nearest, above for farthest) and whose ids are at least `min_id` can
    /// still contribute.
    pub fn can_admit(&self, bound: Dist, min_id: VertexId) -> bool {
        match self.worst() {
            None => true,
            Some(w) => match self.ranking {
                Ranking::Nearest => bound < w.score || (bound == w.score && min_id < w.object),
                Ranking::Farthest => bound > w.score || (bound == w.score && min_id < w.object),
            },
        }
    }

    /// Whether every group with this bound or a worse one is excluded.
    pub fn is_past(&self, bound: Dist) -> bool {
        match self.worst() {
            None => false,
            Some(w) => match self.ranking {
                Ranking::Nearest => bound > w.score,
                Ranking::Farthest => bound < w.score,
            },
        }
    }

    pub fn offer(&mut self, n: Neighbor) -> bool {
        if self.k == 0 || self.worst().is_some_and(|w| !self.precedes(&n, w)) {
            return false;
        }
        let at = self.items.partition_point(|x| self.precedes(x, &n));
        self.items.insert(at, n);
        self.items.truncate(self.k);
        true
    }

    pub fn into_vec(self) -> Vec<Neighbor> {
        self.items
    }
}

/// One element taken off a search queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub key: Dist,
    pub kind: ElementKind,
    /// Exact score, for objects.
    pub exact: Option<Dist>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Object,
    LeafCursor,
    Leaf,
    Internal,
}

/// First visit of a leaf: the ODL entry chosen to start from and the best
/// objective value over the whole ODL.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeafStart {
    pub leaf: u32,
    pub index: usize,
    pub value: Dist,
    pub best: Dist,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub extractions: Vec<Extraction>,
    pub leaf_starts: Vec<LeafStart>,
    /// Steps where a cursor's bound decreased along its direction.
    pub walk_violations: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryOptions {
    /// Record extractions and leaf starts.
    pub trace: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankedOutput {
    pub neighbors: Vec<Neighbor>,
    pub stats: QueryStats,
    pub trace: Option<Trace>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RangeOutput {
    /// Original ids, ascending.
    pub objects: Vec<VertexId>,
    pub stats: QueryStats,
}

pub(crate) fn check_vertex(sul: &SulTree, v: VertexId) -> Result<VertexId> {
    if (v as usize) < sul.vertex_count() {
        Ok(sul.to_internal(v))
    } else {
        Err(Error::config(format!("query vertex {v} out of range")))
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::config("k must be at least 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_tree(col: &ColTree, sul: &SulTree) -> Result<()> {
    if col.sul_identity() != sul.identity() {
        Err(Error::config("COL-Tree was built from a different SUL-Tree"))
    } else {
        Ok(())
    }
}
