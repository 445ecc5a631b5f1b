//! Triangle-inequality bound arithmetic shared by the indexes and searches.

use crate::graph::Dist;

/// Distance from `x` to the interval `[lo, hi]`; zero inside it.
///
/// With `x = d(l, q)` and `[lo, hi]` the landmark distances of a vertex
/// group, this lower-bounds `d(q, p)` for every `p` in the group.
#[inline]
pub(crate) fn interval_gap(x: Dist, lo: Dist, hi: Dist) -> Dist {
    if x >= hi {
        x - hi
    } else if x <= lo {
        lo - x
    } else {
        0
    }
}

/// Same bound when only `LB(l,q) <= d(l,q) <= UB(l,q)` is known.
#[inline]
pub(crate) fn relaxed_interval_gap(lb: Dist, ub: Dist, lo: Dist, hi: Dist) -> Dist {
    if lb >= hi {
        lb - hi
    } else if ub <= lo {
        lo - ub
    } else {
        0
    }
}
