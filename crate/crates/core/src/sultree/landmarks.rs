//! Landmark selection policies for SUL-Tree nodes.

use std::f64::consts::TAU;
use std::ops::Range;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::graph::{Dist, Point, VertexId};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum LandmarkPolicy {
    #[default]
    Random,
    FurthestBorder,
    SliceFurthestBorder,
    BorderMinmax,
}

impl LandmarkPolicy {
    pub(crate) fn tag(self) -> u8 {
        match self {
            LandmarkPolicy::Random => 0,
            LandmarkPolicy::FurthestBorder => 1,
            LandmarkPolicy::SliceFurthestBorder => 2,
            LandmarkPolicy::BorderMinmax => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => LandmarkPolicy::Random,
            1 => LandmarkPolicy::FurthestBorder,
            2 => LandmarkPolicy::SliceFurthestBorder,
            3 => LandmarkPolicy::BorderMinmax,
            _ => return None,
        })
    }
}

impl std::str::FromStr for LandmarkPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(LandmarkPolicy::Random),
            "furthest" | "farthest" | "furthest-border" => Ok(LandmarkPolicy::FurthestBorder),
            "slice" | "slice-furthest-border" => Ok(LandmarkPolicy::SliceFurthestBorder),
            "minmax" | "border-minmax" => Ok(LandmarkPolicy::BorderMinmax),
            other => Err(Error::config(format!("unknown landmark policy `{other}`"))),
        }
    }
}

impl std::fmt::Display for LandmarkPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LandmarkPolicy::Random => "random",
            LandmarkPolicy::FurthestBorder => "furthest",
            LandmarkPolicy::SliceFurthestBorder => "slice",
            LandmarkPolicy::BorderMinmax => "minmax",
        })
    }
}

/// Maximum number of borders sampled by [`LandmarkPolicy::BorderMinmax`].
pub const MINMAX_SAMPLE: usize = 16;

/// Fills `chosen` up to `m` with random unchosen vertices of `range`.
pub(crate) fn pad_random<R: Rng>(chosen: &mut Vec<VertexId>, range: Range<VertexId>, m: usize, rng: &mut R) {
    if chosen.len() >= m {
        return;
    }
    let rest: Vec<VertexId> = range.filter(|v| !chosen.contains(v)).collect();
    let need = m - chosen.len();
    chosen.extend(rest.choose_multiple(rng, need).copied());
}

pub(crate) fn random<R: Rng>(range: Range<VertexId>, m: usize, rng: &mut R) -> Vec<VertexId> {
    index::sample(rng, range.len(), m).into_iter().map(|i| range.start + i as VertexId).collect()
}

/// One landmark per angular sector around the subgraph centroid. Sector 0
/// starts east of the centroid and sectors run counterclockwise.
pub(crate) fn slice<R: Rng>(
    coords: Option<&[Point]>,
    range: Range<VertexId>,
    borders: &[VertexId],
    m: usize,
    rng: &mut R,
) -> Result<Vec<VertexId>> {
    let coords = coords.ok_or_else(|| Error::config("slice landmark policy requires coordinates"))?;
    let count = range.len() as f64;
    let (sx, sy) = range.clone().fold((0.0, 0.0), |(sx, sy), v| {
        let p = coords[v as usize];
        (sx + p.x, sy + p.y)
    });
    let center = Point::new(sx / count, sy / count);
    let sector = |v: VertexId| {
        let p = coords[v as usize];
        let angle = (p.y - center.y).atan2(p.x - center.x).rem_euclid(TAU);
        ((angle / (TAU / m as f64)) as usize).min(m - 1)
    };
    let furthest = |candidates: &mut dyn Iterator<Item = VertexId>| {
        candidates.max_by(|&a, &b| {
            center.euclid(coords[a as usize]).total_cmp(&center.euclid(coords[b as usize])).then(b.cmp(&a))
        })
    };
    let mut chosen = Vec::with_capacity(m);
    let mut empty = 0;
    for s in 0..m {
        let pick = furthest(&mut borders.iter().copied().filter(|&b| sector(b) == s))
            .or_else(|| furthest(&mut range.clone().filter(|&v| sector(v) == s)));
        match pick {
            Some(v) if !chosen.contains(&v) => chosen.push(v),
            _ => empty += 1,
        }
    }
    debug_assert_eq!(chosen.len() + empty, m);
    pad_random(&mut chosen, range, m, rng);
    Ok(chosen)
}

/// Approximate subgraph centre: the `m` vertices whose largest distance to a
/// random sample of borders is smallest. `search(source, out)` fills `out`
/// with distances from `source` to every vertex of `range`.
pub(crate) fn border_minmax<R: Rng>(
    range: Range<VertexId>,
    borders: &[VertexId],
    m: usize,
    rng: &mut R,
    search: &mut dyn FnMut(VertexId, &mut [Dist]),
) -> Vec<VertexId> {
    if borders.is_empty() {
        return random(range, m, rng);
    }
    let sample: Vec<VertexId> = borders.choose_multiple(rng, MINMAX_SAMPLE.min(borders.len())).copied().collect();
    let mut worst = vec![0 as Dist; range.len()];
    let mut row = vec![0 as Dist; range.len()];
    for &b in &sample {
        search(b, &mut row);
        for (w, &d) in worst.iter_mut().zip(&row) {
            *w = (*w).max(d);
        }
    }
    let mut order: Vec<usize> = (0..range.len()).collect();
    order.sort_by_key(|&i| (worst[i], i));
    order.truncate(m);
    order.into_iter().map(|i| range.start + i as VertexId).collect()
}

/// Next furthest-border landmark: the unchosen border maximizing the minimum
/// distance to the landmarks chosen so far (`rows[j][b - first]`).
pub(crate) fn next_furthest_border(
    borders: &[VertexId],
    first: VertexId,
    chosen: &[VertexId],
    rows: &[Vec<Dist>],
) -> Option<VertexId> {
    borders
        .iter()
        .copied()
        .filter(|b| !chosen.contains(b))
        .map(|b| (rows.iter().map(|r| r[(b - first) as usize]).min().unwrap_or(0), b))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, b)| b)
}
