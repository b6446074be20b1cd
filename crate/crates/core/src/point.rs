//! Points, the dominance order and sequential skyline computation.
//!
//! Larger is better on both axes: `u` dominates `v` when `u` is at least as
//! large as `v` in both coordinates and the two are not the same location.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub type PointId = u64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub id: PointId,
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(id: PointId, x: f64, y: f64) -> Self {
        Point { id, x, y }
    }

    /// True when both coordinates match. Ids are ignored.
    pub fn same_location(&self, other: &Point) -> bool {
        self.x == other.x && self.y == other.y
    }

    /// `x + y`, the ranking score used by the FDS baseline.
    pub fn score(&self) -> f64 {
        self.x + self.y
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}({}, {})", self.id, self.x, self.y)
    }
}

/// `u` dominates `v`: `x_u >= x_v`, `y_u >= y_v` and the locations differ.
pub fn dominates(u: &Point, v: &Point) -> bool {
    u.x >= v.x && u.y >= v.y && !u.same_location(v)
}

/// `u` dominates `v` or sits at the same location. Sites use this to discard
/// a point once an equal-or-better point is known to the coordinator.
pub(crate) fn covers(u: &Point, v: &Point) -> bool {
    u.x >= v.x && u.y >= v.y
}

/// The maximal points of a set, ordered by strictly increasing `x` (and hence
/// strictly decreasing `y`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Skyline {
    points: Vec<Point>,
}

impl Skyline {
    pub fn empty() -> Self {
        Skyline::default()
    }

    /// Wraps points that are already a skyline. Order is normalised; the
    /// caller guarantees mutual non-dominance.
    pub(crate) fn from_maximal(mut points: Vec<Point>) -> Self {
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        debug_assert!(points.windows(2).all(|w| w[0].x < w[1].x && w[0].y > w[1].y));
        Skyline { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sorted ids of the members.
    pub fn ids(&self) -> Vec<PointId> {
        let mut ids: Vec<_> = self.points.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn contains_id(&self, id: PointId) -> bool {
        self.points.iter().any(|p| p.id == id)
    }

    /// True when some member dominates or coincides with `p`.
    pub fn covers(&self, p: &Point) -> bool {
        // The first member with x >= p.x has the largest y among those.
        let i = self.points.partition_point(|q| q.x < p.x);
        self.points.get(i).is_some_and(|q| q.y >= p.y)
    }
}

fn key(v: f64) -> u64 {
    // -0.0 and 0.0 are the same coordinate.
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// Rejects duplicate ids and duplicate `(x, y)` locations.
pub fn validate_distinct(points: &[Point]) -> Result<()> {
    let mut ids = HashSet::with_capacity(points.len());
    let mut locs = std::collections::HashMap::with_capacity(points.len());
    for p in points {
        if !ids.insert(p.id) {
            return Err(Error::DuplicateId(p.id));
        }
        if let Some(prev) = locs.insert((key(p.x), key(p.y)), *p) {
            return Err(Error::duplicate(&prev, p));
        }
    }
    Ok(())
}

/// Sort-and-scan skyline in `O(n log n)`.
///
/// Points are visited by decreasing `x` (ties by decreasing `y`); a point is
/// maximal exactly when its `y` beats every `y` seen before it. Identical
/// locations end up adjacent in that order, which is where duplicates are
/// detected.
pub fn skyline(points: &[Point]) -> Result<Skyline> {
    let mut order: Vec<Point> = points.to_vec();
    order.sort_by(|a, b| b.x.total_cmp(&a.x).then(b.y.total_cmp(&a.y)));
    for w in order.windows(2) {
        if w[0].same_location(&w[1]) {
            return Err(Error::duplicate(&w[0], &w[1]));
        }
    }
    Ok(skyline_of_sorted_desc(&order))
}

/// Scan step of [`skyline`] over points already ordered by decreasing `x`
/// then decreasing `y`, with distinct locations.
pub(crate) fn skyline_of_sorted_desc(order: &[Point]) -> Skyline {
    let mut out = Vec::new();
    let mut best_y = f64::NEG_INFINITY;
    for p in order {
        if p.y > best_y {
            best_y = p.y;
            out.push(*p);
        }
    }
    out.reverse();
    Skyline { points: out }
}

/// Skyline of points that are known to have distinct locations (for example
/// the union of disjoint subsets of a validated instance).
pub(crate) fn skyline_unchecked(points: &[Point]) -> Skyline {
    let mut order: Vec<Point> = points.to_vec();
    order.sort_by(|a, b| b.x.total_cmp(&a.x).then(b.y.total_cmp(&a.y)));
    skyline_of_sorted_desc(&order)
}

/// Quadratic reference implementation: keeps `p` iff nothing dominates it.
/// Shares no code with [`skyline`] beyond [`dominates`].
pub fn skyline_bruteforce(points: &[Point]) -> Result<Skyline> {
    validate_distinct(points)?;
    let kept: Vec<Point> = points.iter().filter(|p| !points.iter().any(|q| dominates(q, p))).copied().collect();
    Ok(Skyline::from_maximal(kept))
}
