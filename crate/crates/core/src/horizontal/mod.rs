//! Protocols for horizontally partitioned data: every site holds a subset
//! of whole points.

mod naive;
mod optimal;
mod sorted;
mod tradeoff;

use std::collections::HashSet;

pub use naive::{run_naive, NaiveCoordinator, NaiveSite};
pub use optimal::{run_optimal, OptimalCoordinator, OptimalDown, OptimalSite, OptimalUp, OPTIMAL_WORD_FACTOR};
pub use sorted::{run_sorted, SortedCoordinator, SortedDown, SortedSite, SortedUp};
pub use tradeoff::{
    run_tradeoff, strip_count, StepRecord, TradeoffCoordinator, TradeoffDown, TradeoffParams, TradeoffSite,
    TradeoffState, TradeoffUp,
};

use crate::coordsim::{Payload, FLAG_WORDS};
use crate::error::{Error, Result};
use crate::point::{skyline_unchecked, validate_distinct, Point, PointId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    Random,
    ByKey,
    /// Site `i` holds every point with `x` in `(x_{i-1}, x_i]`.
    Sorted,
}

#[derive(Clone, Debug)]
pub struct HorizontalInstance {
    sites: Vec<Vec<Point>>,
    kind: PartitionKind,
}

impl HorizontalInstance {
    /// Validates distinct ids and locations over the union, and the x-order
    /// of the sites for [`PartitionKind::Sorted`].
    pub fn new(sites: Vec<Vec<Point>>, kind: PartitionKind) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::parameter("an instance needs at least one site"));
        }
        validate_distinct(&sites.concat())?;
        let instance = HorizontalInstance { sites, kind };
        if kind == PartitionKind::Sorted {
            instance.check_sorted()?;
        }
        Ok(instance)
    }

    pub fn sites(&self) -> &[Vec<Point>] {
        &self.sites
    }

    pub fn s(&self) -> usize {
        self.sites.len()
    }

    pub fn n(&self) -> usize {
        self.sites.iter().map(Vec::len).sum()
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn union(&self) -> Vec<Point> {
        self.sites.concat()
    }

    /// Every x at site `i` is at most every x at site `i + 1`.
    pub fn check_sorted(&self) -> Result<()> {
        let mut prev_max = f64::NEG_INFINITY;
        for (i, site) in self.sites.iter().enumerate() {
            let Some(min) = site.iter().map(|p| p.x).min_by(f64::total_cmp) else { continue };
            if min < prev_max {
                return Err(Error::Precondition(format!(
                    "site {} has x = {min} below the previous site's maximum {prev_max}",
                    i + 1
                )));
            }
            prev_max = site.iter().map(|p| p.x).max_by(f64::total_cmp).unwrap();
        }
        Ok(())
    }
}

/// Local skyline ordered by increasing x, the starting state of every site.
pub(crate) fn local_skyline(points: &[Point]) -> Vec<Point> {
    skyline_unchecked(points).into_points()
}

/// A site's list of points, or the one-word "nothing left" flag.
#[derive(Clone, Debug, PartialEq)]
pub enum PointBatch {
    Empty,
    Points(Vec<Point>),
}

impl PointBatch {
    pub(crate) fn from_vec(points: Vec<Point>) -> Self {
        if points.is_empty() {
            PointBatch::Empty
        } else {
            PointBatch::Points(points)
        }
    }

    pub fn points(&self) -> &[Point] {
        match self {
            PointBatch::Empty => &[],
            PointBatch::Points(p) => p,
        }
    }
}

impl Payload for PointBatch {
    fn words(&self) -> u64 {
        match self {
            PointBatch::Empty => FLAG_WORDS,
            PointBatch::Points(p) => p.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.points().carried_ids(out)
    }
}

/// Distinct points the coordinator has seen.
#[derive(Debug, Default)]
pub(crate) struct Received(HashSet<PointId>);

impl Received {
    pub(crate) fn note<'a>(&mut self, points: impl IntoIterator<Item = &'a Point>) {
        self.0.extend(points.into_iter().map(|p| p.id));
    }

    pub(crate) fn len(&self) -> usize {
        self.0.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_validation() {
        let a = vec![Point::new(0, 1.0, 1.0)];
        let b = vec![Point::new(1, 1.0, 1.0)];
        assert!(HorizontalInstance::new(vec![a.clone(), b], PartitionKind::Random).is_err());
        assert!(HorizontalInstance::new(vec![], PartitionKind::Random).is_err());

        let left = vec![Point::new(0, 1.0, 5.0), Point::new(1, 2.0, 1.0)];
        let right = vec![Point::new(2, 3.0, 3.0)];
        assert!(HorizontalInstance::new(vec![left.clone(), vec![], right.clone()], PartitionKind::Sorted).is_ok());
        assert!(matches!(
            HorizontalInstance::new(vec![right, left], PartitionKind::Sorted),
            Err(Error::Precondition(_))
        ));
    }
}
