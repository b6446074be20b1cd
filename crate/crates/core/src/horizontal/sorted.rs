//! Two-round protocol for data split across sites by x-ranges.
//!
//! Round 1 collects each site's largest y. In round 2 site `i` learns
//! `z_i`, the largest y held by any site to its right, and ships exactly the
//! local skyline points above it; those are global skyline points.

use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome, Payload, Site};
use crate::error::{Error, Result};
use crate::point::{skyline_unchecked, Point, PointId};

use super::{local_skyline, HorizontalInstance, PartitionKind, PointBatch, Received};

pub fn run_sorted(instance: &HorizontalInstance) -> Result<Outcome> {
    if instance.kind() != PartitionKind::Sorted {
        return Err(Error::Precondition(format!(
            "the sorted protocol needs an x-sorted partition, got {:?}",
            instance.kind()
        )));
    }
    instance.check_sorted()?;
    let mut sites: Vec<SortedSite> = instance.sites().iter().map(|p| SortedSite::new(p)).collect();
    let mut coord = SortedCoordinator::new(instance.s());
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SortedDown {
    Start,
    /// `z_i`; `-∞` for the last site.
    Threshold(f64),
}

impl Payload for SortedDown {
    fn words(&self) -> u64 {
        match self {
            SortedDown::Start => 0,
            SortedDown::Threshold(_) => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SortedUp {
    MaxY(f64),
    Batch(PointBatch),
}

impl Payload for SortedUp {
    fn words(&self) -> u64 {
        match self {
            SortedUp::MaxY(_) => 1,
            SortedUp::Batch(b) => b.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        if let SortedUp::Batch(b) = self {
            b.carried_ids(out)
        }
    }
}

pub struct SortedSite {
    skyline: Vec<Point>,
}

impl SortedSite {
    pub fn new(points: &[Point]) -> Self {
        SortedSite { skyline: local_skyline(points) }
    }
}

impl Site<SortedDown, SortedUp> for SortedSite {
    fn respond(&mut self, msg: SortedDown) -> SortedUp {
        match msg {
            SortedDown::Start => match self.skyline.first() {
                Some(top) => SortedUp::MaxY(top.y),
                None => SortedUp::Batch(PointBatch::Empty),
            },
            SortedDown::Threshold(z) => {
                // Increasing x means decreasing y: the survivors are a prefix.
                // An empty survivor list is an empty contact, not the flag.
                let keep = self.skyline.partition_point(|p| p.y > z);
                SortedUp::Batch(PointBatch::Points(self.skyline[..keep].to_vec()))
            }
        }
    }
}

pub struct SortedCoordinator {
    s: usize,
    received: Received,
    thresholds: Vec<f64>,
}

impl SortedCoordinator {
    pub fn new(s: usize) -> Self {
        SortedCoordinator { s, received: Received::default(), thresholds: Vec::new() }
    }

    /// `z_i` per site, available after round 1.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }
}

impl Coordinator for SortedCoordinator {
    type Down = SortedDown;
    type Up = SortedUp;

    fn step(&mut self, round: usize, replies: Vec<(usize, SortedUp)>) -> Action<SortedDown> {
        match round {
            1 => Action::Send((0..self.s).map(|i| (i, SortedDown::Start)).collect()),
            2 => {
                let mut top = vec![None; self.s];
                for (site, reply) in replies {
                    if let SortedUp::MaxY(y) = reply {
                        top[site] = Some(y);
                    }
                }
                self.thresholds = vec![f64::NEG_INFINITY; self.s];
                let mut suffix = f64::NEG_INFINITY;
                for i in (0..self.s).rev() {
                    self.thresholds[i] = suffix;
                    if let Some(y) = top[i] {
                        suffix = suffix.max(y);
                    }
                }
                let msgs: Vec<_> = (0..self.s)
                    .filter(|&i| top[i].is_some())
                    .map(|i| (i, SortedDown::Threshold(self.thresholds[i])))
                    .collect();
                if msgs.is_empty() {
                    Action::Finish(Default::default())
                } else {
                    Action::Send(msgs)
                }
            }
            _ => {
                let all: Vec<Point> = replies
                    .iter()
                    .flat_map(|(_, r)| match r {
                        SortedUp::Batch(b) => b.points().to_vec(),
                        SortedUp::MaxY(_) => Vec::new(),
                    })
                    .collect();
                self.received.note(&all);
                Action::Finish(skyline_unchecked(&all))
            }
        }
    }

    fn recovered_points(&self) -> usize {
        self.received.len()
    }
}
