//! Feedback-driven score filtering.
//!
//! Each iteration takes three rounds: sites send their top-κ points by
//! `x + y`, every site then sends the points scoring above the smallest
//! score seen, and finally the coordinator feeds newly found skyline points
//! back so that sites can drop what they dominate.

use std::collections::HashSet;

use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome, Payload, Site, FLAG_WORDS};
use crate::error::{Error, Result};
use crate::horizontal::{HorizontalInstance, PointBatch};
use crate::point::{skyline_unchecked, Point, PointId, Skyline};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FdsParams {
    pub kappa: usize,
    /// Accepted for compatibility; has no effect.
    pub ell: usize,
}

impl FdsParams {
    pub fn new(kappa: usize, ell: usize) -> Self {
        FdsParams { kappa, ell }
    }

    fn validate(&self) -> Result<()> {
        if self.kappa == 0 || self.ell == 0 {
            return Err(Error::parameter("kappa and ell must be at least 1"));
        }
        Ok(())
    }
}

impl Default for FdsParams {
    fn default() -> Self {
        FdsParams { kappa: 1, ell: 1 }
    }
}

pub fn run_fds(instance: &HorizontalInstance, params: FdsParams) -> Result<Outcome> {
    params.validate()?;
    let mut sites: Vec<FdsSite> = instance.sites().iter().map(|p| FdsSite::new(p, params.kappa)).collect();
    let mut coord = FdsCoordinator::new(instance.s());
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum FdsDown {
    Top,
    /// The smallest score among the top batches.
    Threshold(f64),
    /// Skyline points found since the last feedback.
    Feedback(Vec<Point>),
}

impl Payload for FdsDown {
    fn words(&self) -> u64 {
        match self {
            FdsDown::Top => 0,
            FdsDown::Threshold(f) => f.words(),
            FdsDown::Feedback(p) => p.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        if let FdsDown::Feedback(p) = self {
            p.carried_ids(out)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FdsUp {
    Batch(PointBatch),
    /// Points above the threshold; possibly none.
    Above(Vec<Point>),
    /// Whether unsent points remain after pruning.
    Status(bool),
}

impl Payload for FdsUp {
    fn words(&self) -> u64 {
        match self {
            FdsUp::Batch(b) => b.words(),
            FdsUp::Above(p) => p.words(),
            FdsUp::Status(_) => FLAG_WORDS,
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        match self {
            FdsUp::Batch(b) => b.carried_ids(out),
            FdsUp::Above(p) => p.carried_ids(out),
            FdsUp::Status(_) => {}
        }
    }
}

/// Unsent local skyline points, best score first.
pub struct FdsSite {
    pending: Vec<Point>,
    kappa: usize,
}

fn by_score(a: &Point, b: &Point) -> std::cmp::Ordering {
    b.score().total_cmp(&a.score()).then(b.x.total_cmp(&a.x)).then(a.id.cmp(&b.id))
}

impl FdsSite {
    pub fn new(points: &[Point], kappa: usize) -> Self {
        let mut pending = skyline_unchecked(points).into_points();
        pending.sort_by(by_score);
        FdsSite { pending, kappa }
    }

    pub fn pending(&self) -> &[Point] {
        &self.pending
    }
}

impl Site<FdsDown, FdsUp> for FdsSite {
    fn respond(&mut self, msg: FdsDown) -> FdsUp {
        match msg {
            FdsDown::Top => {
                let take = self.kappa.min(self.pending.len());
                FdsUp::Batch(PointBatch::from_vec(self.pending.drain(..take).collect()))
            }
            FdsDown::Threshold(f) => {
                let above = self.pending.partition_point(|p| p.score() > f);
                FdsUp::Above(self.pending.drain(..above).collect())
            }
            FdsDown::Feedback(points) => {
                if !points.is_empty() {
                    let sky = Skyline::from_maximal(points);
                    self.pending.retain(|p| !sky.covers(p));
                }
                FdsUp::Status(!self.pending.is_empty())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Top,
    Threshold,
    Feedback,
}

pub struct FdsCoordinator {
    s: usize,
    stage: Stage,
    active: Vec<usize>,
    skyline: Vec<Point>,
    fed_back: HashSet<PointId>,
    received: HashSet<PointId>,
    iterations: usize,
}

impl FdsCoordinator {
    pub fn new(s: usize) -> Self {
        FdsCoordinator {
            s,
            stage: Stage::Feedback,
            active: (0..s).collect(),
            skyline: Vec::new(),
            fed_back: HashSet::new(),
            received: HashSet::new(),
            iterations: 0,
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn absorb(&mut self, points: impl IntoIterator<Item = Point>) {
        let mut all = std::mem::take(&mut self.skyline);
        for p in points {
            self.received.insert(p.id);
            all.push(p);
        }
        self.skyline = skyline_unchecked(&all).into_points();
    }

    fn finish(&self) -> Action<FdsDown> {
        Action::Finish(Skyline::from_maximal(self.skyline.clone()))
    }

    fn broadcast(&self, msg: FdsDown) -> Action<FdsDown> {
        Action::Send(self.active.iter().map(|&i| (i, msg.clone())).collect())
    }
}

impl Coordinator for FdsCoordinator {
    type Down = FdsDown;
    type Up = FdsUp;

    fn step(&mut self, round: usize, replies: Vec<(usize, FdsUp)>) -> Action<FdsDown> {
        match self.stage {
            Stage::Feedback => {
                if round > 1 {
                    self.active =
                        replies.into_iter().filter_map(|(i, r)| (r == FdsUp::Status(true)).then_some(i)).collect();
                }
                if self.active.is_empty() || self.s == 0 {
                    return self.finish();
                }
                self.iterations += 1;
                self.stage = Stage::Top;
                self.broadcast(FdsDown::Top)
            }
            Stage::Top => {
                let mut batch = Vec::new();
                self.active.clear();
                for (site, reply) in replies {
                    if let FdsUp::Batch(PointBatch::Points(p)) = reply {
                        self.active.push(site);
                        batch.extend(p);
                    }
                }
                if batch.is_empty() {
                    return self.finish();
                }
                let f_min = batch.iter().map(Point::score).fold(f64::INFINITY, f64::min);
                self.absorb(batch);
                self.stage = Stage::Threshold;
                self.broadcast(FdsDown::Threshold(f_min))
            }
            Stage::Threshold => {
                let above: Vec<Point> = replies
                    .into_iter()
                    .flat_map(|(_, r)| match r {
                        FdsUp::Above(p) => p,
                        _ => Vec::new(),
                    })
                    .collect();
                self.absorb(above);
                let delta: Vec<Point> =
                    self.skyline.iter().copied().filter(|p| !self.fed_back.contains(&p.id)).collect();
                self.fed_back.extend(delta.iter().map(|p| p.id));
                self.stage = Stage::Feedback;
                self.broadcast(FdsDown::Feedback(delta))
            }
        }
    }

    fn recovered_points(&self) -> usize {
        self.received.len()
    }
}
