//! Round-optimal protocol: every round confirms the current global max-x
//! point `G` and max-y point `H` of the remaining data, so `k` skyline points
//! need at most `⌈k/2⌉` rounds.

use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome, Payload, Site, FLAG_WORDS};
use crate::error::Result;
use crate::point::{covers, Point, PointId, Skyline};

use super::{local_skyline, HorizontalInstance, Received};

/// Total words of a run stay within `OPTIMAL_WORD_FACTOR · k · s`.
pub const OPTIMAL_WORD_FACTOR: u64 = 8;

pub fn run_optimal(instance: &HorizontalInstance) -> Result<Outcome> {
    let mut sites: Vec<OptimalSite> = instance.sites().iter().map(|p| OptimalSite::new(p)).collect();
    let mut coord = OptimalCoordinator::new(instance.s());
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

/// Points confirmed in the previous round; empty on the first request.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OptimalDown {
    pub confirmed: Vec<Point>,
}

impl Payload for OptimalDown {
    fn words(&self) -> u64 {
        self.confirmed.words()
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.confirmed.carried_ids(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OptimalUp {
    Empty,
    /// The site's remaining max-x and max-y points (the latter omitted when
    /// it is the same point), and whether these are all it has left.
    Extremes {
        max_x: Point,
        max_y: Option<Point>,
        complete: bool,
    },
}

impl OptimalUp {
    fn points(&self) -> Vec<Point> {
        match self {
            OptimalUp::Empty => Vec::new(),
            OptimalUp::Extremes { max_x, max_y, .. } => std::iter::once(*max_x).chain(*max_y).collect(),
        }
    }
}

impl Payload for OptimalUp {
    fn words(&self) -> u64 {
        match self {
            OptimalUp::Empty => FLAG_WORDS,
            OptimalUp::Extremes { max_x, max_y, .. } => max_x.words() + max_y.words() + FLAG_WORDS,
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.points().carried_ids(out)
    }
}

/// Local skyline in increasing x; the live points are `points[lo..hi]`.
pub struct OptimalSite {
    points: Vec<Point>,
    lo: usize,
    hi: usize,
}

impl OptimalSite {
    pub fn new(points: &[Point]) -> Self {
        let points = local_skyline(points);
        let hi = points.len();
        OptimalSite { points, lo: 0, hi }
    }

    pub fn remaining(&self) -> &[Point] {
        &self.points[self.lo..self.hi]
    }

    /// A confirmed max-x or max-y point covers a prefix and/or a suffix of
    /// the staircase, so pruning is two pointer sweeps.
    fn prune(&mut self, c: &Point) {
        while self.lo < self.hi && covers(c, &self.points[self.lo]) {
            self.lo += 1;
        }
        while self.hi > self.lo && covers(c, &self.points[self.hi - 1]) {
            self.hi -= 1;
        }
    }
}

impl Site<OptimalDown, OptimalUp> for OptimalSite {
    fn respond(&mut self, msg: OptimalDown) -> OptimalUp {
        for c in &msg.confirmed {
            self.prune(c);
        }
        if self.lo == self.hi {
            return OptimalUp::Empty;
        }
        let max_x = self.points[self.hi - 1];
        let max_y = (self.hi - self.lo > 1).then(|| self.points[self.lo]);
        OptimalUp::Extremes { max_x, max_y, complete: self.hi - self.lo <= 2 }
    }
}

pub struct OptimalCoordinator {
    s: usize,
    active: Vec<bool>,
    confirmed: Vec<Point>,
    log: Vec<Vec<Point>>,
    received: Received,
}

impl OptimalCoordinator {
    pub fn new(s: usize) -> Self {
        OptimalCoordinator {
            s,
            active: vec![true; s],
            confirmed: Vec::new(),
            log: Vec::new(),
            received: Received::default(),
        }
    }

    /// Points confirmed in each round, in round order.
    pub fn confirmations(&self) -> &[Vec<Point>] {
        &self.log
    }

    fn finish(&mut self) -> Action<OptimalDown> {
        Action::Finish(Skyline::from_maximal(self.confirmed.clone()))
    }
}

fn by_x(a: &&Point, b: &&Point) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

fn by_y(a: &&Point, b: &&Point) -> std::cmp::Ordering {
    a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x))
}

impl Coordinator for OptimalCoordinator {
    type Down = OptimalDown;
    type Up = OptimalUp;

    fn step(&mut self, round: usize, replies: Vec<(usize, OptimalUp)>) -> Action<OptimalDown> {
        if round == 1 {
            return Action::Send((0..self.s).map(|i| (i, OptimalDown::default())).collect());
        }
        let mut seen = Vec::new();
        for (site, reply) in &replies {
            if *reply == OptimalUp::Empty {
                self.active[*site] = false;
            }
            seen.extend(reply.points());
        }
        self.received.note(&seen);
        let (Some(g), Some(h)) = (seen.iter().max_by(by_x).copied(), seen.iter().max_by(by_y).copied()) else {
            self.log.push(Vec::new());
            return self.finish();
        };
        let new = if g.id == h.id { vec![g] } else { vec![g, h] };
        self.confirmed.extend(&new);
        self.log.push(new.clone());
        if g.id == h.id {
            // `G` dominates everything else that is left.
            return self.finish();
        }
        for (site, reply) in &replies {
            if let OptimalUp::Extremes { complete: true, .. } = reply {
                if reply.points().iter().all(|p| covers(&g, p) || covers(&h, p)) {
                    self.active[*site] = false;
                }
            }
        }
        let msgs: Vec<_> =
            (0..self.s).filter(|&i| self.active[i]).map(|i| (i, OptimalDown { confirmed: new.clone() })).collect();
        if msgs.is_empty() {
            self.finish()
        } else {
            Action::Send(msgs)
        }
    }

    fn recovered_points(&self) -> usize {
        self.received.len()
    }
}
