//! Interactive Pruning.
//!
//! Both columns are cut into `ρ` groups. The coordinator fetches groups from
//! the top of each column and recovers the missing coordinate from the other
//! side. Once every point of some group `G_y,j` is recovered, every Alice
//! group after the lowest Alice group hit by `G_y,j` is dominated and can be
//! skipped (and symmetrically for Bob). The run ends when one side has no
//! unfetched, unpruned group left.

use std::collections::{HashMap, HashSet};

use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome};
use crate::error::{Error, Result};
use crate::point::{skyline_unchecked, Point, PointId};

use super::{ColumnSite, Halves, VerticalDown, VerticalInstance, VerticalUp, ALICE, BOB};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PruneParams {
    pub rho: usize,
    pub rounds: usize,
}

impl PruneParams {
    pub fn new(rho: usize, rounds: usize) -> Self {
        PruneParams { rho, rounds }
    }

    fn validate(&self) -> Result<()> {
        if self.rho == 0 {
            return Err(Error::parameter("rho must be at least 1"));
        }
        if self.rounds < 6 {
            return Err(Error::parameter(format!("interactive pruning needs r >= 6, got {}", self.rounds)));
        }
        Ok(())
    }
}

pub fn run_prune(instance: &VerticalInstance, params: PruneParams) -> Result<Outcome> {
    params.validate()?;
    let mut sites = [ColumnSite::alice(instance, params.rho), ColumnSite::bob(instance, params.rho)];
    let mut coord = PruneCoordinator::new(params)?;
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    fn site(self) -> usize {
        match self {
            Side::Alice => ALICE,
            Side::Bob => BOB,
        }
    }
}

/// State changes, in order, for inspection and tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneEvent {
    Opened {
        l_x: usize,
        l_y: usize,
    },
    /// A stage-2 step fetched group `group` from `side`.
    Fetched {
        side: Side,
        group: usize,
        l_x: usize,
        l_y: usize,
    },
    /// Stage 3 fetched groups `from..=to` from `side`.
    BulkFetched {
        side: Side,
        from: usize,
        to: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Opening,
    Step(Side),
    Bulk,
}

#[derive(Clone, Debug, PartialEq)]
enum Phase {
    Start,
    /// Waiting for the answer to a fetch.
    Fetch(Stage),
    /// Waiting for missing halves; `fetched[site]` are the ids just fetched
    /// from that site.
    Recover {
        fetched: [Vec<PointId>; 2],
        stage: Stage,
    },
}

pub struct PruneCoordinator {
    params: PruneParams,
    phase: Phase,
    splits: [Vec<f64>; 2],
    known: [HashMap<PointId, f64>; 2],
    f: [usize; 2],
    l: [usize; 2],
    steps: usize,
    events: Vec<PruneEvent>,
    recovered: HashSet<PointId>,
}

impl PruneCoordinator {
    pub fn new(params: PruneParams) -> Result<Self> {
        params.validate()?;
        Ok(PruneCoordinator {
            params,
            phase: Phase::Start,
            splits: [Vec::new(), Vec::new()],
            known: [HashMap::new(), HashMap::new()],
            f: [2, 2],
            l: [2, 2],
            steps: 0,
            events: Vec::new(),
            recovered: HashSet::new(),
        })
    }

    pub fn events(&self) -> &[PruneEvent] {
        &self.events
    }

    pub fn recovered_ids(&self) -> Vec<PointId> {
        let mut ids: Vec<PointId> = self.recovered.iter().copied().collect();
        ids.sort_unstable();
        ids
    }

    /// `(f_x, f_y, l_x, l_y)`.
    pub fn indices(&self) -> (usize, usize, usize, usize) {
        (self.f[ALICE], self.f[BOB], self.l[ALICE], self.l[BOB])
    }

    /// Largest group that may hold `value` on `side`: `1 + #{split ≥ value}`.
    fn group_of(&self, side: usize, value: f64) -> usize {
        1 + self.splits[side].iter().filter(|&&s| s >= value).count()
    }

    fn learn(&mut self, side: usize, halves: &Halves) -> Vec<PointId> {
        let entries = halves.entries();
        for &(id, v) in &entries {
            self.known[side].insert(id, v);
            if self.known[1 - side].contains_key(&id) {
                self.recovered.insert(id);
            }
        }
        entries.into_iter().map(|(id, _)| id).collect()
    }

    fn missing(&self, side: usize, ids: &[PointId]) -> Vec<PointId> {
        ids.iter().copied().filter(|id| !self.known[side].contains_key(id)).collect()
    }

    /// Lowest group on `side` hit by `ids`, plus one.
    fn bound(&self, side: usize, ids: &[PointId]) -> Option<usize> {
        ids.iter().map(|id| self.group_of(side, self.known[side][id]) + 1).min()
    }

    fn resolved(&self) -> bool {
        self.l[ALICE] <= self.f[ALICE] || self.l[BOB] <= self.f[BOB]
    }

    fn finish(&self) -> Action<VerticalDown> {
        let points: Vec<Point> =
            self.recovered.iter().map(|id| Point::new(*id, self.known[ALICE][id], self.known[BOB][id])).collect();
        Action::Finish(skyline_unchecked(&points))
    }

    /// Asks for the missing halves of `fetched`, or moves on if none are
    /// missing.
    fn recover(&mut self, fetched: [Vec<PointId>; 2], stage: Stage) -> Action<VerticalDown> {
        let mut msgs = Vec::new();
        for side in [ALICE, BOB] {
            let want = self.missing(side, &fetched[1 - side]);
            if !want.is_empty() {
                msgs.push((side, VerticalDown::Ids(want)));
            }
        }
        if msgs.is_empty() {
            return self.after_recovery(fetched, stage);
        }
        self.phase = Phase::Recover { fetched, stage };
        Action::Send(msgs)
    }

    fn after_recovery(&mut self, fetched: [Vec<PointId>; 2], stage: Stage) -> Action<VerticalDown> {
        match stage {
            Stage::Bulk => return self.finish(),
            Stage::Opening => {
                if fetched[ALICE].is_empty() && fetched[BOB].is_empty() {
                    return self.finish();
                }
                for side in [ALICE, BOB] {
                    let sentinel = self.splits[side].len() + 2;
                    self.l[side] = self.bound(side, &fetched[1 - side]).unwrap_or(sentinel);
                }
                self.events.push(PruneEvent::Opened { l_x: self.l[ALICE], l_y: self.l[BOB] });
            }
            Stage::Step(side) => {
                let from = side.site();
                let other = 1 - from;
                if let Some(b) = self.bound(other, &fetched[from]) {
                    self.l[other] = self.l[other].min(b);
                }
                self.events.push(PruneEvent::Fetched {
                    side,
                    group: self.f[from],
                    l_x: self.l[ALICE],
                    l_y: self.l[BOB],
                });
                self.f[from] += 1;
            }
        }
        self.advance()
    }

    fn advance(&mut self) -> Action<VerticalDown> {
        if self.resolved() {
            return self.finish();
        }
        let gap = |s: usize| self.l[s] - self.f[s];
        let side = if gap(ALICE) <= gap(BOB) { Side::Alice } else { Side::Bob };
        let s = side.site();
        if 2 * (self.steps + 1) + 4 <= self.params.rounds {
            self.steps += 1;
            self.phase = Phase::Fetch(Stage::Step(side));
            return Action::Send(vec![(s, VerticalDown::Group(self.f[s]))]);
        }
        let (from, to) = (self.f[s], self.l[s] - 1);
        self.events.push(PruneEvent::BulkFetched { side, from, to });
        self.f[s] = self.l[s];
        self.phase = Phase::Fetch(Stage::Bulk);
        Action::Send(vec![(s, VerticalDown::Groups { from, to })])
    }
}

impl Coordinator for PruneCoordinator {
    type Down = VerticalDown;
    type Up = VerticalUp;

    fn step(&mut self, _round: usize, replies: Vec<(usize, VerticalUp)>) -> Action<VerticalDown> {
        match std::mem::replace(&mut self.phase, Phase::Start) {
            Phase::Start => {
                self.phase = Phase::Fetch(Stage::Opening);
                Action::Send(vec![(ALICE, VerticalDown::Start), (BOB, VerticalDown::Start)])
            }
            Phase::Fetch(stage) => {
                let mut fetched = [Vec::new(), Vec::new()];
                for (site, reply) in replies {
                    match reply {
                        VerticalUp::Opening { splits, first } => {
                            self.splits[site] = splits;
                            fetched[site] = self.learn(site, &first);
                        }
                        VerticalUp::Halves(h) => fetched[site] = self.learn(site, &h),
                    }
                }
                self.recover(fetched, stage)
            }
            Phase::Recover { fetched, stage } => {
                for (site, reply) in &replies {
                    if let VerticalUp::Halves(h) = reply {
                        self.learn(*site, h);
                    }
                }
                self.after_recovery(fetched, stage)
            }
        }
    }

    fn recovered_points(&self) -> usize {
        self.recovered.len()
    }
}
