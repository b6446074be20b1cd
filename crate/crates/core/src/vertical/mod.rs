//! Protocols for vertically partitioned data: Alice holds every point's x,
//! Bob holds every point's y, both keyed by point id.

mod prune;

use std::collections::HashMap;

pub use prune::{run_prune, PruneCoordinator, PruneEvent, PruneParams, Side};

use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome, Payload, Site, XHalf, YHalf};
use crate::error::{Error, Result};
use crate::point::{skyline_unchecked, validate_distinct, Point, PointId};

#[derive(Clone, Debug)]
pub struct VerticalInstance {
    alice: Vec<XHalf>,
    bob: Vec<YHalf>,
}

impl VerticalInstance {
    /// Sorts both columns (decreasing value, ties by id) and checks that they
    /// describe the same ids and distinct points.
    pub fn new(mut alice: Vec<XHalf>, mut bob: Vec<YHalf>) -> Result<Self> {
        alice.sort_by(|a, b| b.x.total_cmp(&a.x).then(a.id.cmp(&b.id)));
        bob.sort_by(|a, b| b.y.total_cmp(&a.y).then(a.id.cmp(&b.id)));
        let instance = VerticalInstance { alice, bob };
        let ys: HashMap<PointId, f64> = instance.bob.iter().map(|h| (h.id, h.y)).collect();
        if ys.len() != instance.bob.len() || instance.alice.len() != instance.bob.len() {
            return Err(Error::parameter("Alice and Bob must hold the same ids, each exactly once"));
        }
        let points = instance
            .alice
            .iter()
            .map(|h| {
                ys.get(&h.id)
                    .map(|&y| Point::new(h.id, h.x, y))
                    .ok_or_else(|| Error::parameter(format!("id {} is missing from Bob's column", h.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        validate_distinct(&points)?;
        Ok(instance)
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let alice = points.iter().map(|p| XHalf { x: p.x, id: p.id }).collect();
        let bob = points.iter().map(|p| YHalf { id: p.id, y: p.y }).collect();
        Self::new(alice, bob)
    }

    /// Alice's column, decreasing in x.
    pub fn alice(&self) -> &[XHalf] {
        &self.alice
    }

    /// Bob's column, decreasing in y.
    pub fn bob(&self) -> &[YHalf] {
        &self.bob
    }

    pub fn n(&self) -> usize {
        self.alice.len()
    }

    /// The joined points, in Alice's order.
    pub fn points(&self) -> Vec<Point> {
        let ys: HashMap<PointId, f64> = self.bob.iter().map(|h| (h.id, h.y)).collect();
        self.alice.iter().map(|h| Point::new(h.id, h.x, ys[&h.id])).collect()
    }
}

/// Messages from the coordinator to Alice or Bob.
#[derive(Clone, Debug, PartialEq)]
pub enum VerticalDown {
    /// Opening request.
    Start,
    /// Send the whole column.
    All,
    /// Send group `j` (1-based).
    Group(usize),
    /// Send groups `from..=to`.
    Groups { from: usize, to: usize },
    /// Send the halves of these ids.
    Ids(Vec<PointId>),
}

impl Payload for VerticalDown {
    fn words(&self) -> u64 {
        match self {
            VerticalDown::Start | VerticalDown::All => 0,
            VerticalDown::Group(j) => j.words(),
            VerticalDown::Groups { from, to } => from.words() + to.words(),
            VerticalDown::Ids(ids) => ids.words(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Halves {
    X(Vec<XHalf>),
    Y(Vec<YHalf>),
}

impl Halves {
    fn entries(&self) -> Vec<(PointId, f64)> {
        match self {
            Halves::X(h) => h.iter().map(|h| (h.id, h.x)).collect(),
            Halves::Y(h) => h.iter().map(|h| (h.id, h.y)).collect(),
        }
    }
}

impl Payload for Halves {
    fn words(&self) -> u64 {
        match self {
            Halves::X(h) => h.words(),
            Halves::Y(h) => h.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        match self {
            Halves::X(h) => h.carried_ids(out),
            Halves::Y(h) => h.carried_ids(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerticalUp {
    /// Group split values (`x` or `y` of the first entry of groups `2..=ρ`)
    /// together with the first group.
    Opening {
        splits: Vec<f64>,
        first: Halves,
    },
    Halves(Halves),
}

impl Payload for VerticalUp {
    fn words(&self) -> u64 {
        match self {
            VerticalUp::Opening { splits, first } => splits.words() + first.words(),
            VerticalUp::Halves(h) => h.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        match self {
            VerticalUp::Opening { first, .. } => first.carried_ids(out),
            VerticalUp::Halves(h) => h.carried_ids(out),
        }
    }
}

/// Alice or Bob: one column sorted by decreasing value, cut into groups of
/// `⌈n/ρ⌉` entries.
pub struct ColumnSite {
    side: Side,
    column: Vec<(PointId, f64)>,
    index: HashMap<PointId, f64>,
    group_size: usize,
}

impl ColumnSite {
    pub fn alice(instance: &VerticalInstance, rho: usize) -> Self {
        Self::new(Side::Alice, instance.alice.iter().map(|h| (h.id, h.x)).collect(), rho)
    }

    pub fn bob(instance: &VerticalInstance, rho: usize) -> Self {
        Self::new(Side::Bob, instance.bob.iter().map(|h| (h.id, h.y)).collect(), rho)
    }

    fn new(side: Side, column: Vec<(PointId, f64)>, rho: usize) -> Self {
        let group_size = column.len().div_ceil(rho.max(1)).max(1);
        let index = column.iter().copied().collect();
        ColumnSite { side, column, index, group_size }
    }

    /// Number of non-empty groups.
    pub fn groups(&self) -> usize {
        self.column.len().div_ceil(self.group_size)
    }

    fn halves(&self, entries: impl Iterator<Item = (PointId, f64)>) -> Halves {
        match self.side {
            Side::Alice => Halves::X(entries.map(|(id, x)| XHalf { x, id }).collect()),
            Side::Bob => Halves::Y(entries.map(|(id, y)| YHalf { id, y }).collect()),
        }
    }

    fn group_range(&self, from: usize, to: usize) -> &[(PointId, f64)] {
        let n = self.column.len();
        let lo = ((from.max(1) - 1) * self.group_size).min(n);
        let hi = (to * self.group_size).min(n).max(lo);
        &self.column[lo..hi]
    }
}

impl Site<VerticalDown, VerticalUp> for ColumnSite {
    fn respond(&mut self, msg: VerticalDown) -> VerticalUp {
        match msg {
            VerticalDown::Start => {
                let splits = (1..self.groups()).map(|j| self.column[j * self.group_size].1).collect();
                let first = self.halves(self.group_range(1, 1).iter().copied());
                VerticalUp::Opening { splits, first }
            }
            VerticalDown::All => VerticalUp::Halves(self.halves(self.column.iter().copied())),
            VerticalDown::Group(j) => VerticalUp::Halves(self.halves(self.group_range(j, j).iter().copied())),
            VerticalDown::Groups { from, to } => {
                VerticalUp::Halves(self.halves(self.group_range(from, to).iter().copied()))
            }
            VerticalDown::Ids(ids) => {
                VerticalUp::Halves(self.halves(ids.into_iter().filter_map(|id| self.index.get(&id).map(|&v| (id, v)))))
            }
        }
    }
}

pub(crate) const ALICE: usize = 0;
pub(crate) const BOB: usize = 1;

/// One round: both sides ship their full column and the coordinator joins.
pub fn run_vertical_naive(instance: &VerticalInstance) -> Result<Outcome> {
    let mut sites = [ColumnSite::alice(instance, 1), ColumnSite::bob(instance, 1)];
    let mut coord = NaiveVerticalCoordinator::default();
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

#[derive(Default)]
struct NaiveVerticalCoordinator {
    recovered: usize,
}

impl Coordinator for NaiveVerticalCoordinator {
    type Down = VerticalDown;
    type Up = VerticalUp;

    fn step(&mut self, round: usize, replies: Vec<(usize, VerticalUp)>) -> Action<VerticalDown> {
        if round == 1 {
            return Action::Send(vec![(ALICE, VerticalDown::All), (BOB, VerticalDown::All)]);
        }
        let mut xs = HashMap::new();
        let mut ys = HashMap::new();
        for (site, reply) in replies {
            if let VerticalUp::Halves(h) = reply {
                let target = if site == ALICE { &mut xs } else { &mut ys };
                target.extend(h.entries());
            }
        }
        let points: Vec<Point> = xs.iter().filter_map(|(&id, &x)| ys.get(&id).map(|&y| Point::new(id, x, y))).collect();
        self.recovered = points.len();
        Action::Finish(skyline_unchecked(&points))
    }

    fn recovered_points(&self) -> usize {
        self.recovered
    }
}
