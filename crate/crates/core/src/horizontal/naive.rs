use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome, Site};
use crate::error::Result;
use crate::point::{skyline_unchecked, Point};

use super::{local_skyline, HorizontalInstance, PointBatch, Received};

/// One round: every site ships its local skyline.
pub fn run_naive(instance: &HorizontalInstance) -> Result<Outcome> {
    let mut sites: Vec<NaiveSite> = instance.sites().iter().map(|p| NaiveSite::new(p)).collect();
    let mut coord = NaiveCoordinator::new(instance.s());
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

pub struct NaiveSite {
    skyline: Vec<Point>,
}

impl NaiveSite {
    pub fn new(points: &[Point]) -> Self {
        NaiveSite { skyline: local_skyline(points) }
    }
}

impl Site<(), PointBatch> for NaiveSite {
    fn respond(&mut self, _: ()) -> PointBatch {
        PointBatch::from_vec(std::mem::take(&mut self.skyline))
    }
}

pub struct NaiveCoordinator {
    s: usize,
    received: Received,
}

impl NaiveCoordinator {
    pub fn new(s: usize) -> Self {
        NaiveCoordinator { s, received: Received::default() }
    }
}

impl Coordinator for NaiveCoordinator {
    type Down = ();
    type Up = PointBatch;

    fn step(&mut self, round: usize, replies: Vec<(usize, PointBatch)>) -> Action<()> {
        if round == 1 {
            return Action::Send((0..self.s).map(|i| (i, ())).collect());
        }
        let all: Vec<Point> = replies.iter().flat_map(|(_, b)| b.points().iter().copied()).collect();
        self.received.note(&all);
        Action::Finish(skyline_unchecked(&all))
    }

    fn recovered_points(&self) -> usize {
        self.received.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horizontal::PartitionKind;

    #[test]
    fn two_singletons() {
        let inst = HorizontalInstance::new(
            vec![vec![Point::new(0, 1.0, 2.0)], vec![Point::new(1, 2.0, 1.0)]],
            PartitionKind::Random,
        )
        .unwrap();
        let out = run_naive(&inst).unwrap();
        assert_eq!(out.skyline.ids(), vec![0, 1]);
        assert_eq!(out.report.rounds, 1);
        assert_eq!(out.report.up_words, 4);
        assert_eq!(out.report.down_words, 0);
        assert_eq!(out.report.recovered_points, 2);
    }

    #[test]
    fn ships_only_local_skylines() {
        let site = vec![Point::new(0, 1.0, 1.0), Point::new(1, 2.0, 2.0), Point::new(2, 0.0, 3.0)];
        let inst = HorizontalInstance::new(vec![site, vec![]], PartitionKind::Random).unwrap();
        let out = run_naive(&inst).unwrap();
        assert_eq!(out.skyline.ids(), vec![1, 2]);
        // 2 points from site 1, the empty flag from site 2.
        assert_eq!(out.report.up_words, 5);
    }
}
