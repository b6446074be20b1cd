use std::fmt::{self, Write as _};
use std::time::Duration;

use crate::point::PointId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Coordinator to site.
    Down,
    /// Site to coordinator.
    Up,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Down => "down",
            Direction::Up => "up",
        })
    }
}

/// One logged message. `site` is zero-based; exports print it one-based.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageRecord {
    pub round: usize,
    pub direction: Direction,
    pub site: usize,
    pub payload_words: u64,
    /// Ids of the (half) points the payload carried.
    pub point_ids: Vec<PointId>,
}

/// Full message log of a run in canonical `(round, direction, site)` order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    messages: Vec<MessageRecord>,
}

impl Transcript {
    pub(crate) fn push(&mut self, record: MessageRecord) {
        debug_assert!(self.messages.last().is_none_or(|last| {
            (last.round, last.direction, last.site) < (record.round, record.direction, record.site)
        }));
        self.messages.push(record);
    }

    pub fn messages(&self) -> &[MessageRecord] {
        &self.messages
    }

    pub fn rounds_used(&self) -> usize {
        self.messages.last().map_or(0, |m| m.round)
    }

    pub fn total_words(&self) -> u64 {
        self.messages.iter().map(|m| m.payload_words).sum()
    }

    pub fn words(&self, direction: Direction) -> u64 {
        self.messages.iter().filter(|m| m.direction == direction).map(|m| m.payload_words).sum()
    }

    pub fn round(&self, round: usize) -> impl Iterator<Item = &MessageRecord> {
        self.messages.iter().filter(move |m| m.round == round)
    }

    /// `round,direction,site,payload_words`, with a header line.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("round,direction,site,payload_words\n");
        for m in &self.messages {
            writeln!(out, "{},{},{},{}", m.round, m.direction, m.site + 1, m.payload_words).unwrap();
        }
        out
    }
}

/// Aggregated cost of one run. Both directions count toward `total_words`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CostReport {
    pub total_words: u64,
    pub up_words: u64,
    pub down_words: u64,
    pub total_messages: u64,
    pub rounds: usize,
    pub recovered_points: usize,
    pub coordinator_time: Duration,
    pub max_site_time: Duration,
}

impl CostReport {
    pub fn bits(&self) -> u64 {
        self.total_words * 64
    }
}
