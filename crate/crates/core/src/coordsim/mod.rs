//! Deterministic simulation of the coordinator model.
//!
//! A run is a sequence of rounds. In each round the coordinator sends at most
//! one message to each of a subset of sites, and every contacted site answers
//! with exactly one message. The engine logs every message with its word cost
//! and stops when the coordinator declares its answer.

mod cost;
mod transcript;

use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use cost::{word_cost, Payload, XHalf, YHalf, FLAG_WORDS, HALF_POINT_WORDS, POINT_WORDS, SCALAR_WORDS};
pub use transcript::{CostReport, Direction, MessageRecord, Transcript};

use crate::error::{Error, Result};
use crate::point::Skyline;

/// What the coordinator does next.
#[derive(Debug)]
pub enum Action<D> {
    /// Start a new round with these `(site, message)` pairs.
    Send(Vec<(usize, D)>),
    /// Stop and declare the skyline.
    Finish(Skyline),
}

pub trait Coordinator {
    type Down: Payload + Send;
    type Up: Payload + Send;

    /// Called before every round. `round` is the index of the round about to
    /// start (1-based) and `replies` holds the previous round's answers in
    /// site order (empty before round 1).
    fn step(&mut self, round: usize, replies: Vec<(usize, Self::Up)>) -> Action<Self::Down>;

    /// Points whose full coordinates the coordinator has learned so far.
    fn recovered_points(&self) -> usize;
}

pub trait Site<D, U> {
    fn respond(&mut self, msg: D) -> U;
}

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    pub max_rounds: usize,
    /// Run the contacted sites of a round on the rayon pool.
    pub parallel: bool,
}

impl EngineOptions {
    /// Round cap of `10 n` (at least 10) for an instance of `n` points.
    pub fn for_points(n: usize) -> Self {
        EngineOptions { max_rounds: (10 * n).max(10), parallel: false }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { max_rounds: 10_000, parallel: false }
    }
}

/// Result of one protocol execution.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub skyline: Skyline,
    pub transcript: Transcript,
    pub report: CostReport,
}

fn record<P: Payload>(round: usize, direction: Direction, site: usize, payload: &P) -> MessageRecord {
    let mut point_ids = Vec::new();
    payload.carried_ids(&mut point_ids);
    MessageRecord { round, direction, site, payload_words: payload.words(), point_ids }
}

pub fn run_protocol<C, S>(coordinator: &mut C, sites: &mut [S], options: EngineOptions) -> Result<Outcome>
where
    C: Coordinator,
    S: Site<C::Down, C::Up> + Send,
{
    let s = sites.len();
    let mut transcript = Transcript::default();
    let mut coordinator_time = Duration::ZERO;
    let mut site_time = vec![Duration::ZERO; s];
    let mut replies: Vec<(usize, C::Up)> = Vec::new();
    let mut round = 1;

    let skyline = loop {
        let started = Instant::now();
        let action = coordinator.step(round, std::mem::take(&mut replies));
        coordinator_time += started.elapsed();

        let mut requests = match action {
            Action::Finish(skyline) => break skyline,
            Action::Send(requests) => requests,
        };
        if round > options.max_rounds {
            return Err(Error::RoundLimit { limit: options.max_rounds });
        }
        if requests.is_empty() {
            return Err(Error::EngineFault { round, reason: "round started without any message".into() });
        }
        requests.sort_by_key(|(site, _)| *site);
        for w in requests.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::EngineFault { round, reason: format!("site {} contacted twice", w[0].0 + 1) });
            }
        }
        if let Some((site, _)) = requests.iter().find(|(site, _)| *site >= s) {
            return Err(Error::EngineFault { round, reason: format!("no site {} (s = {s})", site + 1) });
        }

        for (site, msg) in &requests {
            transcript.push(record(round, Direction::Down, *site, msg));
        }

        let mut inbox: Vec<Option<C::Down>> = (0..s).map(|_| None).collect();
        for (site, msg) in requests {
            inbox[site] = Some(msg);
        }
        let answer = |(site, msg): (usize, C::Down), logic: &mut S| {
            let started = Instant::now();
            let reply = logic.respond(msg);
            (site, reply, started.elapsed())
        };
        let answered: Vec<(usize, C::Up, Duration)> = if options.parallel {
            sites
                .par_iter_mut()
                .zip(inbox.into_par_iter().enumerate())
                .filter_map(|(logic, (site, msg))| msg.map(|m| answer((site, m), logic)))
                .collect()
        } else {
            sites
                .iter_mut()
                .zip(inbox.into_iter().enumerate())
                .filter_map(|(logic, (site, msg))| msg.map(|m| answer((site, m), logic)))
                .collect()
        };

        for (site, reply, elapsed) in answered {
            site_time[site] += elapsed;
            transcript.push(record(round, Direction::Up, site, &reply));
            replies.push((site, reply));
        }
        round += 1;
    };

    let report = CostReport {
        total_words: transcript.total_words(),
        up_words: transcript.words(Direction::Up),
        down_words: transcript.words(Direction::Down),
        total_messages: transcript.messages().len() as u64,
        rounds: transcript.rounds_used(),
        recovered_points: coordinator.recovered_points(),
        coordinator_time,
        max_site_time: site_time.into_iter().max().unwrap_or_default(),
    };
    Ok(Outcome { skyline, transcript, report })
}
