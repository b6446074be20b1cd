//! Round/communication trade-off protocol.
//!
//! With a budget of `r` rounds the protocol runs `t - 1` two-round steps,
//! `t = ⌈r/2⌉`, and a final flush round. Each step cuts the x-axis into
//! `d` strips of roughly equal population using quantile summaries, then
//! confirms the skyline of the per-strip max-y points.

use crate::coordsim::{
    run_protocol, Action, Coordinator, EngineOptions, Outcome, Payload, Site, FLAG_WORDS, SCALAR_WORDS,
};
use crate::error::{Error, Result};
use crate::point::{skyline_unchecked, Point, PointId, Skyline};
use crate::quantiles::{local_summary, strip_boundaries, strip_of, QuantileSummary};

use super::{local_skyline, HorizontalInstance, Received};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TradeoffParams {
    pub rounds: usize,
    /// Use a known skyline size instead of the doubling-free guess.
    pub known_k: Option<usize>,
}

impl TradeoffParams {
    pub fn new(rounds: usize) -> Self {
        TradeoffParams { rounds, known_k: None }
    }

    pub fn with_known_k(mut self, k: usize) -> Self {
        self.known_k = Some(k);
        self
    }

    /// `t = ⌈r/2⌉`.
    pub fn t(&self) -> usize {
        self.rounds.div_ceil(2)
    }

    fn validate(&self) -> Result<()> {
        if self.rounds < 3 {
            return Err(Error::parameter(format!("the trade-off protocol needs r >= 3, got {}", self.rounds)));
        }
        if self.known_k == Some(0) {
            return Err(Error::parameter("a known skyline size must be positive"));
        }
        Ok(())
    }
}

pub fn run_tradeoff(instance: &HorizontalInstance, params: TradeoffParams) -> Result<Outcome> {
    params.validate()?;
    let mut sites: Vec<TradeoffSite> = instance.sites().iter().map(|p| TradeoffSite::new(p)).collect();
    let mut coord = TradeoffCoordinator::new(instance.s(), instance.n(), params)?;
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

/// Number of strips for a step.
///
/// With a guessed `k` this is `⌈(2k/(t-1)) · (n(t-1)/(2s))^{1/t}⌉`; with a
/// known `k` the inner term is divided by `k` as well. Never below 1.
pub fn strip_count(k: usize, n: usize, s: usize, t: usize, known: bool) -> usize {
    let (k, n, s, tm1) = (k as f64, n as f64, s.max(1) as f64, t.saturating_sub(1).max(1) as f64);
    let inner = if known { n * tm1 / (2.0 * s * k) } else { n * tm1 / (2.0 * s) };
    let d = (2.0 * k / tm1) * inner.max(0.0).powf(1.0 / t.max(1) as f64);
    if d.is_finite() {
        (d.ceil() as usize).max(1)
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TradeoffDown {
    /// Prune with `confirmed`, then summarize the remaining x-values at
    /// precision `1/strips`.
    Summarize { confirmed: Vec<Point>, strips: usize },
    /// The `d - 1` strip boundaries.
    Boundaries(Vec<f64>),
    /// Prune with `confirmed`, then send everything that is left.
    Flush { confirmed: Vec<Point> },
}

impl Payload for TradeoffDown {
    fn words(&self) -> u64 {
        match self {
            TradeoffDown::Summarize { confirmed, .. } => confirmed.words() + SCALAR_WORDS,
            TradeoffDown::Boundaries(b) => b.words(),
            TradeoffDown::Flush { confirmed } => confirmed.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        match self {
            TradeoffDown::Summarize { confirmed, .. } | TradeoffDown::Flush { confirmed } => confirmed.carried_ids(out),
            TradeoffDown::Boundaries(_) => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TradeoffUp {
    Empty,
    Summary(QuantileSummary),
    /// Max-y point of every non-empty strip, tagged with the strip index.
    StripMaxima(Vec<(usize, Point)>),
    Remaining(Vec<Point>),
}

impl Payload for TradeoffUp {
    fn words(&self) -> u64 {
        match self {
            TradeoffUp::Empty => FLAG_WORDS,
            TradeoffUp::Summary(q) => q.words(),
            TradeoffUp::StripMaxima(m) => m.words(),
            TradeoffUp::Remaining(p) => p.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        match self {
            TradeoffUp::StripMaxima(m) => m.carried_ids(out),
            TradeoffUp::Remaining(p) => p.carried_ids(out),
            TradeoffUp::Empty | TradeoffUp::Summary(_) => {}
        }
    }
}

/// Remaining local skyline points in increasing x.
pub struct TradeoffSite {
    points: Vec<Point>,
}

impl TradeoffSite {
    pub fn new(points: &[Point]) -> Self {
        TradeoffSite { points: local_skyline(points) }
    }

    pub fn remaining(&self) -> &[Point] {
        &self.points
    }

    fn prune(&mut self, confirmed: Vec<Point>) {
        if confirmed.is_empty() {
            return;
        }
        let sky = Skyline::from_maximal(confirmed);
        self.points.retain(|p| !sky.covers(p));
    }
}

impl Site<TradeoffDown, TradeoffUp> for TradeoffSite {
    fn respond(&mut self, msg: TradeoffDown) -> TradeoffUp {
        match msg {
            TradeoffDown::Summarize { confirmed, strips } => {
                self.prune(confirmed);
                if self.points.is_empty() {
                    return TradeoffUp::Empty;
                }
                let xs: Vec<f64> = self.points.iter().map(|p| p.x).collect();
                let summary =
                    local_summary(0, &xs, 1.0 / strips.max(1) as f64).expect("1/d is a valid precision for d >= 1");
                TradeoffUp::Summary(summary)
            }
            TradeoffDown::Boundaries(b) => {
                let mut maxima: Vec<(usize, Point)> = Vec::new();
                for p in &self.points {
                    let strip = strip_of(&b, p.x);
                    if maxima.last().is_none_or(|(j, _)| *j != strip) {
                        maxima.push((strip, *p));
                    }
                }
                if maxima.is_empty() {
                    TradeoffUp::Empty
                } else {
                    TradeoffUp::StripMaxima(maxima)
                }
            }
            TradeoffDown::Flush { confirmed } => {
                self.prune(confirmed);
                if self.points.is_empty() {
                    TradeoffUp::Empty
                } else {
                    TradeoffUp::Remaining(std::mem::take(&mut self.points))
                }
            }
        }
    }
}

/// What the coordinator sent last.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TradeoffState {
    Start,
    Summarize,
    Boundaries,
    Flush,
}

/// Bookkeeping for one two-round step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub k_guess: usize,
    pub strips_requested: usize,
    pub strips_used: usize,
    pub remaining: usize,
    pub confirmed: Vec<Point>,
}

pub struct TradeoffCoordinator {
    s: usize,
    n: usize,
    params: TradeoffParams,
    state: TradeoffState,
    active: Vec<bool>,
    confirmed: Vec<Point>,
    pending: Vec<Point>,
    steps: Vec<StepRecord>,
    upper_bound: usize,
    received: Received,
}

impl TradeoffCoordinator {
    pub fn new(s: usize, n: usize, params: TradeoffParams) -> Result<Self> {
        params.validate()?;
        Ok(TradeoffCoordinator {
            s,
            n,
            params,
            state: TradeoffState::Start,
            active: vec![true; s],
            confirmed: Vec::new(),
            pending: Vec::new(),
            steps: Vec::new(),
            upper_bound: n,
            received: Received::default(),
        })
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn state(&self) -> TradeoffState {
        self.state
    }

    fn finish(&self, extra: &[Point]) -> Action<TradeoffDown> {
        let mut all = self.confirmed.clone();
        all.extend_from_slice(extra);
        Action::Finish(skyline_unchecked(&all))
    }

    fn active_sites(&self) -> Vec<usize> {
        (0..self.s).filter(|&i| self.active[i]).collect()
    }

    /// Opens step `steps.len() + 1`, or flushes if all steps are done.
    fn next_step(&mut self) -> Action<TradeoffDown> {
        let t = self.params.t();
        let confirmed = std::mem::take(&mut self.pending);
        let targets = self.active_sites();
        if targets.is_empty() {
            return self.finish(&[]);
        }
        if self.steps.len() + 1 >= t {
            self.state = TradeoffState::Flush;
            return Action::Send(
                targets.into_iter().map(|i| (i, TradeoffDown::Flush { confirmed: confirmed.clone() })).collect(),
            );
        }
        let k = match (self.params.known_k, self.steps.last()) {
            (Some(k), _) => k,
            (None, None) => t - 1,
            (None, Some(prev)) => prev.confirmed.len().max(1) * (t - 1),
        };
        let strips = strip_count(k, self.n, self.s, t, self.params.known_k.is_some()).min(self.upper_bound.max(1));
        self.steps.push(StepRecord {
            k_guess: k,
            strips_requested: strips,
            strips_used: 0,
            remaining: 0,
            confirmed: Vec::new(),
        });
        self.state = TradeoffState::Summarize;
        Action::Send(
            targets
                .into_iter()
                .map(|i| (i, TradeoffDown::Summarize { confirmed: confirmed.clone(), strips }))
                .collect(),
        )
    }
}

impl Coordinator for TradeoffCoordinator {
    type Down = TradeoffDown;
    type Up = TradeoffUp;

    fn step(&mut self, _round: usize, replies: Vec<(usize, TradeoffUp)>) -> Action<TradeoffDown> {
        match self.state {
            TradeoffState::Start => self.next_step(),
            TradeoffState::Summarize => {
                let mut summaries = Vec::new();
                for (site, reply) in replies {
                    match reply {
                        TradeoffUp::Summary(mut q) => {
                            q.site = site;
                            summaries.push(q);
                        }
                        _ => self.active[site] = false,
                    }
                }
                if summaries.is_empty() {
                    self.steps.pop();
                    return self.finish(&[]);
                }
                let total: usize = summaries.iter().map(|q| q.count).sum();
                self.upper_bound = total;
                let step = self.steps.last_mut().expect("a step is open");
                step.remaining = total;
                step.strips_used = step.strips_requested.min(total).max(1);
                let boundaries = strip_boundaries(&summaries, step.strips_used).expect("at least one strip");
                self.state = TradeoffState::Boundaries;
                Action::Send(summaries.iter().map(|q| (q.site, TradeoffDown::Boundaries(boundaries.clone()))).collect())
            }
            TradeoffState::Boundaries => {
                let step = self.steps.last().expect("a step is open");
                let mut best: Vec<Option<Point>> = vec![None; step.strips_used];
                let mut seen = Vec::new();
                for (_, reply) in replies {
                    if let TradeoffUp::StripMaxima(maxima) = reply {
                        for (j, p) in maxima {
                            seen.push(p);
                            let slot = &mut best[j];
                            if slot.is_none_or(|b| (p.y, p.x) > (b.y, b.x)) {
                                *slot = Some(p);
                            }
                        }
                    }
                }
                self.received.note(&seen);
                let ys: Vec<Point> = best.into_iter().flatten().collect();
                let new = skyline_unchecked(&ys).into_points();
                self.confirmed.extend(&new);
                self.pending = new.clone();
                self.steps.last_mut().unwrap().confirmed = new;
                self.next_step()
            }
            TradeoffState::Flush => {
                let rest: Vec<Point> = replies
                    .into_iter()
                    .flat_map(|(_, r)| match r {
                        TradeoffUp::Remaining(p) => p,
                        _ => Vec::new(),
                    })
                    .collect();
                self.received.note(&rest);
                self.finish(&rest)
            }
        }
    }

    fn recovered_points(&self) -> usize {
        self.received.len()
    }
}
