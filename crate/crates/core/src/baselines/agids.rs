//! Grid-based pruning.
//!
//! Sites agree on a bounding box, report which cells of a `g × g` equal-width
//! grid their local skylines occupy, and ship only the points in cells that
//! no other occupied cell strictly dominates.

use std::collections::HashSet;

use crate::coordsim::{run_protocol, Action, Coordinator, EngineOptions, Outcome, Payload, Site, FLAG_WORDS};
use crate::error::{Error, Result};
use crate::horizontal::{HorizontalInstance, PointBatch};
use crate::point::{skyline_unchecked, Point, PointId};

pub fn run_agids(instance: &HorizontalInstance, cells_per_axis: usize) -> Result<Outcome> {
    if cells_per_axis == 0 {
        return Err(Error::parameter("the grid needs at least one cell per axis"));
    }
    let mut sites: Vec<AgidsSite> = instance.sites().iter().map(|p| AgidsSite::new(p)).collect();
    let mut coord = AgidsCoordinator::new(instance.s(), cells_per_axis);
    run_protocol(&mut coord, &mut sites, EngineOptions::for_points(instance.n()))
}

/// `g × g` equal-width cells over a bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub cells_per_axis: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

fn axis_cell(v: f64, lo: f64, hi: f64, g: usize) -> usize {
    let w = hi - lo;
    if w.is_nan() || w <= 0.0 {
        return 0;
    }
    (((v - lo) / w * g as f64).floor().max(0.0) as usize).min(g - 1)
}

impl GridSpec {
    /// `(column, row)` of `p`; monotone in each coordinate.
    pub fn cell(&self, p: &Point) -> (usize, usize) {
        let g = self.cells_per_axis;
        (axis_cell(p.x, self.x_min, self.x_max, g), axis_cell(p.y, self.y_min, self.y_max, g))
    }

    pub fn cell_index(&self, p: &Point) -> usize {
        let (c, r) = self.cell(p);
        c * self.cells_per_axis + r
    }

    /// Occupied cells not strictly dominated by another occupied cell.
    pub fn surviving(&self, occupied: &HashSet<usize>) -> HashSet<usize> {
        let g = self.cells_per_axis;
        // best_row[c] = highest occupied row in any column > c.
        let mut best_row = vec![None; g];
        let mut running: Option<usize> = None;
        for c in (0..g).rev() {
            best_row[c] = running;
            let top = occupied.iter().filter(|&&i| i / g == c).map(|&i| i % g).max();
            running = running.max(top);
        }
        occupied.iter().copied().filter(|&i| best_row[i / g].is_none_or(|b| b <= i % g)).collect()
    }
}

impl Payload for GridSpec {
    fn words(&self) -> u64 {
        5
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AgidsDown {
    Setup,
    Grid(GridSpec),
    Fetch(Vec<usize>),
}

impl Payload for AgidsDown {
    fn words(&self) -> u64 {
        match self {
            AgidsDown::Setup => 0,
            AgidsDown::Grid(g) => g.words(),
            AgidsDown::Fetch(cells) => cells.words(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AgidsUp {
    Empty,
    /// `(x_min, x_max, y_min, y_max)` of the local skyline.
    Bounds(f64, f64, f64, f64),
    Cells(Vec<usize>),
    Points(PointBatch),
}

impl Payload for AgidsUp {
    fn words(&self) -> u64 {
        match self {
            AgidsUp::Empty => FLAG_WORDS,
            AgidsUp::Bounds(..) => 4,
            AgidsUp::Cells(c) => c.words(),
            AgidsUp::Points(b) => b.words(),
        }
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        if let AgidsUp::Points(b) = self {
            b.carried_ids(out)
        }
    }
}

pub struct AgidsSite {
    skyline: Vec<Point>,
    grid: Option<GridSpec>,
}

impl AgidsSite {
    pub fn new(points: &[Point]) -> Self {
        AgidsSite { skyline: skyline_unchecked(points).into_points(), grid: None }
    }
}

impl Site<AgidsDown, AgidsUp> for AgidsSite {
    fn respond(&mut self, msg: AgidsDown) -> AgidsUp {
        match msg {
            AgidsDown::Setup => {
                if self.skyline.is_empty() {
                    return AgidsUp::Empty;
                }
                let fold = |f: fn(f64, f64) -> f64, get: fn(&Point) -> f64, init: f64| {
                    self.skyline.iter().map(get).fold(init, f)
                };
                AgidsUp::Bounds(
                    fold(f64::min, |p| p.x, f64::INFINITY),
                    fold(f64::max, |p| p.x, f64::NEG_INFINITY),
                    fold(f64::min, |p| p.y, f64::INFINITY),
                    fold(f64::max, |p| p.y, f64::NEG_INFINITY),
                )
            }
            AgidsDown::Grid(grid) => {
                self.grid = Some(grid);
                let mut cells: Vec<usize> = self.skyline.iter().map(|p| grid.cell_index(p)).collect();
                cells.sort_unstable();
                cells.dedup();
                AgidsUp::Cells(cells)
            }
            AgidsDown::Fetch(cells) => {
                let grid = self.grid.expect("grid arrives before fetch");
                let keep: HashSet<usize> = cells.into_iter().collect();
                let points = self.skyline.iter().copied().filter(|p| keep.contains(&grid.cell_index(p))).collect();
                AgidsUp::Points(PointBatch::from_vec(points))
            }
        }
    }
}

pub struct AgidsCoordinator {
    s: usize,
    g: usize,
    grid: Option<GridSpec>,
    pruned_cells: usize,
    received: HashSet<PointId>,
}

impl AgidsCoordinator {
    pub fn new(s: usize, cells_per_axis: usize) -> Self {
        AgidsCoordinator { s, g: cells_per_axis, grid: None, pruned_cells: 0, received: HashSet::new() }
    }

    pub fn grid(&self) -> Option<GridSpec> {
        self.grid
    }

    /// Occupied cells discarded by the coordinator.
    pub fn pruned_cells(&self) -> usize {
        self.pruned_cells
    }
}

impl Coordinator for AgidsCoordinator {
    type Down = AgidsDown;
    type Up = AgidsUp;

    fn step(&mut self, round: usize, replies: Vec<(usize, AgidsUp)>) -> Action<AgidsDown> {
        match round {
            1 => Action::Send((0..self.s).map(|i| (i, AgidsDown::Setup)).collect()),
            2 => {
                let mut grid: Option<GridSpec> = None;
                let mut sites = Vec::new();
                for (site, reply) in replies {
                    if let AgidsUp::Bounds(x0, x1, y0, y1) = reply {
                        sites.push(site);
                        grid = Some(match grid {
                            None => GridSpec { cells_per_axis: self.g, x_min: x0, x_max: x1, y_min: y0, y_max: y1 },
                            Some(g) => GridSpec {
                                x_min: g.x_min.min(x0),
                                x_max: g.x_max.max(x1),
                                y_min: g.y_min.min(y0),
                                y_max: g.y_max.max(y1),
                                ..g
                            },
                        });
                    }
                }
                let Some(grid) = grid else { return Action::Finish(Default::default()) };
                self.grid = Some(grid);
                Action::Send(sites.into_iter().map(|i| (i, AgidsDown::Grid(grid))).collect())
            }
            3 => {
                let grid = self.grid.expect("grid set in round 2");
                let occupied: HashSet<usize> = replies
                    .iter()
                    .flat_map(|(_, r)| match r {
                        AgidsUp::Cells(c) => c.clone(),
                        _ => Vec::new(),
                    })
                    .collect();
                let surviving = grid.surviving(&occupied);
                self.pruned_cells = occupied.len() - surviving.len();
                let msgs: Vec<_> = replies
                    .into_iter()
                    .filter_map(|(site, r)| match r {
                        AgidsUp::Cells(c) => {
                            let keep: Vec<usize> = c.into_iter().filter(|i| surviving.contains(i)).collect();
                            (!keep.is_empty()).then_some((site, AgidsDown::Fetch(keep)))
                        }
                        _ => None,
                    })
                    .collect();
                Action::Send(msgs)
            }
            _ => {
                let all: Vec<Point> = replies
                    .iter()
                    .flat_map(|(_, r)| match r {
                        AgidsUp::Points(b) => b.points().to_vec(),
                        _ => Vec::new(),
                    })
                    .collect();
                self.received.extend(all.iter().map(|p| p.id));
                Action::Finish(skyline_unchecked(&all))
            }
        }
    }

    fn recovered_points(&self) -> usize {
        self.received.len()
    }
}
