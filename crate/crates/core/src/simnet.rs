//! Tick-based contention model over mobility traces.
//!
//! Every tick, nodes within radio range of each other (transitively) form a
//! contention set. One member chosen at random transmits; every other member
//! backs off once and pauses for the tick, charged to the grid cell it is in.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::FieldPoint;
use crate::mobility::{cell_of, Trace};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contention {
    /// Connected components of the within-range graph.
    #[default]
    Components,
    /// Only direct neighbours of a transmitter defer; transmitters are a
    /// greedy independent set in random order.
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub duration: f64,
    pub width: f64,
    pub height: f64,
    pub node_count: usize,
    pub radio_range: f64,
    pub tick: f64,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub rng_seed: u64,
    pub contention: Contention,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration: 10_000.0,
            width: 2000.0,
            height: 2000.0,
            node_count: 15,
            radio_range: 250.0,
            tick: 1.0,
            grid_rows: 10,
            grid_cols: 10,
            rng_seed: 0,
            contention: Contention::Components,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let problem = if !(self.duration > 0.0 && self.duration.is_finite()) {
            "duration must be positive"
        } else if !(self.tick > 0.0 && self.tick <= self.duration) {
            "tick must be positive and at most the duration"
        } else if !(self.radio_range > 0.0) {
            "radio range must be positive"
        } else if !(self.width > 0.0 && self.height > 0.0) {
            "field dimensions must be positive"
        } else if self.grid_rows == 0 || self.grid_cols == 0 {
            "grid needs at least one row and column"
        } else {
            return Ok(());
        };
        Err(Error::Config(format!("{problem}: {self:?}")))
    }

    pub fn tick_count(&self) -> usize {
        (self.duration / self.tick + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongestionGrid {
    pub rows: usize,
    pub cols: usize,
    /// Row-major; row 0 is the bottom of the field.
    pub backoffs: Vec<u64>,
    pub pause_seconds: Vec<f64>,
}

impl CongestionGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        CongestionGrid {
            rows,
            cols,
            backoffs: vec![0; rows * cols],
            pause_seconds: vec![0.0; rows * cols],
        }
    }

    pub fn backoffs_at(&self, row: usize, col: usize) -> u64 {
        self.backoffs[row * self.cols + col]
    }

    pub fn total_backoffs(&self) -> u64 {
        self.backoffs.iter().sum()
    }

    pub fn total_pause_seconds(&self) -> f64 {
        self.pause_seconds.iter().sum()
    }

    /// `row,col,backoffs,pause_seconds`, row-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,backoffs,pause_seconds\n");
        for r in 0..self.rows {
            for c in 0..self.cols {
                let i = r * self.cols + c;
                let _ = writeln!(out, "{r},{c},{},{}", self.backoffs[i], self.pause_seconds[i]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub total_backoffs: u64,
    pub per_node_backoffs: Vec<u64>,
    pub grid: CongestionGrid,
}

impl SimReport {
    /// `node,backoffs` rows followed by a `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,backoffs\n");
        for (i, b) in self.per_node_backoffs.iter().enumerate() {
            let _ = writeln!(out, "{i},{b}");
        }
        let _ = writeln!(out, "total,{}", self.total_backoffs);
        out
    }

    pub fn summary(&self) -> String {
        let c = &self.config;
        format!(
            "{} nodes, {} s at {} s ticks, {}×{} m field, range {} m: {} backoffs, {} s paused\n",
            c.node_count,
            c.duration,
            c.tick,
            c.width,
            c.height,
            c.radio_range,
            self.total_backoffs,
            self.grid.total_pause_seconds()
        )
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Contention sets of size ≥ 2, each sorted, ordered by smallest member.
fn contention_sets(pos: &[FieldPoint], range: f64) -> Vec<Vec<usize>> {
    let n = pos.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if pos[i].distance(&pos[j]) <= range {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        sets[r].push(i);
    }
    sets.into_iter().filter(|s| s.len() > 1).collect()
}

/// Nodes that back off this tick.
fn losers<R: Rng>(pos: &[FieldPoint], config: &SimConfig, rng: &mut R) -> Vec<usize> {
    match config.contention {
        Contention::Components => {
            let mut out = Vec::new();
            for set in contention_sets(pos, config.radio_range) {
                let winner = set[rng.gen_range(0..set.len())];
                out.extend(set.into_iter().filter(|&i| i != winner));
            }
            out
        }
        Contention::Pairwise => {
            let mut order: Vec<usize> = (0..pos.len()).collect();
            order.shuffle(rng);
            let mut transmitting: Vec<usize> = Vec::new();
            let mut out = Vec::new();
            for i in order {
                if transmitting.iter().any(|&w| pos[w].distance(&pos[i]) <= config.radio_range) {
                    out.push(i);
                } else {
                    transmitting.push(i);
                }
            }
            out.sort_unstable();
            out
        }
    }
}

pub fn run_simulation(traces: &[Trace], config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    if traces.len() != config.node_count {
        return Err(Error::Contract(format!(
            "{} traces for a configured node count of {}",
            traces.len(),
            config.node_count
        )));
    }
    let ticks = config.tick_count();
    let last_tick = (ticks.saturating_sub(1)) as f64 * config.tick;
    for (i, tr) in traces.iter().enumerate() {
        match (tr.start_time(), tr.end_time()) {
            (Some(s), Some(e)) if s <= 0.0 && e >= last_tick => {}
            _ => {
                return Err(Error::Contract(format!(
                    "trace of node {i} does not cover [0, {}] s",
                    config.duration
                )))
            }
        }
    }

    let mut rng = rng::stream(config.rng_seed, "simnet", 0);
    let mut grid = CongestionGrid::new(config.grid_rows, config.grid_cols);
    let mut per_node = vec![0u64; traces.len()];
    let mut pos = Vec::with_capacity(traces.len());
    for step in 0..ticks {
        let t = step as f64 * config.tick;
        pos.clear();
        for (i, tr) in traces.iter().enumerate() {
            let p = tr.position_at(t).expect("coverage checked above");
            if !p.within(config.width, config.height) {
                return Err(Error::Contract(format!(
                    "node {i} at ({}, {}) left the field at t = {t}",
                    p.x, p.y
                )));
            }
            pos.push(p);
        }
        let lost = losers(&pos, config, &mut rng);
        if cfg!(debug_assertions) && config.contention == Contention::Components {
            let expected: usize = contention_sets(&pos, config.radio_range).iter().map(|s| s.len() - 1).sum();
            debug_assert_eq!(lost.len(), expected, "backoff conservation at t = {t}");
        }
        for i in lost {
            per_node[i] += 1;
            let (r, c) = cell_of(pos[i], config.width, config.height, config.grid_rows, config.grid_cols);
            grid.backoffs[r * config.grid_cols + c] += 1;
            grid.pause_seconds[r * config.grid_cols + c] += config.tick;
        }
    }
    Ok(SimReport {
        config: *config,
        total_backoffs: per_node.iter().sum(),
        per_node_backoffs: per_node,
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub fmm: SimReport,
    pub rwp: SimReport,
    /// FMM over RWP total backoffs; absent when RWP had none.
    pub ratio: Option<f64>,
    /// FMM minus RWP backoffs per cell, row-major.
    pub cell_difference: Vec<i64>,
}

impl ModelComparison {
    pub fn ratio_line(&self) -> String {
        match self.ratio {
            Some(r) => format!(
                "fmm/rwp backoff ratio: {r:.4} ({} / {})",
                self.fmm.total_backoffs, self.rwp.total_backoffs
            ),
            None => format!(
                "fmm/rwp backoff ratio: undefined ({} / 0)",
                self.fmm.total_backoffs
            ),
        }
    }
}

/// Both runs use the same seed.
pub fn compare_models(fmm: &[Trace], rwp: &[Trace], config: &SimConfig) -> Result<ModelComparison> {
    let a = run_simulation(fmm, config)?;
    let b = run_simulation(rwp, config)?;
    let ratio = (b.total_backoffs > 0).then(|| a.total_backoffs as f64 / b.total_backoffs as f64);
    let cell_difference = a
        .grid
        .backoffs
        .iter()
        .zip(&b.grid.backoffs)
        .map(|(&x, &y)| x as i64 - y as i64)
        .collect();
    Ok(ModelComparison {
        fmm: a,
        rwp: b,
        ratio,
        cell_difference,
    })
}

/// Mean backoffs of the central 2×2 block and of the outer ring of cells.
/// Needs at least a 4×4 grid with even dimensions.
pub fn center_and_border_means(grid: &CongestionGrid) -> Option<(f64, f64)> {
    let (r, c) = (grid.rows, grid.cols);
    if r < 4 || c < 4 || r % 2 == 1 || c % 2 == 1 {
        return None;
    }
    let center = [(r / 2 - 1, c / 2 - 1), (r / 2 - 1, c / 2), (r / 2, c / 2 - 1), (r / 2, c / 2)]
        .iter()
        .map(|&(i, j)| grid.backoffs_at(i, j) as f64)
        .sum::<f64>()
        / 4.0;
    let border: Vec<f64> = (0..r)
        .flat_map(|i| (0..c).map(move |j| (i, j)))
        .filter(|&(i, j)| i == 0 || j == 0 || i == r - 1 || j == c - 1)
        .map(|(i, j)| grid.backoffs_at(i, j) as f64)
        .collect();
    Some((center, border.iter().sum::<f64>() / border.len() as f64))
}
