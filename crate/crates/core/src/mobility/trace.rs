use rand::Rng;
use serde::{Deserialize, Serialize};

use super::markov::is_row_stochastic;
use super::MobilityModel;
use crate::error::{Error, Result};
use crate::geo::FieldPoint;
use crate::rng;

/// The node is at `pos` at time `t` and leaves for the next waypoint at
/// `speed_to_next`. It reaches it after `distance / speed` seconds and waits
/// there until the next waypoint's `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub pos: FieldPoint,
    pub speed_to_next: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub waypoints: Vec<Waypoint>,
}

impl Trace {
    pub fn new(waypoints: Vec<Waypoint>) -> Self {
        Trace { waypoints }
    }

    pub fn start_time(&self) -> Option<f64> {
        self.waypoints.first().map(|w| w.t)
    }

    pub fn end_time(&self) -> Option<f64> {
        self.waypoints.last().map(|w| w.t)
    }

    /// Position at time `t`, or `None` outside `[start_time, end_time]`.
    pub fn position_at(&self, t: f64) -> Option<FieldPoint> {
        let (first, last) = (self.waypoints.first()?, self.waypoints.last()?);
        if t < first.t || t > last.t {
            return None;
        }
        let i = self.waypoints.partition_point(|w| w.t <= t) - 1;
        let w = &self.waypoints[i];
        let Some(next) = self.waypoints.get(i + 1) else {
            return Some(w.pos);
        };
        let d = w.pos.distance(&next.pos);
        let travelled = w.speed_to_next * (t - w.t);
        if travelled >= d {
            return Some(next.pos);
        }
        let f = travelled / d;
        Some(FieldPoint::new(
            w.pos.x + (next.pos.x - w.pos.x) * f,
            w.pos.y + (next.pos.y - w.pos.y) * f,
        ))
    }

    /// Keep the node parked at its final position until `t`.
    pub fn hold_until(&mut self, t: f64) {
        if let Some(&last) = self.waypoints.last() {
            if last.t < t {
                self.waypoints.push(Waypoint { t, ..last });
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum SpeedPolicy {
    Fixed { speed: f64 },
    /// Field distance over the mean observed gap of the transition, with the
    /// gap capped at `max_gap_s` and the result clamped to the speed range.
    /// Unobserved transitions move at `fallback`.
    Temporal {
        max_gap_s: f64,
        min_speed: f64,
        max_speed: f64,
        fallback: f64,
    },
}

impl Default for SpeedPolicy {
    fn default() -> Self {
        SpeedPolicy::Fixed { speed: 5.0 }
    }
}

impl SpeedPolicy {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpeedPolicy::Fixed { speed } => speed > 0.0 && speed.is_finite(),
            SpeedPolicy::Temporal {
                max_gap_s,
                min_speed,
                max_speed,
                fallback,
            } => max_gap_s > 0.0 && min_speed > 0.0 && min_speed <= fallback && fallback <= max_speed && max_speed.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid speed policy {self:?}")))
        }
    }

    fn nominal(&self) -> f64 {
        match *self {
            SpeedPolicy::Fixed { speed } => speed,
            SpeedPolicy::Temporal { fallback, .. } => fallback,
        }
    }

    fn leg_speed(&self, distance: f64, mean_gap: Option<f64>) -> f64 {
        match *self {
            SpeedPolicy::Fixed { speed } => speed,
            SpeedPolicy::Temporal {
                max_gap_s,
                min_speed,
                max_speed,
                fallback,
            } => match mean_gap {
                Some(gap) if gap > 0.0 => (distance / gap.min(max_gap_s)).clamp(min_speed, max_speed),
                _ => fallback,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    #[default]
    Uniform,
    /// Weighted by how often each state was checked in at.
    ByOccurrence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmmConfig {
    pub duration: f64,
    pub speed: SpeedPolicy,
    /// Time spent on a self-transition (or any zero-length move).
    pub dwell_s: f64,
    pub start: StartPolicy,
}

impl Default for FmmConfig {
    fn default() -> Self {
        FmmConfig {
            duration: 10_000.0,
            speed: SpeedPolicy::default(),
            dwell_s: 60.0,
            start: StartPolicy::Uniform,
        }
    }
}

impl FmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("duration must be positive, got {}", self.duration)));
        }
        if !(self.dwell_s > 0.0 && self.dwell_s.is_finite()) {
            return Err(Error::Config(format!("dwell must be positive, got {}", self.dwell_s)));
        }
        self.speed.validate()
    }
}

/// Sample the next state from a cumulative row.
fn next_state<R: Rng>(cumulative: &[f64], row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or_else(|| row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1))
}

/// Walk the model's Markov chain in the field until `config.duration`.
///
/// The last waypoint is the first arrival at or after the duration, so every
/// waypoint sits exactly on a state.
pub fn generate_fmm_trace<R: Rng>(model: &MobilityModel, config: &FmmConfig, rng: &mut R) -> Result<Trace> {
    config.validate()?;
    let k = model.k();
    if k == 0 {
        return Err(Error::Domain(format!("model of user {} has no states", model.user)));
    }
    if !is_row_stochastic(&model.affinity) {
        return Err(Error::Contract(format!(
            "affinity matrix of user {} is not row-stochastic",
            model.user
        )));
    }
    let cumulative: Vec<Vec<f64>> = model
        .affinity
        .rows()
        .map(|row| {
            row.iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();

    let mut current = match config.start {
        StartPolicy::Uniform => rng.gen_range(0..k),
        StartPolicy::ByOccurrence => {
            let total: usize = model.states.iter().map(|s| s.occurrences).sum();
            let mut pick = rng.gen_range(0..total.max(1));
            model
                .states
                .iter()
                .position(|s| {
                    if pick < s.occurrences {
                        true
                    } else {
                        pick -= s.occurrences;
                        false
                    }
                })
                .unwrap_or(0)
        }
    };

    let mut t = 0.0;
    let mut waypoints = Vec::new();
    while t < config.duration {
        let next = next_state(&cumulative[current], model.affinity.row(current), rng);
        let (from, to) = (model.states[current].field, model.states[next].field);
        let d = from.distance(&to);
        let (speed, leg) = if d > 0.0 {
            let v = config.speed.leg_speed(d, *model.temporal_s.get(current, next));
            (v, d / v)
        } else {
            (config.speed.nominal(), config.dwell_s)
        };
        waypoints.push(Waypoint {
            t,
            pos: from,
            speed_to_next: speed,
        });
        t += leg;
        current = next;
    }
    waypoints.push(Waypoint {
        t,
        pos: model.states[current].field,
        speed_to_next: config.speed.nominal(),
    });
    Ok(Trace { waypoints })
}

/// One FMM trace per model, node `i` drawing from its own stream.
pub fn generate_fmm_traces(models: &[MobilityModel], config: &FmmConfig, rng_seed: u64) -> Result<Vec<Trace>> {
    models
        .iter()
        .enumerate()
        .map(|(i, m)| generate_fmm_trace(m, config, &mut rng::stream(rng_seed, "fmm", i as u64)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwpConfig {
    pub width: f64,
    pub height: f64,
    pub min_speed: f64,
    pub max_speed: f64,
    pub pause_time: f64,
    pub duration: f64,
}

impl RwpConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.width > 0.0
            && self.height > 0.0
            && self.width.is_finite()
            && self.height.is_finite()
            && 0.0 <= self.min_speed
            && self.min_speed <= self.max_speed
            && self.max_speed > 0.0
            && self.max_speed.is_finite()
            && self.pause_time >= 0.0
            && self.duration > 0.0
            && self.duration.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid random waypoint config {self:?}")))
        }
    }
}

pub fn generate_rwp_trace<R: Rng>(config: &RwpConfig, rng: &mut R) -> Result<Trace> {
    config.validate()?;
    let point = |rng: &mut R| FieldPoint::new(rng.gen_range(0.0..=config.width), rng.gen_range(0.0..=config.height));
    let mut pos = point(rng);
    let mut t = 0.0;
    let mut waypoints = Vec::new();
    while t < config.duration {
        let mut dest = point(rng);
        while dest == pos {
            dest = point(rng);
        }
        let mut speed = config.max_speed;
        if config.min_speed < config.max_speed {
            speed = rng.gen_range(config.min_speed..=config.max_speed);
            while speed <= 0.0 {
                speed = rng.gen_range(config.min_speed..=config.max_speed);
            }
        }
        waypoints.push(Waypoint {
            t,
            pos,
            speed_to_next: speed,
        });
        t += pos.distance(&dest) / speed + config.pause_time;
        pos = dest;
    }
    waypoints.push(Waypoint {
        t,
        pos,
        speed_to_next: config.max_speed,
    });
    Ok(Trace { waypoints })
}

pub fn generate_rwp_traces(config: &RwpConfig, nodes: usize, rng_seed: u64) -> Result<Vec<Trace>> {
    config.validate()?;
    if config.min_speed == 0.0 {
        log::warn!(
            "random waypoint with min speed 0: average speed decays over time and the run never reaches a steady state"
        );
    }
    (0..nodes)
        .map(|i| generate_rwp_trace(config, &mut rng::stream(rng_seed, "rwp", i as u64)))
        .collect()
}

/// Probability mass of each cell of a `rows × cols` grid under the
/// approximate random waypoint stationary density
/// `f(x, y) ∝ (x² − x_m²)(y² − y_m²)`, row-major with row 0 at `y = 0`.
pub fn rwp_stationary_cell_mass(rows: usize, cols: usize) -> Vec<f64> {
    // Marginal on u ∈ [-1, 1]: (3/4)(1 − u²), with CDF (3/4)(u − u³/3) + 1/2.
    let cdf = |u: f64| 0.75 * (u - u.powi(3) / 3.0) + 0.5;
    let marginal = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| cdf(-1.0 + 2.0 * (i + 1) as f64 / n as f64) - cdf(-1.0 + 2.0 * i as f64 / n as f64))
            .collect()
    };
    let (my, mx) = (marginal(rows), marginal(cols));
    my.iter().flat_map(|py| mx.iter().map(move |px| py * px)).collect()
}

/// Grid cell of a field point; points on the far edges fall in the last cell.
pub fn cell_of(p: FieldPoint, width: f64, height: f64, rows: usize, cols: usize) -> (usize, usize) {
    let c = ((p.x / width * cols as f64).floor().max(0.0) as usize).min(cols - 1);
    let r = ((p.y / height * rows as f64).floor().max(0.0) as usize).min(rows - 1);
    (r, c)
}

/// Normalized occupancy of sampled positions, row-major.
pub fn occupancy_histogram(positions: &[FieldPoint], width: f64, height: f64, rows: usize, cols: usize) -> Vec<f64> {
    let mut h = vec![0.0; rows * cols];
    for &p in positions {
        let (r, c) = cell_of(p, width, height, rows, cols);
        h[r * cols + c] += 1.0;
    }
    let n = positions.len().max(1) as f64;
    h.iter_mut().for_each(|v| *v /= n);
    h
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{ModelState, MobilityModel};
    use crate::mobility::matrix::SquareMatrix;
    use crate::geo::GeoPoint;
    use proptest::prelude::*;

    fn wp(t: f64, x: f64, y: f64, v: f64) -> Waypoint {
        Waypoint {
            t,
            pos: FieldPoint::new(x, y),
            speed_to_next: v,
        }
    }

    pub(crate) fn model(positions: &[(f64, f64)], a: &[&[f64]]) -> MobilityModel {
        MobilityModel::from_field_states(
            "n".into(),
            positions
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| ModelState {
                    key: format!("s{i}"),
                    geo: GeoPoint::new(0.0, 0.0).unwrap(),
                    field: FieldPoint::new(x, y),
                    occurrences: 1,
                })
                .collect(),
            SquareMatrix::from_rows(a).unwrap(),
        )
    }

    #[test]
    fn interpolation_moves_then_waits() {
        let tr = Trace::new(vec![wp(0.0, 0.0, 0.0, 5.0), wp(100.0, 100.0, 0.0, 5.0)]);
        assert_eq!(tr.position_at(10.0), Some(FieldPoint::new(50.0, 0.0)));
        assert_eq!(tr.position_at(20.0), Some(FieldPoint::new(100.0, 0.0)));
        assert_eq!(tr.position_at(60.0), Some(FieldPoint::new(100.0, 0.0)));
        assert_eq!(tr.position_at(100.0), Some(FieldPoint::new(100.0, 0.0)));
        assert_eq!(tr.position_at(100.5), None);
        let mut held = tr.clone();
        held.hold_until(200.0);
        assert_eq!(held.position_at(150.0), Some(FieldPoint::new(100.0, 0.0)));
    }

    #[test]
    fn single_state_is_stationary() {
        let m = model(&[(5.0, 5.0)], &[&[1.0]]);
        let cfg = FmmConfig {
            duration: 1000.0,
            ..FmmConfig::default()
        };
        let tr = generate_fmm_trace(&m, &cfg, &mut rng::stream(1, "t", 0)).unwrap();
        assert!(tr.waypoints.iter().all(|w| w.pos == FieldPoint::new(5.0, 5.0)));
        assert!(tr.end_time().unwrap() >= 1000.0);
        assert!(tr.waypoints.windows(2).all(|w| w[1].t - w[0].t == 60.0));
    }

    #[test]
    fn two_state_alternation() {
        let m = model(&[(0.0, 0.0), (100.0, 0.0)], &[&[0.0, 1.0], &[1.0, 0.0]]);
        let cfg = FmmConfig {
            duration: 500.0,
            ..FmmConfig::default()
        };
        let tr = generate_fmm_trace(&m, &cfg, &mut rng::stream(2, "t", 0)).unwrap();
        for w in tr.waypoints.windows(2) {
            assert_ne!(w[0].pos, w[1].pos);
            assert_eq!(w[1].t - w[0].t, 20.0);
        }
    }

    #[test]
    fn unpatched_affinity_is_a_contract_violation() {
        let m = model(&[(0.0, 0.0), (1.0, 0.0)], &[&[0.0, 1.0], &[0.5, 0.0]]);
        let err = generate_fmm_trace(&m, &FmmConfig::default(), &mut rng::stream(0, "t", 0)).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        let bad = FmmConfig {
            dwell_s: 0.0,
            ..FmmConfig::default()
        };
        let ok = model(&[(0.0, 0.0)], &[&[1.0]]);
        assert!(generate_fmm_trace(&ok, &bad, &mut rng::stream(0, "t", 0)).is_err());
    }

    #[test]
    fn temporal_speed_policy() {
        let mut m = model(&[(0.0, 0.0), (600.0, 0.0)], &[&[0.0, 1.0], &[1.0, 0.0]]);
        m.temporal_s.set(0, 1, Some(60.0));
        m.temporal_s.set(1, 0, Some(10.0 * 86_400.0));
        let policy = SpeedPolicy::Temporal {
            max_gap_s: 86_400.0,
            min_speed: 0.5,
            max_speed: 20.0,
            fallback: 5.0,
        };
        // 600 m in 60 s → 10 m/s; 600 m in a capped day → clamped up to 0.5
        assert_eq!(policy.leg_speed(600.0, Some(60.0)), 10.0);
        assert_eq!(policy.leg_speed(600.0, Some(10.0 * 86_400.0)), 0.5);
        assert_eq!(policy.leg_speed(600.0, None), 5.0);
        let cfg = FmmConfig {
            duration: 5000.0,
            speed: policy,
            ..FmmConfig::default()
        };
        let tr = generate_fmm_trace(&m, &cfg, &mut rng::stream(3, "t", 0)).unwrap();
        assert!(tr.waypoints.iter().all(|w| (0.5..=20.0).contains(&w.speed_to_next)));
    }

    #[test]
    fn rwp_leg_kinematics() {
        let cfg = RwpConfig {
            width: 2000.0,
            height: 2000.0,
            min_speed: 5.0,
            max_speed: 5.0,
            pause_time: 0.0,
            duration: 5000.0,
        };
        let tr = generate_rwp_trace(&cfg, &mut rng::stream(4, "t", 0)).unwrap();
        for w in tr.waypoints.windows(2) {
            assert_eq!(w[0].speed_to_next, 5.0);
            let leg = w[0].pos.distance(&w[1].pos) / 5.0;
            assert!((w[1].t - w[0].t - leg).abs() < 1e-9);
        }
        let paused = RwpConfig { pause_time: 30.0, ..cfg };
        let tr = generate_rwp_trace(&paused, &mut rng::stream(4, "t", 0)).unwrap();
        for w in tr.waypoints.windows(2) {
            let leg = w[0].pos.distance(&w[1].pos) / 5.0;
            assert!((w[1].t - w[0].t - leg - 30.0).abs() < 1e-9);
        }
        assert!(generate_rwp_trace(&RwpConfig { max_speed: 0.0, min_speed: 0.0, ..cfg }, &mut rng::stream(0, "t", 0)).is_err());
    }

    #[test]
    fn stationary_mass_sums_to_one_and_peaks_centrally() {
        let m = rwp_stationary_cell_mass(10, 10);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m[4 * 10 + 4] > m[0]);
        // 1×1 grid holds everything; 2×1 splits evenly
        assert_eq!(rwp_stationary_cell_mass(1, 1), vec![1.0]);
        assert_eq!(rwp_stationary_cell_mass(2, 1), vec![0.5, 0.5]);
    }

    proptest! {
        #[test]
        fn rwp_speeds_and_times(seed in any::<u64>(), min in 0.0f64..3.0, extra in 0.1f64..5.0, pause in 0.0f64..50.0) {
            let cfg = RwpConfig { width: 500.0, height: 300.0, min_speed: min, max_speed: min + extra, pause_time: pause, duration: 2000.0 };
            let tr = generate_rwp_trace(&cfg, &mut rng::stream(seed, "p", 0)).unwrap();
            prop_assert!(tr.end_time().unwrap() >= 2000.0);
            for w in &tr.waypoints {
                prop_assert!(w.pos.within(500.0, 300.0));
                prop_assert!(w.speed_to_next > 0.0 && w.speed_to_next >= min && w.speed_to_next <= min + extra);
            }
            prop_assert!(tr.waypoints.windows(2).all(|w| w[1].t > w[0].t));
        }

        #[test]
        fn fmm_waypoints_sit_on_states(seed in any::<u64>(), self_loop in 0.0f64..0.9) {
            let rest = (1.0 - self_loop) / 2.0;
            let m = model(&[(0.0, 0.0), (300.0, 50.0), (120.0, 400.0)],
                &[&[self_loop, rest, rest], &[rest, self_loop, rest], &[rest, rest, self_loop]]);
            let tr = generate_fmm_trace(&m, &FmmConfig { duration: 3000.0, ..FmmConfig::default() }, &mut rng::stream(seed, "p", 0)).unwrap();
            for w in &tr.waypoints {
                prop_assert!(m.states.iter().any(|s| s.field == w.pos));
                prop_assert_eq!(w.speed_to_next, 5.0);
            }
            prop_assert!(tr.waypoints.windows(2).all(|w| w[1].t > w[0].t));
        }
    }
}
