//! Per-user Markov mobility models and trace generation.

mod export;
mod hull;
mod markov;
pub mod matrix;
mod states;
mod trace;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use export::{export_csv, export_ns2, export_trace, parse_csv, parse_ns2, parse_trace, TraceFormat};
pub use hull::{convex_hull, hull_contains};
pub use markov::{
    build_affinity_matrix, build_distance_matrix, build_temporal_matrix, coverage_stats, is_row_stochastic,
    patch_absorbing_states, CoverageStats, STOCHASTIC_TOLERANCE,
};
use matrix::SquareMatrix;
pub use states::{unique_locations, LocationState, StateAssignment};
pub use trace::{
    cell_of, generate_fmm_trace, generate_fmm_traces, generate_rwp_trace, generate_rwp_traces, occupancy_histogram,
    rwp_stationary_cell_mass, total_variation, FmmConfig, RwpConfig, SpeedPolicy, StartPolicy, Trace, Waypoint,
};

use crate::dataset::{SocialGraph, UserId};
use crate::error::{Error, Result};
use crate::geo::{fit_to_field, FieldPoint, FieldTransform, GeoPoint};

pub const DEFAULT_MERGE_RADIUS_M: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub key: String,
    pub geo: GeoPoint,
    pub field: FieldPoint,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityModel {
    pub user: UserId,
    pub states: Vec<ModelState>,
    /// Meters.
    pub distance_m: SquareMatrix<f64>,
    /// Row-stochastic transition probabilities (already patched).
    pub affinity: SquareMatrix<f64>,
    /// Affinity exactly as counted, before patching.
    pub affinity_raw: SquareMatrix<f64>,
    /// Mean observed seconds per transition; `None` if never observed.
    pub temporal_s: SquareMatrix<Option<f64>>,
    pub coverage: CoverageStats,
}

impl MobilityModel {
    pub fn k(&self) -> usize {
        self.states.len()
    }

    /// A model given directly by its field positions and transition matrix.
    /// Distances come from the source points; no temporal data is attached.
    pub fn from_field_states(user: UserId, states: Vec<ModelState>, affinity: SquareMatrix<f64>) -> Self {
        let k = states.len();
        let distance_m = build_distance_matrix(&states.iter().map(|s| s.geo).collect::<Vec<_>>());
        let mut temporal_s = SquareMatrix::filled(k, None);
        (0..k).for_each(|m| temporal_s.set(m, m, Some(0.0)));
        MobilityModel {
            user,
            coverage: coverage_stats(&distance_m),
            states,
            distance_m,
            affinity_raw: affinity.clone(),
            affinity,
            temporal_s,
        }
    }
}

/// Build the model of one user, mapping its states into the field through
/// `transform`.
pub fn build_model(
    graph: &SocialGraph,
    user: &UserId,
    merge_radius_m: f64,
    transform: &FieldTransform,
) -> Result<MobilityModel> {
    if !graph.contains_user(user) {
        return Err(Error::UnknownUser(user.to_string()));
    }
    let checkins = graph.checkins(user);
    let assignment = unique_locations(checkins, merge_radius_m)?;
    let k = assignment.states.len();
    let points: Vec<GeoPoint> = assignment.states.iter().map(|s| s.point).collect();
    let distance_m = build_distance_matrix(&points);
    let affinity_raw = build_affinity_matrix(&assignment.state_of, k)?;
    let affinity = patch_absorbing_states(&affinity_raw)?;
    let timestamps: Vec<i64> = checkins.iter().map(|c| c.timestamp).collect();
    let temporal_s = build_temporal_matrix(&assignment.state_of, &timestamps, k)?;
    let states = assignment
        .states
        .into_iter()
        .map(|s| {
            Ok(ModelState {
                field: transform.apply(s.point)?,
                key: s.key,
                geo: s.point,
                occurrences: s.occurrences,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MobilityModel {
        user: user.clone(),
        coverage: coverage_stats(&distance_m),
        states,
        distance_m,
        affinity_raw,
        affinity,
        temporal_s,
    })
}

/// The seed user and their friends; with `transitive`, the whole connected
/// component of the seed user instead.
pub fn select_group(graph: &SocialGraph, seed_user: &UserId, transitive: bool) -> Result<Vec<UserId>> {
    if !graph.contains_user(seed_user) {
        return Err(Error::UnknownUser(seed_user.to_string()));
    }
    let mut group = BTreeSet::from([seed_user.clone()]);
    if transitive {
        let mut queue = VecDeque::from([seed_user.clone()]);
        while let Some(u) = queue.pop_front() {
            for v in graph.neighbors(&u) {
                if group.insert(v.clone()) {
                    queue.push_back(v.clone());
                }
            }
        }
    } else {
        group.extend(graph.neighbors(seed_user).cloned());
    }
    Ok(group.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupModels {
    pub width: f64,
    pub height: f64,
    pub transform: FieldTransform,
    pub models: Vec<MobilityModel>,
}

/// Models for a group of users sharing one field projection, so their
/// relative geography is preserved. Users without checkins are skipped.
pub fn build_group_models(
    graph: &SocialGraph,
    users: &[UserId],
    merge_radius_m: f64,
    width: f64,
    height: f64,
) -> Result<GroupModels> {
    let mut active = Vec::new();
    for u in users {
        if !graph.contains_user(u) {
            return Err(Error::UnknownUser(u.to_string()));
        }
        if graph.checkins(u).is_empty() {
            log::warn!("user {u} has no checkins; left out of the group");
        } else {
            active.push(u);
        }
    }
    if active.is_empty() {
        return Err(Error::Domain("no user in the group has any checkins".into()));
    }
    let mut centroids = Vec::new();
    for u in &active {
        let a = unique_locations(graph.checkins(u), merge_radius_m)?;
        centroids.extend(a.states.iter().map(|s| s.point));
    }
    let (_, transform) = fit_to_field(&centroids, width, height)?;
    let models = active
        .into_iter()
        .map(|u| build_model(graph, u, merge_radius_m, &transform))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupModels {
        width,
        height,
        transform,
        models,
    })
}
