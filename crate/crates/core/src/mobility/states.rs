use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Checkin;
use crate::error::{Error, Result};
use crate::geo::{haversine_distance, GeoPoint};

/// A unique place a user checked in at. `point` is the centroid of the
/// checkins merged into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationState {
    pub key: String,
    pub point: GeoPoint,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateAssignment {
    /// States in order of first appearance.
    pub states: Vec<LocationState>,
    /// State index of every input checkin.
    pub state_of: Vec<usize>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Deduplicate checkin locations into states.
///
/// Checkins carrying a venue id are grouped by id. The rest are grouped by
/// single-linkage clustering: two checkins within `merge_radius_m` meters of
/// each other end up in the same state.
pub fn unique_locations(checkins: &[Checkin], merge_radius_m: f64) -> Result<StateAssignment> {
    if checkins.is_empty() {
        return Err(Error::Domain("unique_locations needs at least one checkin".into()));
    }
    if !(merge_radius_m >= 0.0) {
        return Err(Error::Domain(format!("merge radius must be non-negative, got {merge_radius_m}")));
    }

    // Group label per checkin: venue id, or the union-find root of its cluster.
    let anonymous: Vec<usize> = (0..checkins.len()).filter(|&i| checkins[i].location_id.is_none()).collect();
    let mut parent: Vec<usize> = (0..anonymous.len()).collect();
    for x in 0..anonymous.len() {
        for y in (x + 1)..anonymous.len() {
            let d_m = 1000.0 * haversine_distance(checkins[anonymous[x]].point, checkins[anonymous[y]].point);
            if d_m <= merge_radius_m {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
    }
    let mut cluster_root = HashMap::new();
    for (x, &i) in anonymous.iter().enumerate() {
        cluster_root.insert(i, find(&mut parent, x));
    }

    #[derive(PartialEq, Eq, Hash)]
    enum Group<'a> {
        Venue(&'a str),
        Cluster(usize),
    }

    let mut index_of: HashMap<Group<'_>, usize> = HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut keys = Vec::new();
    let mut state_of = Vec::with_capacity(checkins.len());
    let mut clusters = 0;
    for (i, c) in checkins.iter().enumerate() {
        let group = match &c.location_id {
            Some(id) => Group::Venue(id),
            None => Group::Cluster(cluster_root[&i]),
        };
        let s = *index_of.entry(group).or_insert_with(|| {
            members.push(Vec::new());
            keys.push(match &c.location_id {
                Some(id) => id.clone(),
                None => {
                    clusters += 1;
                    format!("~cluster{}", clusters - 1)
                }
            });
            members.len() - 1
        });
        members[s].push(i);
        state_of.push(s);
    }

    let states = members
        .iter()
        .zip(keys)
        .map(|(idx, key)| {
            let k = idx.len() as f64;
            let lat = idx.iter().map(|&i| checkins[i].point.lat()).sum::<f64>() / k;
            let lng = idx.iter().map(|&i| checkins[i].point.lng()).sum::<f64>() / k;
            Ok(LocationState {
                key,
                point: GeoPoint::new(lat, lng)?,
                occurrences: idx.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateAssignment { states, state_of })
}
