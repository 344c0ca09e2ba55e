//! Checkin corpora and friendship graphs.
//!
//! A [`SocialGraph`] is built by ingesting tabular checkin and edge files, can be
//! persisted as a snapshot, and is read-only for every analysis downstream.

mod ingest;
mod snapshot;
mod summary;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;

pub use ingest::{parse_timestamp, ColumnMapping, EdgeReport, IngestReport, RowRejection};
pub use snapshot::SNAPSHOT_FORMAT;
pub use summary::{summarize, DatasetSummary, Stat};

/// Opaque user identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Self {
        UserId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId(s.to_owned())
    }
}

/// One timestamped observation of one user. `timestamp` is UTC seconds since the epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkin {
    pub user: UserId,
    pub timestamp: i64,
    pub point: GeoPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeInsert {
    Added,
    Duplicate,
    SelfLoop,
}

/// Users, undirected friendship edges and per-user time-ordered checkins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SocialGraph {
    adjacency: BTreeMap<UserId, BTreeSet<UserId>>,
    checkins: BTreeMap<UserId, Vec<Checkin>>,
    edge_count: usize,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_user(&mut self, user: UserId) {
        self.checkins.entry(user.clone()).or_default();
        self.adjacency.entry(user).or_default();
    }

    pub fn add_edge(&mut self, a: UserId, b: UserId) -> EdgeInsert {
        if a == b {
            return EdgeInsert::SelfLoop;
        }
        self.add_user(a.clone());
        self.add_user(b.clone());
        if !self.adjacency.get_mut(&a).expect("user added").insert(b.clone()) {
            return EdgeInsert::Duplicate;
        }
        self.adjacency.get_mut(&b).expect("user added").insert(a);
        self.edge_count += 1;
        EdgeInsert::Added
    }

    /// Append checkins in the given order, then restore per-user time order.
    /// The sort is stable, so equal timestamps keep their ingestion order.
    pub fn extend_checkins(&mut self, batch: impl IntoIterator<Item = Checkin>) {
        let mut touched = BTreeSet::new();
        for c in batch {
            self.add_user(c.user.clone());
            touched.insert(c.user.clone());
            self.checkins.get_mut(&c.user).expect("user added").push(c);
        }
        for user in touched {
            if let Some(list) = self.checkins.get_mut(&user) {
                list.sort_by_key(|c| c.timestamp);
            }
        }
    }

    pub fn contains_user(&self, user: &UserId) -> bool {
        self.adjacency.contains_key(user)
    }

    pub fn users(&self) -> impl Iterator<Item = &UserId> {
        self.adjacency.keys()
    }

    pub fn user_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn checkin_count(&self) -> usize {
        self.checkins.values().map(Vec::len).sum()
    }

    /// Each undirected edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (&UserId, &UserId)> {
        self.adjacency
            .iter()
            .flat_map(|(a, ns)| ns.range(a..).filter(move |b| *b != a).map(move |b| (a, b)))
    }

    pub fn neighbors(&self, user: &UserId) -> impl Iterator<Item = &UserId> {
        self.adjacency.get(user).into_iter().flatten()
    }

    pub fn degree(&self, user: &UserId) -> usize {
        self.adjacency.get(user).map_or(0, BTreeSet::len)
    }

    pub fn are_friends(&self, a: &UserId, b: &UserId) -> bool {
        self.adjacency.get(a).is_some_and(|ns| ns.contains(b))
    }

    /// Time-ordered checkins of `user`; empty for unknown users.
    pub fn checkins(&self, user: &UserId) -> &[Checkin] {
        self.checkins.get(user).map_or(&[], Vec::as_slice)
    }

    /// Full scan of the ordering invariant.
    pub fn is_time_ordered(&self) -> bool {
        self.checkins
            .values()
            .all(|list| list.windows(2).all(|w| w[0].timestamp <= w[1].timestamp))
    }
}
