use std::fmt::Write as _;

use chrono::{DateTime, Datelike, NaiveDate};
use serde::Serialize;

use super::SocialGraph;
use crate::geo::haversine_distance;

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub stddev: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Stat { mean, stddev: var.sqrt() })
    }
}

/// Corpus-level statistics in the layout of the usual Gowalla data summary.
///
/// Weekdays are coded 0 = Sunday … 6 = Saturday. Intervals and distances are
/// taken between consecutive checkins of the same user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub user_count: usize,
    pub checkin_count: usize,
    pub edge_count: usize,
    /// Each friendship counted from both ends.
    pub directed_edge_count: usize,
    pub checkins_per_user: Option<Stat>,
    pub friends_per_user: Option<Stat>,
    pub weekday: Option<Stat>,
    pub earliest_checkin: Option<NaiveDate>,
    pub interval_days: Option<Stat>,
    pub interval_count: usize,
    pub consecutive_distance_km: Option<Stat>,
    pub consecutive_distance_total_km: f64,
}

pub fn summarize(graph: &SocialGraph) -> DatasetSummary {
    let mut per_user = Vec::with_capacity(graph.user_count());
    let mut friends = Vec::with_capacity(graph.user_count());
    let mut weekdays = Vec::with_capacity(graph.checkin_count());
    let mut intervals = Vec::new();
    let mut distances = Vec::new();
    let mut earliest: Option<i64> = None;

    for user in graph.users() {
        let list = graph.checkins(user);
        per_user.push(list.len() as f64);
        friends.push(graph.degree(user) as f64);
        for c in list {
            if let Some(dt) = DateTime::from_timestamp(c.timestamp, 0) {
                weekdays.push(f64::from(dt.weekday().num_days_from_sunday()));
            }
            earliest = Some(earliest.map_or(c.timestamp, |e| e.min(c.timestamp)));
        }
        for w in list.windows(2) {
            intervals.push((w[1].timestamp - w[0].timestamp) as f64 / SECONDS_PER_DAY);
            distances.push(haversine_distance(w[0].point, w[1].point));
        }
    }

    DatasetSummary {
        user_count: graph.user_count(),
        checkin_count: graph.checkin_count(),
        edge_count: graph.edge_count(),
        directed_edge_count: 2 * graph.edge_count(),
        checkins_per_user: Stat::of(&per_user),
        friends_per_user: Stat::of(&friends),
        weekday: Stat::of(&weekdays),
        earliest_checkin: earliest.and_then(|t| DateTime::from_timestamp(t, 0)).map(|d| d.date_naive()),
        interval_days: Stat::of(&intervals),
        interval_count: intervals.len(),
        consecutive_distance_total_km: distances.iter().sum(),
        consecutive_distance_km: Stat::of(&distances),
    }
}

impl DatasetSummary {
    /// `metric,mean,stddev,total` rows; absent statistics are left empty.
    pub fn to_csv(&self) -> String {
        fn row(out: &mut String, name: &str, stat: Option<Stat>, total: &str) {
            let (mean, sd) = stat.map_or((String::new(), String::new()), |s| (s.mean.to_string(), s.stddev.to_string()));
            let _ = writeln!(out, "{name},{mean},{sd},{total}");
        }
        let mut out = String::from("metric,mean,stddev,total\n");
        row(&mut out, "users", None, &self.user_count.to_string());
        row(&mut out, "checkins", self.checkins_per_user, &self.checkin_count.to_string());
        row(&mut out, "friends", self.friends_per_user, &self.edge_count.to_string());
        row(&mut out, "friends_directed", None, &self.directed_edge_count.to_string());
        let earliest = self.earliest_checkin.map(|d| d.to_string()).unwrap_or_default();
        row(&mut out, "weekday", self.weekday, &earliest);
        row(
            &mut out,
            "distance_km",
            self.consecutive_distance_km,
            &self.consecutive_distance_total_km.to_string(),
        );
        row(&mut out, "interval_days", self.interval_days, &self.interval_count.to_string());
        out
    }
}
