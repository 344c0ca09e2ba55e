use std::io::Read;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime};
use serde::Serialize;

use super::{Checkin, EdgeInsert, SocialGraph, UserId};
use crate::error::{Error, Result};
use crate::geo::GeoPoint;

/// Which column holds which field. Indices are zero-based.
///
/// The default matches the public Gowalla snapshot layout:
/// `user<TAB>timestamp<TAB>lat<TAB>lng<TAB>location_id`, no header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMapping {
    pub user: usize,
    pub timestamp: usize,
    pub lat: usize,
    pub lng: usize,
    pub location_id: Option<usize>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        ColumnMapping {
            user: 0,
            timestamp: 1,
            lat: 2,
            lng: 3,
            location_id: Some(4),
            delimiter: b'\t',
            has_header: false,
        }
    }
}

impl FromStr for ColumnMapping {
    type Err = Error;

    /// Parses `user=0,timestamp=1,lat=2,lng=3,location=4`. Keys left out keep
    /// their defaults; `location=none` drops the venue column.
    fn from_str(s: &str) -> Result<Self> {
        let mut m = ColumnMapping::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("column mapping entry `{part}` is not key=index")))?;
            let index = || {
                value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("column index `{value}` for `{key}` is not a number")))
            };
            match key.trim() {
                "user" => m.user = index()?,
                "timestamp" | "time" => m.timestamp = index()?,
                "lat" => m.lat = index()?,
                "lng" | "lon" => m.lng = index()?,
                "location" | "location_id" => {
                    m.location_id = if value.trim() == "none" { None } else { Some(index()?) }
                }
                other => return Err(Error::Config(format!("unknown column `{other}`"))),
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowRejection {
    /// 1-based line number in the source.
    pub row: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: Vec<RowRejection>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EdgeReport {
    pub accepted: usize,
    pub duplicates: usize,
    pub self_loops: usize,
    pub malformed: Vec<RowRejection>,
}

/// Accepts RFC 3339 (`2010-10-19T23:55:27Z`), naive ISO 8601 taken as UTC, or
/// integer epoch seconds.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    s.parse::<i64>().ok()
}

fn field<'r>(record: &'r csv::StringRecord, index: usize, name: &str) -> Result<&'r str, String> {
    record
        .get(index)
        .map(str::trim)
        .ok_or_else(|| format!("missing {name} column {index}"))
}

fn parse_row(record: &csv::StringRecord, m: &ColumnMapping) -> Result<Checkin, String> {
    let user = field(record, m.user, "user")?;
    if user.is_empty() {
        return Err("empty user id".into());
    }
    let ts_raw = field(record, m.timestamp, "timestamp")?;
    let timestamp = parse_timestamp(ts_raw).ok_or_else(|| format!("unparseable timestamp `{ts_raw}`"))?;
    let lat_raw = field(record, m.lat, "lat")?;
    let lat: f64 = lat_raw.parse().map_err(|_| format!("unparseable latitude `{lat_raw}`"))?;
    let lng_raw = field(record, m.lng, "lng")?;
    let lng: f64 = lng_raw.parse().map_err(|_| format!("unparseable longitude `{lng_raw}`"))?;
    let point = GeoPoint::new(lat, lng).map_err(|e| e.to_string())?;
    let location_id = match m.location_id {
        Some(i) => record.get(i).map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned),
        None => None,
    };
    Ok(Checkin {
        user: UserId::new(user),
        timestamp,
        point,
        location_id,
    })
}

fn reader<R: Read>(source: R, delimiter: u8, has_header: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(has_header)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(source)
}

impl SocialGraph {
    /// Ingest checkin rows. Malformed rows are skipped and reported; the batch
    /// is discarded if more than half of the rows were rejected.
    pub fn ingest_checkins<R: Read>(&mut self, source: R, mapping: &ColumnMapping) -> Result<IngestReport> {
        let mut rdr = reader(source, mapping.delimiter, mapping.has_header);
        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        let mut record = csv::StringRecord::new();
        loop {
            match rdr.read_record(&mut record) {
                Ok(true) => {}
                Ok(false) => break,
                Err(e) if e.is_io_error() => return Err(e.into()),
                Err(e) => {
                    let row = e.position().map_or(0, |p| p.line());
                    rejected.push(RowRejection { row, reason: e.to_string() });
                    continue;
                }
            }
            let row = record.position().map_or(0, |p| p.line());
            match parse_row(&record, mapping) {
                Ok(c) => accepted.push(c),
                Err(reason) => rejected.push(RowRejection { row, reason }),
            }
        }
        let total = accepted.len() + rejected.len();
        if rejected.len() * 2 > total {
            return Err(Error::FormatMismatch { rejected: rejected.len(), total });
        }
        for r in &rejected {
            log::warn!("checkin row {} rejected: {}", r.row, r.reason);
        }
        let report = IngestReport { accepted: accepted.len(), rejected };
        self.extend_checkins(accepted);
        Ok(report)
    }

    /// Ingest `user<TAB>user` friendship rows.
    pub fn ingest_edges<R: Read>(&mut self, source: R) -> Result<EdgeReport> {
        self.ingest_edges_with(source, b'\t')
    }

    pub fn ingest_edges_with<R: Read>(&mut self, source: R, delimiter: u8) -> Result<EdgeReport> {
        let mut rdr = reader(source, delimiter, false);
        let mut report = EdgeReport::default();
        let mut record = csv::StringRecord::new();
        while rdr.read_record(&mut record)? {
            let row = record.position().map_or(0, |p| p.line());
            let a = record.get(0).map(str::trim).unwrap_or("");
            let b = record.get(1).map(str::trim).unwrap_or("");
            if a.is_empty() || b.is_empty() {
                report.malformed.push(RowRejection { row, reason: "expected two user ids".into() });
                continue;
            }
            match self.add_edge(UserId::new(a), UserId::new(b)) {
                EdgeInsert::Added => report.accepted += 1,
                EdgeInsert::Duplicate => report.duplicates += 1,
                EdgeInsert::SelfLoop => report.self_loops += 1,
            }
        }
        Ok(report)
    }
}
