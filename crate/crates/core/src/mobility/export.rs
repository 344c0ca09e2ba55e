//! Trace files: ns-2 movement scenarios and a plain `node,t,x,y,speed` CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::trace::{Trace, Waypoint};
use crate::error::{Error, Result};
use crate::geo::FieldPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Ns2,
    Csv,
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ns2" => Ok(TraceFormat::Ns2),
            "csv" => Ok(TraceFormat::Csv),
            other => Err(Error::Config(format!("unknown trace format `{other}` (expected ns2 or csv)"))),
        }
    }
}

fn check_bounds(traces: &[Trace], width: f64, height: f64) -> Result<()> {
    if traces.is_empty() {
        return Err(Error::Domain("no traces to export".into()));
    }
    for (i, tr) in traces.iter().enumerate() {
        if tr.waypoints.is_empty() {
            return Err(Error::Domain(format!("trace of node {i} is empty")));
        }
        if let Some(w) = tr.waypoints.iter().find(|w| !w.pos.within(width, height)) {
            return Err(Error::Contract(format!(
                "node {i} at ({}, {}) is outside the {width}×{height} field",
                w.pos.x, w.pos.y
            )));
        }
    }
    Ok(())
}

pub fn export_trace(traces: &[Trace], width: f64, height: f64, format: TraceFormat) -> Result<String> {
    match format {
        TraceFormat::Ns2 => export_ns2(traces, width, height),
        TraceFormat::Csv => export_csv(traces, width, height),
    }
}

/// Initial `set X_/Y_/Z_` lines for every node, then one `setdest` per leg,
/// grouped by node.
pub fn export_ns2(traces: &[Trace], width: f64, height: f64) -> Result<String> {
    check_bounds(traces, width, height)?;
    let mut out = String::new();
    for (i, tr) in traces.iter().enumerate() {
        let p = tr.waypoints[0].pos;
        let _ = writeln!(out, "$node_({i}) set X_ {:.6}", p.x);
        let _ = writeln!(out, "$node_({i}) set Y_ {:.6}", p.y);
        let _ = writeln!(out, "$node_({i}) set Z_ {:.6}", 0.0);
    }
    for (i, tr) in traces.iter().enumerate() {
        for leg in tr.waypoints.windows(2) {
            let _ = writeln!(
                out,
                "$ns_ at {:.6} \"$node_({i}) setdest {:.6} {:.6} {:.6}\"",
                leg[0].t, leg[1].pos.x, leg[1].pos.y, leg[0].speed_to_next
            );
        }
    }
    Ok(out)
}

pub fn export_csv(traces: &[Trace], width: f64, height: f64) -> Result<String> {
    check_bounds(traces, width, height)?;
    let mut out = String::from("node,t,x,y,speed\n");
    for (i, tr) in traces.iter().enumerate() {
        for w in &tr.waypoints {
            let _ = writeln!(out, "{i},{},{},{},{}", w.t, w.pos.x, w.pos.y, w.speed_to_next);
        }
    }
    Ok(out)
}

/// Parse either format, sniffing the CSV header.
pub fn parse_trace(text: &str) -> Result<Vec<Trace>> {
    if text.starts_with("node,t,x,y,speed") {
        parse_csv(text)
    } else {
        parse_ns2(text)
    }
}

fn num<T: FromStr>(field: &str, line: usize) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("line {line}: `{field}` is not a number")))
}

fn dense(nodes: std::collections::BTreeMap<usize, Vec<Waypoint>>) -> Result<Vec<Trace>> {
    nodes
        .into_iter()
        .enumerate()
        .map(|(expected, (node, wps))| {
            if node != expected {
                Err(Error::Data(format!("node indices are not contiguous: missing node {expected}")))
            } else {
                Ok(Trace::new(wps))
            }
        })
        .collect()
}

pub fn parse_csv(text: &str) -> Result<Vec<Trace>> {
    let mut nodes: std::collections::BTreeMap<usize, Vec<Waypoint>> = Default::default();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Data(format!("line {}: expected 5 fields, got {}", i + 1, f.len())));
        }
        nodes.entry(num(f[0], i + 1)?).or_default().push(Waypoint {
            t: num(f[1], i + 1)?,
            pos: FieldPoint::new(num(f[2], i + 1)?, num(f[3], i + 1)?),
            speed_to_next: num(f[4], i + 1)?,
        });
    }
    dense(nodes)
}

/// Rebuild waypoints from an ns-2 scenario. A node sits at its initial
/// position until its first `setdest`; the final waypoint is its arrival at
/// the last destination.
pub fn parse_ns2(text: &str) -> Result<Vec<Trace>> {
    #[derive(Default)]
    struct Node {
        x: Option<f64>,
        y: Option<f64>,
        legs: Vec<(f64, f64, f64, f64)>,
    }
    let node_index = |s: &str, line: usize| -> Result<usize> {
        s.strip_prefix("$node_(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Data(format!("line {line}: expected `$node_(i)`, got `{s}`")))
            .and_then(|n| num(n, line))
    };
    let mut nodes: std::collections::BTreeMap<usize, Node> = Default::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = raw.split_whitespace().collect();
        match tok.as_slice() {
            [node, "set", axis, value] => {
                let n = nodes.entry(node_index(node, line)?).or_default();
                let v = num(value, line)?;
                match *axis {
                    "X_" => n.x = Some(v),
                    "Y_" => n.y = Some(v),
                    "Z_" => {}
                    other => return Err(Error::Data(format!("line {line}: unknown axis `{other}`"))),
                }
            }
            ["$ns_", "at", t, node, "setdest", x, y, speed] => {
                let node = node
                    .strip_prefix('"')
                    .ok_or_else(|| Error::Data(format!("line {line}: malformed setdest")))?;
                let speed = speed
                    .strip_suffix('"')
                    .ok_or_else(|| Error::Data(format!("line {line}: malformed setdest")))?;
                nodes.entry(node_index(node, line)?).or_default().legs.push((
                    num(t, line)?,
                    num(x, line)?,
                    num(y, line)?,
                    num(speed, line)?,
                ));
            }
            _ => return Err(Error::Data(format!("line {line}: unrecognized ns-2 command `{raw}`"))),
        }
    }

    let mut out = std::collections::BTreeMap::new();
    for (idx, mut node) in nodes {
        let (Some(x), Some(y)) = (node.x, node.y) else {
            return Err(Error::Data(format!("node {idx} has no initial position")));
        };
        node.legs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pos = FieldPoint::new(x, y);
        let mut wps = Vec::with_capacity(node.legs.len() + 2);
        match node.legs.first() {
            None => wps.push(Waypoint {
                t: 0.0,
                pos,
                speed_to_next: 0.0,
            }),
            Some(&(t0, ..)) if t0 > 0.0 => wps.push(Waypoint {
                t: 0.0,
                pos,
                speed_to_next: node.legs[0].3,
            }),
            _ => {}
        }
        let mut arrival = 0.0;
        for &(t, dx, dy, speed) in &node.legs {
            if speed <= 0.0 {
                return Err(Error::Data(format!("node {idx}: setdest at {t} has speed {speed}")));
            }
            wps.push(Waypoint { t, pos, speed_to_next: speed });
            let dest = FieldPoint::new(dx, dy);
            arrival = t + pos.distance(&dest) / speed;
            pos = dest;
        }
        if let Some(&(.., speed)) = node.legs.last() {
            wps.push(Waypoint {
                t: arrival,
                pos,
                speed_to_next: speed,
            });
        }
        out.insert(idx, wps);
    }
    dense(out)
}
