//! Self-describing JSON snapshot of a [`SocialGraph`].
//!
//! Users, edges and checkins are written in their canonical (sorted) order, so
//! the same graph always serializes to the same bytes.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Checkin, EdgeInsert, SocialGraph, UserId};
use crate::error::{Error, Result};

pub const SNAPSHOT_FORMAT: &str = "lbsn-mobility/snapshot";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize)]
struct SnapshotOut<'a> {
    format: &'a str,
    version: u32,
    users: Vec<&'a UserId>,
    edges: Vec<(&'a UserId, &'a UserId)>,
    checkins: Vec<&'a Checkin>,
}

#[derive(Deserialize)]
struct SnapshotIn {
    format: String,
    version: u32,
    users: Vec<UserId>,
    edges: Vec<(UserId, UserId)>,
    checkins: Vec<Checkin>,
}

impl SocialGraph {
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<()> {
        let file = SnapshotOut {
            format: SNAPSHOT_FORMAT,
            version: SNAPSHOT_VERSION,
            users: self.users().collect(),
            edges: self.edges().collect(),
            checkins: self.users().flat_map(|u| self.checkins(u)).collect(),
        };
        serde_json::to_writer(&mut out, &file)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(input: R) -> Result<SocialGraph> {
        let file: SnapshotIn = serde_json::from_reader(std::io::BufReader::new(input))?;
        if file.format != SNAPSHOT_FORMAT {
            return Err(Error::Data(format!("not a snapshot file (format `{}`)", file.format)));
        }
        if file.version != SNAPSHOT_VERSION {
            return Err(Error::Data(format!("unsupported snapshot version {}", file.version)));
        }
        let mut graph = SocialGraph::new();
        for u in file.users {
            graph.add_user(u);
        }
        for (a, b) in file.edges {
            if !graph.contains_user(&a) || !graph.contains_user(&b) {
                return Err(Error::Data(format!("edge {a}-{b} references an unknown user")));
            }
            if graph.add_edge(a.clone(), b.clone()) != EdgeInsert::Added {
                return Err(Error::Data(format!("edge {a}-{b} is a duplicate or self-loop")));
            }
        }
        let checkins = file.checkins;
        if let Some(c) = checkins.iter().find(|c| !graph.contains_user(&c.user)) {
            return Err(Error::Data(format!("checkin references unknown user {}", c.user)));
        }
        graph.extend_checkins(checkins);
        Ok(graph)
    }
}
