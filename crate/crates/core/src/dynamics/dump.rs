//! Binary trajectory dumps: one JSON header line, then fixed-width
//! little-endian records `(f64 time, i32 × d site, u8 bit)`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::Point;

use super::{DomainDescriptor, Event, InitialState, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub d: usize,
    pub q: f64,
    pub seed: u64,
    pub stream: u64,
    pub domain: DomainDescriptor,
    /// Initial bits in site order; absent for the all-ones start.
    pub initial: Option<String>,
    pub events: u64,
    pub end_time: f64,
}

pub fn write_trajectory_dump<W: Write>(mut w: W, traj: &Trajectory) -> Result<()> {
    let d = traj.domain.dim();
    let header = DumpHeader {
        d,
        q: traj.q,
        seed: traj.seed,
        stream: traj.stream,
        domain: traj.domain.clone(),
        initial: match &traj.initial {
            InitialState::AllOnes => None,
            InitialState::Given(c) => Some(c.bits().map(|b| char::from(b'0' + b)).collect()),
        },
        events: traj.events.len() as u64,
        end_time: traj.end_time,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for e in &traj.events {
        w.write_all(&e.time.to_le_bytes())?;
        for &c in e.site.coords() {
            let c = i32::try_from(c).map_err(|_| invalid("site coordinate exceeds i32"))?;
            w.write_all(&c.to_le_bytes())?;
        }
        w.write_all(&[e.bit])?;
    }
    Ok(())
}

pub fn read_trajectory_dump<R: BufRead>(mut r: R) -> Result<(DumpHeader, Vec<Event>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: DumpHeader = serde_json::from_str(line.trim_end())?;
    let mut events = Vec::with_capacity(header.events as usize);
    let mut buf8 = [0u8; 8];
    let mut buf4 = [0u8; 4];
    for _ in 0..header.events {
        r.read_exact(&mut buf8)?;
        let time = f64::from_le_bytes(buf8);
        let mut coords = Vec::with_capacity(header.d);
        for _ in 0..header.d {
            r.read_exact(&mut buf4)?;
            coords.push(i64::from(i32::from_le_bytes(buf4)));
        }
        let mut bit = [0u8; 1];
        r.read_exact(&mut bit)?;
        events.push(Event {
            time,
            site: Point::new(coords),
            bit: bit[0],
        });
    }
    Ok((header, events))
}
