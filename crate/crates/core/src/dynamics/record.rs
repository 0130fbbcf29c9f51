use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::Point;

/// Per-site first-vacancy and first-update times. `+∞` means "not before the
/// end of the run".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteTimes {
    pub tau: f64,
    pub first_update: f64,
}

impl SiteTimes {
    pub fn never() -> Self {
        SiteTimes {
            tau: f64::INFINITY,
            first_update: f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfectionRecord {
    d: usize,
    horizon: f64,
    first_update_exact: bool,
    times: BTreeMap<Point, SiteTimes>,
}

impl InfectionRecord {
    /// `first_update_exact` is false when only flips were observed, in which
    /// case `first_update` is the first actual change of the site.
    pub fn new(
        d: usize,
        horizon: f64,
        first_update_exact: bool,
        times: BTreeMap<Point, SiteTimes>,
    ) -> Self {
        InfectionRecord {
            d,
            horizon,
            first_update_exact,
            times,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn first_update_exact(&self) -> bool {
        self.first_update_exact
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn get(&self, x: &Point) -> Option<SiteTimes> {
        self.times.get(x).copied()
    }

    pub fn tau(&self, x: &Point) -> Option<f64> {
        self.times.get(x).map(|s| s.tau)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &SiteTimes)> {
        self.times.iter()
    }

    /// CSV with columns `x_1..x_d,tau,first_update`; unreached times are `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header: Vec<String> = (1..=self.d).map(|i| format!("x_{i}")).collect();
        header.push("tau".into());
        header.push("first_update".into());
        writeln!(w, "{}", header.join(","))?;
        for (x, s) in &self.times {
            let coords: Vec<String> = x.coords().iter().map(i64::to_string).collect();
            writeln!(w, "{},{},{}", coords.join(","), s.tau, s.first_update)?;
        }
        Ok(())
    }

    pub fn read_csv(text: &str, horizon: f64) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| invalid("empty CSV"))?;
        let cols = header.split(',').count();
        if cols < 3 {
            return Err(invalid("CSV needs at least x_1, tau, first_update"));
        }
        let d = cols - 2;
        let mut times = BTreeMap::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return Err(invalid(format!("bad CSV row: {line}")));
            }
            let coords = fields[..d]
                .iter()
                .map(|f| f.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| invalid(e.to_string()))?;
            let parse = |f: &str| f.parse::<f64>().map_err(|e| invalid(e.to_string()));
            times.insert(
                Point::new(coords),
                SiteTimes {
                    tau: parse(fields[d])?,
                    first_update: parse(fields[d + 1])?,
                },
            );
        }
        Ok(InfectionRecord::new(d, horizon, true, times))
    }
}

/// Infected and updated sets at a fixed time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontSet {
    pub t: f64,
    pub infected: Vec<Point>,
    pub updated: Vec<Point>,
}

impl FrontSet {
    pub fn is_infected(&self, x: &Point) -> bool {
        self.infected.binary_search(x).is_ok()
    }

    pub fn is_updated(&self, x: &Point) -> bool {
        self.updated.binary_search(x).is_ok()
    }
}

/// `S(t) = {x : τ_x ≤ t}` together with `{x : first update ≤ t}`.
pub fn front_set(record: &InfectionRecord, t: f64) -> Result<FrontSet> {
    if t.is_nan() || t < 0.0 {
        return Err(invalid(format!("query time {t} must be non-negative")));
    }
    if t > record.horizon {
        return Err(Error::BeyondHorizon {
            t,
            horizon: record.horizon,
        });
    }
    let mut infected = Vec::new();
    let mut updated = Vec::new();
    for (x, s) in &record.times {
        if s.tau <= t {
            infected.push(x.clone());
        }
        if s.first_update <= t {
            updated.push(x.clone());
        }
    }
    Ok(FrontSet {
        t,
        infected,
        updated,
    })
}
