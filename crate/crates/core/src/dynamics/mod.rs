//! Continuous-time simulation of the East process.
//!
//! Two domains are supported: a finite region with a boundary condition, and
//! the quadrant started from the all-particle state `ω*`. On the quadrant a
//! site is created only when it first becomes legal, and only sites in the
//! down-closure of the recording window are simulated. Because constraints
//! only look at lower neighbours, the law of every recorded site is exactly
//! that of the infinite process.

mod dump;
mod engine;
mod hitting;
mod record;

use serde::{Deserialize, Serialize};

use crate::config::{BoundaryCondition, Configuration};
use crate::lattice::{oriented_boundary, BoxShape, Point, Region};

pub use dump::{read_trajectory_dump, write_trajectory_dump, DumpHeader};
pub use engine::{run_trajectory, Simulator};
pub use hitting::{mean_hitting, velocity_fit, HittingEstimate, HittingPoint, VelocityFit};
pub use record::{front_set, FrontSet, InfectionRecord, SiteTimes};

/// Default event budget per trajectory.
pub const DEFAULT_MAX_EVENTS: u64 = 2_000_000_000;

#[derive(Clone, Debug)]
pub enum Domain {
    Finite {
        region: Region,
        boundary: BoundaryCondition,
    },
    Quadrant {
        d: usize,
    },
}

impl Domain {
    /// Finite region with the all-particle boundary condition.
    pub fn finite(region: Region) -> Self {
        let boundary = BoundaryCondition::all_ones(&region);
        Domain::Finite { region, boundary }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Finite { region, .. } => region.dim(),
            Domain::Quadrant { d } => *d,
        }
    }

    pub fn descriptor(&self) -> DomainDescriptor {
        match self {
            Domain::Finite { region, boundary } => DomainDescriptor::Finite {
                d: region.dim(),
                sites: region.sites().to_vec(),
                boundary_vacancies: boundary
                    .points()
                    .iter()
                    .filter(|p| boundary.value_at(p) == Some(0))
                    .cloned()
                    .collect(),
            },
            Domain::Quadrant { d } => DomainDescriptor::Quadrant { d: *d },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDescriptor {
    Finite {
        d: usize,
        sites: Vec<Point>,
        boundary_vacancies: Vec<Point>,
    },
    Quadrant {
        d: usize,
    },
}

impl DomainDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            DomainDescriptor::Finite { d, .. } | DomainDescriptor::Quadrant { d } => *d,
        }
    }

    pub fn to_domain(&self) -> crate::Result<Domain> {
        Ok(match self {
            DomainDescriptor::Quadrant { d } => Domain::Quadrant { d: *d },
            DomainDescriptor::Finite {
                d,
                sites,
                boundary_vacancies,
            } => {
                let region = Region::new(*d, sites.iter().cloned())?;
                let boundary = BoundaryCondition::with_vacancies(&region, boundary_vacancies)?;
                Domain::Finite { region, boundary }
            }
        })
    }
}

/// Finite set of sites whose infection times are recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Box { shape: BoxShape },
    L1Ball { d: usize, radius: u64 },
    Points { d: usize, points: Vec<Point> },
}

impl Window {
    pub fn points_of(points: Vec<Point>) -> Self {
        let d = points.first().map_or(1, Point::dim);
        Window::Points { d, points }
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box { shape } => shape.dim(),
            Window::L1Ball { d, .. } | Window::Points { d, .. } => *d,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Window::Box { shape } => shape.contains(x),
            Window::L1Ball { radius, .. } => x.in_quadrant() && x.l1_norm() <= *radius as i64,
            Window::Points { points, .. } => points.contains(x),
        }
    }

    /// Membership in the down-closure `{ y ∈ Z^d_+ : y ≼ x for some x in the window }`.
    pub fn support_contains(&self, y: &Point) -> bool {
        if !y.in_quadrant() {
            return false;
        }
        match self {
            Window::Box { shape } => y.precedes(&shape.corner()),
            Window::L1Ball { radius, .. } => y.l1_norm() <= *radius as i64,
            Window::Points { points, .. } => points.iter().any(|x| y.precedes(x)),
        }
    }

    /// Window sites in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = match self {
            Window::Box { shape } => shape.sites(),
            Window::L1Ball { d, radius } => BoxShape::cube(*d, *radius)
                .sites()
                .into_iter()
                .filter(|x| x.l1_norm() <= *radius as i64)
                .collect(),
            Window::Points { points, .. } => points.clone(),
        };
        pts.sort();
        pts.dedup();
        pts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// `ω*`: particles everywhere.
    AllOnes,
    Given(Configuration),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub q: f64,
    pub t_max: f64,
    pub seed: u64,
    /// Replica index selecting the substream of `seed`.
    pub stream: u64,
    pub initial: InitialState,
    /// Sites to record. Required on the quadrant; defaults to the whole
    /// region on finite domains.
    pub window: Option<Window>,
    pub track_first_update: bool,
    pub record_events: bool,
    /// Stop as soon as every listed site has been vacant at least once.
    pub stop_when_infected: Vec<Point>,
    pub max_events: u64,
}

impl RunOptions {
    pub fn new(q: f64, t_max: f64, seed: u64) -> Self {
        RunOptions {
            q,
            t_max,
            seed,
            stream: 0,
            initial: InitialState::AllOnes,
            window: None,
            track_first_update: false,
            record_events: false,
            stop_when_infected: Vec::new(),
            max_events: DEFAULT_MAX_EVENTS,
        }
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    pub fn initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn track_first_update(mut self, on: bool) -> Self {
        self.track_first_update = on;
        self
    }

    pub fn record_events(mut self, on: bool) -> Self {
        self.record_events = on;
        self
    }

    pub fn stop_when_infected(mut self, targets: Vec<Point>) -> Self {
        self.stop_when_infected = targets;
        self
    }

    pub fn max_events(mut self, n: u64) -> Self {
        self.max_events = n;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub site: Point,
    pub bit: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    TargetsInfected,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub domain: DomainDescriptor,
    pub initial: InitialState,
    pub seed: u64,
    pub stream: u64,
    pub q: f64,
    /// Flips in firing order; empty unless event recording was requested.
    pub events: Vec<Event>,
    pub event_count: u64,
    pub end_time: f64,
    pub stop: StopReason,
}

impl Trajectory {
    /// Replay the recorded flips on a finite domain, checking legality.
    pub fn replay(&self) -> crate::Result<Configuration> {
        let domain = self.domain.to_domain()?;
        let Domain::Finite { region, boundary } = domain else {
            return Err(crate::error::invalid("replay needs a finite domain"));
        };
        let mut omega = match &self.initial {
            InitialState::AllOnes => Configuration::all_ones(region.len()),
            InitialState::Given(c) => c.clone(),
        };
        let mut last = 0.0;
        for e in &self.events {
            if e.time <= last && last > 0.0 {
                return Err(crate::error::invalid("event times must increase"));
            }
            last = e.time;
            omega = crate::config::apply_update(&region, &boundary, &omega, &e.site, e.bit)?;
        }
        Ok(omega)
    }
}

/// Sites of a finite region plus its boundary, for callers that need both.
pub fn region_with_boundary(region: &Region) -> Vec<Point> {
    let mut v = region.sites().to_vec();
    v.extend(oriented_boundary(region));
    v
}
