//! Event-driven simulator.
//!
//! The chain flips a legal site from `1` to `0` at rate `q` and from `0` to
//! `1` at rate `p`. This is the same law as rate-1 Bernoulli(p) resampling of
//! legal sites, with the no-op resamples dropped. When first-update times are
//! requested, a legal site that has never been touched instead rings at rate
//! 1 and resamples, so its first (possibly no-op) update is observed exactly.
//!
//! Legal sites live in three index sets (never-updated, legal particle,
//! legal vacancy). Each site carries a count of vacant lower neighbours, so
//! a flip only touches the flipped site and its `d` upper neighbours.

use std::collections::HashMap;

use rand::Rng;

use crate::config::{BoundaryCondition, Configuration};
use crate::error::{invalid, Error, Result};
use crate::lattice::{oriented_boundary, Point, Region};
use crate::rng::{substream, Stream};

use super::record::{InfectionRecord, SiteTimes};
use super::{Domain, Event, InitialState, RunOptions, StopReason, Trajectory, Window};

const NONE: u32 = u32::MAX;
const OUTSIDE: u32 = u32::MAX - 1;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    Idle,
    Fresh,
    Particle,
    Vacancy,
}

struct Site {
    point: Point,
    state: u8,
    vacant_lower: u32,
    origin: bool,
    updated: bool,
    class: Class,
    slot: u32,
    upper: Vec<u32>,
    recorded: bool,
    target: bool,
    tau: f64,
    first_update: f64,
}

#[derive(Default)]
struct IndexSet {
    items: Vec<u32>,
}

pub struct Simulator {
    d: usize,
    q: f64,
    p: f64,
    sites: Vec<Site>,
    index: HashMap<Point, u32>,
    lazy: bool,
    region: Option<Region>,
    window: Option<Window>,
    track_first_update: bool,
    record_events: bool,
    fresh: IndexSet,
    particle: IndexSet,
    vacancy: IndexSet,
    rng: Stream,
    time: f64,
    events: Vec<Event>,
    event_count: u64,
    targets_left: usize,
    pending_targets: Vec<Point>,
}

impl Simulator {
    pub fn new(domain: &Domain, opts: &RunOptions) -> Result<Self> {
        if !(opts.q > 0.0 && opts.q < 1.0) {
            return Err(invalid(format!("q = {} must lie in (0,1)", opts.q)));
        }
        if !(opts.t_max > 0.0) {
            return Err(invalid("t_max must be positive"));
        }
        let d = domain.dim();
        let mut sim = Simulator {
            d,
            q: opts.q,
            p: 1.0 - opts.q,
            sites: Vec::new(),
            index: HashMap::new(),
            lazy: matches!(domain, Domain::Quadrant { .. }),
            region: None,
            window: opts.window.clone(),
            track_first_update: opts.track_first_update,
            record_events: opts.record_events,
            fresh: IndexSet::default(),
            particle: IndexSet::default(),
            vacancy: IndexSet::default(),
            rng: substream(opts.seed, opts.stream),
            time: 0.0,
            events: Vec::new(),
            event_count: 0,
            targets_left: 0,
            pending_targets: Vec::new(),
        };
        let mut targets = opts.stop_when_infected.clone();
        targets.sort();
        targets.dedup();
        sim.pending_targets = targets;
        if let Some(w) = &opts.window {
            if w.dim() != d {
                return Err(invalid("recording window dimension mismatch"));
            }
        }
        for t in &opts.stop_when_infected {
            if t.dim() != d || !t.in_quadrant() {
                return Err(invalid(format!("bad stopping target {t}")));
            }
        }
        match domain {
            Domain::Quadrant { .. } => {
                if !matches!(opts.initial, InitialState::AllOnes) {
                    return Err(invalid("the lazy quadrant domain starts from the all-ones state"));
                }
                let window = opts.window.as_ref().ok_or_else(|| {
                    invalid("the quadrant domain needs a finite recording window")
                })?;
                for t in &opts.stop_when_infected {
                    if !window.support_contains(t) {
                        return Err(invalid(format!("stopping target {t} is outside the simulated support")));
                    }
                }
                let o = sim.instantiate(Point::origin(d));
                sim.reclassify(o);
            }
            Domain::Finite { region, boundary } => {
                sim.init_finite(region, boundary, &opts.initial)?;
            }
        }
        if sim.lazy {
            sim.targets_left = sim.pending_targets.len();
        } else {
            for t in sim.pending_targets.clone() {
                let id = *sim.index.get(&t).ok_or_else(|| Error::SiteNotInRegion(t.clone()))?;
                let s = &mut sim.sites[id as usize];
                s.target = s.state == 1;
                if s.target {
                    sim.targets_left += 1;
                }
            }
        }
        Ok(sim)
    }

    fn init_finite(
        &mut self,
        region: &Region,
        sigma: &BoundaryCondition,
        initial: &InitialState,
    ) -> Result<()> {
        if sigma.points() != oriented_boundary(region).as_slice() {
            return Err(invalid("boundary condition does not match the region"));
        }
        let init = match initial {
            InitialState::AllOnes => Configuration::all_ones(region.len()),
            InitialState::Given(c) => {
                if c.len() != region.len() {
                    return Err(invalid("initial configuration length mismatch"));
                }
                c.clone()
            }
        };
        for (i, x) in region.sites().iter().enumerate() {
            let id = self.instantiate(x.clone());
            debug_assert_eq!(id as usize, i);
        }
        for (i, x) in region.sites().iter().enumerate() {
            let bit = init.get(i);
            let mut vac = 0;
            for y in x.lower_neighbors() {
                match region.rank_of(&y) {
                    Some(r) => vac += u32::from(init.get(r) == 0),
                    None => vac += u32::from(sigma.value_at(&y) == Some(0)),
                }
            }
            let s = &mut self.sites[i];
            s.state = bit;
            s.vacant_lower = vac;
            if bit == 0 && s.recorded {
                s.tau = 0.0;
            }
        }
        for i in 0..region.len() {
            self.reclassify(i as u32);
        }
        self.region = Some(region.clone());
        Ok(())
    }

    fn instantiate(&mut self, point: Point) -> u32 {
        let id = self.sites.len() as u32;
        let recorded = self.window.as_ref().is_none_or(|w| w.contains(&point));
        let target = self.pending_target(&point);
        self.sites.push(Site {
            origin: point.is_origin(),
            point: point.clone(),
            state: 1,
            vacant_lower: 0,
            updated: false,
            class: Class::Idle,
            slot: 0,
            upper: vec![NONE; self.d],
            recorded,
            target,
            tau: f64::INFINITY,
            first_update: f64::INFINITY,
        });
        self.index.insert(point, id);
        id
    }

    fn pending_target(&self, point: &Point) -> bool {
        self.lazy && self.pending_targets.iter().any(|t| t == point)
    }

    /// Upper neighbour `x + e_axis`, instantiating it in lazy mode.
    fn upper(&mut self, id: u32, axis: usize) -> Option<u32> {
        let cached = self.sites[id as usize].upper[axis];
        if cached == OUTSIDE {
            return None;
        }
        if cached != NONE {
            return Some(cached);
        }
        let y = self.sites[id as usize].point.shifted(axis, 1);
        let resolved = if let Some(&j) = self.index.get(&y) {
            Some(j)
        } else if self.lazy && self.window.as_ref().is_some_and(|w| w.support_contains(&y)) {
            Some(self.instantiate(y))
        } else {
            None
        };
        self.sites[id as usize].upper[axis] = resolved.unwrap_or(OUTSIDE);
        resolved
    }

    fn desired_class(&self, id: u32) -> Class {
        let s = &self.sites[id as usize];
        if !(s.origin || s.vacant_lower > 0) {
            Class::Idle
        } else if self.track_first_update && !s.updated {
            Class::Fresh
        } else if s.state == 1 {
            Class::Particle
        } else {
            Class::Vacancy
        }
    }

    fn set_mut(&mut self, class: Class) -> &mut IndexSet {
        match class {
            Class::Fresh => &mut self.fresh,
            Class::Particle => &mut self.particle,
            Class::Vacancy => &mut self.vacancy,
            Class::Idle => unreachable!(),
        }
    }

    fn reclassify(&mut self, id: u32) {
        let want = self.desired_class(id);
        let (have, slot) = {
            let s = &self.sites[id as usize];
            (s.class, s.slot)
        };
        if want == have {
            return;
        }
        if have != Class::Idle {
            let set = self.set_mut(have);
            let last = set.items.pop().unwrap();
            if last != id {
                set.items[slot as usize] = last;
                self.sites[last as usize].slot = slot;
            }
        }
        if want != Class::Idle {
            let set = self.set_mut(want);
            let new_slot = set.items.len() as u32;
            set.items.push(id);
            self.sites[id as usize].slot = new_slot;
        }
        self.sites[id as usize].class = want;
    }

    fn total_rate(&self) -> f64 {
        self.fresh.items.len() as f64
            + self.q * self.particle.items.len() as f64
            + self.p * self.vacancy.items.len() as f64
    }

    /// Advance until the horizon, the stopping set is infected or the event
    /// budget is spent.
    pub fn run(&mut self, t_max: f64, max_events: u64) -> Result<StopReason> {
        loop {
            if self.targets_left == 0 && !self.pending_targets.is_empty() {
                return Ok(StopReason::TargetsInfected);
            }
            let total = self.total_rate();
            if total <= 0.0 {
                self.time = t_max;
                return Ok(StopReason::Horizon);
            }
            let u: f64 = self.rng.random();
            let dt = -(1.0 - u).ln() / total;
            if self.time + dt > t_max {
                self.time = t_max;
                return Ok(StopReason::Horizon);
            }
            if self.event_count >= max_events {
                return Err(Error::BudgetExhausted(max_events));
            }
            self.time += dt;
            self.event_count += 1;
            self.fire(total);
        }
    }

    fn fire(&mut self, total: f64) {
        let mut r = self.rng.random::<f64>() * total;
        let n_fresh = self.fresh.items.len() as f64;
        let n_part = self.particle.items.len() as f64;
        let id;
        let new_bit;
        if r < n_fresh {
            let k = (r as usize).min(self.fresh.items.len() - 1);
            id = self.fresh.items[k];
            let v: f64 = self.rng.random();
            new_bit = u8::from(v >= self.q);
        } else {
            r -= n_fresh;
            if r < self.q * n_part {
                let k = ((r / self.q) as usize).min(self.particle.items.len() - 1);
                id = self.particle.items[k];
            } else {
                r -= self.q * n_part;
                let n = self.vacancy.items.len();
                let k = ((r / self.p) as usize).min(n - 1);
                id = self.vacancy.items[k];
            }
            new_bit = 1 - self.sites[id as usize].state;
        }
        let t = self.time;
        let old_bit;
        {
            let s = &mut self.sites[id as usize];
            old_bit = s.state;
            if !s.updated {
                s.updated = true;
                if s.recorded {
                    s.first_update = t;
                }
            }
            s.state = new_bit;
            if new_bit == 0 && s.tau.is_infinite() && s.recorded {
                s.tau = t;
            }
            if new_bit == 0 && old_bit == 1 && s.target {
                s.target = false;
                self.targets_left -= 1;
            }
        }
        self.reclassify(id);
        if new_bit == old_bit {
            return;
        }
        if self.record_events {
            self.events.push(Event {
                time: t,
                site: self.sites[id as usize].point.clone(),
                bit: new_bit,
            });
        }
        for axis in 0..self.d {
            if let Some(j) = self.upper(id, axis) {
                let s = &mut self.sites[j as usize];
                if new_bit == 0 {
                    s.vacant_lower += 1;
                } else {
                    s.vacant_lower -= 1;
                }
                self.reclassify(j);
            }
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn event_count(&self) -> u64 {
        self.event_count
    }

    pub fn instantiated_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn state_of(&self, x: &Point) -> u8 {
        self.index
            .get(x)
            .map_or(1, |&id| self.sites[id as usize].state)
    }

    pub fn take_events(&mut self) -> Vec<Event> {
        std::mem::take(&mut self.events)
    }

    pub fn infection_record(&self, horizon: f64) -> InfectionRecord {
        let mut times = std::collections::BTreeMap::new();
        if let Some(w) = &self.window {
            for x in w.points() {
                let entry = match self.index.get(&x) {
                    Some(&id) => {
                        let s = &self.sites[id as usize];
                        SiteTimes {
                            tau: s.tau,
                            first_update: s.first_update,
                        }
                    }
                    None => SiteTimes::never(),
                };
                times.insert(x, entry);
            }
        } else {
            for s in &self.sites {
                times.insert(
                    s.point.clone(),
                    SiteTimes {
                        tau: s.tau,
                        first_update: s.first_update,
                    },
                );
            }
        }
        InfectionRecord::new(self.d, horizon, self.track_first_update, times)
    }

    /// Current configuration of a finite domain in rank order.
    pub fn configuration(&self) -> Option<Configuration> {
        let region = self.region.as_ref()?;
        Some(Configuration::from_bits(
            (0..region.len()).map(|i| self.sites[i].state),
        ))
    }
}

/// Run one trajectory from the options' initial state.
pub fn run_trajectory(domain: &Domain, opts: &RunOptions) -> Result<(Trajectory, InfectionRecord)> {
    let mut sim = Simulator::new(domain, opts)?;
    let stop = sim.run(opts.t_max, opts.max_events)?;
    let end = sim.time();
    let record = sim.infection_record(end);
    let traj = Trajectory {
        domain: domain.descriptor(),
        initial: opts.initial.clone(),
        seed: opts.seed,
        stream: opts.stream,
        q: opts.q,
        events: sim.take_events(),
        event_count: sim.event_count(),
        end_time: end,
        stop,
    };
    Ok((traj, record))
}
