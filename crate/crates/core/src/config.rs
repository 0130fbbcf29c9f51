//! Configurations, product measures, boundary conditions and the East
//! constraint.
//!
//! A [`Configuration`] stores one bit per site of a [`Region`], indexed by
//! site rank. `1` is a particle and `0` a vacancy. For state-space
//! enumeration the same bits are read as an integer *state index* with bit
//! `i` holding the site of rank `i`.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::lattice::{oriented_boundary, BoxShape, Point, Region};

/// Exact enumeration over `Ω_region` is refused above this many sites.
pub const ENUMERATION_CAP_SITES: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    pub fn all_ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Configuration { words, len }
    }

    pub fn all_zeros(len: usize) -> Self {
        Configuration {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Decode a state index (`len ≤ 64`).
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut c = Self::all_zeros(len);
        if len > 0 {
            c.words[0] = if len == 64 { index } else { index & ((1u64 << len) - 1) };
        }
        c
    }

    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        let bits: Vec<u8> = bits.into_iter().collect();
        let mut c = Self::all_zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            c.set(i, b);
        }
        c
    }

    /// State index (`len ≤ 64`).
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit == 0 {
            self.words[i / 64] &= !mask;
        } else {
            self.words[i / 64] |= mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn particles(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn vacancies(&self) -> usize {
        self.len - self.particles()
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// `ω↾_V`: the bits of the sites of `sub` (which must lie in `region`).
    pub fn restrict(&self, region: &Region, sub: &Region) -> Result<Configuration> {
        let mut out = Configuration::all_zeros(sub.len());
        for (j, x) in sub.sites().iter().enumerate() {
            let i = region
                .rank_of(x)
                .ok_or_else(|| Error::SiteNotInRegion(x.clone()))?;
            out.set(j, self.get(i));
        }
        Ok(out)
    }
}

/// Values on `∂↓(region)`. Points are kept sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    points: Vec<Point>,
    values: Configuration,
}

impl BoundaryCondition {
    /// No vacancies on the boundary; the default convention when `σ` is
    /// omitted.
    pub fn all_ones(region: &Region) -> Self {
        let points = oriented_boundary(region);
        let values = Configuration::all_ones(points.len());
        BoundaryCondition { points, values }
    }

    /// The maximal boundary condition: all vacancies.
    pub fn maximal(region: &Region) -> Self {
        let points = oriented_boundary(region);
        let values = Configuration::all_zeros(points.len());
        BoundaryCondition { points, values }
    }

    pub fn from_fn(region: &Region, mut f: impl FnMut(&Point) -> u8) -> Self {
        let points = oriented_boundary(region);
        let values = Configuration::from_bits(points.iter().map(&mut f));
        BoundaryCondition { points, values }
    }

    /// All particles except vacancies at the listed boundary points.
    pub fn with_vacancies(region: &Region, vacant: &[Point]) -> Result<Self> {
        let sigma = Self::from_fn(region, |p| u8::from(!vacant.contains(p)));
        if let Some(v) = vacant.iter().find(|v| sigma.value_at(v).is_none()) {
            return Err(invalid(format!("{v} is not on the oriented boundary")));
        }
        Ok(sigma)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &Configuration {
        &self.values
    }

    pub fn value_at(&self, x: &Point) -> Option<u8> {
        self.points
            .binary_search(x)
            .ok()
            .map(|i| self.values.get(i))
    }

    /// Pointwise `self ≤ other` (self has at least the vacancies of other).
    pub fn le(&self, other: &BoundaryCondition) -> bool {
        self.points == other.points
            && (0..self.points.len()).all(|i| self.values.get(i) <= other.values.get(i))
    }
}

/// `μ(ω) = p^{#particles} q^{#vacancies}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductMeasure {
    q: f64,
    p: f64,
}

impl ProductMeasure {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(invalid(format!("vacancy density q = {q} outside [0,1]")));
        }
        Ok(ProductMeasure { q, p: 1.0 - q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Single-site weight of `bit`.
    pub fn site_weight(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.q
        } else {
            self.p
        }
    }

    pub fn weight_of_counts(&self, particles: usize, vacancies: usize) -> f64 {
        self.p.powi(particles as i32) * self.q.powi(vacancies as i32)
    }

    pub fn measure_of(&self, omega: &Configuration) -> f64 {
        self.weight_of_counts(omega.particles(), omega.vacancies())
    }

    /// `log2 μ(ω)`; stays finite where `measure_of` underflows.
    pub fn log2_measure_of(&self, omega: &Configuration) -> f64 {
        omega.particles() as f64 * self.p.log2() + omega.vacancies() as f64 * self.q.log2()
    }

    /// `μ(E)` for an event on `Ω` over `sites` sites, by enumeration.
    pub fn event_measure(&self, sites: usize, event: impl Fn(u64) -> bool) -> Result<f64> {
        check_enumerable(sites)?;
        let mut total = 0.0;
        for s in 0..(1u64 << sites) {
            if event(s) {
                let ones = s.count_ones() as usize;
                total += self.weight_of_counts(ones, sites - ones);
            }
        }
        Ok(total)
    }

    /// Stationary weights of every state index on `sites` sites.
    pub fn state_weights(&self, sites: usize) -> Result<Vec<f64>> {
        check_enumerable(sites)?;
        Ok((0..(1u64 << sites))
            .map(|s| {
                let ones = s.count_ones() as usize;
                self.weight_of_counts(ones, sites - ones)
            })
            .collect())
    }
}

pub(crate) fn check_enumerable(sites: usize) -> Result<()> {
    if sites > ENUMERATION_CAP_SITES {
        return Err(Error::SizeCap {
            what: "region",
            size: sites as u64,
            cap: ENUMERATION_CAP_SITES as u64,
        });
    }
    Ok(())
}

/// Precomputed East constraint for a region and boundary condition.
///
/// `c_x = 1` iff `x` is the lattice origin, a lower boundary neighbour is
/// vacant under `σ`, or a lower neighbour inside the region is vacant. The
/// value never depends on `ω_x`.
#[derive(Clone, Debug)]
pub struct ConstraintTable {
    always: Vec<bool>,
    lower: Vec<Vec<usize>>,
}

impl ConstraintTable {
    pub fn new(region: &Region, sigma: &BoundaryCondition) -> Self {
        let mut always = Vec::with_capacity(region.len());
        let mut lower = Vec::with_capacity(region.len());
        for x in region.sites() {
            let mut free = x.is_origin();
            let mut inside = Vec::new();
            for y in x.lower_neighbors() {
                if let Some(r) = region.rank_of(&y) {
                    inside.push(r);
                } else if sigma.value_at(&y) == Some(0) {
                    free = true;
                }
            }
            always.push(free);
            lower.push(inside);
        }
        ConstraintTable { always, lower }
    }

    pub fn len(&self) -> usize {
        self.always.len()
    }

    pub fn is_empty(&self) -> bool {
        self.always.is_empty()
    }

    pub fn is_unconstrained(&self, rank: usize) -> bool {
        self.always[rank]
    }

    pub fn lower_ranks(&self, rank: usize) -> &[usize] {
        &self.lower[rank]
    }

    pub fn allows(&self, rank: usize, omega: &Configuration) -> bool {
        self.always[rank] || self.lower[rank].iter().any(|&r| omega.get(r) == 0)
    }

    /// Same as [`allows`](Self::allows) on a packed state index.
    #[inline]
    pub fn allows_state(&self, rank: usize, state: u64) -> bool {
        self.always[rank] || self.lower[rank].iter().any(|&r| (state >> r) & 1 == 0)
    }
}

/// `c_x^{Λ,σ}(ω)`.
pub fn constraint(
    region: &Region,
    sigma: &BoundaryCondition,
    omega: &Configuration,
    x: &Point,
) -> Result<bool> {
    if region.rank_of(x).is_none() {
        return Err(Error::SiteNotInRegion(x.clone()));
    }
    if x.is_origin() {
        return Ok(true);
    }
    Ok(x.lower_neighbors().any(|y| match region.rank_of(&y) {
        Some(r) => omega.get(r) == 0,
        None => sigma.value_at(&y) == Some(0),
    }))
}

/// Set `ω_x = new_value` if the update is `σ`-legal.
pub fn apply_update(
    region: &Region,
    sigma: &BoundaryCondition,
    omega: &Configuration,
    x: &Point,
    new_value: u8,
) -> Result<Configuration> {
    if !constraint(region, sigma, omega, x)? {
        return Err(Error::IllegalMove { site: x.clone() });
    }
    let mut out = omega.clone();
    out.set(region.rank_of(x).unwrap(), new_value);
    Ok(out)
}

/// I.i.d. Bernoulli(p) particles.
pub fn sample_config<R: Rng + ?Sized>(sites: usize, mu: &ProductMeasure, rng: &mut R) -> Configuration {
    Configuration::from_bits((0..sites).map(|_| u8::from(rng.random::<f64>() >= mu.q())))
}

/// Flat text encoding `d|origin|lengths|bits` with bits in lexicographic
/// site order, e.g. `2|0,0|1,1|1011`.
pub fn encode_configuration(shape: &BoxShape, omega: &Configuration) -> Result<String> {
    if shape.site_count() != omega.len() as u64 {
        return Err(invalid("configuration length does not match the box"));
    }
    let join = |v: Vec<String>| v.join(",");
    let bits: String = omega.bits().map(|b| if b == 1 { '1' } else { '0' }).collect();
    Ok(format!(
        "{}|{}|{}|{}",
        shape.dim(),
        join(shape.origin.coords().iter().map(|c| c.to_string()).collect()),
        join(shape.lengths.iter().map(|c| c.to_string()).collect()),
        bits
    ))
}

pub fn decode_configuration(s: &str) -> Result<(BoxShape, Configuration)> {
    let parts: Vec<&str> = s.trim().split('|').collect();
    if parts.len() != 4 {
        return Err(invalid("expected d|origin|lengths|bits"));
    }
    let d: usize = parts[0].parse().map_err(|_| invalid("bad dimension"))?;
    let origin: Vec<i64> = parts[1]
        .split(',')
        .map(|c| c.parse().map_err(|_| invalid("bad origin")))
        .collect::<Result<_>>()?;
    let lengths: Vec<u64> = parts[2]
        .split(',')
        .map(|c| c.parse().map_err(|_| invalid("bad lengths")))
        .collect::<Result<_>>()?;
    if origin.len() != d || lengths.len() != d {
        return Err(invalid("descriptor dimension mismatch"));
    }
    let shape = BoxShape::new(Point::new(origin), lengths)?;
    let bits: Vec<u8> = parts[3]
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(invalid("bits must be 0 or 1")),
        })
        .collect::<Result<_>>()?;
    if bits.len() as u64 != shape.site_count() {
        return Err(invalid("bit count does not match the box"));
    }
    Ok((shape, Configuration::from_bits(bits)))
}
