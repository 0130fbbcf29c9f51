//! Geometry of the quadrant lattice.
//!
//! Points are integer vectors; quadrant points have all coordinates
//! non-negative. Signed points only appear in the Knight-graph construction.
//! The partial order `x ≼ y` is coordinatewise `≤`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::theta_q;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        let coords = coords.into();
        assert!(!coords.is_empty(), "points need at least one coordinate");
        Point(coords)
    }

    pub fn origin(d: usize) -> Self {
        Point(vec![0; d])
    }

    /// The basis vector `e^{(axis)}`.
    pub fn basis(d: usize, axis: usize) -> Self {
        let mut c = vec![0; d];
        c[axis] = 1;
        Point(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn in_quadrant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn l1_distance(&self, other: &Point) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Copy with `delta` added to one coordinate.
    pub fn shifted(&self, axis: usize, delta: i64) -> Point {
        let mut c = self.0.clone();
        c[axis] += delta;
        Point(c)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self ≼ other`, coordinatewise.
    pub fn precedes(&self, other: &Point) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Lower neighbours `x - e` that stay in the quadrant.
    pub fn lower_neighbors(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.dim())
            .filter(|&i| self.0[i] > 0)
            .map(|i| self.shifted(i, -1))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<&[i64]> for Point {
    fn from(c: &[i64]) -> Self {
        Point::new(c.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(c: [i64; N]) -> Self {
        Point::new(c.to_vec())
    }
}

/// `origin + prod_i {0..=L_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxShape {
    pub origin: Point,
    pub lengths: Vec<u64>,
}

impl BoxShape {
    pub fn new(origin: Point, lengths: Vec<u64>) -> Result<Self> {
        if origin.dim() != lengths.len() {
            return Err(invalid("box origin and lengths differ in dimension"));
        }
        Ok(BoxShape { origin, lengths })
    }

    /// Box with origin at `0`.
    pub fn at_origin(lengths: Vec<u64>) -> Self {
        let d = lengths.len();
        BoxShape {
            origin: Point::origin(d),
            lengths,
        }
    }

    /// `{0,...,L}^d`.
    pub fn cube(d: usize, side: u64) -> Self {
        Self::at_origin(vec![side; d])
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn site_count(&self) -> u64 {
        self.lengths.iter().map(|l| l + 1).product()
    }

    /// `x_Λ = origin + (L_1, ..., L_d)`.
    pub fn corner(&self) -> Point {
        Point(
            self.origin
                .0
                .iter()
                .zip(&self.lengths)
                .map(|(o, l)| o + *l as i64)
                .collect(),
        )
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim()
            && x
                .0
                .iter()
                .zip(&self.origin.0)
                .zip(&self.lengths)
                .all(|((c, o), l)| *c >= *o && *c <= o + *l as i64)
    }

    /// Sites in lexicographic order.
    pub fn sites(&self) -> Vec<Point> {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.site_count() as usize);
        let mut cur = self.origin.0.clone();
        loop {
            out.push(Point(cur.clone()));
            // odometer with the last coordinate fastest
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if cur[axis] < self.origin.0[axis] + self.lengths[axis] as i64 {
                    cur[axis] += 1;
                    for a in axis + 1..d {
                        cur[a] = self.origin.0[a];
                    }
                    break;
                }
            }
        }
    }

    pub fn region(&self) -> Region {
        Region::from_sorted_unchecked(self.dim(), self.sites())
    }
}

/// A finite set of lattice sites with a fixed lexicographic enumeration.
///
/// Site ranks index bits of configurations and states of generators.
#[derive(Clone, Debug)]
pub struct Region {
    d: usize,
    sites: Vec<Point>,
    rank: HashMap<Point, usize>,
}

impl Region {
    pub fn new(d: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let mut sites: Vec<Point> = points.into_iter().collect();
        if let Some(p) = sites.iter().find(|p| p.dim() != d) {
            return Err(invalid(format!("point {p} is not {d}-dimensional")));
        }
        sites.sort();
        sites.dedup();
        Ok(Self::from_sorted_unchecked(d, sites))
    }

    fn from_sorted_unchecked(d: usize, sites: Vec<Point>) -> Self {
        let rank = sites
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        Region { d, sites, rank }
    }

    /// `{0, ..., len-1}` in one dimension.
    pub fn interval(len: usize) -> Self {
        BoxShape::at_origin(vec![len as u64 - 1]).region()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    pub fn site(&self, rank: usize) -> &Point {
        &self.sites[rank]
    }

    pub fn rank_of(&self, x: &Point) -> Option<usize> {
        self.rank.get(x).copied()
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.rank.contains_key(x)
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&Point::origin(self.d))
    }

    pub fn union(&self, other: &Region) -> Region {
        let pts = self.sites.iter().chain(&other.sites).cloned();
        Region::new(self.d, pts).expect("same dimension")
    }

    pub fn is_down_closed(&self) -> bool {
        self.sites
            .iter()
            .all(|x| x.lower_neighbors().all(|y| self.contains(&y)))
    }
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.sites == other.sites
    }
}

/// `∂↓R = { x ∈ Z^d_+ \ R : x + e ∈ R for some basis e }`, sorted.
pub fn oriented_boundary(region: &Region) -> Vec<Point> {
    let mut out: Vec<Point> = region
        .sites()
        .iter()
        .flat_map(|x| x.lower_neighbors().collect::<Vec<_>>())
        .filter(|y| !region.contains(y))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Aspect-ratio test `max_{i,j} (L_i ∨ 1)/(L_j ∨ 1) ≤ κ 2^{β θ_q}`.
pub fn is_outstretched(lengths: &[u64], beta: f64, kappa: f64, q: f64) -> Result<bool> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q = {q} must lie in (0,1)")));
    }
    if beta < 0.0 || kappa < 1.0 {
        return Err(invalid("need beta >= 0 and kappa >= 1"));
    }
    if lengths.is_empty() {
        return Err(invalid("empty length vector"));
    }
    let hi = lengths.iter().map(|&l| l.max(1)).max().unwrap() as f64;
    let lo = lengths.iter().map(|&l| l.max(1)).min().unwrap() as f64;
    Ok(hi / lo <= kappa * (beta * theta_q(q)).exp2())
}

/// A vertex of the Knight graph `W` together with its image in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KnightVertex {
    pub coords: Point,
    pub image: Point,
}

/// Image of the basis vector `e^{(i)}` under `Φ^{-1}`: `2` in coordinate `i`,
/// `1` elsewhere.
pub fn knight_step(d: usize, axis: usize) -> Point {
    let mut c = vec![1; d];
    c[axis] = 2;
    Point(c)
}

/// `Φ^{-1}(x) = Σ_i x_i b_i` with `b_i` the Knight steps.
pub fn knight_embed(x: &Point) -> Result<KnightVertex> {
    let d = x.dim();
    if d < 2 {
        return Err(invalid("the Knight graph needs d >= 2"));
    }
    let s: i64 = x.0.iter().sum();
    let coords = Point(x.0.iter().map(|c| c + s).collect());
    Ok(KnightVertex {
        coords,
        image: x.clone(),
    })
}

/// Inverse of [`knight_embed`]; `None` when `z ∉ W`.
///
/// With `B = I + J` the step matrix, `B^{-1} = I - J/(d+1)`, so `W` is exactly
/// `{ z : Σ z ≡ 0 mod (d+1) }`.
pub fn knight_project(z: &Point) -> Option<Point> {
    let d = z.dim() as i64;
    let s: i64 = z.0.iter().sum();
    if d < 2 || s.rem_euclid(d + 1) != 0 {
        return None;
    }
    let shift = s / (d + 1);
    Some(Point(z.0.iter().map(|c| c - shift).collect()))
}

pub fn is_knight_vertex(z: &Point) -> bool {
    knight_project(z).is_some()
}

/// Knight neighbours `z ± b_i`.
pub fn knight_neighbors(z: &Point) -> Vec<Point> {
    let d = z.dim();
    (0..d)
        .flat_map(|i| {
            let b = knight_step(d, i);
            [z.add(&b), z.sub(&b)]
        })
        .collect()
}

/// `E_z = { y ∉ W : y ≻ z, ‖z − y‖₁ ≤ d }`, sorted.
pub fn enlargement(z: &Point) -> Vec<Point> {
    let d = z.dim();
    let mut out = Vec::new();
    let mut offset = vec![0i64; d];
    // enumerate offsets u ≥ 0 with |u| ≤ d
    fn rec(axis: usize, budget: i64, offset: &mut Vec<i64>, z: &Point, out: &mut Vec<Point>) {
        if axis == offset.len() {
            let y = z.add(&Point(offset.clone()));
            if !is_knight_vertex(&y) {
                out.push(y);
            }
            return;
        }
        for u in 0..=budget {
            offset[axis] = u;
            rec(axis + 1, budget - u, offset, z, out);
        }
        offset[axis] = 0;
    }
    rec(0, d as i64, &mut offset, z, &mut out);
    out.sort();
    out
}

/// [`enlargement`] intersected with the quadrant.
pub fn enlargement_in_quadrant(z: &Point) -> Vec<Point> {
    enlargement(z).into_iter().filter(Point::in_quadrant).collect()
}
