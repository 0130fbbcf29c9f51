//! Generalised East chains: *East, Knight and *Knight.

use std::collections::BTreeSet;

use crate::config::{BoundaryCondition, ConstraintTable};
use crate::error::{invalid, Error, Result};
use crate::lattice::{enlargement, knight_embed, knight_step, BoxShape, Point, Region};

use super::generator::{ChainSpec, Move, UnitSpace};
use super::{gap_of, SpectrumResult};

/// Largest product state space accepted by [`star_gap`].
pub const STAR_STATE_CAP: u64 = 1 << 20;

/// Per-site outcome spaces `(Ω*_x, μ*_x)` with facilitating events `G*_x`,
/// indexed by site rank. All facilitating events have the same mass `q*`.
#[derive(Clone, Debug)]
pub struct BlockSpec {
    units: Vec<UnitSpace>,
    q_star: f64,
}

impl BlockSpec {
    pub fn new(units: Vec<UnitSpace>) -> Result<Self> {
        let first = units.first().ok_or_else(|| invalid("block spec needs at least one site"))?;
        let q_star = first.facilitating_mass();
        for u in &units {
            let m = u.facilitating_mass();
            if (m - q_star).abs() > 1e-12 {
                return Err(invalid(format!("facilitating masses differ: {m} vs {q_star}")));
            }
        }
        if !(q_star > 0.0 && q_star < 1.0) {
            return Err(invalid(format!("q* = {q_star} must lie in (0,1)")));
        }
        Ok(BlockSpec { units, q_star })
    }

    pub fn uniform(sites: usize, unit: UnitSpace) -> Result<Self> {
        Self::new(vec![unit; sites])
    }

    /// One bit per site with `G = {0}`: the plain East chain.
    pub fn trivial(sites: usize, q: f64) -> Result<Self> {
        Self::uniform(sites, UnitSpace::binary(q))
    }

    pub fn q_star(&self) -> f64 {
        self.q_star
    }

    pub fn units(&self) -> &[UnitSpace] {
        &self.units
    }
}

#[derive(Clone, Debug)]
pub enum StarMode {
    /// *East chain on `V ⊂ Z^d_+`.
    East,
    /// The *East chain relabelled onto `V^K = Φ^{-1}(V)`, with Knight
    /// edges as the constraint graph.
    Knight,
    /// *Knight chain: a legal update at `z ∈ V^K` resamples `z` together
    /// with `E_z ∩ ambient`. Enlargement sites carry the `filler` space.
    StarKnight { ambient: BoxShape, filler: UnitSpace },
}

/// Moves of the *East chain on `region` (facilitators in rank order of the
/// lower neighbours; the origin is unconstrained).
pub(crate) fn east_moves(region: &Region) -> Vec<Move> {
    let table = ConstraintTable::new(region, &BoundaryCondition::all_ones(region));
    (0..region.len())
        .map(|r| Move {
            block: vec![r],
            unconstrained: table.is_unconstrained(r),
            facilitators: table.lower_ranks(r).to_vec(),
        })
        .collect()
}

/// Chain specification for the generalised chain; useful for inspecting the
/// generator directly.
pub fn star_chain(spec: &BlockSpec, region: &Region, mode: &StarMode) -> Result<ChainSpec> {
    if spec.units.len() != region.len() {
        return Err(invalid("block spec must have one unit per site"));
    }
    if !region.contains_origin() {
        return Err(invalid("generalised chains need the origin in V"));
    }
    match mode {
        StarMode::East => ChainSpec::new(spec.units.clone(), east_moves(region)),
        StarMode::Knight => {
            let (vk, index) = knight_vertices(region)?;
            let d = region.dim();
            let moves = vk
                .iter()
                .map(|z| Move {
                    block: vec![index(z).unwrap()],
                    unconstrained: z.is_origin(),
                    facilitators: (0..d).filter_map(|i| index(&z.sub(&knight_step(d, i)))).collect(),
                })
                .collect();
            ChainSpec::new(spec.units.clone(), moves)
        }
        StarMode::StarKnight { ambient, filler } => {
            if (filler.facilitating_mass() - spec.q_star).abs() > 1e-12 {
                // Enlargement sites never facilitate, but a consistent q*
                // keeps the product space a valid *Knight space.
                return Err(invalid("filler unit must share q*"));
            }
            let (vk, index) = knight_vertices(region)?;
            let d = region.dim();
            for z in &vk {
                if !ambient.contains(z) {
                    return Err(invalid(format!("Knight vertex {z} lies outside the ambient box")));
                }
            }
            let extra: BTreeSet<Point> = vk
                .iter()
                .flat_map(|z| enlargement(z))
                .filter(|y| ambient.contains(y))
                .collect();
            let extra: Vec<Point> = extra.into_iter().collect();
            let mut units = spec.units.clone();
            units.extend(std::iter::repeat_n(filler.clone(), extra.len()));
            let extra_index = |y: &Point| extra.binary_search(y).ok().map(|k| vk.len() + k);
            let moves = vk
                .iter()
                .map(|z| {
                    let mut block = vec![index(z).unwrap()];
                    block.extend(enlargement(z).iter().filter_map(extra_index));
                    Move {
                        block,
                        unconstrained: z.is_origin(),
                        facilitators: (0..d).filter_map(|i| index(&z.sub(&knight_step(d, i)))).collect(),
                    }
                })
                .collect();
            ChainSpec::new(units, moves)
        }
    }
}

/// `Φ^{-1}` of every site in rank order, plus a lookup from Knight vertex
/// to rank.
fn knight_vertices(region: &Region) -> Result<(Vec<Point>, impl Fn(&Point) -> Option<usize> + '_)> {
    let vk: Vec<Point> = region
        .sites()
        .iter()
        .map(|x| knight_embed(x).map(|k| k.coords))
        .collect::<Result<_>>()?;
    let index = move |z: &Point| crate::lattice::knight_project(z).and_then(|x| region.rank_of(&x));
    Ok((vk, index))
}

/// Spectral gap of the *East, Knight or *Knight chain.
pub fn star_gap(spec: &BlockSpec, region: &Region, mode: &StarMode) -> Result<SpectrumResult> {
    let chain = star_chain(spec, region, mode)?;
    let states = chain.states()?;
    if states > STAR_STATE_CAP {
        return Err(Error::SizeCap {
            what: "generalised chain",
            size: states,
            cap: STAR_STATE_CAP,
        });
    }
    gap_of(&chain.build()?, false)
}
