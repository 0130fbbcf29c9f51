use std::io::Write;

use serde::Serialize;

use crate::config::{check_enumerable, BoundaryCondition, ConstraintTable};
use crate::error::{invalid, Error, Result};
use crate::lattice::{Point, Region};

/// Largest state space assembled as a sparse matrix.
pub const SPARSE_STATE_CAP: u64 = 1 << 24;

/// Finite single-unit outcome space with stationary weights and the
/// outcomes that facilitate neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitSpace {
    weights: Vec<f64>,
    facilitating: Vec<bool>,
}

impl UnitSpace {
    pub fn new(weights: Vec<f64>, facilitating: Vec<bool>) -> Result<Self> {
        if weights.is_empty() || weights.len() != facilitating.len() {
            return Err(invalid("unit space needs one facilitating flag per outcome"));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(invalid("outcome weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("outcome weights sum to {total}, not 1")));
        }
        Ok(UnitSpace {
            weights,
            facilitating,
        })
    }

    /// A single East site: outcome `0` is a vacancy with weight `q`.
    pub fn binary(q: f64) -> Self {
        UnitSpace {
            weights: vec![q, 1.0 - q],
            facilitating: vec![true, false],
        }
    }

    /// `k` East sites resampled together; facilitating iff some site is
    /// vacant. Outcome `s` has bit `i` equal to site `i`.
    pub fn block_any_vacancy(k: usize, q: f64) -> Self {
        let n = 1usize << k;
        let p = 1.0 - q;
        let weights = (0..n)
            .map(|s| {
                let ones = (s as u64).count_ones() as i32;
                p.powi(ones) * q.powi(k as i32 - ones)
            })
            .collect();
        let facilitating = (0..n).map(|s| s != n - 1).collect();
        UnitSpace {
            weights,
            facilitating,
        }
    }

    pub fn outcomes(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_facilitating(&self, outcome: usize) -> bool {
        self.facilitating[outcome]
    }

    /// `μ*(G*)`.
    pub fn facilitating_mass(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.facilitating)
            .filter(|(_, f)| **f)
            .map(|(w, _)| w)
            .sum()
    }
}

/// A resampling move: when the constraint holds, the units in `block` are
/// jointly resampled from their product measure at rate one.
#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub block: Vec<usize>,
    pub unconstrained: bool,
    /// The constraint holds if any of these units is in its facilitating set.
    pub facilitators: Vec<usize>,
}

/// Product state space plus a list of constrained block-resampling moves.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    units: Vec<UnitSpace>,
    moves: Vec<Move>,
}

impl ChainSpec {
    pub fn new(units: Vec<UnitSpace>, moves: Vec<Move>) -> Result<Self> {
        for m in &moves {
            if m.block.is_empty() {
                return Err(invalid("empty resampling block"));
            }
            for &u in m.block.iter().chain(&m.facilitators) {
                if u >= units.len() {
                    return Err(invalid(format!("unit index {u} out of range")));
                }
            }
            if m.facilitators.iter().any(|f| m.block.contains(f)) {
                return Err(invalid("a move may not be facilitated by a unit it resamples"));
            }
            let mut b = m.block.clone();
            b.sort_unstable();
            b.dedup();
            if b.len() != m.block.len() {
                return Err(invalid("repeated unit in a resampling block"));
            }
        }
        Ok(ChainSpec { units, moves })
    }

    /// East chain on a region with boundary condition `σ`.
    pub fn east(region: &Region, sigma: &BoundaryCondition, q: f64) -> Result<Self> {
        check_q(q)?;
        check_enumerable(region.len())?;
        let table = ConstraintTable::new(region, sigma);
        let units = vec![UnitSpace::binary(q); region.len()];
        let moves = (0..region.len())
            .map(|r| Move {
                block: vec![r],
                unconstrained: table.is_unconstrained(r),
                facilitators: table.lower_ranks(r).to_vec(),
            })
            .collect();
        ChainSpec::new(units, moves)
    }

    pub fn units(&self) -> &[UnitSpace] {
        &self.units
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn states(&self) -> Result<u64> {
        let mut n: u64 = 1;
        for u in &self.units {
            n = n
                .checked_mul(u.outcomes() as u64)
                .filter(|&n| n <= SPARSE_STATE_CAP)
                .ok_or(Error::SizeCap {
                    what: "state space",
                    size: u64::MAX,
                    cap: SPARSE_STATE_CAP,
                })?;
        }
        Ok(n)
    }

    pub fn build(&self) -> Result<GeneratorMatrix> {
        let n = self.states()? as usize;
        let m = self.units.len();
        let mut strides = vec![1usize; m];
        for u in 1..m {
            strides[u] = strides[u - 1] * self.units[u - 1].outcomes();
        }
        let digit = |s: usize, u: usize| (s / strides[u]) % self.units[u].outcomes();

        let mut weights = vec![1.0; n];
        for (s, w) in weights.iter_mut().enumerate() {
            for (u, unit) in self.units.iter().enumerate() {
                *w *= unit.weights[digit(s, u)];
            }
        }

        // Block outcome tables: for each move, every joint outcome of its
        // block as (offset, weight).
        let tables: Vec<Vec<(usize, f64)>> = self
            .moves
            .iter()
            .map(|mv| {
                let mut out = vec![(0usize, 1.0f64)];
                for &u in &mv.block {
                    let unit = &self.units[u];
                    let stride = strides[u];
                    out = out
                        .iter()
                        .flat_map(|&(off, w)| {
                            (0..unit.outcomes()).map(move |k| (off + k * stride, w * unit.weights[k]))
                        })
                        .collect();
                }
                out
            })
            .collect();

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols: Vec<u32> = Vec::new();
        let mut rates: Vec<f64> = Vec::new();
        let mut sym: Vec<f64> = Vec::new();
        let mut diag = vec![0.0; n];
        let mut row: Vec<(u32, f64, f64)> = Vec::new();
        row_ptr.push(0);
        for s in 0..n {
            row.clear();
            let mut exit = 0.0;
            for (mv, table) in self.moves.iter().zip(&tables) {
                let legal = mv.unconstrained
                    || mv
                        .facilitators
                        .iter()
                        .any(|&f| self.units[f].facilitating[digit(s, f)]);
                if !legal {
                    continue;
                }
                let mut base = s;
                let mut cur_offset = 0;
                let mut cur_w = 1.0;
                for &u in &mv.block {
                    let k = digit(s, u);
                    base -= k * strides[u];
                    cur_offset += k * strides[u];
                    cur_w *= self.units[u].weights[k];
                }
                for &(off, w) in table {
                    if off == cur_offset {
                        continue;
                    }
                    row.push(((base + off) as u32, w, (cur_w * w).sqrt()));
                }
                exit += 1.0 - cur_w;
            }
            row.sort_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let (c, mut r, mut y) = row[i];
                let mut j = i + 1;
                while j < row.len() && row[j].0 == c {
                    r += row[j].1;
                    y += row[j].2;
                    j += 1;
                }
                cols.push(c);
                rates.push(r);
                sym.push(y);
                i = j;
            }
            diag[s] = -exit;
            row_ptr.push(cols.len());
        }
        Ok(GeneratorMatrix {
            n,
            weights,
            row_ptr,
            cols,
            rates,
            sym,
            diag,
        })
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("q = {q} must lie in (0,1)")))
    }
}

/// Sparse generator `L` over an enumerated state space, stored row-wise,
/// together with its symmetrisation `D^{1/2} L D^{-1/2}` (`D = diag μ`).
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    n: usize,
    weights: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    rates: Vec<f64>,
    sym: Vec<f64>,
    diag: Vec<f64>,
}

impl GeneratorMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz_offdiag(&self) -> usize {
        self.cols.len()
    }

    /// Stationary weights `μ`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries of row `s`: `(column, rate, symmetrised value)`.
    pub fn row(&self, s: usize) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (self.row_ptr[s]..self.row_ptr[s + 1]).map(|k| (self.cols[k] as usize, self.rates[k], self.sym[k]))
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        if from == to {
            return self.diag[from];
        }
        let lo = self.row_ptr[from];
        let hi = self.row_ptr[from + 1];
        match self.cols[lo..hi].binary_search(&(to as u32)) {
            Ok(k) => self.rates[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Largest exit rate, an upper bound for the uniformization constant.
    pub fn max_exit_rate(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(-d))
    }

    /// Gershgorin bound on `‖L‖₂` for the symmetrised matrix.
    pub fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|s| -self.diag[s] + self.row(s).map(|(_, _, y)| y.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max_ω |Σ_ω' L(ω,ω')|`.
    pub fn row_sum_residual(&self) -> f64 {
        (0..self.n)
            .map(|s| (self.diag[s] + self.row(s).map(|(_, r, _)| r).sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }

    /// `max |μ(ω)L(ω,ω') − μ(ω')L(ω',ω)|` over stored entries.
    pub fn detailed_balance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.n {
            for (t, r, _) in self.row(s) {
                let back = self.rate(t, s);
                worst = worst.max((self.weights[s] * r - self.weights[t] * back).abs());
            }
        }
        worst
    }

    /// Connected components reachable from `start` along positive rates.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(s) = stack.pop() {
            for (t, r, _) in self.row(s) {
                if r > 0.0 && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// `y = S x` with `S` the symmetrised generator.
    pub fn apply_sym(&self, x: &[f64], y: &mut [f64]) {
        for s in 0..self.n {
            let mut acc = self.diag[s] * x[s];
            for k in self.row_ptr[s]..self.row_ptr[s + 1] {
                acc += self.sym[k] * x[self.cols[k] as usize];
            }
            y[s] = acc;
        }
    }

    /// Row vector product `y = x L` (evolution of a distribution).
    pub fn apply_left(&self, x: &[f64], y: &mut [f64]) {
        for (s, v) in y.iter_mut().enumerate() {
            *v = x[s] * self.diag[s];
        }
        for s in 0..self.n {
            let xs = x[s];
            if xs == 0.0 {
                continue;
            }
            for k in self.row_ptr[s]..self.row_ptr[s + 1] {
                y[self.cols[k] as usize] += xs * self.rates[k];
            }
        }
    }

    pub fn dense_sym(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for s in 0..self.n {
            m[(s, s)] = self.diag[s];
            for (t, _, y) in self.row(s) {
                m[(s, t)] = y;
            }
        }
        m
    }

    pub fn dense_rates(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for s in 0..self.n {
            m[(s, s)] = self.diag[s];
            for (t, r, _) in self.row(s) {
                m[(s, t)] = r;
            }
        }
        m
    }

    /// Coordinate-list text export: a JSON header line, then one
    /// `row col rate` line per non-zero (diagonal included).
    pub fn write_coo<W: Write>(&self, mut w: W, q: f64, region: Option<&Region>) -> Result<()> {
        #[derive(Serialize)]
        struct Header<'a> {
            states: usize,
            q: f64,
            region: Option<&'a [Point]>,
        }
        let header = Header {
            states: self.n,
            q,
            region: region.map(Region::sites),
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for s in 0..self.n {
            let mut entries: Vec<(usize, f64)> = self.row(s).map(|(t, r, _)| (t, r)).collect();
            entries.push((s, self.diag[s]));
            entries.sort_by_key(|e| e.0);
            for (t, r) in entries {
                writeln!(w, "{s} {t} {r}")?;
            }
        }
        Ok(())
    }
}

/// Generator of the East chain on `region` with boundary condition `σ`.
pub fn build_generator(region: &Region, sigma: &BoundaryCondition, q: f64) -> Result<GeneratorMatrix> {
    ChainSpec::east(region, sigma, q)?.build()
}
