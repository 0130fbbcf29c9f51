//! Smallest eigenpairs of positive semidefinite operators derived from a
//! symmetrised generator.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

use super::GeneratorMatrix;

/// Up to this many states the operator is materialised and diagonalised
/// densely; above it a restarted Lanczos iteration is used.
pub const DENSE_STATE_CAP: usize = 1 << 10;

const LANCZOS_BASIS: usize = 160;
const LANCZOS_RESTARTS: usize = 400;

pub(crate) trait PsdOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn norm_bound(&self) -> f64;
    fn dense(&self) -> DMatrix<f64>;
}

/// `−S + c·u uᵀ` with `u = √μ`: the stationary direction is pushed to the
/// top of the spectrum so the smallest eigenvalue is the spectral gap.
pub(crate) struct Deflated<'a> {
    pub gm: &'a GeneratorMatrix,
    pub u: Vec<f64>,
    pub shift: f64,
}

impl<'a> Deflated<'a> {
    pub fn new(gm: &'a GeneratorMatrix) -> Self {
        let u: Vec<f64> = gm.weights().iter().map(|w| w.sqrt()).collect();
        let nrm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u = u.into_iter().map(|v| v / nrm).collect();
        Deflated {
            gm,
            u,
            shift: gm.norm_bound().max(1.0),
        }
    }
}

impl PsdOperator for Deflated<'_> {
    fn dim(&self) -> usize {
        self.gm.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.gm.apply_sym(x, y);
        let c = self.shift * dot(&self.u, x);
        for (yi, ui) in y.iter_mut().zip(&self.u) {
            *yi = -*yi + c * ui;
        }
    }

    fn norm_bound(&self) -> f64 {
        self.gm.norm_bound() + self.shift
    }

    fn dense(&self) -> DMatrix<f64> {
        let mut m = -self.gm.dense_sym();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += self.shift * self.u[i] * self.u[j];
            }
        }
        m
    }
}

/// `−S` restricted to a subset of states, i.e. killed on leaving it.
pub(crate) struct Killed<'a> {
    pub gm: &'a GeneratorMatrix,
    pub states: Vec<usize>,
    pub pos: Vec<usize>,
}

impl<'a> Killed<'a> {
    pub fn new(gm: &'a GeneratorMatrix, keep: impl Fn(usize) -> bool) -> Self {
        let mut pos = vec![usize::MAX; gm.dim()];
        let mut states = Vec::new();
        for s in 0..gm.dim() {
            if keep(s) {
                pos[s] = states.len();
                states.push(s);
            }
        }
        Killed { gm, states, pos }
    }
}

impl PsdOperator for Killed<'_> {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let diag = self.gm.diagonal();
        for (i, &s) in self.states.iter().enumerate() {
            let mut acc = -diag[s] * x[i];
            for (t, _, v) in self.gm.row(s) {
                let j = self.pos[t];
                if j != usize::MAX {
                    acc -= v * x[j];
                }
            }
            y[i] = acc;
        }
    }

    fn norm_bound(&self) -> f64 {
        self.gm.norm_bound()
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let diag = self.gm.diagonal();
        let mut m = DMatrix::zeros(n, n);
        for (i, &s) in self.states.iter().enumerate() {
            m[(i, i)] = -diag[s];
            for (t, _, v) in self.gm.row(s) {
                let j = self.pos[t];
                if j != usize::MAX {
                    m[(i, j)] = -v;
                }
            }
        }
        m
    }
}

pub(crate) struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(op: &dyn PsdOperator, value: f64, v: &[f64]) -> f64 {
    let mut y = vec![0.0; v.len()];
    op.apply(v, &mut y);
    y.iter().zip(v).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt()
}

/// Smallest eigenpair. Residual target is `tol · ‖op‖`.
pub(crate) fn smallest_eigenpair(op: &dyn PsdOperator, tol: f64) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return Err(crate::error::invalid("empty operator"));
    }
    if n <= DENSE_STATE_CAP {
        let eig = SymmetricEigen::new(op.dense());
        let (k, &value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let vector: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let residual = residual(op, value, &vector);
        return Ok(Eigenpair {
            value,
            vector,
            residual,
        });
    }
    lanczos_smallest(op, tol)
}

/// All eigenvalues, ascending (dense only).
pub(crate) fn all_eigenvalues(op: &dyn PsdOperator) -> Result<Vec<f64>> {
    let n = op.dim();
    if n > DENSE_STATE_CAP {
        return Err(Error::SizeCap {
            what: "dense eigensolve",
            size: n as u64,
            cap: DENSE_STATE_CAP as u64,
        });
    }
    let mut v: Vec<f64> = SymmetricEigen::new(op.dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub(crate) fn lanczos_smallest(op: &dyn PsdOperator, tol: f64) -> Result<Eigenpair> {
    let n = op.dim();
    let bound = op.norm_bound().max(f64::MIN_POSITIVE);
    let target = tol * bound;
    let m = n.min(LANCZOS_BASIS);
    // Deterministic start vector with components in every direction.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract())
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut best: Option<Eigenpair> = None;
    let mut w = vec![0.0; n];
    for _ in 0..LANCZOS_RESTARTS {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let bn = norm(&w);
            if j + 1 == m || bn <= 1e-13 * bound {
                break;
            }
            beta.push(bn);
            basis.push(w.iter().map(|x| x / bn).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let s = eig.eigenvectors.column(idx);
        let mut x = vec![0.0; n];
        for (c, b) in s.iter().zip(&basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|xi| *xi /= nx);
        let r = residual(op, theta, &x);
        let done = r <= target || k == n;
        let pair = Eigenpair {
            value: theta,
            vector: x.clone(),
            residual: r,
        };
        if best.as_ref().is_none_or(|b| r < b.residual) {
            best = Some(pair);
        }
        if done {
            return Ok(best.unwrap());
        }
        v = x;
    }
    let b = best.unwrap();
    Err(Error::NotConverged(format!(
        "Lanczos residual {:.3e} above target {:.3e}",
        b.residual, target
    )))
}
