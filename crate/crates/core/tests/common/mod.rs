//! Oracles shared by the integration tests. Nothing here calls into the
//! generator, eigen or uniformization code of the library.

#![allow(dead_code)]

use eastlab::lattice::Point;
use nalgebra::DMatrix;

/// `exp(A)` by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(s);
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Dense East generator on `sites` (ranked in the given order) with
/// boundary value `sigma(y)` at points outside the set. Built directly from
/// the definition of the constraint.
pub fn east_generator(sites: &[Point], q: f64, sigma: impl Fn(&Point) -> u8) -> DMatrix<f64> {
    let n = sites.len();
    let dim = 1usize << n;
    let mut l = DMatrix::zeros(dim, dim);
    let rank = |y: &Point| sites.iter().position(|s| s == y);
    for s in 0..dim {
        for (i, x) in sites.iter().enumerate() {
            let mut ok = x.coords().iter().all(|&c| c == 0);
            for axis in 0..x.dim() {
                if x.coords()[axis] == 0 {
                    continue;
                }
                let mut c = x.coords().to_vec();
                c[axis] -= 1;
                let y = Point::new(c);
                let vacant = match rank(&y) {
                    Some(j) => (s >> j) & 1 == 0,
                    None => sigma(&y) == 0,
                };
                ok |= vacant;
            }
            if !ok {
                continue;
            }
            let rate = if (s >> i) & 1 == 1 { q } else { 1.0 - q };
            l[(s, s ^ (1 << i))] += rate;
            l[(s, s)] -= rate;
        }
    }
    l
}

/// Product Bernoulli weights, bit `1` with probability `1 − q`.
pub fn product_weights(n: usize, q: f64) -> Vec<f64> {
    (0..1usize << n)
        .map(|s| {
            let ones = s.count_ones() as i32;
            (1.0 - q).powi(ones) * q.powi(n as i32 - ones)
        })
        .collect()
}

/// Law at time `t` from `pi0` via the matrix exponential.
pub fn law_at(l: &DMatrix<f64>, pi0: &[f64], t: f64) -> Vec<f64> {
    let p = expm(&(l * t));
    let row = DMatrix::from_row_slice(1, pi0.len(), pi0) * p;
    row.iter().copied().collect()
}

/// `P(τ_A > t)`: generator restricted to the complement of `absorbing`.
pub fn survival(l: &DMatrix<f64>, pi0: &[f64], absorbing: &[bool], t: f64) -> f64 {
    let keep: Vec<usize> = (0..l.nrows()).filter(|&i| !absorbing[i]).collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| l[(keep[i], keep[j])]);
    let p = expm(&(sub * t));
    keep.iter()
        .enumerate()
        .map(|(i, &s)| pi0[s] * p.row(i).sum())
        .sum()
}

pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((((i + 1) as f64) / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample statistic.
pub fn ks_two_sample_p(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Piecewise-linear interpolation on a sorted grid, clamped at the ends.
pub fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    match grid.partition_point(|&g| g < x) {
        k if k == grid.len() => *values.last().unwrap(),
        0 => values[0],
        k => {
            let w = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
            values[k - 1] + w * (values[k] - values[k - 1])
        }
    }
}
