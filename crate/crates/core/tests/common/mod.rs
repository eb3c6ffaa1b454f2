//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles use their own exact Gaussian elimination and never call the
//! simplex kernel.

#![allow(dead_code)]

use std::sync::Arc;

use liplift_core::metric_space::PointedMetricSpace;
use liplift_core::{Matrix, Rational, Scalar, SpaceRef};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_ratio(n, 1)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Re-checks the metric axioms straight from the distance table.
pub fn independent_metric_check<S: Scalar>(space: &PointedMetricSpace<S>) -> bool {
    let n = space.len();
    let d = |i: usize, j: usize| space.distances()[(i, j)].clone();
    for i in 0..n {
        for j in 0..n {
            if d(i, j) != d(j, i) {
                return false;
            }
            if (i == j) != d(i, j).is_zero() || d(i, j) < S::zero() {
                return false;
            }
            for k in 0..n {
                if d(i, k).exceeds(&(d(i, j) + d(j, k))) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn independent_ultrametric_check<S: Scalar>(space: &PointedMetricSpace<S>) -> bool {
    let n = space.len();
    let d = |i: usize, j: usize| space.distances()[(i, j)].clone();
    (0..n).all(|x| {
        (0..n).all(|y| {
            (0..n).all(|z| {
                let (a, b) = (d(x, y), d(y, z));
                let m = if a > b { a } else { b };
                d(x, z) <= m
            })
        })
    })
}

/// Every space with at most three non-base points that the oracle suites
/// sweep: hand-built shapes plus seeded random integer-weighted metrics.
pub fn small_rational_fixtures() -> Vec<SpaceRef<Rational>> {
    let mut out = vec![
        PointedMetricSpace::singleton("0"),
        PointedMetricSpace::line(&[q(0), q(1)]).unwrap(),
        PointedMetricSpace::line(&[q(0), q(2)]).unwrap(),
        PointedMetricSpace::equilateral(3, q(1)).unwrap(),
        PointedMetricSpace::line(&[q(0), q(1), q(3)]).unwrap(),
        PointedMetricSpace::line(&[q(1), q(0), q(3)]).unwrap(),
        PointedMetricSpace::equilateral(4, Rational::from_ratio(3, 2)).unwrap(),
        PointedMetricSpace::line(&[q(0), q(1), q(2), q(5)]).unwrap(),
        PointedMetricSpace::ultrametric_cube(2, 64).unwrap(),
        star(&[q(1), q(2), q(3)]),
    ];
    let mut r = rng(11);
    for n in [3, 4, 4, 4] {
        out.push(PointedMetricSpace::random(&mut r, n).unwrap());
    }
    // Base point not at index 0.
    let labels = vec![
        "a".to_string(),
        "0".to_string(),
        "b".to_string(),
        "c".to_string(),
    ];
    let base_inside =
        PointedMetricSpace::new(labels, line_matrix(&[q(0), q(2), q(3), q(7)]), 1).unwrap();
    out.push(base_inside);
    out.into_iter().map(Arc::new).collect()
}

/// Leaves at the given distances from a hub that serves as the base.
pub fn star(arms: &[Rational]) -> PointedMetricSpace<Rational> {
    let n = arms.len() + 1;
    let mut d = Matrix::zeros(n, n);
    for i in 1..n {
        d[(0, i)] = arms[i - 1].clone();
        d[(i, 0)] = arms[i - 1].clone();
        for j in 1..n {
            if i != j {
                d[(i, j)] = arms[i - 1].clone() + arms[j - 1].clone();
            }
        }
    }
    PointedMetricSpace::new(liplift_core::metric_space::default_labels(n), d, 0).unwrap()
}

pub fn line_matrix(xs: &[Rational]) -> Matrix<Rational> {
    let n = xs.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            d[(i, j)] = (xs[i].clone() - xs[j].clone()).abs();
        }
    }
    d
}

/// Solves `A x = b` for square or tall `A` with full column rank. Returns
/// `None` if the columns are dependent or the system is inconsistent.
pub fn exact_solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        let p = (pivot_row..rows).find(|&r| !m[r][c].is_zero())?;
        m.swap(pivot_row, p);
        let pv = m[pivot_row][c].clone();
        for v in m[pivot_row].iter_mut() {
            *v = v.clone() / pv.clone();
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot = m[pivot_row].clone();
                for (v, pk) in m[r].iter_mut().zip(&pivot) {
                    *v = v.clone() - f.clone() * pk.clone();
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximum of `c . f` over `{f : f(x) - f(y) <= d(x, y)}` by enumerating every
/// vertex: each choice of `dim` tight constraints with a unique solution that
/// satisfies all the others.
pub fn vertex_enumeration_free_norm(
    space: &PointedMetricSpace<Rational>,
    c: &[Rational],
) -> Rational {
    let k = space.dim();
    if k == 0 {
        return Rational::zero();
    }
    let coord_row = |x: usize, y: usize| {
        let mut row = vec![Rational::zero(); k];
        if let Some(i) = space.coord(x) {
            row[i] = Rational::one();
        }
        if let Some(i) = space.coord(y) {
            row[i] = -Rational::one();
        }
        row
    };
    let constraints: Vec<(Vec<Rational>, Rational)> = space
        .pair_set()
        .iter()
        .map(|(x, y)| (coord_row(x, y), space.d(x, y).clone()))
        .collect();
    let mut best: Option<Rational> = None;
    for subset in subsets(constraints.len(), k) {
        let a: Vec<_> = subset.iter().map(|&i| constraints[i].0.clone()).collect();
        let b: Vec<_> = subset.iter().map(|&i| constraints[i].1.clone()).collect();
        let Some(f) = exact_solve(&a, &b) else {
            continue;
        };
        let feasible = constraints.iter().all(|(row, h)| {
            let lhs = row
                .iter()
                .zip(&f)
                .fold(Rational::zero(), |acc, (g, v)| acc + g * v);
            lhs <= *h
        });
        if !feasible {
            continue;
        }
        let value = c
            .iter()
            .zip(&f)
            .fold(Rational::zero(), |acc, (x, y)| acc + x * y);
        if best.as_ref().is_none_or(|b| value > *b) {
            best = Some(value);
        }
    }
    best.expect("the Lipschitz ball is a nonempty polytope")
}

/// Minimum of `sum |x_j|` subject to `A x = b` by exhaustive search: for each
/// sign pattern `s`, the minimum of `sum y` over `{y >= 0 : A diag(s) y = b}`
/// is attained at a basic feasible solution, so enumerate every column
/// support with independent columns. `None` when infeasible.
pub fn sign_pattern_min_l1(a: &Matrix<Rational>, b: &[Rational]) -> Option<Rational> {
    let (m, n) = (a.rows(), a.cols());
    assert!(
        n <= 8,
        "exhaustive search is exponential in the column count"
    );
    let mut best: Option<Rational> = None;
    for pattern in 0u32..(1 << n) {
        let sign = |j: usize| {
            if pattern >> j & 1 == 1 {
                -Rational::one()
            } else {
                Rational::one()
            }
        };
        for k in 0..=m.min(n) {
            for support in subsets(n, k) {
                let value = if k == 0 {
                    if b.iter().all(Zero::is_zero) {
                        Rational::zero()
                    } else {
                        continue;
                    }
                } else {
                    let cols: Vec<Vec<Rational>> = (0..m)
                        .map(|i| {
                            support
                                .iter()
                                .map(|&j| a[(i, j)].clone() * sign(j))
                                .collect()
                        })
                        .collect();
                    let Some(y) = exact_solve(&cols, b) else {
                        continue;
                    };
                    if y.iter().any(Signed::is_negative) {
                        continue;
                    }
                    y.iter().fold(Rational::zero(), |acc, v| acc + v)
                };
                if best.as_ref().is_none_or(|bst| value < *bst) {
                    best = Some(value);
                }
            }
        }
    }
    best
}

/// Molecule matrix restricted to unordered pairs `x < y`; since
/// `m_yx = -m_xy`, its minimum-ℓ¹ values match the full ordered one.
pub fn unordered_molecule_matrix(space: &PointedMetricSpace<Rational>) -> Matrix<Rational> {
    let pairs: Vec<(usize, usize)> = space.pair_set().iter().filter(|(x, y)| x < y).collect();
    let mut a = Matrix::zeros(space.dim(), pairs.len());
    for (col, &(x, y)) in pairs.iter().enumerate() {
        let w = Rational::one() / space.d(x, y).clone();
        if let Some(c) = space.coord(x) {
            a[(c, col)] = w.clone();
        }
        if let Some(c) = space.coord(y) {
            a[(c, col)] = -w;
        }
    }
    a
}
